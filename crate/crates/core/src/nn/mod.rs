//! Single-hidden-layer, single-output regression network with a linear
//! output unit:
//!
//! `z = v_0 + sum_j v_j g(u_j)`, `u_j = w_{0,j} + sum_i w_{i,j} x_i`.

mod io;
mod rprop;

use crate::activations::Activation;
use crate::error::{Error, Result};

pub use io::{load_weights, save_weights, WEIGHTS_FORMAT};
pub use rprop::{train_rprop, TrainConfig, TrainTrace};

/// Hard limit on hidden units.
pub const MAX_HIDDEN: usize = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkWeights {
    p: usize,
    h1: usize,
    /// `(p + 1) x h1`, row-major; row 0 holds the biases `w_{0,j}`.
    w: Vec<f64>,
    /// `h1 + 1` entries; `v[0]` is the output bias.
    v: Vec<f64>,
    activation: Activation,
}

impl NetworkWeights {
    pub fn new(
        p: usize,
        h1: usize,
        w: Vec<f64>,
        v: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if p == 0 || h1 == 0 {
            return Err(Error::InvalidArgument(format!(
                "network needs p >= 1 and h1 >= 1, got p={p} h1={h1}"
            )));
        }
        if h1 > MAX_HIDDEN {
            return Err(Error::LimitExceeded {
                what: "hidden units",
                value: h1,
                limit: MAX_HIDDEN,
            });
        }
        if w.len() != (p + 1) * h1 {
            return Err(Error::DimensionMismatch {
                context: "first-layer weights",
                expected: (p + 1) * h1,
                actual: w.len(),
            });
        }
        if v.len() != h1 + 1 {
            return Err(Error::DimensionMismatch {
                context: "output weights",
                expected: h1 + 1,
                actual: v.len(),
            });
        }
        if w.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("network weights"));
        }
        Ok(NetworkWeights {
            p,
            h1,
            w,
            v,
            activation,
        })
    }

    /// Builds weights from `(p + 1)` rows of `h1` entries.
    pub fn from_rows(w_rows: &[Vec<f64>], v: Vec<f64>, activation: Activation) -> Result<Self> {
        let p = w_rows.len().saturating_sub(1);
        let h1 = v.len().saturating_sub(1);
        if let Some(bad) = w_rows.iter().find(|r| r.len() != h1) {
            return Err(Error::DimensionMismatch {
                context: "first-layer weight row",
                expected: h1,
                actual: bad.len(),
            });
        }
        Self::new(p, h1, w_rows.concat(), v, activation)
    }

    pub fn zeros(p: usize, h1: usize, activation: Activation) -> Result<Self> {
        Self::new(
            p,
            h1,
            vec![0.0; (p + 1) * h1],
            vec![0.0; h1 + 1],
            activation,
        )
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn h1(&self) -> usize {
        self.h1
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Weight from input `i` (0 = bias) to hidden unit `j` (0-based).
    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.h1 + j]
    }

    pub fn w_flat(&self) -> &[f64] {
        &self.w
    }

    /// Output weights; index 0 is the output bias, `v[j + 1]` belongs to unit `j`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Column of unit `j`: `(w_{0,j}, w_{1,j}, ..., w_{p,j})`.
    pub fn unit_weights(&self, j: usize) -> Vec<f64> {
        (0..=self.p).map(|i| self.w(i, j)).collect()
    }

    pub fn with_activation(&self, activation: Activation) -> NetworkWeights {
        NetworkWeights {
            activation,
            ..self.clone()
        }
    }

    pub(crate) fn num_params(&self) -> usize {
        self.w.len() + self.v.len()
    }

    /// Parameters as one vector, `w` followed by `v`.
    pub fn params(&self) -> Vec<f64> {
        let mut out = self.w.clone();
        out.extend_from_slice(&self.v);
        out
    }

    pub fn with_params(&self, params: &[f64]) -> Result<NetworkWeights> {
        if params.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                context: "parameter vector",
                expected: self.num_params(),
                actual: params.len(),
            });
        }
        let (w, v) = params.split_at(self.w.len());
        Self::new(self.p, self.h1, w.to_vec(), v.to_vec(), self.activation)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.p,
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn potentials_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.w[..self.h1]);
        for (i, &xi) in x.iter().enumerate() {
            let row = &self.w[(i + 1) * self.h1..(i + 2) * self.h1];
            for (u, &wij) in out.iter_mut().zip(row) {
                *u += wij * xi;
            }
        }
    }

    /// Synaptic potentials `u_j(x)` for every hidden unit.
    pub fn potentials_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut u = vec![0.0; self.h1];
        self.potentials_into(x, &mut u);
        Ok(u)
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        let u = self.potentials_at(x)?;
        Ok(self.output_from_potentials(&u))
    }

    pub(crate) fn output_from_potentials(&self, u: &[f64]) -> f64 {
        let mut z = self.v[0];
        for (j, &uj) in u.iter().enumerate() {
            z += self.v[j + 1] * self.activation.eval(uj);
        }
        z
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.forward(x)).collect()
    }

    /// `n x h1` matrix of potentials, one row per sample.
    pub fn potentials(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.iter().map(|x| self.potentials_at(x)).collect()
    }

    /// Sum-of-squares loss `E = 1/2 sum_k (z_k - y_k)^2` and its gradient with
    /// respect to [`params`](Self::params).
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                context: "training targets",
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        for x in xs {
            self.check_input(x)?;
        }
        let mut grad = vec![0.0; self.num_params()];
        let mut scratch = Scratch::new(self.h1);
        let loss = self.accumulate_gradient(xs, ys, &mut grad, &mut scratch);
        Ok((loss, grad))
    }

    // Inputs must already be validated. Overwrites `grad`.
    pub(crate) fn accumulate_gradient(
        &self,
        xs: &[Vec<f64>],
        ys: &[f64],
        grad: &mut [f64],
        s: &mut Scratch,
    ) -> f64 {
        let h1 = self.h1;
        grad.fill(0.0);
        let (gw, gv) = grad.split_at_mut(self.w.len());
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            self.potentials_into(x, &mut s.u);
            let mut z = self.v[0];
            for j in 0..h1 {
                let (a, da) = eval_with_derivative(self.activation, s.u[j]);
                s.a[j] = a;
                s.da[j] = da;
                z += self.v[j + 1] * a;
            }
            let r = z - y;
            loss += 0.5 * r * r;
            gv[0] += r;
            for j in 0..h1 {
                gv[j + 1] += r * s.a[j];
                s.delta[j] = r * self.v[j + 1] * s.da[j];
            }
            for (g, &d) in gw[..h1].iter_mut().zip(&s.delta) {
                *g += d;
            }
            for (i, &xi) in x.iter().enumerate() {
                let row = &mut gw[(i + 1) * h1..(i + 2) * h1];
                for (g, &d) in row.iter_mut().zip(&s.delta) {
                    *g += d * xi;
                }
            }
        }
        loss
    }
}

pub(crate) struct Scratch {
    u: Vec<f64>,
    a: Vec<f64>,
    da: Vec<f64>,
    delta: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(h1: usize) -> Self {
        Scratch {
            u: vec![0.0; h1],
            a: vec![0.0; h1],
            da: vec![0.0; h1],
            delta: vec![0.0; h1],
        }
    }
}

// g(x) and g'(x) sharing the expensive exponential
#[inline]
fn eval_with_derivative(act: Activation, x: f64) -> (f64, f64) {
    match act {
        Activation::Softplus => {
            let e = (-x.abs()).exp();
            let s = if x >= 0.0 {
                1.0 / (1.0 + e)
            } else {
                e / (1.0 + e)
            };
            (x.max(0.0) + e.ln_1p(), s)
        }
        Activation::Sigmoid => {
            let e = (-x.abs()).exp();
            let s = if x >= 0.0 {
                1.0 / (1.0 + e)
            } else {
                e / (1.0 + e)
            };
            (s, s * (1.0 - s))
        }
        Activation::Tanh => {
            let t = x.tanh();
            (t, 1.0 - t * t)
        }
        Activation::Linear => (x, 1.0),
    }
}
