//! Full-batch resilient backpropagation with weight backtracking (iRPROP+).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{NetworkWeights, Scratch};
use crate::activations::Activation;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Stop once `max_k |dE/dw_k|` falls below this.
    pub grad_tol: f64,
    pub delta0: f64,
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Half-width of the uniform initialisation; `None` uses `1 / sqrt(p + 1)`.
    pub init_scale: Option<f64>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 10_000,
            grad_tol: 1e-5,
            delta0: 0.1,
            eta_plus: 1.2,
            eta_minus: 0.5,
            delta_min: 1e-6,
            delta_max: 50.0,
            init_scale: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrainConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(0.0 < self.eta_minus && self.eta_minus < 1.0 && 1.0 < self.eta_plus) {
            return bad(format!(
                "RPROP factors need 0 < eta_minus < 1 < eta_plus, got {} and {}",
                self.eta_minus, self.eta_plus
            ));
        }
        if !(0.0 < self.delta_min && self.delta_min <= self.delta0 && self.delta0 <= self.delta_max)
        {
            return bad(format!(
                "RPROP steps need 0 < delta_min <= delta0 <= delta_max, got {} / {} / {}",
                self.delta_min, self.delta0, self.delta_max
            ));
        }
        if !(self.grad_tol >= 0.0) {
            return bad(format!(
                "grad_tol must be non-negative, got {}",
                self.grad_tol
            ));
        }
        if let Some(s) = self.init_scale {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("init_scale must be positive, got {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrace {
    /// Loss `1/2 sum (z - y)^2` at the start of every epoch.
    pub losses: Vec<f64>,
    pub converged: bool,
    pub final_max_grad: f64,
}

impl TrainTrace {
    pub fn epochs(&self) -> usize {
        self.losses.len()
    }

    pub fn final_loss(&self) -> f64 {
        self.losses.last().copied().unwrap_or(f64::NAN)
    }
}

pub fn train_rprop(
    xs: &[Vec<f64>],
    ys: &[f64],
    h1: usize,
    activation: Activation,
    cfg: &TrainConfig,
) -> Result<(NetworkWeights, TrainTrace)> {
    cfg.validate()?;
    if xs.is_empty() {
        return Err(Error::InvalidArgument(
            "training needs at least one sample".into(),
        ));
    }
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            context: "training targets",
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    let p = xs[0].len();
    let mut net = NetworkWeights::zeros(p, h1, activation)?;
    for x in xs {
        net.check_input(x)?;
    }
    if xs.iter().flatten().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training data"));
    }

    let scale = cfg.init_scale.unwrap_or(1.0 / ((p + 1) as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for w in net.w.iter_mut().chain(net.v.iter_mut()) {
        *w = rng.random_range(-scale..=scale);
    }

    let n_params = net.num_params();
    let n_w = net.w.len();
    let mut grad = vec![0.0; n_params];
    let mut prev_grad = vec![0.0; n_params];
    let mut prev_step = vec![0.0; n_params];
    let mut delta = vec![cfg.delta0; n_params];
    let mut prev_loss = f64::INFINITY;
    let mut scratch = Scratch::new(h1);
    let mut losses = Vec::with_capacity(cfg.max_epochs.min(100_000));
    let mut converged = false;
    let mut max_grad = f64::INFINITY;

    for epoch in 0..cfg.max_epochs {
        let loss = net.accumulate_gradient(xs, ys, &mut grad, &mut scratch);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
        losses.push(loss);
        max_grad = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if max_grad < cfg.grad_tol {
            converged = true;
            break;
        }
        let increased = loss > prev_loss;
        for k in 0..n_params {
            let g = grad[k];
            let param = if k < n_w {
                &mut net.w[k]
            } else {
                &mut net.v[k - n_w]
            };
            let agreement = prev_grad[k] * g;
            if agreement > 0.0 {
                delta[k] = (delta[k] * cfg.eta_plus).min(cfg.delta_max);
                let step = -g.signum() * delta[k];
                *param += step;
                prev_step[k] = step;
                prev_grad[k] = g;
            } else if agreement < 0.0 {
                delta[k] = (delta[k] * cfg.eta_minus).max(cfg.delta_min);
                if increased {
                    *param -= prev_step[k];
                }
                prev_step[k] = 0.0;
                prev_grad[k] = 0.0;
            } else {
                let step = if g == 0.0 {
                    0.0
                } else {
                    -g.signum() * delta[k]
                };
                *param += step;
                prev_step[k] = step;
                prev_grad[k] = g;
            }
        }
        prev_loss = loss;
    }

    if net.w.iter().chain(&net.v).any(|w| !w.is_finite()) {
        return Err(Error::NonFiniteLoss {
            epoch: losses.len(),
        });
    }
    Ok((
        net,
        TrainTrace {
            losses,
            converged,
            final_max_grad: max_grad,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_data(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let ys = xs.iter().map(|x| 0.3 + 1.5 * x[0] - 0.7 * x[1]).collect();
        (xs, ys)
    }

    #[test]
    fn fits_linear_function_with_linear_unit() {
        let (xs, ys) = linear_data(60);
        let (net, trace) =
            train_rprop(&xs, &ys, 1, Activation::Linear, &TrainConfig::with_seed(1)).unwrap();
        let mse: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (net.forward(x).unwrap() - y).powi(2))
            .sum::<f64>()
            / xs.len() as f64;
        assert!(mse <= 1e-6, "mse {mse}, epochs {}", trace.epochs());
    }

    #[test]
    fn same_seed_same_weights() {
        let (xs, ys) = linear_data(40);
        let cfg = TrainConfig {
            max_epochs: 500,
            ..TrainConfig::with_seed(9)
        };
        let (a, ta) = train_rprop(&xs, &ys, 3, Activation::Softplus, &cfg).unwrap();
        let (b, tb) = train_rprop(&xs, &ys, 3, Activation::Softplus, &cfg).unwrap();
        let bits = |n: &NetworkWeights| n.params().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(ta, tb);
        let (c, _) = train_rprop(
            &xs,
            &ys,
            3,
            Activation::Softplus,
            &TrainConfig { seed: 10, ..cfg },
        )
        .unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn reduces_loss_on_nonlinear_target() {
        let (xs, _) = linear_data(80);
        let ys: Vec<f64> = xs.iter().map(|x| x[0] * x[0] - 0.5 * x[0] * x[1]).collect();
        let cfg = TrainConfig {
            max_epochs: 2000,
            ..TrainConfig::with_seed(2)
        };
        let (_, trace) = train_rprop(&xs, &ys, 4, Activation::Tanh, &cfg).unwrap();
        assert!(
            trace.final_loss() < 0.05 * trace.losses[0],
            "{} -> {}",
            trace.losses[0],
            trace.final_loss()
        );
    }

    #[test]
    fn rejects_bad_config_and_data() {
        let (xs, ys) = linear_data(10);
        let bad = TrainConfig {
            eta_minus: 1.5,
            ..Default::default()
        };
        assert!(train_rprop(&xs, &ys, 2, Activation::Tanh, &bad).is_err());
        let bad = TrainConfig {
            delta0: 100.0,
            ..Default::default()
        };
        assert!(train_rprop(&xs, &ys, 2, Activation::Tanh, &bad).is_err());
        assert!(train_rprop(&[], &[], 2, Activation::Tanh, &TrainConfig::default()).is_err());
        assert!(train_rprop(&xs, &ys[..5], 2, Activation::Tanh, &TrainConfig::default()).is_err());
    }

    #[test]
    fn non_finite_loss_names_epoch() {
        let xs = vec![vec![1e200], vec![-1e200]];
        let ys = vec![1e300, -1e300];
        match train_rprop(&xs, &ys, 1, Activation::Linear, &TrainConfig::default()) {
            Err(Error::NonFiniteLoss { epoch }) => assert_eq!(epoch, 0),
            other => panic!("expected divergence error, got {other:?}"),
        }
    }
}
