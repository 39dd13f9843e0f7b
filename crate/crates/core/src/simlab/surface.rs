//! Evaluation grids for two-variable polynomials.

use std::io::Write;

use crate::error::{Error, Result};
use crate::numfmt::sig17;
use crate::poly::Polynomial;

/// Enlargement of the data box used for the extrapolation view.
pub const EXTENDED_FACTOR: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds2 {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl Bounds2 {
    /// Bounding box of the first two columns.
    pub fn of_data(xs: &[Vec<f64>]) -> Result<Bounds2> {
        if xs.is_empty() || xs.iter().any(|r| r.len() != 2) {
            return Err(Error::InvalidArgument(
                "surface bounds need non-empty two-column data".into(),
            ));
        }
        let span = |i: usize| {
            xs.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[i]), hi.max(r[i]))
                })
        };
        Ok(Bounds2 {
            x1: span(0),
            x2: span(1),
        })
    }

    /// Same center, each side scaled by `factor`.
    pub fn enlarged(&self, factor: f64) -> Bounds2 {
        let grow = |(lo, hi): (f64, f64)| {
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo) * factor;
            (c - h, c + h)
        };
        Bounds2 {
            x1: grow(self.x1),
            x2: grow(self.x2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub x1: f64,
    pub x2: f64,
    pub z: f64,
}

/// `resolution x resolution` grid, row-major with `x1` as the row index.
pub fn surface_grid(
    poly: &Polynomial,
    bounds: &Bounds2,
    resolution: usize,
) -> Result<Vec<SurfacePoint>> {
    if poly.p() != 2 {
        return Err(Error::DimensionMismatch {
            context: "surface polynomial variables",
            expected: 2,
            actual: poly.p(),
        });
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "surface resolution must be >= 2, got {resolution}"
        )));
    }
    let at = |(lo, hi): (f64, f64), k: usize| lo + (hi - lo) * k as f64 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let x1 = at(bounds.x1, i);
        for j in 0..resolution {
            let x2 = at(bounds.x2, j);
            out.push(SurfacePoint {
                x1,
                x2,
                z: poly.evaluate(&[x1, x2])?,
            });
        }
    }
    Ok(out)
}

/// Largest `|a.z - b.z|` over two grids built on the same bounds.
pub fn max_abs_difference(a: &[SurfacePoint], b: &[SurfacePoint]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p.z - q.z).abs())
        .fold(0.0, f64::max)
}

pub fn write_surface<W: Write>(points: &[SurfacePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x1", "x2", "z"])?;
    for p in points {
        w.write_record([sig17(p.x1), sig17(p.x2), sig17(p.z)])?;
    }
    w.flush().map_err(|e| Error::io("surface table", e))?;
    Ok(())
}
