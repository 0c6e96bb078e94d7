use rayon::prelude::*;

use crate::error::{Error, Result};

use super::GaussianMixture;

/// Quadrature value of `∫|f − g|` and a bound on its error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub distance: f64,
    /// `|I_h − I_{2h}|` plus the mass of `f` and `g` outside the box.
    pub error_estimate: f64,
}

const SPREAD: f64 = 8.0;

/// `∫|f − g|` by the midpoint rule on a box covering `±8σ` of every component
/// of either mixture, with `resolution` nodes per axis. Only `d ≤ 3`.
pub fn mixture_l1_distance(
    f: &GaussianMixture,
    g: &GaussianMixture,
    resolution: usize,
) -> Result<QuadratureEstimate> {
    if f.d() != g.d() {
        return Err(Error::DimensionMismatch(format!(
            "mixtures have dimensions {} and {}",
            f.d(),
            g.d()
        )));
    }
    let d = f.d();
    if d > 3 {
        return Err(Error::QuadratureUnsupported(d));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    let bounds: Vec<(f64, f64)> = (0..d)
        .map(|axis| {
            f.components()
                .iter()
                .chain(g.components())
                .map(|c| {
                    let m = c.gaussian.mean()[axis];
                    let s = c.gaussian.var()[axis].sqrt();
                    (m - SPREAD * s, m + SPREAD * s)
                })
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                    (lo.min(a), hi.max(b))
                })
        })
        .collect();

    let fine = midpoint(f, g, &bounds, resolution);
    let coarse = midpoint(f, g, &bounds, (resolution / 2).max(1));
    let tails = outside_mass(f, &bounds) + outside_mass(g, &bounds);
    Ok(QuadratureEstimate {
        distance: fine,
        error_estimate: (fine - coarse).abs() + tails,
    })
}

fn midpoint(f: &GaussianMixture, g: &GaussianMixture, bounds: &[(f64, f64)], res: usize) -> f64 {
    let d = bounds.len();
    let h: Vec<f64> = bounds.iter().map(|&(lo, hi)| (hi - lo) / res as f64).collect();
    let cell: f64 = h.iter().product();
    let total = res.pow(d as u32);
    let sum: f64 = (0..res)
        .into_par_iter()
        .map(|outer| {
            let inner = total / res;
            let mut x = vec![0.0; d];
            let mut acc = 0.0;
            for j in 0..inner {
                let mut idx = outer * inner + j;
                for axis in (0..d).rev() {
                    let t = idx % res;
                    idx /= res;
                    x[axis] = bounds[axis].0 + (t as f64 + 0.5) * h[axis];
                }
                acc += (f.pdf(&x) - g.pdf(&x)).abs();
            }
            acc
        })
        .sum();
    sum * cell
}

fn outside_mass(mix: &GaussianMixture, bounds: &[(f64, f64)]) -> f64 {
    let inside: f64 = mix
        .components()
        .iter()
        .map(|c| {
            c.weight
                * bounds
                    .iter()
                    .enumerate()
                    .map(|(axis, &(lo, hi))| c.gaussian.axis_mass(axis, lo, hi))
                    .product::<f64>()
        })
        .sum();
    (1.0 - inside).max(0.0)
}
