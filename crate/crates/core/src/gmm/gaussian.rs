use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

use super::partition::AxisPartitions;

/// Axis-aligned Gaussian `N(μ, diag σ²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisGaussian {
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl AxisGaussian {
    pub fn new(mean: Vec<f64>, var: Vec<f64>) -> Result<Self> {
        if mean.len() != var.len() || mean.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "mean has {} coordinates, variance has {}",
                mean.len(),
                var.len()
            )));
        }
        if let Some(v) = var.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "variances must be positive and finite, got {v}"
            )));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameter("means must be finite".into()));
        }
        Ok(AxisGaussian { mean, var })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.mean.iter().zip(&self.var))
            .map(|(&xi, (&m, &v))| normal_pdf(xi, m, v))
            .product()
    }

    /// Marginal mass of axis `axis` on the interval `(lo, hi]`.
    pub fn axis_mass(&self, axis: usize, lo: f64, hi: f64) -> f64 {
        interval_mass(self.mean[axis], self.var[axis], lo, hi)
    }
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z2 = (x - mean) * (x - mean) / var;
    (-0.5 * z2).exp() / (2.0 * PI * var).sqrt()
}

/// Standard normal upper tail `P(Z > z)`.
pub fn upper_tail(z: f64) -> f64 {
    if z == f64::INFINITY {
        0.0
    } else if z == f64::NEG_INFINITY {
        1.0
    } else {
        0.5 * erfc(z / SQRT_2)
    }
}

/// `P(lo < X ≤ hi)` for `X ~ N(mean, var)`.
///
/// Both endpoints on the same side of the mean are differenced in the tail
/// that is small there, so far-tail masses keep relative accuracy.
pub fn interval_mass(mean: f64, var: f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let sd = var.sqrt();
    let zl = (lo - mean) / sd;
    let zh = (hi - mean) / sd;
    let p = if zl >= 0.0 {
        upper_tail(zl) - upper_tail(zh)
    } else if zh <= 0.0 {
        upper_tail(-zh) - upper_tail(-zl)
    } else {
        1.0 - upper_tail(zh) - upper_tail(-zl)
    };
    p.max(0.0)
}

/// Probability of the box `Π_i (lo_i, hi_i]` under `g`.
pub fn gaussian_cell_prob(g: &AxisGaussian, cell: &[(f64, f64)]) -> f64 {
    assert_eq!(cell.len(), g.dim(), "cell dimension must match the Gaussian");
    cell.iter()
        .enumerate()
        .map(|(i, &(lo, hi))| g.axis_mass(i, lo, hi))
        .product()
}

/// True iff every interval of every axis carries marginal mass at most
/// `bound` under `g`.
pub fn is_good(g: &AxisGaussian, parts: &AxisPartitions, bound: f64) -> bool {
    (0..parts.d()).all(|axis| {
        (0..parts.num_intervals(axis)).all(|t| {
            let (lo, hi) = parts.interval(axis, t);
            g.axis_mass(axis, lo, hi) <= bound
        })
    })
}

/// `‖p − p^I‖₁` for a 1-d Gaussian and the partition given by sorted
/// `boundaries` (outer intervals unbounded).
///
/// On a bounded interval with mass `P` and length `L` the flattened density is
/// `c = P/L`; since both integrate to `P`, `∫|p − c| = 2∫(p − c)₊`, and
/// `{p > c}` is the symmetric window `|x − μ| < r` with
/// `r² = −2σ² ln(cσ√(2π))`, so the integral is closed form in the CDF.
/// An unbounded interval has no flat density and contributes `2·P`.
pub fn flatten_distance_1d(mean: f64, var: f64, boundaries: &[f64]) -> f64 {
    let sd = var.sqrt();
    let mut total = 0.0;
    let n = boundaries.len();
    for t in 0..=n {
        let lo = if t == 0 { f64::NEG_INFINITY } else { boundaries[t - 1] };
        let hi = if t == n { f64::INFINITY } else { boundaries[t] };
        let mass = interval_mass(mean, var, lo, hi);
        if !lo.is_finite() || !hi.is_finite() {
            total += 2.0 * mass;
            continue;
        }
        let len = hi - lo;
        let level = mass / len;
        let peak_ratio = level * sd * (2.0 * PI).sqrt();
        if !(peak_ratio < 1.0) || level <= 0.0 {
            continue;
        }
        let r = sd * (-2.0 * peak_ratio.ln()).sqrt();
        let a = lo.max(mean - r);
        let b = hi.min(mean + r);
        if b > a {
            let excess = interval_mass(mean, var, a, b) - level * (b - a);
            total += 2.0 * excess.max(0.0);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std1() -> AxisGaussian {
        AxisGaussian::new(vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn half_line_is_half() {
        assert!((gaussian_cell_prob(&std1(), &[(f64::NEG_INFINITY, 0.0)]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quadrant_is_quarter() {
        let g = AxisGaussian::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let p = gaussian_cell_prob(&g, &[(f64::NEG_INFINITY, 0.0), (f64::NEG_INFINITY, 0.0)]);
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn far_tail_keeps_relative_accuracy() {
        // P(Z > 10) = 7.619853024160527e-24
        let p = interval_mass(0.0, 1.0, 10.0, f64::INFINITY);
        assert!((p / 7.619853024160527e-24 - 1.0).abs() < 1e-10);
        let q = interval_mass(0.0, 1.0, f64::NEG_INFINITY, -10.0);
        assert_eq!(p, q);
    }

    #[test]
    fn goodness_edges() {
        let parts = AxisPartitions::new(vec![vec![]]).unwrap();
        assert!(is_good(&std1(), &parts, 1.0));
        assert!(!is_good(&std1(), &parts, 0.1));
    }

    #[test]
    fn rejects_bad_variances() {
        assert!(AxisGaussian::new(vec![0.0], vec![-1.0]).is_err());
        assert!(AxisGaussian::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
