//! Learning axis-aligned Gaussian mixtures through the sparse solver.
//!
//! The pipeline splits `2n` samples in half. The first half fixes
//! equal-frequency intervals on every axis; the second half counts samples in
//! the induced grid cells, light cells are pooled into a junk cell `U`, and the
//! resulting histogram becomes the target `b`. Candidate Gaussians are built
//! from sample pairs, filtered for goodness against the intervals, and the
//! solver picks a sparse nonnegative combination of them.

mod candidates;
mod cells;
mod eval;
mod gaussian;
mod learn;
mod partition;
mod sampling;

pub use candidates::{gen_candidates, Candidate, CandidateSet};
pub use cells::{coarsen_and_target, CellTable};
pub use eval::{mixture_l1_distance, QuadratureEstimate};
pub use gaussian::{
    flatten_distance_1d, gaussian_cell_prob, interval_mass, is_good, normal_pdf, upper_tail,
    AxisGaussian,
};
pub use learn::{learn, LearnOptions, LearnOutcome, DEFAULT_CANDIDATE_SAMPLES};
pub use partition::{bin_counts, build_axis_partitions, AxisPartitions, CellKey};
pub use sampling::sample_mixture;

use crate::error::{Error, Result};

/// Row-major `n × d` sample matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    d: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not form rows of length {d}",
                data.len()
            )));
        }
        Ok(Samples { d, data })
    }

    pub fn from_rows(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} values, expected {d}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Samples::new(d, data)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Rows `range` as a new sample set.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Samples {
        Samples {
            d: self.d,
            data: self.data[range.start * self.d..range.end * self.d].to_vec(),
        }
    }

    pub fn select(&self, indices: &[usize]) -> Samples {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Samples { d: self.d, data }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub gaussian: AxisGaussian,
}

/// `Σ_r w_r N(μ_r, diag σ_r²)` with `Σ w_r = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    d: usize,
    components: Vec<MixtureComponent>,
}

impl GaussianMixture {
    pub fn new(d: usize, components: Vec<MixtureComponent>) -> Result<Self> {
        if d == 0 || components.is_empty() {
            return Err(Error::InvalidParameter(
                "a mixture needs d ≥ 1 and at least one component".into(),
            ));
        }
        for (r, c) in components.iter().enumerate() {
            if c.gaussian.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "component {r} has dimension {}, expected {d}",
                    c.gaussian.dim()
                )));
            }
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "component {r} weight must be positive, got {}",
                    c.weight
                )));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(GaussianMixture { d, components })
    }

    /// Builds a mixture from `(weight, mean, variance)` triples.
    pub fn from_parts(parts: &[(f64, Vec<f64>, Vec<f64>)]) -> Result<Self> {
        let d = parts.first().map_or(0, |p| p.1.len());
        let components = parts
            .iter()
            .map(|(w, mu, var)| {
                Ok(MixtureComponent {
                    weight: *w,
                    gaussian: AxisGaussian::new(mu.clone(), var.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, components)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.gaussian.pdf(x))
            .sum()
    }
}
