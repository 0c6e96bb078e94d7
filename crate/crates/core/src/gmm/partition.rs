use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

use super::Samples;

/// A grid cell: one interval index per axis.
pub type CellKey = Vec<usize>;

/// Per-axis partitions of the real line into right-closed intervals
/// `(-∞, β₀], (β₀, β₁], …, (β_{L-2}, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisPartitions {
    boundaries: Vec<Vec<f64>>,
}

impl AxisPartitions {
    /// Boundaries must be finite and strictly increasing on every axis.
    pub fn new(boundaries: Vec<Vec<f64>>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::InvalidParameter("partitions need at least one axis".into()));
        }
        for (axis, b) in boundaries.iter().enumerate() {
            if b.iter().any(|v| !v.is_finite()) || b.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidParameter(format!(
                    "boundaries on axis {axis} must be finite and strictly increasing"
                )));
            }
        }
        Ok(AxisPartitions { boundaries })
    }

    pub fn d(&self) -> usize {
        self.boundaries.len()
    }

    pub fn boundaries(&self, axis: usize) -> &[f64] {
        &self.boundaries[axis]
    }

    pub fn num_intervals(&self, axis: usize) -> usize {
        self.boundaries[axis].len() + 1
    }

    /// `(lo, hi)` of interval `t` on `axis`; the interval is `(lo, hi]`.
    pub fn interval(&self, axis: usize, t: usize) -> (f64, f64) {
        let b = &self.boundaries[axis];
        let lo = if t == 0 { f64::NEG_INFINITY } else { b[t - 1] };
        let hi = if t == b.len() { f64::INFINITY } else { b[t] };
        (lo, hi)
    }

    /// Index of the interval containing `x` (points on a boundary go left).
    pub fn locate(&self, axis: usize, x: f64) -> usize {
        self.boundaries[axis].partition_point(|&b| b < x)
    }

    pub fn cell_of(&self, x: &[f64]) -> CellKey {
        x.iter().enumerate().map(|(i, &v)| self.locate(i, v)).collect()
    }

    pub fn cell_box(&self, key: &[usize]) -> Vec<(f64, f64)> {
        key.iter()
            .enumerate()
            .map(|(axis, &t)| self.interval(axis, t))
            .collect()
    }
}

/// Equal-frequency intervals per axis with `⌊nε₁⌋` samples each; the last
/// interval absorbs the remainder. Boundaries sit at midpoints between
/// consecutive distinct order statistics, so ties may push an interval past
/// its quota.
pub fn build_axis_partitions(samples: &Samples, eps1: f64) -> Result<AxisPartitions> {
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps1 must lie in (0, 1), got {eps1}"
        )));
    }
    let n = samples.len();
    let needed = (1.0 / eps1 - 1e-9).ceil() as usize;
    if n < needed {
        return Err(Error::InsufficientSamples { needed, got: n });
    }
    let quota = ((n as f64) * eps1 + 1e-9).floor().max(1.0) as usize;
    let boundaries = (0..samples.d())
        .map(|axis| {
            let mut values: Vec<f64> = samples.rows().map(|r| r[axis]).collect();
            values.sort_by(f64::total_cmp);
            equal_frequency_boundaries(&values, quota)
        })
        .collect();
    AxisPartitions::new(boundaries)
}

fn equal_frequency_boundaries(sorted: &[f64], quota: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut out = Vec::new();
    let mut start = 0;
    loop {
        let mut pos = start + quota;
        if pos >= n {
            break;
        }
        while pos < n && sorted[pos] == sorted[pos - 1] {
            pos += 1;
        }
        if pos >= n || n - pos < quota {
            break;
        }
        out.push(0.5 * (sorted[pos - 1] + sorted[pos]));
        start = pos;
    }
    out
}

/// Number of samples in each occupied cell.
pub fn bin_counts(samples: &Samples, parts: &AxisPartitions) -> BTreeMap<CellKey, u64> {
    assert_eq!(samples.d(), parts.d(), "sample dimension must match the partitions");
    let radix: Vec<u64> = (0..parts.d()).map(|a| parts.num_intervals(a) as u64).collect();
    let mut flat: HashMap<u64, u64> = HashMap::new();
    for row in samples.rows() {
        let mut idx = 0u64;
        for (axis, &x) in row.iter().enumerate() {
            idx = idx * radix[axis] + parts.locate(axis, x) as u64;
        }
        *flat.entry(idx).or_insert(0) += 1;
    }
    flat.into_iter()
        .map(|(mut idx, count)| {
            let mut key = vec![0usize; radix.len()];
            for axis in (0..radix.len()).rev() {
                key[axis] = (idx % radix[axis]) as usize;
                idx /= radix[axis];
            }
            (key, count)
        })
        .collect()
}
