use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::ColumnOracle;
use crate::system::SparseVec;

use super::cells::CellTable;
use super::gaussian::AxisGaussian;
use super::partition::AxisPartitions;
use super::Samples;

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub gaussian: AxisGaussian,
    /// Mass of the Gaussian on each row of `S′`; row 0 (`U`) takes whatever
    /// the heavy cells do not.
    pub column: SparseVec,
}

/// Good candidate Gaussians together with the target they are fitted to.
/// Candidate ids are positions in [`candidates`](Self::candidates).
#[derive(Clone, Debug)]
pub struct CandidateSet {
    candidates: Vec<Candidate>,
    target: Vec<f64>,
    pub bound: f64,
}

impl CandidateSet {
    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn get(&self, id: usize) -> Option<&Candidate> {
        self.candidates.get(id)
    }
}

impl ColumnOracle for CandidateSet {
    fn target(&self) -> &[f64] {
        &self.target
    }

    fn len(&self) -> usize {
        self.candidates.len()
    }

    fn column_at(&self, pos: usize) -> (usize, &SparseVec) {
        (pos, &self.candidates[pos].column)
    }
}

/// The Gaussian with mean `x` and per-axis variance `(x_i − y_i)²`, or `None`
/// when some coordinate difference vanishes.
fn pair_gaussian(x: &[f64], y: &[f64]) -> Option<AxisGaussian> {
    let var: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).collect();
    if var.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    AxisGaussian::new(x.to_vec(), var).ok()
}

/// Every ordered sample pair yields a candidate; pairs with a zero coordinate
/// difference are skipped, duplicates removed, and only candidates whose
/// every axis-interval mass is at most `bound` are kept.
pub fn gen_candidates(
    samples: &Samples,
    parts: &AxisPartitions,
    bound: f64,
    table: &CellTable,
) -> Result<CandidateSet> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(
            "candidate generation needs at least two samples".into(),
        ));
    }
    if samples.d() != parts.d() {
        return Err(Error::DimensionMismatch(format!(
            "samples have dimension {}, partitions {}",
            samples.d(),
            parts.d()
        )));
    }
    let mut seen = HashSet::new();
    let mut unique = Vec::new();
    for i in 0..samples.len() {
        for j in 0..samples.len() {
            if i == j {
                continue;
            }
            if let Some(g) = pair_gaussian(samples.row(i), samples.row(j)) {
                let key: Vec<u64> = g.mean().iter().chain(g.var()).map(|v| v.to_bits()).collect();
                if seen.insert(key) {
                    unique.push(g);
                }
            }
        }
    }

    let candidates: Vec<Candidate> = unique
        .into_par_iter()
        .filter_map(|g| candidate_column(g, parts, bound, table))
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoGoodCandidates);
    }
    Ok(CandidateSet {
        candidates,
        target: table.b.clone(),
        bound,
    })
}

fn candidate_column(
    g: AxisGaussian,
    parts: &AxisPartitions,
    bound: f64,
    table: &CellTable,
) -> Option<Candidate> {
    let mut masses = Vec::with_capacity(parts.d());
    for axis in 0..parts.d() {
        let mut axis_masses = Vec::with_capacity(parts.num_intervals(axis));
        for t in 0..parts.num_intervals(axis) {
            let (lo, hi) = parts.interval(axis, t);
            let m = g.axis_mass(axis, lo, hi);
            if m > bound {
                return None;
            }
            axis_masses.push(m);
        }
        masses.push(axis_masses);
    }
    let heavy: Vec<f64> = table
        .heavy_keys()
        .map(|key| key.iter().enumerate().map(|(a, &t)| masses[a][t]).product())
        .collect();
    let junk = (1.0 - heavy.iter().sum::<f64>()).max(0.0);
    let entries: Vec<(usize, f64)> = std::iter::once(junk)
        .chain(heavy)
        .enumerate()
        .filter(|&(_, v)| v > 0.0)
        .collect();
    Some(Candidate {
        gaussian: g,
        column: SparseVec::from_sorted_unchecked(entries),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_rule() {
        let g = pair_gaussian(&[0.0], &[2.0]).unwrap();
        assert_eq!(g.mean(), &[0.0]);
        assert_eq!(g.var(), &[4.0]);
        let h = pair_gaussian(&[2.0], &[0.0]).unwrap();
        assert_eq!(h.mean(), &[2.0]);
        assert_eq!(h.var(), &[4.0]);
    }

    #[test]
    fn equal_coordinate_pair_is_skipped() {
        assert!(pair_gaussian(&[1.0, 3.0], &[2.0, 3.0]).is_none());
    }
}
