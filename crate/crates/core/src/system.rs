//! Problem representation: sparse nonnegative columns, the normalized
//! system `(A, b)` and sparse solutions.
//!
//! Normalization scales `b` to unit ℓ1 norm and every column to unit ℓ1
//! norm, so that any nonnegative exact solution has `‖x‖₁ = 1`. The scale
//! factors are kept so that solutions can be mapped back to the caller's
//! coordinates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Values in `(-NEG_CLAMP, 0)` are treated as rounding noise and clamped to zero.
pub const NEG_CLAMP: f64 = 1e-12;
/// Relative tolerance for unit-norm checks.
pub const NORM_TOL: f64 = 1e-9;

fn clamp_nonneg(row: usize, value: f64) -> Result<f64> {
    if value.is_nan() || value <= -NEG_CLAMP {
        return Err(Error::NegativeEntry { row, value });
    }
    if value.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite entry at row {row}"
        )));
    }
    Ok(value.max(0.0))
}

/// A sparse nonnegative vector stored as `(row, value)` pairs sorted by row.
/// Only strictly positive values are stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    entries: Vec<(usize, f64)>,
}

impl SparseVec {
    /// Builds a vector from arbitrary `(row, value)` pairs. Duplicate rows are
    /// summed, zeros are discarded, tiny negatives are clamped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (row, value) in pairs {
            *acc.entry(row).or_insert(0.0) += value;
        }
        let mut entries = Vec::with_capacity(acc.len());
        for (row, value) in acc {
            let v = clamp_nonneg(row, value)?;
            if v > 0.0 {
                entries.push((row, v));
            }
        }
        Ok(SparseVec { entries })
    }

    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::from_pairs(values.iter().copied().enumerate())
    }

    /// Wraps already sorted, strictly positive entries without checks.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, v)| v > 0.0));
        SparseVec { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn max_row(&self) -> Option<usize> {
        self.entries.last().map(|&(r, _)| r)
    }

    pub fn scaled(&self, factor: f64) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|&(r, v)| (r, v * factor)).collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(r, v) in &self.entries {
            out[r] = v;
        }
        out
    }
}

/// A sparse nonnegative solution: column id → positive weight.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSolution {
    entries: BTreeMap<usize, f64>,
    l1: f64,
}

impl SparseSolution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a solution from `(id, weight)` pairs; duplicate ids accumulate and
    /// non-positive weights are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut sol = SparseSolution::new();
        for (id, w) in pairs {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "solution weight for column {id} must be positive and finite, got {w}"
                )));
            }
            sol.add(id, w);
        }
        Ok(sol)
    }

    /// Adds `weight` (> 0) to column `id`.
    pub fn add(&mut self, id: usize, weight: f64) {
        assert!(weight > 0.0, "weights must be positive");
        *self.entries.entry(id).or_insert(0.0) += weight;
        self.l1 += weight;
    }

    pub fn get(&self, id: usize) -> Option<f64> {
        self.entries.get(&id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&id, &w)| (id, w))
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    /// Returns `x / ‖x‖₁`. The cached norm is recomputed from the entries.
    pub fn normalized(&self) -> SparseSolution {
        let total: f64 = self.entries.values().sum();
        let entries: BTreeMap<usize, f64> = self
            .entries
            .iter()
            .map(|(&id, &w)| (id, w / total))
            .collect();
        let l1 = entries.values().sum();
        SparseSolution { entries, l1 }
    }

    fn map_weights(&self, f: impl Fn(usize, f64) -> f64) -> SparseSolution {
        let entries: BTreeMap<usize, f64> =
            self.entries.iter().map(|(&id, &w)| (id, f(id, w))).collect();
        let l1 = entries.values().sum();
        SparseSolution { entries, l1 }
    }
}

/// An unnormalized nonnegative system as read from disk or produced by a
/// generator.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSystem {
    pub m: usize,
    pub columns: Vec<SparseVec>,
    pub b: Vec<f64>,
}

impl RawSystem {
    pub fn new(m: usize, columns: Vec<SparseVec>, b: Vec<f64>) -> Result<Self> {
        if b.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "b has {} entries but m = {m}",
                b.len()
            )));
        }
        if let Some((i, c)) = columns
            .iter()
            .enumerate()
            .find(|(_, c)| c.max_row().is_some_and(|r| r >= m))
        {
            return Err(Error::DimensionMismatch(format!(
                "column {i} has row {} >= m = {m}",
                c.max_row().unwrap_or(0)
            )));
        }
        Ok(RawSystem { m, columns, b })
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn normalize(&self) -> Result<NonnegSystem> {
        normalize_system(self.m, &self.columns, &self.b)
    }
}

/// The normalized pair `(A, b)`: `‖b‖₁ = 1`, every stored column has unit
/// ℓ1 norm, and no stored column touches a row where `b` vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegSystem {
    m: usize,
    n_original: usize,
    ids: Vec<usize>,
    columns: Vec<SparseVec>,
    b: Vec<f64>,
    col_scale: Vec<f64>,
    b_scale: f64,
    dropped_columns: Vec<usize>,
}

/// Normalizes a raw system. Column ids in the result are the positions in
/// `raw_columns`.
///
/// Columns that are zero, or that put positive mass on a row where `b` is
/// zero, are dropped and reported in [`NonnegSystem::dropped_columns`].
pub fn normalize_system(m: usize, raw_columns: &[SparseVec], raw_b: &[f64]) -> Result<NonnegSystem> {
    if raw_b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries but m = {m}",
            raw_b.len()
        )));
    }
    let b_raw: Vec<f64> = raw_b
        .iter()
        .enumerate()
        .map(|(j, &v)| clamp_nonneg(j, v))
        .collect::<Result<_>>()?;
    let b_scale: f64 = b_raw.iter().sum();
    if !(b_scale > 0.0) {
        return Err(Error::DegenerateTarget);
    }
    let b: Vec<f64> = b_raw.iter().map(|v| v / b_scale).collect();

    let mut ids = Vec::new();
    let mut columns = Vec::new();
    let mut col_scale = Vec::new();
    let mut dropped_columns = Vec::new();
    for (id, col) in raw_columns.iter().enumerate() {
        if let Some(r) = col.max_row().filter(|&r| r >= m) {
            return Err(Error::DimensionMismatch(format!(
                "column {id} has row {r} >= m = {m}"
            )));
        }
        let scale = col.l1();
        let touches_zero_row = col.entries().iter().any(|&(r, _)| b[r] == 0.0);
        if !(scale > 0.0) || touches_zero_row {
            dropped_columns.push(id);
            continue;
        }
        ids.push(id);
        columns.push(col.scaled(1.0 / scale));
        col_scale.push(scale);
    }
    if columns.is_empty() {
        return Err(Error::InfeasibleSupport);
    }
    Ok(NonnegSystem {
        m,
        n_original: raw_columns.len(),
        ids,
        columns,
        b,
        col_scale,
        b_scale,
        dropped_columns,
    })
}

impl NonnegSystem {
    /// Convenience constructor from dense columns.
    pub fn from_dense(columns: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let cols = columns
            .iter()
            .map(|c| {
                if c.len() != b.len() {
                    Err(Error::DimensionMismatch(format!(
                        "column has {} entries, b has {}",
                        c.len(),
                        b.len()
                    )))
                } else {
                    SparseVec::from_dense(c)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        normalize_system(b.len(), &cols, b)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of stored (kept) columns.
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// Number of columns before normalization.
    pub fn n_original(&self) -> usize {
        self.n_original
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn b_scale(&self) -> f64 {
        self.b_scale
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn dropped_columns(&self) -> &[usize] {
        &self.dropped_columns
    }

    fn position(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn column(&self, id: usize) -> Option<&SparseVec> {
        self.position(id).map(|p| &self.columns[p])
    }

    pub fn col_scale(&self, id: usize) -> Option<f64> {
        self.position(id).map(|p| self.col_scale[p])
    }

    /// Dense `A x` in normalized coordinates.
    pub fn apply(&self, x: &SparseSolution) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (id, w) in x.iter() {
            let col = self
                .column(id)
                .unwrap_or_else(|| panic!("column {id} is not part of the normalized system"));
            for &(r, v) in col.entries() {
                y[r] += w * v;
            }
        }
        y
    }

    /// Maps normalized weights to the caller's original coordinates:
    /// `x_orig_i = x_i · b_scale / col_scale_i`.
    ///
    /// Panics if a weight refers to a dropped column.
    pub fn denormalize_weights(&self, x: &SparseSolution) -> SparseSolution {
        x.map_weights(|id, w| {
            let s = self
                .col_scale(id)
                .unwrap_or_else(|| panic!("column {id} was dropped during normalization"));
            w * self.b_scale / s
        })
    }

    /// Inverse of [`denormalize_weights`](Self::denormalize_weights).
    pub fn normalize_weights(&self, x_orig: &SparseSolution) -> Result<SparseSolution> {
        for (id, _) in x_orig.iter() {
            if self.position(id).is_none() {
                return Err(Error::InvalidParameter(format!(
                    "column {id} is not part of the normalized system"
                )));
            }
        }
        Ok(x_orig.map_weights(|id, w| {
            let s = self.col_scale(id).expect("checked above");
            w * s / self.b_scale
        }))
    }

    /// Dense `‖A x / ‖x‖₁ − b‖₁` computed from scratch.
    pub fn residual_of(&self, x: &SparseSolution) -> Result<f64> {
        let total: f64 = x.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::EmptyIterate);
        }
        let y = self.apply(x);
        Ok(y.iter()
            .zip(&self.b)
            .map(|(yj, bj)| (yj / total - bj).abs())
            .sum())
    }
}
