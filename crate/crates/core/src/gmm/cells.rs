use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::partition::CellKey;

/// Coarsened cell histogram: the junk cell `U` (row 0) followed by the heavy
/// cells in key order.
#[derive(Clone, Debug, PartialEq)]
pub struct CellTable {
    pub eps1: f64,
    pub eps: f64,
    pub d: usize,
    /// Samples that were binned.
    pub n: u64,
    /// `n · ε₁^d · ε`; cells with count at or below it are light.
    pub threshold: f64,
    pub heavy: Vec<(CellKey, u64)>,
    pub light: Vec<(CellKey, u64)>,
    /// Target over `S′ = {U} ∪ heavy`; `b[0] = b(U) = 2ε`.
    pub b: Vec<f64>,
}

impl CellTable {
    /// Number of rows `|S′|`.
    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn heavy_keys(&self) -> impl Iterator<Item = &CellKey> + '_ {
        self.heavy.iter().map(|(k, _)| k)
    }
}

/// Pools light cells into `U`, sets `b(U) = 2ε` and
/// `b(S) = (1 − 2ε) n(S) / Σ_heavy n(S)` on heavy cells.
pub fn coarsen_and_target(
    counts: &BTreeMap<CellKey, u64>,
    n: u64,
    eps1: f64,
    eps: f64,
    d: usize,
) -> Result<CellTable> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1/2) so that b(U) = 2ε < 1, got {eps}"
        )));
    }
    let threshold = n as f64 * eps1.powi(d as i32) * eps;
    let (heavy, light): (Vec<_>, Vec<_>) = counts
        .iter()
        .map(|(k, &c)| (k.clone(), c))
        .partition(|&(_, c)| c as f64 > threshold);
    if heavy.is_empty() {
        return Err(Error::AllMassLight);
    }
    let heavy_total: u64 = heavy.iter().map(|&(_, c)| c).sum();
    let mut b = Vec::with_capacity(heavy.len() + 1);
    b.push(2.0 * eps);
    b.extend(
        heavy
            .iter()
            .map(|&(_, c)| (1.0 - 2.0 * eps) * c as f64 / heavy_total as f64),
    );
    Ok(CellTable {
        eps1,
        eps,
        d,
        n,
        threshold,
        heavy,
        light,
        b,
    })
}
