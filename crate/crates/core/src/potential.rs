//! The potential `Φ(x) = Σ_j b_j (1+δ)^{(Ax)_j / b_j}` and the running
//! iterate, with all potential accounting done in log space.
//!
//! Exponents reach `ψ/b_min · ln(1+δ)` during a run, far beyond what an
//! `f64` can exponentiate, so `ln Φ` is kept as a log-sum-exp over the
//! per-row terms `ln b_j + e_j`. Rows with `b_j = 0` carry no term.

use crate::error::{Error, Result};
use crate::system::{SparseSolution, SparseVec};

/// Numerically stable `ln Σ exp(t)` over the finite terms of `terms`.
/// Returns `-inf` when there are none.
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = terms
        .clone()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = terms.into_iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Result of checking the hypothesis `Φ(x) ≤ (1+δ)^{(1+η)ψ(x)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub holds_hypothesis: bool,
    /// `2(η + 1/(δψ))`: the ℓ1 residual bound implied by the hypothesis.
    pub bound: f64,
}

/// Running iterate of the greedy solver.
///
/// Single writer: [`apply_increment`](Self::apply_increment) mutates, every
/// other method is read-only and safe to call from many threads.
#[derive(Clone, Debug)]
pub struct SolverState {
    delta: f64,
    lambda: f64,
    b: Vec<f64>,
    ln_b: Vec<f64>,
    row_rate: Vec<f64>,
    y: Vec<f64>,
    exponents: Vec<f64>,
    weights: Vec<f64>,
    log_phi: f64,
    psi: f64,
    iter: usize,
    x: SparseSolution,
}

impl SolverState {
    /// The state at `x = 0` for a normalized target `b`.
    pub fn new(b: &[f64], delta: f64) -> Self {
        assert!(delta > 0.0, "delta must be positive");
        let lambda = delta.ln_1p();
        let m = b.len();
        let mut state = SolverState {
            delta,
            lambda,
            b: b.to_vec(),
            ln_b: b.iter().map(|&v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect(),
            row_rate: b.iter().map(|&v| if v > 0.0 { lambda / v } else { 0.0 }).collect(),
            y: vec![0.0; m],
            exponents: vec![0.0; m],
            weights: vec![0.0; m],
            log_phi: 0.0,
            psi: 0.0,
            iter: 0,
            x: SparseSolution::new(),
        };
        state.rebuild();
        state
    }

    /// A state with a prescribed image `y = Ax` and `ψ = Σ y`, without an
    /// explicit `x`. Used to evaluate the potential at arbitrary points.
    pub fn from_image(b: &[f64], delta: f64, y: &[f64]) -> Self {
        assert_eq!(b.len(), y.len(), "image length must match b");
        let mut state = Self::new(b, delta);
        state.y.copy_from_slice(y);
        state.psi = y.iter().sum();
        state.rebuild();
        state
    }

    /// Recomputes exponents, `ln Φ` and the normalized row weights from `y`.
    fn rebuild(&mut self) {
        for j in 0..self.y.len() {
            self.exponents[j] = self.y[j] * self.row_rate[j];
        }
        let terms = self
            .ln_b
            .iter()
            .zip(&self.exponents)
            .map(|(&lb, &e)| lb + e);
        self.log_phi = log_sum_exp(terms.clone());
        for (w, t) in self.weights.iter_mut().zip(terms) {
            *w = if t == f64::NEG_INFINITY {
                0.0
            } else {
                (t - self.log_phi).exp()
            };
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `ln(1+δ)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `y = Ax`.
    pub fn image(&self) -> &[f64] {
        &self.y
    }

    /// `e_j = (y_j / b_j) · ln(1+δ)`; zero on rows with `b_j = 0`.
    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// `b_j (1+δ)^{y_j/b_j} / Φ`, the share of row `j` in the potential.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `ln(1+δ) / b_j`, zero where `b_j = 0`.
    pub fn row_rates(&self) -> &[f64] {
        &self.row_rate
    }

    /// `ln Φ(x)`.
    pub fn phi_log(&self) -> f64 {
        self.log_phi
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn iter(&self) -> usize {
        self.iter
    }

    pub fn x(&self) -> &SparseSolution {
        &self.x
    }

    /// `ln Φ(x + θe_i) − ln Φ(x)` for a unit-norm column, without mutating
    /// the state. Cost is linear in the column's support.
    pub fn increment_log_ratio(&self, column: &SparseVec, theta: f64) -> f64 {
        self.log_ratio_with(column, theta, |_, r, a| (theta * (a * self.row_rate[r])).exp_m1())
    }

    /// Shared kernel for [`increment_log_ratio`](Self::increment_log_ratio):
    /// `em1(k, row, a)` must return `expm1(θ · a · rate_row)` for entry `k`.
    pub(crate) fn log_ratio_with(
        &self,
        column: &SparseVec,
        theta: f64,
        em1: impl Fn(usize, usize, f64) -> f64,
    ) -> f64 {
        let mut s = 0.0;
        for (k, &(r, a)) in column.entries().iter().enumerate() {
            let w = self.weights[r];
            if w == 0.0 {
                continue;
            }
            s += w * em1(k, r, a);
        }
        if s.is_finite() {
            return s.ln_1p();
        }
        // Overflow: ln((1 − W) + Σ w_j e^{arg_j}) in log space.
        let mut w_sum = 0.0;
        let mut terms = Vec::with_capacity(column.nnz() + 1);
        for &(r, a) in column.entries() {
            let w = self.weights[r];
            if w == 0.0 {
                continue;
            }
            w_sum += w;
            terms.push(w.ln() + theta * (a * self.row_rate[r]));
        }
        let rest = (1.0 - w_sum).max(0.0);
        if rest > 0.0 {
            terms.push(rest.ln());
        }
        log_sum_exp(terms.iter().copied())
    }

    /// Accepts `x ← x + θ e_id` for the given unit-norm column.
    pub fn apply_increment(&mut self, id: usize, column: &SparseVec, theta: f64) {
        assert!(theta > 0.0, "increments must be positive");
        for &(r, a) in column.entries() {
            self.y[r] += theta * a;
        }
        self.x.add(id, theta);
        self.psi += theta;
        self.iter += 1;
        self.rebuild();
    }

    /// `‖y/ψ − b‖₁`, the residual of the ℓ1-normalized image.
    pub fn l1_residual(&self) -> Result<f64> {
        if !(self.psi > 0.0) {
            return Err(Error::EmptyIterate);
        }
        Ok(self
            .y
            .iter()
            .zip(&self.b)
            .map(|(&yj, &bj)| (yj / self.psi - bj).abs())
            .sum())
    }

    /// Checks `ln Φ ≤ (1+η) ψ ln(1+δ)` and returns the implied bound
    /// `2(η + 1/(δψ))` on the ℓ1 residual.
    pub fn l1_bound_check(&self, eta: f64) -> BoundCheck {
        let holds_hypothesis = self.log_phi <= (1.0 + eta) * self.psi * self.lambda;
        let bound = 2.0 * (eta + 1.0 / (self.delta * self.psi));
        BoundCheck {
            holds_hypothesis,
            bound,
        }
    }
}
