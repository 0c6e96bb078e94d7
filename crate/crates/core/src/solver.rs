//! Greedy potential-minimizing column selection.
//!
//! Starting from `x = 0`, every iteration adds `θ e_i` for the column `i` and
//! step `θ ≥ 1/(Ck)` that minimize `Φ(x + θe_i)/Φ(x)`, until `ψ(x) = ‖Ax‖₁`
//! reaches `1/δ²` (or a budget / residual rule fires). The output is
//! `x / ‖x‖₁`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::SolverState;
use crate::system::{NonnegSystem, SparseSolution, SparseVec};

/// Scans below this many `exp` evaluations run on the calling thread.
const PAR_WORK_THRESHOLD: usize = 1 << 17;

/// Derived constants of the greedy solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    pub k: usize,
    pub epsilon: f64,
    /// `ε/16`
    pub delta: f64,
    /// `16/ε`
    pub c: f64,
    /// `⌈Ck/δ²⌉`, saturating.
    pub t_theory: u64,
    pub budget: u64,
    /// `1/δ²`
    pub psi_target: f64,
}

impl SolverParams {
    /// Parameters for witness sparsity `k` and target error `ε > 0`, with the
    /// default budget `min(T_theory, ⌈50k/ε⌉)`.
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let delta = epsilon / 16.0;
        let c = 16.0 / epsilon;
        let t_theory = saturating_ceil(c * k as f64 / (delta * delta));
        let default_budget = t_theory.min(saturating_ceil(50.0 * k as f64 / epsilon));
        Ok(SolverParams {
            k,
            epsilon,
            delta,
            c,
            t_theory,
            budget: default_budget.max(1),
            psi_target: 1.0 / (delta * delta),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidParameter("budget must be at least 1".into()));
        }
        self.budget = budget;
        Ok(self)
    }

    /// `1/(Ck)`, the smallest admissible step.
    pub fn theta_min(&self) -> f64 {
        1.0 / (self.c * self.k as f64)
    }

    /// Per-unit-step bound on `ln Φ` growth guaranteed when a witness with
    /// slack `eps0` exists: `(1+ε₀)(1+δ)/(1−1/C) · ln(1+δ)`.
    pub fn progress_rate_bound(&self, eps0: f64) -> f64 {
        (1.0 + eps0) * (1.0 + self.delta) / (1.0 - 1.0 / self.c) * self.delta.ln_1p()
    }
}

fn saturating_ceil(v: f64) -> u64 {
    let c = v.ceil();
    if c >= u64::MAX as f64 {
        u64::MAX
    } else {
        c as u64
    }
}

/// Candidate step sizes `θ_t = (1+δ)^t / (Ck)`, from `t = 0` up to the first
/// value that reaches `ψ_target`.
pub fn theta_grid(params: &SolverParams) -> Vec<f64> {
    let base = params.theta_min();
    let growth = 1.0 + params.delta;
    let ratio = params.psi_target / base;
    let steps = if ratio <= 1.0 {
        0
    } else {
        // Rounding guard so exact powers do not gain a spurious extra point.
        (ratio.ln() / growth.ln() - 1e-9).ceil().max(0.0) as i32
    };
    (0..=steps).map(|t| base * growth.powi(t)).collect()
}

/// One accepted or proposed step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Increment {
    pub id: usize,
    pub theta: f64,
    pub log_ratio: f64,
}

/// Lexicographic order on `(log_ratio, id, θ)`.
pub fn increment_order(a: &Increment, b: &Increment) -> Ordering {
    a.log_ratio
        .total_cmp(&b.log_ratio)
        .then(a.id.cmp(&b.id))
        .then(a.theta.total_cmp(&b.theta))
}

fn pick(a: Option<Increment>, b: Option<Increment>) -> Option<Increment> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if increment_order(&y, &x) == Ordering::Less { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Source of candidate columns.
///
/// Columns are addressed by position `0..len()`; each carries a caller-facing
/// id that is unique within the oracle. Every column must be nonnegative,
/// unit ℓ1 norm, and supported only on rows where the target is positive.
pub trait ColumnOracle: Sync {
    /// The normalized target `b`.
    fn target(&self) -> &[f64];

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(id, column)` at position `pos`.
    fn column_at(&self, pos: usize) -> (usize, &SparseVec);

    fn enumerate(&self) -> Box<dyn Iterator<Item = (usize, &SparseVec)> + '_> {
        Box::new((0..self.len()).map(move |p| self.column_at(p)))
    }

    /// Optional fast path. When it returns `Some`, the result must equal what
    /// [`scan_increment`] would return for the same state and grid.
    fn best_increment(&self, _state: &SolverState, _grid: &[f64]) -> Option<Increment> {
        None
    }
}

impl ColumnOracle for NonnegSystem {
    fn target(&self) -> &[f64] {
        self.b()
    }

    fn len(&self) -> usize {
        self.n()
    }

    fn column_at(&self, pos: usize) -> (usize, &SparseVec) {
        (self.ids()[pos], &self.columns()[pos])
    }
}

/// Exhaustive scan over every column and every grid step.
pub fn scan_increment<O: ColumnOracle + ?Sized>(
    state: &SolverState,
    oracle: &O,
    grid: &[f64],
) -> Result<Increment> {
    if oracle.is_empty() {
        return Err(Error::NoColumns);
    }
    let best_for = |pos: usize| {
        let (id, col) = oracle.column_at(pos);
        grid.iter().fold(None, |acc, &theta| {
            let log_ratio = state.increment_log_ratio(col, theta);
            pick(acc, Some(Increment { id, theta, log_ratio }))
        })
    };
    let work = total_nnz(oracle).saturating_mul(grid.len());
    let best = if work >= PAR_WORK_THRESHOLD {
        (0..oracle.len())
            .into_par_iter()
            .map(best_for)
            .reduce(|| None, pick)
    } else {
        (0..oracle.len()).map(best_for).fold(None, pick)
    };
    best.ok_or(Error::NoColumns)
}

fn total_nnz<O: ColumnOracle + ?Sized>(oracle: &O) -> usize {
    (0..oracle.len()).map(|p| oracle.column_at(p).1.nnz()).sum()
}

/// Picks the `(id, θ)` pair minimizing `ln Φ(x+θe_i) − ln Φ(x)` with ties
/// broken by smaller id, then smaller θ. Uses the oracle's fast path when it
/// offers one.
pub fn select_increment<O: ColumnOracle + ?Sized>(
    state: &SolverState,
    oracle: &O,
    grid: &[f64],
) -> Result<Increment> {
    if oracle.is_empty() {
        return Err(Error::NoColumns);
    }
    match oracle.best_increment(state, grid) {
        Some(inc) => Ok(inc),
        None => scan_increment(state, oracle, grid),
    }
}

/// Wraps an oracle with a fast path that evaluates only the smallest grid
/// step.
///
/// `θ ↦ Φ(x + θe_i)` is nondecreasing for a nonnegative column, and the
/// floating-point kernel preserves that (every summand is monotone in θ), so
/// the scan minimizer always sits at `grid[0]`. The `expm1` factors for that
/// step depend only on the column and `b`, so they are tabulated once.
pub struct MonotoneOracle<'a, O: ColumnOracle + ?Sized> {
    inner: &'a O,
    table: OnceLock<StepTable>,
}

struct StepTable {
    theta_bits: u64,
    rate_key: u64,
    em1: Vec<Vec<f64>>,
}

impl<'a, O: ColumnOracle + ?Sized> MonotoneOracle<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        MonotoneOracle {
            inner,
            table: OnceLock::new(),
        }
    }

    fn build_table(&self, state: &SolverState, theta: f64) -> StepTable {
        let rates = state.row_rates();
        let em1 = (0..self.inner.len())
            .map(|p| {
                let (_, col) = self.inner.column_at(p);
                col.entries()
                    .iter()
                    .map(|&(r, a)| (theta * (a * rates[r])).exp_m1())
                    .collect()
            })
            .collect();
        StepTable {
            theta_bits: theta.to_bits(),
            rate_key: state.lambda().to_bits(),
            em1,
        }
    }
}

impl<O: ColumnOracle + ?Sized> ColumnOracle for MonotoneOracle<'_, O> {
    fn target(&self) -> &[f64] {
        self.inner.target()
    }

    fn len(&self) -> usize {
        self.inner.len()
    }

    fn column_at(&self, pos: usize) -> (usize, &SparseVec) {
        self.inner.column_at(pos)
    }

    fn best_increment(&self, state: &SolverState, grid: &[f64]) -> Option<Increment> {
        if let Some(inc) = self.inner.best_increment(state, grid) {
            return Some(inc);
        }
        let theta = *grid.first()?;
        let table = self.table.get_or_init(|| self.build_table(state, theta));
        if table.theta_bits != theta.to_bits() || table.rate_key != state.lambda().to_bits() {
            // Different grid or δ than the table was built for.
            return scan_increment(state, self.inner, &grid[..1]).ok();
        }
        let eval = |pos: usize| {
            let (id, col) = self.inner.column_at(pos);
            let em1 = &table.em1[pos];
            let log_ratio = state.log_ratio_with(col, theta, |k, _, _| em1[k]);
            Some(Increment { id, theta, log_ratio })
        };
        let work: usize = table.em1.iter().map(Vec::len).sum();
        if work >= PAR_WORK_THRESHOLD {
            (0..self.inner.len())
                .into_par_iter()
                .map(eval)
                .reduce(|| None, pick)
        } else {
            (0..self.inner.len()).map(eval).fold(None, pick)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop once `ψ ≥ 1/δ²` or the budget is spent.
    Theory,
    /// Additionally stop as soon as the residual drops to `ε`.
    Residual,
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(StopRule::Theory),
            "residual" => Ok(StopRule::Residual),
            other => Err(Error::InvalidParameter(format!("unknown stop rule {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    PsiTarget,
    Budget,
    ResidualTarget,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::PsiTarget => "psi_target",
            StopReason::Budget => "budget",
            StopReason::ResidualTarget => "residual_target",
        })
    }
}

/// Whether [`solve_with`] may use the smallest-step fast path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Monotone,
    Exhaustive,
}

/// State after one accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    /// 1-based iteration number.
    pub iter: usize,
    pub col_id: usize,
    pub theta: f64,
    pub log_ratio: f64,
    pub psi: f64,
    pub log_phi: f64,
    /// `‖Ax/ψ − b‖₁` after the step. Not part of the exported trace.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// `x / ‖x‖₁` in normalized coordinates.
    pub solution: SparseSolution,
    pub iterations: usize,
    pub residual: f64,
    pub trace: Vec<TraceRecord>,
    pub stop_reason: StopReason,
    pub psi: f64,
    pub log_phi: f64,
}

/// Runs the greedy solver with the smallest-step fast path.
pub fn solve<O: ColumnOracle + ?Sized>(
    oracle: &O,
    params: &SolverParams,
    stop: StopRule,
) -> Result<SolveReport> {
    solve_with(oracle, params, stop, ScanMode::Monotone)
}

pub fn solve_with<O: ColumnOracle + ?Sized>(
    oracle: &O,
    params: &SolverParams,
    stop: StopRule,
    mode: ScanMode,
) -> Result<SolveReport> {
    if oracle.is_empty() {
        return Err(Error::NoColumns);
    }
    let grid = theta_grid(params);
    let fast = MonotoneOracle::new(oracle);
    let mut state = SolverState::new(oracle.target(), params.delta);
    let mut trace = Vec::new();
    let psi_goal = params.psi_target * (1.0 - 1e-12);

    let stop_reason = loop {
        let inc = match mode {
            ScanMode::Monotone => select_increment(&state, &fast, &grid)?,
            ScanMode::Exhaustive => select_increment(&state, oracle, &grid)?,
        };
        let col = column_by_id(oracle, inc.id);
        state.apply_increment(inc.id, col, inc.theta);
        let residual = state.l1_residual()?;
        trace.push(TraceRecord {
            iter: state.iter(),
            col_id: inc.id,
            theta: inc.theta,
            log_ratio: inc.log_ratio,
            psi: state.psi(),
            log_phi: state.phi_log(),
            residual,
        });
        if state.psi() >= psi_goal {
            break StopReason::PsiTarget;
        }
        if stop == StopRule::Residual && residual <= params.epsilon {
            break StopReason::ResidualTarget;
        }
        if state.iter() as u64 >= params.budget {
            break StopReason::Budget;
        }
    };

    Ok(SolveReport {
        solution: state.x().normalized(),
        iterations: state.iter(),
        residual: state.l1_residual()?,
        trace,
        stop_reason,
        psi: state.psi(),
        log_phi: state.phi_log(),
    })
}

fn column_by_id<O: ColumnOracle + ?Sized>(oracle: &O, id: usize) -> &SparseVec {
    // Ids are looked up by scan only once per accepted step.
    (0..oracle.len())
        .map(|p| oracle.column_at(p))
        .find(|&(cid, _)| cid == id)
        .map(|(_, c)| c)
        .expect("oracle returned an unknown column id")
}

/// Maps a report's normalized solution back to the system's original
/// coordinates.
pub fn denormalize(report: &SolveReport, system: &NonnegSystem) -> SparseSolution {
    system.denormalize_weights(&report.solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_with(ck: f64, delta: f64, psi_target: f64) -> SolverParams {
        SolverParams {
            k: 1,
            epsilon: delta * 16.0,
            delta,
            c: ck,
            t_theory: 1,
            budget: 1,
            psi_target,
        }
    }

    #[test]
    fn grid_direct_enumeration() {
        let grid = theta_grid(&params_with(4.0, 1.0, 2.0));
        assert_eq!(grid, vec![0.25, 0.5, 1.0, 2.0]);
    }

    #[test]
    fn grid_single_point_when_target_below_first_step() {
        let grid = theta_grid(&params_with(0.5, 1.0, 1.0));
        assert_eq!(grid, vec![2.0]);
    }

    #[test]
    fn params_follow_step_one() {
        let p = SolverParams::new(6, 0.25).unwrap();
        assert_eq!(p.delta, 0.25 / 16.0);
        assert_eq!(p.c, 64.0);
        assert_eq!(p.t_theory, 1_572_864);
        assert_eq!(p.psi_target, 4096.0);
        assert_eq!(p.budget, 1200);
        assert!(SolverParams::new(0, 0.1).is_err());
        assert!(SolverParams::new(1, 0.0).is_err());
        assert!(p.with_budget(0).is_err());
    }

    #[test]
    fn identity_tie_breaks_to_lowest_id() {
        let sys = NonnegSystem::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 1.0]).unwrap();
        let params = SolverParams::new(2, 0.5).unwrap();
        let grid = theta_grid(&params);
        let state = SolverState::new(sys.b(), params.delta);
        let inc = scan_increment(&state, &sys, &grid).unwrap();
        assert_eq!(inc.id, 0);
        assert_eq!(inc.theta, grid[0]);
    }

    #[test]
    fn one_column_equal_to_target() {
        let sys = NonnegSystem::from_dense(&[vec![1.0, 2.0, 3.0]], &[2.0, 4.0, 6.0]).unwrap();
        let params = SolverParams::new(1, 0.5).unwrap();
        let report = solve(&sys, &params, StopRule::Theory).unwrap();
        assert!(report.residual < 1e-15);
        assert_eq!(report.solution.support(), 1);
    }

    #[test]
    fn empty_oracle_is_an_error() {
        struct Empty;
        impl ColumnOracle for Empty {
            fn target(&self) -> &[f64] {
                &[1.0]
            }
            fn len(&self) -> usize {
                0
            }
            fn column_at(&self, _: usize) -> (usize, &SparseVec) {
                unreachable!()
            }
        }
        let params = SolverParams::new(1, 0.5).unwrap();
        assert!(matches!(solve(&Empty, &params, StopRule::Theory), Err(Error::NoColumns)));
        let state = SolverState::new(&[1.0], params.delta);
        assert!(matches!(select_increment(&state, &Empty, &[1.0]), Err(Error::NoColumns)));
    }

    #[test]
    fn stop_rule_parsing() {
        assert_eq!("theory".parse::<StopRule>().unwrap(), StopRule::Theory);
        assert_eq!("residual".parse::<StopRule>().unwrap(), StopRule::Residual);
        assert!("other".parse::<StopRule>().is_err());
    }
}
