use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::solver::{solve, SolveReport, SolverParams, StopRule};

use super::candidates::gen_candidates;
use super::cells::{coarsen_and_target, CellTable};
use super::partition::{bin_counts, build_axis_partitions, AxisPartitions};
use super::{GaussianMixture, MixtureComponent, Samples};

/// Default number of samples whose ordered pairs seed the candidate set.
pub const DEFAULT_CANDIDATE_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct LearnOptions {
    /// Interval mass; `ε³/(kd)` when unset.
    pub eps1: Option<f64>,
    /// How many first-half samples generate candidate pairs.
    pub n_candidates: usize,
    /// Goodness bound; `2ε₁k/ε` (clamped to 1) when unset, which is `2ε²/d`
    /// at the default `ε₁`.
    pub bound: Option<f64>,
    pub seed: u64,
    pub budget: Option<u64>,
    pub stop: StopRule,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            eps1: None,
            n_candidates: DEFAULT_CANDIDATE_SAMPLES,
            bound: None,
            seed: 0,
            budget: None,
            stop: StopRule::Theory,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub mixture: GaussianMixture,
    /// Solver report over `S′`; its residual is the binned `‖A w′ − b‖₁`.
    pub report: SolveReport,
    pub table: CellTable,
    pub partitions: AxisPartitions,
    pub candidates: usize,
    pub eps1: f64,
    pub bound: f64,
    pub params: SolverParams,
}

/// Learns a mixture from `2n` samples: the first `n` fix the intervals, the
/// second `n` build the target histogram, and the solver runs with error
/// `64ε` over the good candidates.
pub fn learn(samples: &Samples, k: usize, eps: f64, opts: &LearnOptions) -> Result<LearnOutcome> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1/2), got {eps}"
        )));
    }
    let d = samples.d();
    let eps1 = opts.eps1.unwrap_or(eps.powi(3) / (k * d) as f64);
    let bound = opts
        .bound
        .unwrap_or((2.0 * eps1 * k as f64 / eps).min(1.0));
    if !(bound > 0.0 && bound <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "goodness bound must lie in (0, 1], got {bound}"
        )));
    }

    let n = samples.len() / 2;
    let first = samples.slice(0..n);
    let second = samples.slice(n..2 * n);
    let partitions = build_axis_partitions(&first, eps1)?;
    let counts = bin_counts(&second, &partitions);
    let table = coarsen_and_target(&counts, n as u64, eps1, eps, d)?;

    let take = opts.n_candidates.min(n);
    if take < 2 {
        return Err(Error::InvalidParameter(
            "need at least two candidate samples".into(),
        ));
    }
    let mut rng = stream_rng(opts.seed, Stream::Candidates);
    let mut picked = index::sample(&mut rng, n, take).into_vec();
    picked.sort_unstable();
    let pool = first.select(&picked);
    let cands = gen_candidates(&pool, &partitions, bound, &table)?;

    let mut params = SolverParams::new(k, 64.0 * eps)?;
    if let Some(b) = opts.budget {
        params = params.with_budget(b)?;
    }
    let report = solve(&cands, &params, opts.stop)?;
    let components = report
        .solution
        .iter()
        .map(|(id, w)| MixtureComponent {
            weight: w,
            gaussian: cands.candidates()[id].gaussian.clone(),
        })
        .collect();
    let mixture = GaussianMixture::new(d, components)?;

    Ok(LearnOutcome {
        mixture,
        report,
        table,
        partitions,
        candidates: cands.candidates().len(),
        eps1,
        bound,
        params,
    })
}
