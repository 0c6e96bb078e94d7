//! Witnessed test instances: planted set cover, set-cover encodings and
//! synthetic systems with a known sparse solution.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::system::{normalize_system, NonnegSystem, RawSystem, SparseSolution, SparseVec};

/// Absolute slack on `Ax* ≤ (1+ε₀)b`.
pub const WITNESS_ROW_TOL: f64 = 1e-12;
/// Tolerance on `‖Ax*‖₁ = ‖b‖₁`.
pub const WITNESS_MASS_TOL: f64 = 1e-9;

/// A sparse solution certifying that a system is approximately solvable.
/// Weights are in normalized coordinates, keyed by original column id.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub xstar: SparseSolution,
    pub eps0: f64,
    pub k: usize,
}

/// True iff `w` has at most `k` entries, `‖Ax*‖₁ = 1` and
/// `Ax* ≤ (1+ε₀)b` on the normalized system.
pub fn verify_witness(system: &NonnegSystem, w: &Witness) -> bool {
    if w.xstar.support() > w.k || w.xstar.is_empty() {
        return false;
    }
    if w.xstar.iter().any(|(id, _)| system.column(id).is_none()) {
        return false;
    }
    let y = system.apply(&w.xstar);
    let mass: f64 = y.iter().sum();
    if (mass - 1.0).abs() > WITNESS_MASS_TOL {
        return false;
    }
    y.iter()
        .zip(system.b())
        .all(|(&yj, &bj)| yj <= (1.0 + w.eps0) * bj + WITNESS_ROW_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantedCase {
    Yes,
    No,
}

impl FromStr for PlantedCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yes" => Ok(PlantedCase::Yes),
            "no" => Ok(PlantedCase::No),
            other => Err(Error::InvalidParameter(format!("unknown case {other:?}"))),
        }
    }
}

impl fmt::Display for PlantedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlantedCase::Yes => "yes",
            PlantedCase::No => "no",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PlantedInstance {
    /// Indicator columns and the all-ones target, before normalization.
    pub raw: RawSystem,
    pub system: NonnegSystem,
    pub case: PlantedCase,
    /// Present iff the case is `Yes`.
    pub witness: Option<Witness>,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Whether `m^{3/4} < k < m / ln² m`; reported, never enforced.
    pub regime_ok: bool,
    /// Column ids of the planted partition sets (`Yes` only).
    pub planted: Vec<usize>,
    /// How many planted parts came out empty.
    pub empty_parts: usize,
}

/// `⌈m / ln m⌉`, the default number of sets.
pub fn default_set_count(m: usize) -> usize {
    if m < 3 {
        return m.max(1);
    }
    let mf = m as f64;
    (mf / mf.ln()).ceil() as usize
}

pub fn regime_ok(m: usize, k: usize) -> bool {
    let mf = m as f64;
    let kf = k as f64;
    let ln = mf.ln();
    mf.powf(0.75) < kf && kf < mf / (ln * ln)
}

/// Planted set cover over `m` elements with `n` sets: every element joins
/// every random set with probability `1/k`; in the `Yes` case `k` of the sets
/// are replaced by a uniformly random `k`-partition and the columns shuffled.
pub fn gen_planted_setcover(
    m: usize,
    n: usize,
    k: usize,
    case: PlantedCase,
    seed: u64,
) -> Result<PlantedInstance> {
    if k == 0 || m < k {
        return Err(Error::InvalidParameter(format!(
            "need m >= k >= 1, got m = {m}, k = {k}"
        )));
    }
    if case == PlantedCase::Yes && n < k {
        return Err(Error::InvalidParameter(format!(
            "a yes instance needs n >= k, got n = {n}, k = {k}"
        )));
    }
    let random_sets = match case {
        PlantedCase::Yes => n - k,
        PlantedCase::No => n,
    };
    let p = 1.0 / k as f64;
    let mut member_rng = stream_rng(seed, Stream::SetMembership);
    let mut sets: Vec<Vec<usize>> = (0..random_sets)
        .map(|_| (0..m).filter(|_| member_rng.random_bool(p)).collect())
        .collect();

    let mut planted = Vec::new();
    let mut witness = None;
    let mut empty_parts = 0;
    if case == PlantedCase::Yes {
        let mut part_rng = stream_rng(seed, Stream::Partition);
        let mut parts = vec![Vec::new(); k];
        for e in 0..m {
            parts[part_rng.random_range(0..k)].push(e);
        }
        empty_parts = parts.iter().filter(|s| s.is_empty()).count();
        sets.extend(parts);

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stream_rng(seed, Stream::Shuffle));
        // order[new position] = old index
        let mut shuffled = vec![Vec::new(); n];
        for (pos, &old) in order.iter().enumerate() {
            shuffled[pos] = std::mem::take(&mut sets[old]);
            if old >= random_sets {
                planted.push(pos);
            }
        }
        sets = shuffled;
        planted.sort_unstable();
        let xstar = SparseSolution::from_pairs(
            planted
                .iter()
                .filter(|&&id| !sets[id].is_empty())
                .map(|&id| (id, sets[id].len() as f64 / m as f64)),
        )?;
        witness = Some(Witness { xstar, eps0: 0.0, k });
    }

    let raw = encode_setcover_raw(&sets, m)?;
    let system = raw.normalize()?;
    Ok(PlantedInstance {
        raw,
        system,
        case,
        witness,
        m,
        n,
        k,
        seed,
        regime_ok: regime_ok(m, k),
        planted,
        empty_parts,
    })
}

/// Indicator columns of `sets` (0-based elements of `[m]`) against the
/// all-ones target, before normalization.
pub fn encode_setcover_raw(sets: &[Vec<usize>], m: usize) -> Result<RawSystem> {
    if let Some(e) = sets.iter().flatten().find(|&&e| e >= m) {
        return Err(Error::DimensionMismatch(format!(
            "element {e} outside [0, {m})"
        )));
    }
    if sets.iter().any(|s| {
        let mut v = s.clone();
        v.sort_unstable();
        v.windows(2).any(|w| w[0] == w[1])
    }) {
        return Err(Error::InvalidParameter("sets must not repeat elements".into()));
    }
    let columns = sets
        .iter()
        .map(|s| SparseVec::from_pairs(s.iter().map(|&e| (e, 1.0))))
        .collect::<Result<Vec<_>>>()?;
    RawSystem::new(m, columns, vec![1.0; m])
}

/// Normalized set-cover system. Empty sets become zero columns and are
/// dropped.
pub fn encode_setcover(sets: &[Vec<usize>], m: usize) -> Result<NonnegSystem> {
    encode_setcover_raw(sets, m)?.normalize()
}

/// Normalized weights of the solution that takes every set in `cover` with
/// weight one.
pub fn cover_to_solution(system: &NonnegSystem, cover: &[usize]) -> Result<SparseSolution> {
    let ones = SparseSolution::from_pairs(cover.iter().map(|&id| (id, 1.0)))?;
    system.normalize_weights(&ones)
}

#[derive(Clone, Debug)]
pub struct SyntheticInstance {
    pub raw: RawSystem,
    pub system: NonnegSystem,
    pub witness: Witness,
}

/// Dense nonnegative system with `Exp(1)` entries and a planted `k`-sparse
/// witness whose image matches `b` up to a row-wise factor in `[1, 1+ε₀]`.
pub fn gen_synthetic(m: usize, n: usize, k: usize, eps0: f64, seed: u64) -> Result<SyntheticInstance> {
    if m == 0 || k == 0 || n < k {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1 and n >= k >= 1, got m = {m}, n = {n}, k = {k}"
        )));
    }
    if !(0.0..1.0 / 16.0).contains(&eps0) {
        return Err(Error::InvalidParameter(format!(
            "eps0 must lie in [0, 1/16), got {eps0}"
        )));
    }
    let mut col_rng = stream_rng(seed, Stream::SyntheticColumns);
    let columns = (0..n)
        .map(|_| {
            let dense: Vec<f64> = (0..m)
                .map(|_| {
                    let v: f64 = Exp1.sample(&mut col_rng);
                    v.max(f64::MIN_POSITIVE)
                })
                .collect();
            SparseVec::from_dense(&dense)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut wit_rng = stream_rng(seed, Stream::SyntheticWitness);
    let support = rand::seq::index::sample(&mut wit_rng, n, k).into_vec();
    let raw_w: Vec<f64> = (0..k).map(|_| wit_rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw_w.iter().sum();
    let xstar = SparseSolution::from_pairs(support.iter().zip(&raw_w).map(|(&id, &w)| (id, w / total)))?;

    let unit = normalize_system(m, &columns, &vec![1.0; m])?;
    let y = unit.apply(&xstar);
    let mut pert_rng = stream_rng(seed, Stream::Perturbation);
    let scaled: Vec<f64> = y
        .iter()
        .map(|&yj| {
            let u = if eps0 > 0.0 { pert_rng.random_range(1.0..=1.0 + eps0) } else { 1.0 };
            yj * u
        })
        .collect();
    let s: f64 = scaled.iter().sum();
    let b: Vec<f64> = scaled.iter().map(|v| v / s).collect();

    let raw = RawSystem::new(m, columns, b)?;
    let system = raw.normalize()?;
    // Column scales do not depend on b, so x* carries over unchanged.
    let witness = Witness { xstar, eps0, k };
    assert!(
        verify_witness(&system, &witness),
        "synthetic generator produced an invalid witness"
    );
    Ok(SyntheticInstance { raw, system, witness })
}
