//! C ABI over `nnsparse`.
//!
//! Objects are opaque handles created by `nns_*` constructors and released
//! by the matching `*_free`. Every fallible call returns an [`NnsStatus`];
//! on failure a message is available from [`nns_last_error_message`] on the
//! same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nnsparse::gmm::{learn, GaussianMixture, LearnOptions, Samples, DEFAULT_CANDIDATE_SAMPLES};
use nnsparse::{io, solve, Error, NonnegSystem, RawSystem, SolveReport, SolverParams, SparseVec, StopReason, StopRule};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NnsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    InsufficientSamples = 5,
    Io = 6,
    OutOfRange = 7,
    Internal = 99,
}

/// Stop rule selector for [`nns_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NnsStopRule {
    Theory = 0,
    Residual = 1,
}

/// Why a solve finished.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NnsStopReason {
    PsiTarget = 0,
    Budget = 1,
    ResidualTarget = 2,
}

/// A normalized nonnegative system.
pub struct NnsSystem(NonnegSystem);

/// The outcome of a solve.
pub struct NnsReport(SolveReport);

/// A Gaussian mixture with axis-aligned components.
pub struct NnsMixture {
    mixture: GaussianMixture,
    binned_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NnsStatus {
    match e {
        Error::Parse { .. } => NnsStatus::Parse,
        Error::DegenerateTarget | Error::InfeasibleSupport => NnsStatus::Infeasible,
        Error::InsufficientSamples { .. } => NnsStatus::InsufficientSamples,
        _ => NnsStatus::InvalidArgument,
    }
}

struct Fail(NnsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NnsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NnsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NnsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            NnsStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads of `len` elements.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or a live handle produced by this library.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nns_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds and normalizes an `m × n` system from `nnz` triplets
/// `(rows[i], cols[i], vals[i])` (0-based, duplicates summed) and `b[0..m]`.
///
/// # Safety
/// The arrays must hold `nnz` (respectively `m`) readable elements and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn nns_system_from_triplets(
    m: usize,
    n: usize,
    rows: *const usize,
    cols: *const usize,
    vals: *const f64,
    nnz: usize,
    b: *const f64,
    out: *mut *mut NnsSystem,
) -> NnsStatus {
    guard(|| {
        let rows = slice(rows, nnz, "rows")?;
        let cols = slice(cols, nnz, "cols")?;
        let vals = slice(vals, nnz, "vals")?;
        let b = slice(b, m, "b")?;
        let mut per_col = vec![Vec::new(); n];
        for i in 0..nnz {
            if cols[i] >= n {
                return Err(Fail(
                    NnsStatus::OutOfRange,
                    format!("column index {} >= n = {n}", cols[i]),
                ));
            }
            per_col[cols[i]].push((rows[i], vals[i]));
        }
        let columns = per_col
            .into_iter()
            .map(SparseVec::from_pairs)
            .collect::<Result<Vec<_>, _>>()?;
        let system = RawSystem::new(m, columns, b.to_vec())?.normalize()?;
        put(out, Box::into_raw(Box::new(NnsSystem(system))), "out")
    })
}

/// Reads an instance file and normalizes it.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nns_system_from_file(path: *const c_char, out: *mut *mut NnsSystem) -> NnsStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(NnsStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| Fail(NnsStatus::Io, format!("{path}: {e}")))?;
        let system = io::parse_instance(&text)?.normalize()?;
        put(out, Box::into_raw(Box::new(NnsSystem(system))), "out")
    })
}

/// # Safety
/// `sys` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nns_system_free(sys: *mut NnsSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Row count, number of kept columns and number of original columns.
///
/// # Safety
/// `sys` must be a live handle; each out pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn nns_system_shape(
    sys: *const NnsSystem,
    m: *mut usize,
    n_kept: *mut usize,
    n_original: *mut usize,
) -> NnsStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        for (p, v) in [(m, s.m()), (n_kept, s.n()), (n_original, s.n_original())] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Runs the solver for sparsity `k` and error `epsilon`. `budget = 0` keeps
/// the default iteration cap; `stop` is an [`NnsStopRule`] value.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nns_solve(
    sys: *const NnsSystem,
    k: usize,
    epsilon: f64,
    budget: u64,
    stop: u32,
    out: *mut *mut NnsReport,
) -> NnsStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        let mut params = SolverParams::new(k, epsilon)?;
        if budget > 0 {
            params = params.with_budget(budget)?;
        }
        let rule = match stop {
            x if x == NnsStopRule::Theory as u32 => StopRule::Theory,
            x if x == NnsStopRule::Residual as u32 => StopRule::Residual,
            other => {
                return Err(Fail(NnsStatus::InvalidArgument, format!("unknown stop rule {other}")))
            }
        };
        let report = solve(s, &params, rule)?;
        put(out, Box::into_raw(Box::new(NnsReport(report))), "out")
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nns_report_free(report: *mut NnsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Residual, support size, iteration count and stop reason of a report.
///
/// # Safety
/// `report` must be a live handle; each out pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn nns_report_summary(
    report: *const NnsReport,
    residual: *mut f64,
    support: *mut usize,
    iterations: *mut usize,
    reason: *mut NnsStopReason,
) -> NnsStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        if !residual.is_null() {
            residual.write(r.residual);
        }
        if !support.is_null() {
            support.write(r.solution.support());
        }
        if !iterations.is_null() {
            iterations.write(r.iterations);
        }
        if !reason.is_null() {
            reason.write(match r.stop_reason {
                StopReason::PsiTarget => NnsStopReason::PsiTarget,
                StopReason::Budget => NnsStopReason::Budget,
                StopReason::ResidualTarget => NnsStopReason::ResidualTarget,
            });
        }
        Ok(())
    })
}

/// Copies the normalized solution (original column ids, weights summing to
/// one) into caller buffers of length `capacity`. Fails with `OutOfRange`
/// if `capacity` is below the support size, which is written to `written`
/// either way.
///
/// # Safety
/// `ids` and `weights` must be writable for `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn nns_report_solution(
    report: *const NnsReport,
    ids: *mut usize,
    weights: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> NnsStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        let support = r.solution.support();
        put(written, support, "written")?;
        if capacity < support {
            return Err(Fail(
                NnsStatus::OutOfRange,
                format!("capacity {capacity} is below the support size {support}"),
            ));
        }
        if support > 0 && (ids.is_null() || weights.is_null()) {
            return Err(null("ids or weights"));
        }
        for (i, (id, w)) in r.solution.iter().enumerate() {
            ids.add(i).write(id);
            weights.add(i).write(w);
        }
        Ok(())
    })
}

/// Learns a mixture from `n_rows × d` row-major samples. `eps1 ≤ 0` and
/// `n_candidates = 0` select the defaults.
///
/// # Safety
/// `samples` must hold `n_rows · d` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn nns_learn(
    samples: *const f64,
    n_rows: usize,
    d: usize,
    k: usize,
    epsilon: f64,
    eps1: f64,
    n_candidates: usize,
    seed: u64,
    out: *mut *mut NnsMixture,
) -> NnsStatus {
    guard(|| {
        let len = n_rows
            .checked_mul(d)
            .ok_or_else(|| Fail(NnsStatus::InvalidArgument, "n_rows * d overflows".into()))?;
        let data = slice(samples, len, "samples")?;
        let samples = Samples::new(d, data.to_vec())?;
        let opts = LearnOptions {
            eps1: (eps1 > 0.0).then_some(eps1),
            n_candidates: if n_candidates == 0 { DEFAULT_CANDIDATE_SAMPLES } else { n_candidates },
            seed,
            ..LearnOptions::default()
        };
        let outcome = learn(&samples, k, epsilon, &opts)?;
        let mix = NnsMixture {
            mixture: outcome.mixture,
            binned_residual: outcome.report.residual,
        };
        put(out, Box::into_raw(Box::new(mix)), "out")
    })
}

/// # Safety
/// `mix` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nns_mixture_free(mix: *mut NnsMixture) {
    if !mix.is_null() {
        drop(Box::from_raw(mix));
    }
}

/// Dimension, component count and the binned residual of the fit.
///
/// # Safety
/// `mix` must be a live handle; each out pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn nns_mixture_shape(
    mix: *const NnsMixture,
    d: *mut usize,
    components: *mut usize,
    binned_residual: *mut f64,
) -> NnsStatus {
    guard(|| {
        let m = handle(mix, "mix")?;
        if !d.is_null() {
            d.write(m.mixture.d());
        }
        if !components.is_null() {
            components.write(m.mixture.k());
        }
        if !binned_residual.is_null() {
            binned_residual.write(m.binned_residual);
        }
        Ok(())
    })
}

/// Weight, mean and per-axis variance of component `index`; `mean` and
/// `var` must each have room for `d` values.
///
/// # Safety
/// `mix` must be a live handle and the buffers writable for `d` values.
#[no_mangle]
pub unsafe extern "C" fn nns_mixture_component(
    mix: *const NnsMixture,
    index: usize,
    weight: *mut f64,
    mean: *mut f64,
    var: *mut f64,
) -> NnsStatus {
    guard(|| {
        let m = &handle(mix, "mix")?.mixture;
        let c = m.components().get(index).ok_or_else(|| {
            Fail(
                NnsStatus::OutOfRange,
                format!("component {index} of {}", m.k()),
            )
        })?;
        put(weight, c.weight, "weight")?;
        if mean.is_null() || var.is_null() {
            return Err(null("mean or var"));
        }
        ptr::copy_nonoverlapping(c.gaussian.mean().as_ptr(), mean, m.d());
        ptr::copy_nonoverlapping(c.gaussian.var().as_ptr(), var, m.d());
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_internal_status() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, NnsStatus::Internal);
        let msg = unsafe { CStr::from_ptr(nns_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal error: boom");
    }

    #[test]
    fn library_errors_map_to_codes() {
        assert_eq!(status_of(&Error::Parse { line: 1, msg: String::new() }), NnsStatus::Parse);
        assert_eq!(status_of(&Error::InfeasibleSupport), NnsStatus::Infeasible);
        assert_eq!(
            status_of(&Error::InsufficientSamples { needed: 2, got: 1 }),
            NnsStatus::InsufficientSamples
        );
        assert_eq!(status_of(&Error::NoColumns), NnsStatus::InvalidArgument);
    }

    #[test]
    fn interior_nul_is_replaced() {
        set_error("a\0b".into());
        let msg = unsafe { CStr::from_ptr(nns_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}
