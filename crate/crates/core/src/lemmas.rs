//! Test oracle for the averaging argument behind the solver's progress
//! guarantee.

/// Given nonnegative `a` and nonnegative `b` with `Σb = 1`, returns an index
/// `i` with `b_i ≥ 1/(Ck)` and `a_i ≤ b_i · Σa / (1 − 1/C)`, where `k` is the
/// list length.
///
/// Prefers the lowest index satisfying the upper bound strictly; falls back to
/// the lowest index satisfying it with equality (only reachable when `Σa = 0`).
///
/// Panics if the lists differ in length, are empty, `C ≤ 1`, or no index
/// qualifies (which means the preconditions were violated).
pub fn averaging_witness(a: &[f64], b: &[f64], c: f64) -> usize {
    assert_eq!(a.len(), b.len(), "lists must have equal length");
    assert!(!a.is_empty(), "lists must be nonempty");
    assert!(c > 1.0, "C must exceed 1");
    let k = a.len() as f64;
    let a_total: f64 = a.iter().sum();
    let floor = 1.0 / (c * k);
    let scale = a_total / (1.0 - 1.0 / c);
    let qualifies = |i: usize, strict: bool| {
        let cap = b[i] * scale;
        b[i] >= floor && if strict { a[i] < cap } else { a[i] <= cap }
    };
    (0..a.len())
        .find(|&i| qualifies(i, true))
        .or_else(|| (0..a.len()).find(|&i| qualifies(i, false)))
        .expect("averaging precondition violated: no qualifying index")
}
