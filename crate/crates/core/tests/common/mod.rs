//! Test-side oracles, written independently of the library code paths.
#![allow(dead_code, clippy::too_many_arguments)]

use nnsparse::gmm::GaussianMixture;
use nnsparse::{NonnegSystem, SparseSolution};

/// `Σ_j b_j (1+δ)^{y_j/b_j}` evaluated directly.
pub fn phi_direct(b: &[f64], y: &[f64], delta: f64) -> f64 {
    b.iter()
        .zip(y)
        .filter(|(&bj, _)| bj > 0.0)
        .map(|(&bj, &yj)| bj * (1.0 + delta).powf(yj / bj))
        .sum()
}

/// Dense image of normalized weights.
pub fn dense_image(sys: &NonnegSystem, x: &SparseSolution) -> Vec<f64> {
    let mut y = vec![0.0; sys.m()];
    for (id, w) in x.iter() {
        for (r, v) in sys.column(id).unwrap().to_dense(sys.m()).into_iter().enumerate() {
            y[r] += w * v;
        }
    }
    y
}

/// `‖y/‖y‖₁ − b‖₁`.
pub fn residual_of_image(y: &[f64], b: &[f64]) -> f64 {
    let s: f64 = y.iter().sum();
    y.iter().zip(b).map(|(a, c)| (a / s - c).abs()).sum()
}

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Simpson split into `pieces` equal panels, for integrands with kinks.
pub fn simpson_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| simpson(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / pieces as f64))
        .sum()
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn gauss_pdf(x: f64, mean: f64, var: f64) -> f64 {
    std_normal_pdf((x - mean) / var.sqrt()) / var.sqrt()
}

/// 1-d mixture pdf written out from the parameters.
pub fn mixture_pdf_1d(mix: &GaussianMixture, x: f64) -> f64 {
    mix.components()
        .iter()
        .map(|c| c.weight * gauss_pdf(x, c.gaussian.mean()[0], c.gaussian.var()[0]))
        .sum()
}
