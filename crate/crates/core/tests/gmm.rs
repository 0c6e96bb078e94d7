//! Gaussian-mixture pipeline checked against quadrature and CDF oracles.

mod common;

use std::collections::BTreeMap;

use nnsparse::gmm::{
    build_axis_partitions, coarsen_and_target, flatten_distance_1d, gaussian_cell_prob,
    gen_candidates, is_good, learn, mixture_l1_distance, sample_mixture, AxisGaussian,
    AxisPartitions, GaussianMixture, LearnOptions, Samples,
};
use nnsparse::ColumnOracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

fn equal_mass_boundaries(mass: f64) -> Vec<f64> {
    let pieces = (1.0 / mass).round() as usize;
    let n = std_normal();
    (1..pieces).map(|i| n.inverse_cdf(i as f64 / pieces as f64)).collect()
}

/// Quadrature oracle for `‖p − p^I‖₁` with unbounded intervals counted as
/// `2·p(tail)`.
fn flatten_oracle(mean: f64, var: f64, boundaries: &[f64]) -> f64 {
    let sd = var.sqrt();
    let dist = Normal::new(mean, sd).unwrap();
    let mut total = 2.0 * dist.cdf(boundaries[0]) + 2.0 * (1.0 - dist.cdf(*boundaries.last().unwrap()));
    for w in boundaries.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let level = (dist.cdf(hi) - dist.cdf(lo)) / (hi - lo);
        let f = |x: f64| (common::gauss_pdf(x, mean, var) - level).abs();
        total += common::simpson_panels(&f, lo, hi, 64, 1e-13);
    }
    total
}

#[test]
fn flatten_single_interval() {
    let v = flatten_distance_1d(0.0, 1.0, &[-10.0, 10.0]);
    let oracle = flatten_oracle(0.0, 1.0, &[-10.0, 10.0]);
    assert!((1.45..=1.55).contains(&v), "{v}");
    assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
}

#[test]
fn flatten_decreases_on_nested_partitions() {
    let mut prev = f64::INFINITY;
    for j in 1..=8 {
        let b = equal_mass_boundaries(0.5f64.powi(j));
        let v = flatten_distance_1d(0.0, 1.0, &b);
        assert!(v < prev, "level {j}: {v} !< {prev}");
        prev = v;
    }
    assert!(prev < 0.1);
}

#[test]
fn flatten_fine_partition() {
    let b = equal_mass_boundaries(0.01);
    let v = flatten_distance_1d(0.0, 1.0, &b);
    assert!(v <= 30.0 * 0.01f64.sqrt());
    assert!(v <= 0.5, "{v}");
    assert!((v - flatten_oracle(0.0, 1.0, &b)).abs() < 1e-7);
}

#[test]
fn flatten_matches_oracle_off_center() {
    let b = equal_mass_boundaries(0.05);
    for &(mean, var) in &[(0.3, 1.0), (-1.0, 0.25), (2.0, 4.0), (0.0, 0.01)] {
        let v = flatten_distance_1d(mean, var, &b);
        let o = flatten_oracle(mean, var, &b);
        assert!((v - o).abs() < 1e-7, "({mean},{var}): {v} vs {o}");
    }
}

#[test]
fn cell_probabilities() {
    let g = AxisGaussian::new(vec![0.0], vec![1.0]).unwrap();
    let p = gaussian_cell_prob(&g, &[(-1.96, 1.96)]);
    let oracle = common::simpson(&common::std_normal_pdf, -1.96, 1.96, 1e-14);
    assert!((p - 0.95).abs() < 1e-4);
    assert!((p - oracle).abs() < 1e-10);
    assert_eq!(gaussian_cell_prob(&g, &[(f64::NEG_INFINITY, 0.0)]), 0.5);
    let g2 = AxisGaussian::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let q = gaussian_cell_prob(&g2, &[(f64::NEG_INFINITY, 0.0), (f64::NEG_INFINITY, 0.0)]);
    assert!((q - 0.25).abs() < 1e-15);
    // Far tail keeps relative accuracy.
    let tail = gaussian_cell_prob(&g, &[(30.0, f64::INFINITY)]);
    let expected = 4.906713927148187e-198;
    assert!(((tail - expected) / expected).abs() < 1e-10, "{tail}");
}

#[test]
fn goodness_matches_cdf_oracle() {
    let parts = AxisPartitions::new(vec![equal_mass_boundaries(0.05)]).unwrap();
    let b = parts.boundaries(0).to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = [false; 2];
    for _ in 0..300 {
        let mean = rng.random_range(-3.0..3.0);
        let sd = 10f64.powf(rng.random_range(-2.0..1.5));
        let bound = rng.random_range(0.05..0.6);
        let dist = Normal::new(mean, sd).unwrap();
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(&b);
        edges.push(f64::INFINITY);
        let oracle = edges.windows(2).all(|w| dist.cdf(w[1]) - dist.cdf(w[0]) <= bound);
        let g = AxisGaussian::new(vec![mean], vec![sd * sd]).unwrap();
        assert_eq!(is_good(&g, &parts, bound), oracle, "mean {mean} sd {sd} bound {bound}");
        seen[oracle as usize] = true;
    }
    assert!(seen[0] && seen[1]);
    let g = AxisGaussian::new(vec![0.0], vec![1.0]).unwrap();
    assert!(is_good(&g, &parts, 1.0));
    let single = AxisPartitions::new(vec![vec![]]).unwrap();
    assert!(!is_good(&g, &single, 0.1));
}

#[test]
fn cell_table_and_candidate_columns_sum_to_one() {
    let mix = GaussianMixture::from_parts(&[
        (0.4, vec![0.0, 1.0], vec![1.0, 0.5]),
        (0.6, vec![4.0, -2.0], vec![2.0, 1.0]),
    ])
    .unwrap();
    let samples = sample_mixture(&mix, 20_000, 3);
    let first = samples.slice(0..10_000);
    let second = samples.slice(10_000..20_000);
    let parts = build_axis_partitions(&first, 0.05).unwrap();
    let counts = nnsparse::gmm::bin_counts(&second, &parts);
    let table = coarsen_and_target(&counts, second.len() as u64, 0.05, 0.1, 2).unwrap();
    assert!((table.b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let cands = gen_candidates(&first.slice(0..40), &parts, 0.5, &table).unwrap();
    assert_eq!(cands.target(), &table.b[..]);
    let heavy: Vec<_> = table.heavy_keys().cloned().collect();
    for c in cands.candidates().iter().take(200) {
        let dense = c.column.to_dense(table.rows());
        assert!((dense.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Heavy entries against an independent CDF product.
        for (row, key) in heavy.iter().enumerate() {
            let mut p = 1.0;
            for (axis, &t) in key.iter().enumerate() {
                let (lo, hi) = parts.interval(axis, t);
                let n = Normal::new(c.gaussian.mean()[axis], c.gaussian.var()[axis].sqrt()).unwrap();
                p *= n.cdf(hi) - n.cdf(lo);
            }
            assert!((dense[row + 1] - p).abs() < 1e-12);
        }
    }
}

#[test]
fn coarsen_random_inputs_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let cells = rng.random_range(1..30);
        let counts: BTreeMap<Vec<usize>, u64> =
            (0..cells).map(|i| (vec![i], rng.random_range(1..100))).collect();
        let n: u64 = counts.values().sum();
        let eps = rng.random_range(0.01..0.49);
        let eps1 = rng.random_range(0.001..0.2);
        match coarsen_and_target(&counts, n, eps1, eps, 1) {
            Ok(t) => {
                assert!((t.b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert_eq!(t.heavy.len() + t.light.len(), counts.len());
            }
            Err(e) => assert!(matches!(e, nnsparse::Error::AllMassLight)),
        }
    }
}

#[test]
fn mixture_distance_closed_form() {
    let f = GaussianMixture::from_parts(&[(0.5, vec![0.0], vec![1.0]), (0.5, vec![3.0], vec![1.0])]).unwrap();
    let g = GaussianMixture::from_parts(&[(0.6, vec![0.0], vec![1.0]), (0.4, vec![3.0], vec![1.0])]).unwrap();
    let est = mixture_l1_distance(&f, &g, 2000).unwrap();
    let closed = 0.2 * (2.0 * std_normal().cdf(1.5) - 1.0);
    let diff = |x: f64| 0.1 * (common::gauss_pdf(x, 0.0, 1.0) - common::gauss_pdf(x, 3.0, 1.0)).abs();
    let quad = common::simpson_panels(&diff, -12.0, 15.0, 54, 1e-14);
    assert!((closed - quad).abs() < 1e-10);
    assert!((est.distance - closed).abs() < 1e-5, "{} vs {closed}", est.distance);
    assert!((est.distance - closed).abs() <= est.error_estimate.max(1e-6));
}

#[test]
fn sampling_single_weight_uses_one_component() {
    let mix = GaussianMixture::from_parts(&[(1.0, vec![5.0], vec![0.01])]).unwrap();
    let s = sample_mixture(&mix, 1000, 1);
    assert!(s.rows().all(|r| (r[0] - 5.0).abs() < 1.0));
    let s2 = sample_mixture(&mix, 100_000, 2);
    let mean = s2.as_slice().iter().sum::<f64>() / 1e5;
    assert!((mean - 5.0).abs() < 4.0 * 0.1 / (1e5f64).sqrt());
}

#[test]
fn learn_single_gaussian() {
    let mix = GaussianMixture::from_parts(&[(1.0, vec![0.0], vec![1.0])]).unwrap();
    let samples = sample_mixture(&mix, 50_000, 11);
    let opts = LearnOptions { seed: 11, ..LearnOptions::default() };
    let out = learn(&samples, 1, 0.3, &opts).unwrap();
    assert!(out.mixture.k() >= 1);
    assert!(out.report.residual <= 64.0 * 0.3);
    assert!((out.eps1 - 0.027).abs() < 1e-15);
    let dist = mixture_l1_distance(&mix, &out.mixture, 2000).unwrap();
    assert!(dist.distance <= 170.0 * 0.3);
}

#[test]
fn learn_separated_mixture() {
    let truth = GaussianMixture::from_parts(&[(0.5, vec![0.0], vec![1.0]), (0.5, vec![10.0], vec![1.0])]).unwrap();
    let samples = sample_mixture(&truth, 100_000, 13);
    let opts = LearnOptions { seed: 13, ..LearnOptions::default() };
    let out = learn(&samples, 2, 0.2, &opts).unwrap();
    // Golden run: three components, the left cluster split in two.
    assert_eq!(out.mixture.k(), 3);
    assert!(out
        .mixture
        .components()
        .iter()
        .all(|c| [0.0, 10.0].iter().any(|m| (c.gaussian.mean()[0] - m).abs() <= 0.5)));
    for center in [0.0, 10.0] {
        let weight: f64 = out
            .mixture
            .components()
            .iter()
            .filter(|c| (c.gaussian.mean()[0] - center).abs() <= 0.5)
            .map(|c| c.weight)
            .sum();
        assert!(weight >= 0.3, "center {center}: {weight}");
    }
}

#[test]
fn learn_two_dimensional() {
    let mix = GaussianMixture::from_parts(&[(1.0, vec![0.0, 0.0], vec![1.0, 1.0])]).unwrap();
    let samples = sample_mixture(&mix, 40_000, 21);
    let opts = LearnOptions { eps1: Some(0.05), seed: 21, ..LearnOptions::default() };
    let out = learn(&samples, 1, 0.3, &opts).unwrap();
    let dist = mixture_l1_distance(&mix, &out.mixture, 300).unwrap();
    assert!(dist.distance <= 1.0, "{}", dist.distance);
}

#[test]
fn learn_rejects_small_samples() {
    let mix = GaussianMixture::from_parts(&[(1.0, vec![0.0], vec![1.0])]).unwrap();
    let samples = sample_mixture(&mix, 40, 1);
    let err = learn(&samples, 1, 0.3, &LearnOptions::default()).unwrap_err();
    assert!(matches!(err, nnsparse::Error::InsufficientSamples { .. }), "{err:?}");
}

#[test]
fn heavy_components_are_good_on_learned_partitions() {
    let (eps, k, d) = (0.2, 3usize, 1usize);
    let eps1 = eps * eps * eps / (k * d) as f64;
    let bound = 2.0 * eps * eps / d as f64;
    for seed in [1u64, 2, 3] {
        let mix = GaussianMixture::from_parts(&[
            (0.5, vec![0.0], vec![1.0]),
            (0.3, vec![6.0], vec![0.25]),
            (0.2, vec![-5.0], vec![4.0]),
        ])
        .unwrap();
        let samples = sample_mixture(&mix, 50_000, seed);
        let parts = build_axis_partitions(&samples, eps1).unwrap();
        for c in mix.components() {
            if c.weight >= eps / k as f64 {
                assert!(is_good(&c.gaussian, &parts, bound), "seed {seed}");
            }
        }
    }
}

#[test]
fn two_dimensional_flattening_triangle_inequality() {
    let bx = equal_mass_boundaries(0.1);
    let by: Vec<f64> = bx.iter().map(|v| 0.5 + 1.5 * v).collect();
    let (mx, vx, my, vy) = (0.2f64, 1.0f64, 0.0f64, 1.5f64);
    let px = Normal::new(mx, vx.sqrt()).unwrap();
    let py = Normal::new(my, f64::sqrt(vy)).unwrap();
    let edges = |b: &[f64]| {
        let mut e = vec![f64::NEG_INFINITY];
        e.extend(b);
        e.push(f64::INFINITY);
        e
    };
    let (ex, ey) = (edges(&bx), edges(&by));
    let mut total = 0.0;
    for wx in ex.windows(2) {
        for wy in ey.windows(2) {
            let mass = (px.cdf(wx[1]) - px.cdf(wx[0])) * (py.cdf(wy[1]) - py.cdf(wy[0]));
            if !(wx[0].is_finite() && wx[1].is_finite() && wy[0].is_finite() && wy[1].is_finite()) {
                total += 2.0 * mass;
                continue;
            }
            let level = mass / ((wx[1] - wx[0]) * (wy[1] - wy[0]));
            let inner = |x: f64| {
                let gx = common::gauss_pdf(x, mx, vx);
                let f = |y: f64| (gx * common::gauss_pdf(y, my, vy) - level).abs();
                common::simpson_panels(&f, wy[0], wy[1], 8, 1e-11)
            };
            total += common::simpson_panels(&inner, wx[0], wx[1], 8, 1e-10);
        }
    }
    let sum = flatten_distance_1d(mx, vx, &bx) + flatten_distance_1d(my, vy, &by);
    assert!(total <= sum + 1e-6, "{total} > {sum}");
    assert!(total <= 30.0 * 2.0 * 0.1f64.sqrt());
}

#[test]
fn samples_shape_checks() {
    assert!(Samples::new(2, vec![1.0, 2.0, 3.0]).is_err());
    let s = Samples::from_rows(2, &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.row(1), &[3.0, 4.0]);
}
