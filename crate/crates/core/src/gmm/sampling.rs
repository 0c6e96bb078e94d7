use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_distr::StandardNormal;

use crate::rng::{stream_rng, Stream};

use super::{GaussianMixture, Samples};

/// `n` i.i.d. draws: a component by weight, then each axis independently.
pub fn sample_mixture(mix: &GaussianMixture, n: usize, seed: u64) -> Samples {
    let mut rng = stream_rng(seed, Stream::MixtureSamples);
    let comps = mix.components();
    let pick = WeightedIndex::new(comps.iter().map(|c| c.weight))
        .expect("mixture weights are positive");
    let sds: Vec<Vec<f64>> = comps
        .iter()
        .map(|c| c.gaussian.var().iter().map(|v| v.sqrt()).collect())
        .collect();
    let d = mix.d();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        let r = pick.sample(&mut rng);
        let mean = comps[r].gaussian.mean();
        for i in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(mean[i] + sds[r][i] * z);
        }
    }
    Samples::new(d, data).expect("row length matches d")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_component_mean() {
        let mix = GaussianMixture::from_parts(&[(1.0, vec![3.0], vec![4.0])]).unwrap();
        let n = 100_000;
        let s = sample_mixture(&mix, n, 5);
        let mean = s.as_slice().iter().sum::<f64>() / n as f64;
        assert!((mean - 3.0).abs() < 4.0 * 2.0 / (n as f64).sqrt());
    }

    #[test]
    fn reproducible() {
        let mix = GaussianMixture::from_parts(&[
            (0.3, vec![0.0, 1.0], vec![1.0, 2.0]),
            (0.7, vec![5.0, -1.0], vec![0.5, 1.0]),
        ])
        .unwrap();
        assert_eq!(sample_mixture(&mix, 50, 9), sample_mixture(&mix, 50, 9));
        assert_ne!(sample_mixture(&mix, 50, 9), sample_mixture(&mix, 50, 10));
        assert!(sample_mixture(&mix, 0, 9).is_empty());
    }
}
