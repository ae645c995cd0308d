//! Random smooth graph signals: spike trains diffused by adjacency powers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::energy::SignalSet;
use crate::graph::{check_len, Graph};
use crate::{Error, Result};

/// Largest adjacency power accepted by [`smooth_signal`].
pub const MAX_SMOOTHNESS: usize = 16;

/// Derives an independent stream seed for item `index` of a run seeded by `seed`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the combined words.
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `round(eta * n)` ones at distinct random positions.
pub fn spike(eta: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidDensity(eta));
    }
    let count = ((eta * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![0.0; n];
    for i in index::sample(&mut rng, n, count) {
        p[i] = 1.0;
    }
    Ok(p)
}

/// `A^power p` by repeated sparse products.
pub fn smooth_signal(graph: &Graph, power: usize, p: &[f64]) -> Result<Vec<f64>> {
    if power > MAX_SMOOTHNESS {
        return Err(Error::InvalidParameters(format!(
            "smoothness {power} exceeds {MAX_SMOOTHNESS}"
        )));
    }
    check_len(graph.n_vertices(), p.len())?;
    let mut x = p.to_vec();
    for _ in 0..power {
        x = graph.adjacency_apply(&x)?;
    }
    Ok(x)
}

/// Density/smoothness pairs, realizations per pair and a base seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSpec {
    pub pairs: Vec<(f64, usize)>,
    pub realizations: usize,
    pub seed: u64,
}

impl SetSpec {
    /// Densities 0.2 and 0.5, ten realizations each, at smoothness `power`.
    pub fn paper_defaults(power: usize, seed: u64) -> Self {
        Self {
            pairs: vec![(0.2, power), (0.5, power)],
            realizations: 10,
            seed,
        }
    }
}

/// One signal per (pair, realization), labelled `eta=..,n=..,i=..`.
pub fn make_sets(graph: &Graph, spec: &SetSpec) -> Result<SignalSet> {
    let n = graph.n_vertices();
    let mut signals = Vec::with_capacity(spec.pairs.len() * spec.realizations);
    let mut labels = Vec::with_capacity(signals.capacity());
    for &(eta, power) in &spec.pairs {
        for i in 0..spec.realizations {
            let seed = mix_seed(spec.seed, signals.len() as u64);
            let p = spike(eta, n, seed)?;
            signals.push(smooth_signal(graph, power, &p)?);
            labels.push(format!("eta={eta},n={power},i={i}"));
        }
    }
    SignalSet::new(n, signals, labels)
}

/// Adds white Gaussian noise at `snr_db` relative to each signal's sample
/// variance. An infinite SNR returns the set unchanged.
pub fn add_noise(set: &SignalSet, snr_db: f64, seed: u64) -> Result<SignalSet> {
    if snr_db == f64::INFINITY {
        return Ok(set.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidParameters("SNR is NaN".into()));
    }
    let ratio = 10f64.powf(snr_db / 10.0);
    let mut out = Vec::with_capacity(set.len());
    for (s, x) in set.signals().iter().enumerate() {
        let sigma = sample_std(x) / ratio.sqrt();
        let mut y = x.clone();
        if sigma > 0.0 {
            let normal =
                Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameters(format!("{e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, s as u64));
            for v in y.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
        out.push(y);
    }
    Ok(set.replace_signals(out, false))
}

/// Unbiased sample standard deviation.
pub fn sample_std(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{esd_direct, MeanRemoval};
    use crate::generators;
    use crate::graph::{LaplacianKind, LaplacianOperator, Spectrum, SpectrumOptions};

    #[test]
    fn spikes() {
        assert_eq!(spike(1.0, 7, 3).unwrap(), vec![1.0; 7]);
        assert_eq!(spike(0.5, 10, 3).unwrap().iter().sum::<f64>(), 5.0);
        assert_eq!(spike(0.3, 50, 9).unwrap(), spike(0.3, 50, 9).unwrap());
        assert_ne!(spike(0.3, 50, 9).unwrap(), spike(0.3, 50, 10).unwrap());
        assert_eq!(spike(0.0, 5, 1), Err(Error::InvalidDensity(0.0)));
        assert_eq!(spike(1.5, 5, 1), Err(Error::InvalidDensity(1.5)));
    }

    #[test]
    fn adjacency_powers() {
        let g = generators::random_geometric(50, 0.25, false, 1).unwrap();
        let p = spike(0.2, 50, 4).unwrap();
        assert_eq!(smooth_signal(&g, 0, &p).unwrap(), p);
        let mut delta = vec![0.0; 50];
        delta[7] = 1.0;
        let col = smooth_signal(&g, 1, &delta).unwrap();
        for i in 0..50 {
            assert_eq!(col[i], g.weight(i, 7));
        }
        assert!(smooth_signal(&g, 17, &p).is_err());
    }

    #[test]
    fn zero_beyond_reach() {
        let g = generators::path(12);
        let mut p = vec![0.0; 12];
        p[0] = 1.0;
        let x = smooth_signal(&g, 3, &p).unwrap();
        assert!(x[4..].iter().all(|&v| v == 0.0));
        assert!(x[3] > 0.0);
    }

    #[test]
    fn sets_and_labels() {
        let g = generators::random_geometric(60, 0.25, false, 2).unwrap();
        let set = make_sets(&g, &SetSpec::paper_defaults(2, 1)).unwrap();
        assert_eq!(set.len(), 20);
        assert_eq!(set.labels()[0], "eta=0.2,n=2,i=0");
        assert_eq!(set.labels()[19], "eta=0.5,n=2,i=9");
        let one = SetSpec {
            pairs: vec![(0.5, 1)],
            realizations: 1,
            seed: 0,
        };
        assert_eq!(make_sets(&g, &one).unwrap().len(), 1);
    }

    #[test]
    fn noise_levels() {
        let g = generators::random_geometric(2000, 0.05, true, 3).unwrap();
        let set = make_sets(&g, &SetSpec::paper_defaults(2, 5)).unwrap();
        assert_eq!(add_noise(&set, f64::INFINITY, 1).unwrap(), set);
        let noisy = add_noise(&set, 0.0, 1).unwrap();
        for (x, y) in set.signals().iter().zip(noisy.signals()) {
            let e: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
            let ratio = sample_std(&e).powi(2) / sample_std(x).powi(2);
            assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
        }
        assert_eq!(noisy, add_noise(&set, 0.0, 1).unwrap());
        assert_ne!(noisy, add_noise(&set, 0.0, 2).unwrap());
    }

    #[test]
    fn smoother_sets_hold_more_low_energy() {
        let g = generators::random_geometric(300, 0.1, true, 7).unwrap();
        let op = LaplacianOperator::new(&g, LaplacianKind::Combinatorial).unwrap();
        let spec = Spectrum::compute(&op, SpectrumOptions::default()).unwrap();
        let half = spec
            .eigenvalues()
            .partition_point(|&l| l < 0.5 * spec.lambda_max());
        let low = |power| {
            let set = make_sets(&g, &SetSpec::paper_defaults(power, 11)).unwrap();
            let e = esd_direct(&set, &spec, MeanRemoval::Literal).unwrap();
            e.values()[..half].iter().sum::<f64>()
        };
        assert!(low(4) > low(2));
    }
}
