//! Signal-adapted designs on a fixed graph: the two-set comparison, the
//! equal-energy check and the noise sweep.

use graphspectra_core::energy::{
    demean_normalize, esd_banded, esd_direct, BandFilter, BandedOptions,
};
use graphspectra_core::graph::SpectrumOptions;
use graphspectra_core::signal::{add_noise, make_sets, mix_seed, SetSpec};
use graphspectra_core::transform::ensemble_band_energies;
use graphspectra_core::warp::{energy_warp_approx, energy_warp_exact, spectrum_warp};
use graphspectra_core::{
    ContinuousKernel, Graph, KernelSystem, LaplacianKind, LaplacianOperator, MeanRemoval,
    SignalSet, Spectrum, WarpFunction, UMT_GAMMA,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// Points of the uniform grid on which warps and kernels are compared and exported.
pub const GRID_POINTS: usize = 2001;

pub fn grid(lambda_max: f64, points: usize) -> Vec<f64> {
    let step = lambda_max / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                lambda_max
            } else {
                i as f64 * step
            }
        })
        .collect()
}

/// A graph with its Laplacian and full spectrum. The operator carries the
/// largest eigenvalue as its Chebyshev domain.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub graph: Graph,
    pub op: LaplacianOperator,
    pub spectrum: Spectrum,
}

impl Fixture {
    pub fn new(graph: Graph, kind: LaplacianKind) -> Result<Self> {
        let op = LaplacianOperator::new(&graph, kind)?;
        let spectrum = Spectrum::compute(&op, SpectrumOptions::default())?;
        let op = op.with_lambda_max_hint(spectrum.lambda_max());
        Ok(Self {
            graph,
            op,
            spectrum,
        })
    }

    pub fn lambda_max(&self) -> f64 {
        self.spectrum.lambda_max()
    }
}

/// How the ensemble density behind an energy warp is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimate {
    /// Per-eigenvalue density.
    Exact,
    /// Band energies of `bands` cubic B-splines, filtered exactly or by a
    /// Chebyshev expansion of the given order.
    Banded { bands: usize, order: Option<usize> },
}

pub fn energy_warp(fx: &Fixture, set: &SignalSet, estimate: Estimate) -> Result<WarpFunction> {
    Ok(match estimate {
        Estimate::Exact => {
            let esd = esd_direct(set, &fx.spectrum, MeanRemoval::Literal)?;
            energy_warp_exact(&esd, &fx.spectrum, None)?
        }
        Estimate::Banded { bands, order } => {
            let filter = match order {
                Some(m) => BandFilter::Chebyshev { order: Some(m) },
                None => BandFilter::Exact,
            };
            let opts = BandedOptions {
                bands,
                filter,
                ..BandedOptions::default()
            };
            energy_warp_approx(&esd_banded(set, &fx.op, Some(&fx.spectrum), &opts)?)?
        }
    })
}

/// Right edge of the support of a kernel that decreases to zero, by bisection.
pub fn support_edge(kernel: &ContinuousKernel) -> f64 {
    let (mut lo, mut hi) = (0.0, kernel.lambda_max());
    if kernel.eval(hi) > 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kernel.eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    hi
}

/// Band energies of the demeaned, normalized set on `system`.
pub fn ensemble_energies(fx: &Fixture, set: &SignalSet, system: &KernelSystem) -> Result<Vec<f64>> {
    let normalized = demean_normalize(set, &fx.spectrum, MeanRemoval::Literal)?;
    Ok(ensemble_band_energies(
        &normalized,
        &system.sample(&fx.spectrum)?,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptationConfig {
    pub bands: usize,
    pub gamma: f64,
    /// Bands of the approximate density estimate.
    pub na: usize,
    pub order: Option<usize>,
    pub densities: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for AdaptationConfig {
    fn default() -> Self {
        Self {
            bands: 7,
            gamma: UMT_GAMMA,
            na: 100,
            order: None,
            densities: vec![0.2, 0.5],
            realizations: 10,
            seed: 1,
        }
    }
}

impl AdaptationConfig {
    pub fn set_spec(&self, smoothness: usize) -> SetSpec {
        SetSpec {
            pairs: self
                .densities
                .iter()
                .map(|&eta| (eta, smoothness))
                .collect(),
            realizations: self.realizations,
            seed: self.seed,
        }
    }
}

/// A UMT system adapted to one signal set.
#[derive(Debug, Clone)]
pub struct Adaptation {
    pub smoothness: usize,
    pub set: SignalSet,
    /// Per-eigenvalue ensemble density.
    pub esd: Vec<f64>,
    pub warp_exact: WarpFunction,
    pub warp_approx: WarpFunction,
    /// Prototype warped by the exact warp.
    pub system: KernelSystem,
    pub first_band_edge: f64,
    pub band_energies: Vec<f64>,
}

pub fn adapt(fx: &Fixture, cfg: &AdaptationConfig, smoothness: usize) -> Result<Adaptation> {
    let set = make_sets(&fx.graph, &cfg.set_spec(smoothness))?;
    let esd = esd_direct(&set, &fx.spectrum, MeanRemoval::Literal)?;
    let warp_exact = energy_warp_exact(&esd, &fx.spectrum, None)?;
    let warp_approx = energy_warp(
        fx,
        &set,
        Estimate::Banded {
            bands: cfg.na,
            order: cfg.order,
        },
    )?;
    let system =
        KernelSystem::umt(cfg.bands, fx.lambda_max(), cfg.gamma)?.warped(warp_exact.clone())?;
    let band_energies = ensemble_energies(fx, &set, &system)?;
    Ok(Adaptation {
        smoothness,
        first_band_edge: support_edge(system.kernel(0)),
        esd: esd.values().to_vec(),
        set,
        warp_exact,
        warp_approx,
        system,
        band_energies,
    })
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub lambda_max: f64,
    pub f1: Adaptation,
    pub f2: Adaptation,
    pub spectrum_warp: WarpFunction,
    pub spectrum_adapted: KernelSystem,
}

/// Smooth (`n = 2`) and smoother (`n = 4`) sets on the same graph, their warps
/// and adapted systems, and the spectrum-adapted baseline.
pub fn compare_sets(fx: &Fixture, cfg: &AdaptationConfig) -> Result<Comparison> {
    let (f1, f2) = rayon::join(|| adapt(fx, cfg, 2), || adapt(fx, cfg, 4));
    let spectrum_warp = spectrum_warp(&fx.spectrum)?;
    let spectrum_adapted =
        KernelSystem::umt(cfg.bands, fx.lambda_max(), cfg.gamma)?.warped(spectrum_warp.clone())?;
    Ok(Comparison {
        lambda_max: fx.lambda_max(),
        f1: f1?,
        f2: f2?,
        spectrum_warp,
        spectrum_adapted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseConfig {
    pub snr_db: Vec<f64>,
    /// Independent repetitions, each with its own signals and noise.
    pub runs: usize,
    pub seed: u64,
    pub smoothness: usize,
    pub densities: Vec<f64>,
    pub realizations: usize,
    /// Allowed sup distance from the midpoint warp, relative to `lambda_max`.
    pub midpoint_tol: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![-20.0, -10.0, 0.0, 10.0, 20.0],
            runs: 5,
            seed: 1,
            smoothness: 2,
            densities: vec![0.2, 0.5],
            realizations: 10,
            midpoint_tol: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisePoint {
    pub run: usize,
    pub snr_db: f64,
    /// RMS distance to the clean energy warp.
    pub to_clean: f64,
    /// RMS distance to the spectrum warp.
    pub to_spectrum: f64,
    /// Sup distance to the mean of the clean and spectrum warps.
    pub to_midpoint: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunTrend {
    pub run: usize,
    /// Distance to the clean warp never grows with the SNR.
    pub monotone: bool,
    /// At the lowest SNR the warp is closer to the spectrum warp.
    pub noisiest_near_spectrum: bool,
    /// At 0 dB the warp is within tolerance of the midpoint warp; `None`
    /// if 0 dB is not in the sweep.
    pub midpoint: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseReport {
    pub lambda_max: f64,
    pub points: Vec<NoisePoint>,
    pub trends: Vec<RunTrend>,
}

impl NoiseReport {
    /// Number of runs satisfying each trend.
    pub fn counts(&self) -> (usize, usize, usize) {
        let count = |f: &dyn Fn(&RunTrend) -> bool| self.trends.iter().filter(|t| f(t)).count();
        (
            count(&|t| t.monotone),
            count(&|t| t.noisiest_near_spectrum),
            count(&|t| t.midpoint == Some(true)),
        )
    }
}

pub fn noise_sweep(fx: &Fixture, cfg: &NoiseConfig) -> Result<NoiseReport> {
    let mut snr = cfg.snr_db.clone();
    snr.sort_by(f64::total_cmp);
    snr.dedup();
    let lambda_max = fx.lambda_max();
    let t_spec = spectrum_warp(&fx.spectrum)?;
    let runs: Vec<Result<(Vec<NoisePoint>, RunTrend)>> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seed = mix_seed(cfg.seed, run as u64);
            let spec = SetSpec {
                pairs: cfg
                    .densities
                    .iter()
                    .map(|&eta| (eta, cfg.smoothness))
                    .collect(),
                realizations: cfg.realizations,
                seed,
            };
            let clean = make_sets(&fx.graph, &spec)?;
            let t_clean = energy_warp(fx, &clean, Estimate::Exact)?;
            // One noise stream per run, rescaled for each SNR.
            let noise_seed = mix_seed(seed, u64::MAX);
            let points = snr
                .iter()
                .map(|&db| {
                    let noisy = add_noise(&clean, db, noise_seed)?;
                    let t = energy_warp(fx, &noisy, Estimate::Exact)?;
                    let to_midpoint = grid(lambda_max, GRID_POINTS)
                        .into_iter()
                        .map(|l| (t.eval(l) - 0.5 * (t_clean.eval(l) + t_spec.eval(l))).abs())
                        .fold(0.0, f64::max);
                    Ok(NoisePoint {
                        run,
                        snr_db: db,
                        to_clean: t.l2_distance(&t_clean, GRID_POINTS),
                        to_spectrum: t.l2_distance(&t_spec, GRID_POINTS),
                        to_midpoint,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let slack = 1e-12 * lambda_max;
            let trend = RunTrend {
                run,
                monotone: points
                    .windows(2)
                    .all(|w| w[1].to_clean <= w[0].to_clean + slack),
                noisiest_near_spectrum: points.first().is_some_and(|p| p.to_spectrum < p.to_clean),
                midpoint: points
                    .iter()
                    .find(|p| p.snr_db == 0.0)
                    .map(|p| p.to_midpoint <= cfg.midpoint_tol * lambda_max),
            };
            Ok((points, trend))
        })
        .collect();
    let mut points = Vec::new();
    let mut trends = Vec::new();
    for r in runs {
        let (p, t) = r?;
        points.extend(p);
        trends.push(t);
    }
    Ok(NoiseReport {
        lambda_max,
        points,
        trends,
    })
}
