//! Signal sets and their ensemble energy spectral density.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chebyshev::{apply_many, esd_order, ChebyshevFilter};
use crate::graph::{check_len, estimate_lambda_max, LaplacianOperator, Spectrum};
use crate::kernels::{KernelSystem, SampledSystem};
use crate::warp::PiecewiseCubic;
use crate::{Error, Result};

/// Which spectral components are projected out before normalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanRemoval {
    /// The zero-eigenvalue group plus the next eigenvector.
    #[default]
    Literal,
    /// Only the zero-eigenvalue group.
    NullSpaceOnly,
}

/// Graph signals of common length with a label each.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    n_vertices: usize,
    signals: Vec<Vec<f64>>,
    labels: Vec<String>,
    normalized: bool,
}

impl SignalSet {
    pub fn new(n_vertices: usize, signals: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        check_len(signals.len(), labels.len())?;
        for s in &signals {
            check_len(n_vertices, s.len())?;
        }
        Ok(Self {
            n_vertices,
            signals,
            labels,
            normalized: false,
        })
    }

    /// Signals labelled by their position.
    pub fn unlabeled(n_vertices: usize, signals: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..signals.len()).map(|i| format!("s{i}")).collect();
        Self::new(n_vertices, signals, labels)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn signal(&self, s: usize) -> &[f64] {
        &self.signals[s]
    }

    pub fn signals(&self) -> &[Vec<f64>] {
        &self.signals
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Same labels, new signal values.
    pub(crate) fn replace_signals(&self, signals: Vec<Vec<f64>>, normalized: bool) -> Self {
        Self {
            n_vertices: self.n_vertices,
            signals,
            labels: self.labels.clone(),
            normalized,
        }
    }
}

fn project_out_and_normalize(set: &SignalSet, basis: &[&[f64]]) -> Result<SignalSet> {
    let mut out = Vec::with_capacity(set.len());
    for (s, f) in set.signals().iter().enumerate() {
        let norm0 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = f.clone();
        for chi in basis {
            let c: f64 = r.iter().zip(chi.iter()).map(|(a, b)| a * b).sum();
            for (ri, xi) in r.iter_mut().zip(chi.iter()) {
                *ri -= c * xi;
            }
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-12 * norm0) {
            return Err(Error::DegenerateSignal(s));
        }
        r.iter_mut().for_each(|v| *v /= norm);
        out.push(r);
    }
    Ok(set.replace_signals(out, true))
}

/// Removes the leading spectral components and scales every signal to unit norm.
pub fn demean_normalize(
    set: &SignalSet,
    spectrum: &Spectrum,
    removal: MeanRemoval,
) -> Result<SignalSet> {
    check_len(spectrum.len(), set.n_vertices())?;
    let zero = spectrum.groups()[0].multiplicity;
    let count = match removal {
        MeanRemoval::Literal => 1 + zero,
        MeanRemoval::NullSpaceOnly => zero,
    }
    .min(spectrum.len());
    let basis: Vec<&[f64]> = (0..count).map(|l| spectrum.eigenvector(l)).collect();
    project_out_and_normalize(set, &basis)
}

/// Removes only the analytically known null vector of `op` and normalizes.
pub fn null_space_normalize(set: &SignalSet, op: &LaplacianOperator) -> Result<SignalSet> {
    check_len(op.n(), set.n_vertices())?;
    let null = op.null_vector();
    let basis = [null.as_slice()];
    project_out_and_normalize(set, &basis)
}

/// Ensemble energy spectral density.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleEsd {
    /// Mean squared graph Fourier coefficients, one per eigenvalue.
    Direct { density: Vec<f64> },
    /// Mean band energies of a B-spline decomposition.
    Banded {
        energies: Vec<f64>,
        /// Normalized cumulative squared kernel norms, one per band.
        abscissas: Vec<f64>,
        system: KernelSystem,
        /// Shape-preserving interpolant through `(0,0)` and `(abscissa, energy)`.
        interpolant: PiecewiseCubic,
    },
}

impl EnsembleEsd {
    pub fn values(&self) -> &[f64] {
        match self {
            Self::Direct { density } => density,
            Self::Banded { energies, .. } => energies,
        }
    }

    pub fn total(&self) -> f64 {
        self.values().iter().sum()
    }

    /// Banded density only: the interpolant and, if a spectrum is given, its
    /// samples at the eigenvalues.
    pub fn interpolate(
        &self,
        spectrum: Option<&Spectrum>,
    ) -> Result<(&PiecewiseCubic, Option<Vec<f64>>)> {
        let Self::Banded { interpolant, .. } = self else {
            return Err(Error::InvalidParameters(
                "only banded densities are interpolated".into(),
            ));
        };
        let sampled = spectrum.map(|s| {
            s.eigenvalues()
                .iter()
                .map(|&l| interpolant.eval(l))
                .collect()
        });
        Ok((interpolant, sampled))
    }
}

/// Per-eigenvalue density of a signal set, normalizing it first if needed.
pub fn esd_direct(
    set: &SignalSet,
    spectrum: &Spectrum,
    removal: MeanRemoval,
) -> Result<EnsembleEsd> {
    let owned;
    let set = if set.is_normalized() {
        set
    } else {
        owned = demean_normalize(set, spectrum, removal)?;
        &owned
    };
    if set.is_empty() {
        return Err(Error::InvalidParameters("empty signal set".into()));
    }
    let mut density = vec![0.0; spectrum.len()];
    for f in set.signals() {
        for (d, c) in density.iter_mut().zip(spectrum.gft(f)?) {
            *d += c * c;
        }
    }
    let scale = 1.0 / set.len() as f64;
    density.iter_mut().for_each(|d| *d *= scale);
    Ok(EnsembleEsd::Direct { density })
}

/// How band-filtered signals are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandFilter {
    /// Spectral filtering through a full eigendecomposition.
    Exact,
    /// Truncated Chebyshev filtering; `None` picks `max(80, 2 * bands)`.
    Chebyshev { order: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandedOptions {
    pub bands: usize,
    pub degree: usize,
    pub filter: BandFilter,
    /// Used by the exact filter; the Chebyshev filter removes the null vector only.
    pub removal: MeanRemoval,
}

impl Default for BandedOptions {
    fn default() -> Self {
        Self {
            bands: 100,
            degree: 3,
            filter: BandFilter::Exact,
            removal: MeanRemoval::Literal,
        }
    }
}

/// Band-resolution density from a uniform B-spline system.
///
/// The exact filter needs `spectrum`. The Chebyshev filter works on `op` alone
/// and takes its domain from the operator's `lambda_max` hint, or from a
/// power-iteration estimate if the hint is absent.
pub fn esd_banded(
    set: &SignalSet,
    op: &LaplacianOperator,
    spectrum: Option<&Spectrum>,
    options: &BandedOptions,
) -> Result<EnsembleEsd> {
    if options.bands < 2 {
        return Err(Error::InvalidParameters(
            "banded density needs at least two bands".into(),
        ));
    }
    if set.is_empty() {
        return Err(Error::InvalidParameters("empty signal set".into()));
    }
    let energies: Vec<f64>;
    let system: KernelSystem;
    match options.filter {
        BandFilter::Exact => {
            let spectrum = spectrum.ok_or_else(|| {
                Error::InvalidParameters("exact band filtering needs a spectrum".into())
            })?;
            system = KernelSystem::bspline(options.bands, options.degree, spectrum.lambda_max())?;
            let normalized = demean_normalize(set, spectrum, options.removal)?;
            let sampled = system.sample(spectrum)?;
            let Ok(EnsembleEsd::Direct { density }) =
                esd_direct(&normalized, spectrum, options.removal)
            else {
                unreachable!("normalized set always yields a direct density")
            };
            energies = captured_energy(&density, &sampled, true)?;
        }
        BandFilter::Chebyshev { order } => {
            let order = order.unwrap_or_else(|| esd_order(options.bands));
            let lambda_max = match op.lambda_max_hint() {
                Some(l) => l,
                None => estimate_lambda_max(op, 1e-8, 100_000)?,
            };
            system = KernelSystem::bspline(options.bands, options.degree, lambda_max)?;
            let filters = system
                .kernels()
                .iter()
                .map(|k| ChebyshevFilter::from_kernel(k, order, lambda_max, None))
                .collect::<Result<Vec<_>>>()?;
            let normalized = null_space_normalize(set, op)?;
            let mut acc = vec![0.0; options.bands];
            for f in normalized.signals() {
                for (a, band) in acc.iter_mut().zip(apply_many(op, &filters, f)?) {
                    *a += band.iter().map(|v| v * v).sum::<f64>();
                }
            }
            let scale = 1.0 / set.len() as f64;
            energies = acc.into_iter().map(|a| a * scale).collect();
        }
    }
    let abscissas = system.band_abscissas();
    let mut x = vec![0.0];
    let mut y = vec![0.0];
    x.extend_from_slice(&abscissas);
    y.extend_from_slice(&energies);
    let interpolant = PiecewiseCubic::new(x, y)?;
    Ok(EnsembleEsd::Banded {
        energies,
        abscissas,
        system,
        interpolant,
    })
}

/// Energy of a per-eigenvalue density captured by each band:
/// `sum_l k_j[l]^2 e[l]`, or `sum_l k_j[l] e[l]` when `squared` is false.
pub fn captured_energy(
    density: &[f64],
    sampled: &SampledSystem<'_>,
    squared: bool,
) -> Result<Vec<f64>> {
    check_len(sampled.n(), density.len())?;
    Ok((0..sampled.bands())
        .map(|j| {
            sampled
                .row(j)
                .iter()
                .zip(density)
                .map(|(k, e)| if squared { k * k * e } else { k * e })
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::{LaplacianKind, SpectrumOptions};
    use alloc::string::ToString;

    fn setup(g: &crate::Graph, kind: LaplacianKind) -> (LaplacianOperator, Spectrum) {
        let op = LaplacianOperator::new(g, kind).unwrap();
        let spec = Spectrum::compute(&op, SpectrumOptions::default()).unwrap();
        let op = op.with_lambda_max_hint(spec.lambda_max());
        (op, spec)
    }

    fn set_of(n: usize, signals: Vec<Vec<f64>>) -> SignalSet {
        SignalSet::unlabeled(n, signals).unwrap()
    }

    #[test]
    fn demean_examples() {
        let (_, spec) = setup(&generators::path(3), LaplacianKind::Combinatorial);
        let chi3 = spec.eigenvector(2).to_vec();
        let out =
            demean_normalize(&set_of(3, vec![chi3.clone()]), &spec, MeanRemoval::Literal).unwrap();
        assert!(out
            .signal(0)
            .iter()
            .zip(&chi3)
            .all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(out.is_normalized());
        let ones = vec![1.0; 3];
        assert_eq!(
            demean_normalize(&set_of(3, vec![ones]), &spec, MeanRemoval::Literal),
            Err(Error::DegenerateSignal(0))
        );
        let mixed: Vec<f64> = (0..3)
            .map(|i| spec.eigenvector(0)[i] + 2.0 * chi3[i])
            .collect();
        let out = demean_normalize(&set_of(3, vec![mixed]), &spec, MeanRemoval::Literal).unwrap();
        assert!(out
            .signal(0)
            .iter()
            .zip(&chi3)
            .all(|(a, b)| (a - b).abs() < 1e-12));
        // χ2 survives only when the null space alone is removed.
        let chi2 = spec.eigenvector(1).to_vec();
        assert!(
            demean_normalize(&set_of(3, vec![chi2.clone()]), &spec, MeanRemoval::Literal).is_err()
        );
        assert!(
            demean_normalize(&set_of(3, vec![chi2]), &spec, MeanRemoval::NullSpaceOnly).is_ok()
        );
    }

    #[test]
    fn direct_examples() {
        let (_, spec) = setup(&generators::path(3), LaplacianKind::Combinatorial);
        let e = esd_direct(
            &set_of(3, vec![spec.eigenvector(2).to_vec()]),
            &spec,
            MeanRemoval::Literal,
        )
        .unwrap();
        let expected = [0.0, 0.0, 1.0];
        assert!(e
            .values()
            .iter()
            .zip(expected)
            .all(|(a, b)| (a - b).abs() < 1e-12));

        let (_, spec) = setup(&generators::path(4), LaplacianKind::Combinatorial);
        let f: Vec<f64> = (0..4)
            .map(|i| spec.eigenvector(2)[i] + spec.eigenvector(3)[i])
            .collect();
        let e = esd_direct(&set_of(4, vec![f]), &spec, MeanRemoval::NullSpaceOnly).unwrap();
        assert!((e.values()[2] - 0.5).abs() < 1e-12 && (e.values()[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sums_to_one() {
        let g = generators::random_geometric(120, 0.2, true, 4).unwrap();
        for kind in [LaplacianKind::Combinatorial, LaplacianKind::Normalized] {
            let (op, spec) = setup(&g, kind);
            let signals: Vec<Vec<f64>> = (0..5)
                .map(|s| {
                    (0..120)
                        .map(|i| (((i * 31 + s * 17) % 23) as f64).sin())
                        .collect()
                })
                .collect();
            let set = set_of(120, signals);
            let e = esd_direct(&set, &spec, MeanRemoval::Literal).unwrap();
            assert!((e.total() - 1.0).abs() <= 1e-10);
            assert!(e.values().iter().all(|&v| v >= 0.0));
            assert!(e.values()[0].abs() < 1e-20 && e.values()[1].abs() < 1e-20);
            let opts = BandedOptions {
                bands: 20,
                ..Default::default()
            };
            let b = esd_banded(&set, &op, Some(&spec), &opts).unwrap();
            assert!((b.total() - 1.0).abs() <= 1e-10);
            let cheb = BandedOptions {
                bands: 20,
                filter: BandFilter::Chebyshev { order: Some(80) },
                ..Default::default()
            };
            let c = esd_banded(&set, &op, None, &cheb).unwrap();
            assert!((c.total() - 1.0).abs() <= 1e-3, "{}", c.total());
        }
    }

    #[test]
    fn chebyshev_converges_to_exact() {
        let g = generators::random_geometric(150, 0.18, true, 8).unwrap();
        let (op, spec) = setup(&g, LaplacianKind::Combinatorial);
        let signals: Vec<Vec<f64>> = (0..4)
            .map(|s| {
                (0..150)
                    .map(|i| if (i + s) % 5 == 0 { 1.0 } else { 0.2 })
                    .collect()
            })
            .collect();
        let set = set_of(150, signals);
        let exact = BandedOptions {
            bands: 20,
            removal: MeanRemoval::NullSpaceOnly,
            ..Default::default()
        };
        let e = esd_banded(&set, &op, Some(&spec), &exact).unwrap();
        let cheb = BandedOptions {
            filter: BandFilter::Chebyshev { order: Some(200) },
            ..exact
        };
        let c = esd_banded(&set, &op, None, &cheb).unwrap();
        let diff = e
            .values()
            .iter()
            .zip(c.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-4, "{diff}");
    }

    #[test]
    fn single_eigenvector_banded() {
        let (op, spec) = setup(&generators::path(3), LaplacianKind::Combinatorial);
        let set = set_of(3, vec![spec.eigenvector(1).to_vec()]);
        let opts = BandedOptions {
            bands: 4,
            removal: MeanRemoval::NullSpaceOnly,
            ..Default::default()
        };
        let b = esd_banded(&set, &op, Some(&spec), &opts).unwrap();
        let EnsembleEsd::Banded { system, .. } = &b else {
            panic!()
        };
        for (j, a) in b.values().iter().enumerate() {
            assert!((a - system.kernel(j).eval(1.0).powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn interpolation() {
        let g = generators::random_geometric(100, 0.2, true, 6).unwrap();
        let (op, spec) = setup(&g, LaplacianKind::Combinatorial);
        let set = set_of(
            100,
            vec![(0..100).map(|i| (i as f64 * 0.37).cos()).collect()],
        );
        let b = esd_banded(
            &set,
            &op,
            Some(&spec),
            &BandedOptions {
                bands: 12,
                ..Default::default()
            },
        )
        .unwrap();
        let (curve, sampled) = b.interpolate(Some(&spec)).unwrap();
        assert_eq!(curve.eval(0.0), 0.0);
        assert_eq!(sampled.unwrap().len(), 100);
        let EnsembleEsd::Banded { abscissas, .. } = &b else {
            panic!()
        };
        let steps: Vec<f64> = abscissas[1..10].windows(2).map(|w| w[1] - w[0]).collect();
        assert!(steps.iter().all(|s| (s - steps[0]).abs() < 1e-10));
        // Flat ordinates give a flat curve between interior abscissas.
        let flat = PiecewiseCubic::new(
            [0.0].iter().chain(abscissas).copied().collect(),
            [0.0].iter().chain(&[0.1; 12]).copied().collect(),
        )
        .unwrap();
        let (lo, hi) = (abscissas[0], abscissas[11]);
        for k in 0..=100 {
            let t = lo + (hi - lo) * k as f64 / 100.0;
            assert!((flat.eval(t) - 0.1).abs() < 1e-15);
        }
        assert!(EnsembleEsd::Direct { density: vec![1.0] }
            .interpolate(None)
            .is_err());
    }

    #[test]
    fn labels_must_match() {
        assert!(SignalSet::new(2, vec![vec![1.0, 2.0]], vec![]).is_err());
        assert!(SignalSet::new(2, vec![vec![1.0]], vec!["a".to_string()]).is_err());
    }
}
