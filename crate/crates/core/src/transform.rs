//! Analysis and synthesis with sampled kernel systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::chebyshev::{apply_many, ChebyshevFilter};
use crate::energy::SignalSet;
use crate::graph::{check_len, LaplacianOperator};
use crate::kernels::SampledSystem;
use crate::{Error, Result};

/// Largest `|sum_j k_j^2 - 1|` accepted for reconstruction.
pub const PARSEVAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMode {
    Direct,
    Chebyshev { order: usize },
}

/// `bands x N` coefficients, row `j` being the signal filtered by kernel `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    bands: usize,
    n: usize,
    values: Vec<f64>,
    mode: CoefficientMode,
}

impl Coefficients {
    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n.max(1))
    }

    /// Total squared magnitude of all coefficients.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|c| c * c).sum()
    }
}

/// Impulse response of band `band` centred at `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub band: usize,
    pub center: usize,
    pub values: Vec<f64>,
}

pub fn atom(sys: &SampledSystem<'_>, band: usize, center: usize) -> Result<Atom> {
    let n = sys.n();
    if band >= sys.bands() {
        return Err(Error::IndexOutOfRange {
            index: band,
            len: sys.bands(),
        });
    }
    if center >= n {
        return Err(Error::IndexOutOfRange {
            index: center,
            len: n,
        });
    }
    let spectrum = sys.spectrum();
    let hat: Vec<f64> = (0..n)
        .map(|l| sys.value(band, l) * spectrum.eigenvector(l)[center])
        .collect();
    Ok(Atom {
        band,
        center,
        values: spectrum.igft(&hat)?,
    })
}

pub fn decompose_direct(f: &[f64], sys: &SampledSystem<'_>) -> Result<Coefficients> {
    let n = sys.n();
    check_len(n, f.len())?;
    let spectrum = sys.spectrum();
    let hat = spectrum.gft(f)?;
    let mut values = Vec::with_capacity(sys.bands() * n);
    for j in 0..sys.bands() {
        let filtered: Vec<f64> = hat.iter().zip(sys.row(j)).map(|(h, k)| h * k).collect();
        values.extend(spectrum.igft(&filtered)?);
    }
    Ok(Coefficients {
        bands: sys.bands(),
        n,
        values,
        mode: CoefficientMode::Direct,
    })
}

/// Synthesis `sum_l (sum_j k_j[l] c_hat_j[l]) chi_l`; requires a Parseval system.
pub fn reconstruct(c: &Coefficients, sys: &SampledSystem<'_>) -> Result<Vec<f64>> {
    if c.mode != CoefficientMode::Direct {
        return Err(Error::InvalidParameters(
            "reconstruction needs direct coefficients".into(),
        ));
    }
    if c.bands != sys.bands() {
        return Err(Error::DimensionMismatch {
            expected: sys.bands(),
            found: c.bands,
        });
    }
    check_len(sys.n(), c.n)?;
    if !sys.is_tight() || sys.tightness_defect() > PARSEVAL_TOL {
        return Err(Error::NotParseval);
    }
    let spectrum = sys.spectrum();
    let mut hat = vec![0.0; sys.n()];
    for j in 0..c.bands {
        for (h, (ch, k)) in hat
            .iter_mut()
            .zip(spectrum.gft(c.row(j))?.into_iter().zip(sys.row(j)))
        {
            *h += k * ch;
        }
    }
    spectrum.igft(&hat)
}

/// Chebyshev decomposition; never touches eigenvectors.
pub fn decompose_cheb(
    f: &[f64],
    op: &LaplacianOperator,
    filters: &[ChebyshevFilter],
) -> Result<Coefficients> {
    let rows = apply_many(op, filters, f)?;
    let order = filters
        .iter()
        .map(ChebyshevFilter::order)
        .max()
        .unwrap_or(0);
    Ok(Coefficients {
        bands: rows.len(),
        n: op.n(),
        values: rows.concat(),
        mode: CoefficientMode::Chebyshev { order },
    })
}

/// Fraction of the coefficient energy in each band.
pub fn band_energies(c: &Coefficients) -> Result<Vec<f64>> {
    let total = c.energy();
    if !(total > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok(c.rows()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>() / total)
        .collect())
}

/// Band energies averaged over a signal set.
pub fn ensemble_band_energies(set: &SignalSet, sys: &SampledSystem<'_>) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::InvalidParameters("empty signal set".into()));
    }
    let mut acc = vec![0.0; sys.bands()];
    for f in set.signals() {
        for (a, e) in acc
            .iter_mut()
            .zip(band_energies(&decompose_direct(f, sys)?)?)
        {
            *a += e;
        }
    }
    let scale = 1.0 / set.len() as f64;
    Ok(acc.into_iter().map(|a| a * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::{LaplacianKind, Spectrum, SpectrumOptions};
    use crate::kernels::{ContinuousKernel, KernelSystem};

    fn spectrum(g: &crate::Graph) -> (LaplacianOperator, Spectrum) {
        let op = LaplacianOperator::new(g, LaplacianKind::Combinatorial).unwrap();
        let s = Spectrum::compute(&op, SpectrumOptions::default()).unwrap();
        (op, s)
    }

    fn signal(n: usize, seed: usize) -> Vec<f64> {
        (0..n)
            .map(|i| ((i * 13 + seed * 7) as f64 * 0.61).sin())
            .collect()
    }

    #[test]
    fn identity_system() {
        let (_, spec) = spectrum(&generators::path(6));
        let sys = SampledSystem::from_values(&spec, 1, vec![1.0; 6], true).unwrap();
        let f = signal(6, 1);
        let c = decompose_direct(&f, &sys).unwrap();
        assert!(c.row(0).iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-12));
        let psi = atom(&sys, 0, 2).unwrap();
        for (i, v) in psi.values.iter().enumerate() {
            assert!((v - if i == 2 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        let mut ind = vec![0.0; 6];
        ind[0] = 1.0;
        let sys = SampledSystem::from_values(&spec, 1, ind, false).unwrap();
        let psi = atom(&sys, 0, 4).unwrap();
        assert!(psi.values.iter().all(|v| (v - 1.0 / 6.0).abs() < 1e-12));
        assert!(matches!(
            atom(&sys, 1, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            atom(&sys, 0, 6),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn atoms_are_inner_products() {
        let g = generators::random_geometric(40, 0.3, false, 2).unwrap();
        let (_, spec) = spectrum(&g);
        let sys = KernelSystem::umt_default(4, spec.lambda_max()).unwrap();
        let sampled = sys.sample(&spec).unwrap();
        let f = signal(40, 3);
        let c = decompose_direct(&f, &sampled).unwrap();
        for j in 0..4 {
            for m in [0, 17, 39] {
                let psi = atom(&sampled, j, m).unwrap();
                let ip: f64 = psi.values.iter().zip(&f).map(|(a, b)| a * b).sum();
                assert!((ip - c.row(j)[m]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn parseval_and_reconstruction() {
        let g = generators::random_geometric(200, 0.13, true, 1).unwrap();
        let (_, spec) = spectrum(&g);
        let base = KernelSystem::umt_default(7, spec.lambda_max()).unwrap();
        let sampled = base.sample(&spec).unwrap();
        for seed in 0..3 {
            let f = signal(200, seed);
            let norm2: f64 = f.iter().map(|v| v * v).sum();
            let c = decompose_direct(&f, &sampled).unwrap();
            assert!((c.energy() - norm2).abs() <= 1e-9 * norm2);
            let back = reconstruct(&c, &sampled).unwrap();
            let err: f64 = back
                .iter()
                .zip(&f)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-8 * norm2.sqrt());
            let e = band_energies(&c).unwrap();
            assert!((e.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        let zero = decompose_direct(&vec![0.0; 200], &sampled).unwrap();
        assert!(reconstruct(&zero, &sampled)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(band_energies(&zero), Err(Error::ZeroSignal));
        let loose = base.scaled(0.5).sample(&spec).unwrap();
        let c = decompose_direct(&signal(200, 0), &loose).unwrap();
        assert_eq!(reconstruct(&c, &loose), Err(Error::NotParseval));
    }

    #[test]
    fn eigenvector_decomposition() {
        let g = generators::random_geometric(30, 0.35, false, 9).unwrap();
        let (_, spec) = spectrum(&g);
        let sampled = KernelSystem::umt_default(5, spec.lambda_max())
            .unwrap()
            .sample(&spec)
            .unwrap();
        let l = 11;
        let chi = spec.eigenvector(l);
        let c = decompose_direct(chi, &sampled).unwrap();
        let e = band_energies(&c).unwrap();
        for j in 0..5 {
            let k = sampled.value(j, l);
            assert!(c
                .row(j)
                .iter()
                .zip(chi)
                .all(|(a, b)| (a - k * b).abs() < 1e-10));
            assert!((e[j] - k * k).abs() < 1e-10);
        }
    }

    #[test]
    fn chebyshev_rows() {
        let g = generators::random_geometric(60, 0.25, false, 4).unwrap();
        let (op, spec) = spectrum(&g);
        let lmax = spec.lambda_max();
        let one = ContinuousKernel::Constant {
            value: 1.0,
            lambda_max: lmax,
        };
        let filt = ChebyshevFilter::from_kernel(&one, 10, lmax, None).unwrap();
        let f = signal(60, 5);
        let c = decompose_cheb(&f, &op, &[filt.clone()]).unwrap();
        assert!(c.row(0).iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-9));
        let gsig = signal(60, 8);
        let mix: Vec<f64> = f
            .iter()
            .zip(&gsig)
            .map(|(a, b)| 2.0 * a - 0.5 * b)
            .collect();
        let sys = KernelSystem::umt_default(4, lmax).unwrap();
        let filters: Vec<_> = sys
            .kernels()
            .iter()
            .map(|k| ChebyshevFilter::from_kernel(k, 50, lmax, None).unwrap())
            .collect();
        let (cf, cg, cm) = (
            decompose_cheb(&f, &op, &filters).unwrap(),
            decompose_cheb(&gsig, &op, &filters).unwrap(),
            decompose_cheb(&mix, &op, &filters).unwrap(),
        );
        for j in 0..4 {
            for i in 0..60 {
                assert!((cm.row(j)[i] - (2.0 * cf.row(j)[i] - 0.5 * cg.row(j)[i])).abs() < 1e-10);
            }
        }
        assert_eq!(cf.mode(), CoefficientMode::Chebyshev { order: 50 });
    }
}
