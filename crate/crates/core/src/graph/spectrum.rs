use alloc::vec;
use alloc::vec::Vec;

use super::{check_len, LaplacianOperator};
use crate::{Error, Result};

/// Largest vertex count accepted by [`Spectrum::compute`] unless overridden.
pub const DEFAULT_DENSE_CAP: usize = 5000;

/// A distinct eigenvalue with its multiplicity and first (0-based) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenGroup {
    pub value: f64,
    pub multiplicity: usize,
    pub first: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Eigenvalues closer than this are one group. `None` means `1e-8 * lambda_max`.
    pub group_tol: Option<f64>,
    pub dense_cap: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            group_tol: None,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

/// Full eigendecomposition of a Laplacian: ascending eigenvalues, orthonormal
/// eigenvectors and multiplicity groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Column-major: eigenvector `l` occupies `[l * n, (l + 1) * n)`.
    vectors: Vec<f64>,
    groups: Vec<EigenGroup>,
}

impl Spectrum {
    /// Dense symmetric eigendecomposition. Rejects disconnected graphs.
    pub fn compute(op: &LaplacianOperator, options: SpectrumOptions) -> Result<Self> {
        let n = op.n();
        if n > options.dense_cap {
            return Err(Error::TooLarge {
                n,
                cap: options.dense_cap,
            });
        }
        let eig = op.to_dense().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut eigenvalues = Vec::with_capacity(n);
        let mut vectors = Vec::with_capacity(n * n);
        for &k in &order {
            eigenvalues.push(eig.eigenvalues[k]);
            let col = eig.eigenvectors.column(k);
            let start = vectors.len();
            vectors.extend(col.iter().copied());
            orient(&mut vectors[start..]);
        }
        let spectrum = Self::assemble(eigenvalues, vectors, options.group_tol)?;
        let zero = spectrum.groups[0];
        if zero.multiplicity > 1 {
            return Err(Error::Disconnected(zero.multiplicity));
        }
        Ok(spectrum)
    }

    /// Builds a spectrum from given ascending eigenvalues and column-major
    /// orthonormal eigenvectors. Useful for synthetic spectra.
    pub fn from_parts(
        eigenvalues: Vec<f64>,
        vectors: Vec<f64>,
        group_tol: Option<f64>,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        check_len(n * n, vectors.len())?;
        if let Some(k) = eigenvalues.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NonMonotoneInput(k + 1));
        }
        Self::assemble(eigenvalues, vectors, group_tol)
    }

    fn assemble(
        mut eigenvalues: Vec<f64>,
        vectors: Vec<f64>,
        group_tol: Option<f64>,
    ) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameters("empty spectrum".into()));
        }
        let lambda_max = eigenvalues[eigenvalues.len() - 1].max(0.0);
        let tol = group_tol.unwrap_or(1e-8 * lambda_max);
        for v in eigenvalues.iter_mut() {
            if v.abs() <= tol {
                *v = 0.0;
            }
        }
        let mut groups: Vec<EigenGroup> = Vec::new();
        for (l, &v) in eigenvalues.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if v - g.value <= tol => g.multiplicity += 1,
                _ => groups.push(EigenGroup {
                    value: v,
                    multiplicity: 1,
                    first: l,
                }),
            }
        }
        Ok(Self {
            eigenvalues,
            vectors,
            groups,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.len() - 1]
    }

    pub fn eigenvector(&self, l: usize) -> &[f64] {
        let n = self.len();
        &self.vectors[l * n..(l + 1) * n]
    }

    pub fn groups(&self) -> &[EigenGroup] {
        &self.groups
    }

    /// The group containing eigenvalue index `l`.
    pub fn group_of(&self, l: usize) -> &EigenGroup {
        let k = self.groups.partition_point(|g| g.first <= l) - 1;
        &self.groups[k]
    }

    /// Graph Fourier transform `f_hat[l] = <f, chi_l>`.
    pub fn gft(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), f.len())?;
        Ok((0..self.len())
            .map(|l| dot(self.eigenvector(l), f))
            .collect())
    }

    /// Inverse transform `f = sum_l f_hat[l] chi_l`.
    pub fn igft(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        check_len(n, coefficients.len())?;
        let mut f = vec![0.0; n];
        for (l, &c) in coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (fi, xi) in f.iter_mut().zip(self.eigenvector(l)) {
                *fi += c * xi;
            }
        }
        Ok(f)
    }

    /// Spectral filtering `sum_l K(lambda_l) f_hat[l] chi_l`.
    pub fn filter<K: Fn(f64) -> f64>(&self, f: &[f64], kernel: K) -> Result<Vec<f64>> {
        let mut hat = self.gft(f)?;
        for (h, &lambda) in hat.iter_mut().zip(&self.eigenvalues) {
            *h *= kernel(lambda);
        }
        self.igft(&hat)
    }
}

/// Sign convention: the first entry of largest magnitude is positive.
fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::{Graph, LaplacianKind};

    fn spectrum_of(g: &Graph, kind: LaplacianKind) -> Spectrum {
        Spectrum::compute(
            &LaplacianOperator::new(g, kind).unwrap(),
            SpectrumOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn k2_and_p3() {
        let s = spectrum_of(&generators::complete(2), LaplacianKind::Combinatorial);
        assert!(s.eigenvalues()[0] == 0.0 && (s.eigenvalues()[1] - 2.0).abs() < 1e-12);
        let s = spectrum_of(&generators::path(3), LaplacianKind::Combinatorial);
        for (a, b) in s.eigenvalues().iter().zip([0.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bipartite_normalized_top_is_two() {
        for g in [
            generators::path(7),
            generators::star(5),
            generators::grid(3, 4),
        ] {
            let s = spectrum_of(&g, LaplacianKind::Normalized);
            assert!((s.lambda_max() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenpairs_and_reconstruction() {
        let g = generators::random_geometric(80, 0.25, false, 11).unwrap();
        let op = LaplacianOperator::new(&g, LaplacianKind::Combinatorial).unwrap();
        let s = Spectrum::compute(&op, SpectrumOptions::default()).unwrap();
        let n = s.len();
        let dense = op.to_dense();
        let mut recon = nalgebra::DMatrix::<f64>::zeros(n, n);
        for l in 0..n {
            let chi = s.eigenvector(l);
            let lchi = op.apply(chi).unwrap();
            let resid: f64 = lchi
                .iter()
                .zip(chi)
                .map(|(a, b)| (a - s.eigenvalues()[l] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-10 * s.lambda_max());
            for k in 0..n {
                assert!(
                    (dot(chi, s.eigenvector(k)) - if k == l { 1.0 } else { 0.0 }).abs() < 1e-10
                );
            }
            for i in 0..n {
                for j in 0..n {
                    recon[(i, j)] += s.eigenvalues()[l] * chi[i] * chi[j];
                }
            }
        }
        assert!((dense - recon).norm() <= 1e-8 * op.to_dense().norm());
    }

    #[test]
    fn grouping_bookkeeping() {
        // The star has eigenvalue 1 with multiplicity n - 2.
        let s = spectrum_of(&generators::star(6), LaplacianKind::Combinatorial);
        let total: usize = s.groups().iter().map(|g| g.multiplicity).sum();
        assert_eq!(total, s.len());
        assert!(s.groups().windows(2).all(|w| w[0].first < w[1].first));
        let ones = s
            .groups()
            .iter()
            .find(|g| (g.value - 1.0).abs() < 1e-9)
            .unwrap();
        assert_eq!(ones.multiplicity, 4);
        assert_eq!(s.group_of(3).first, ones.first);
        assert_eq!(s.groups()[0].multiplicity, 1);
    }

    #[test]
    fn disconnected_and_too_large() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let op = LaplacianOperator::new(&g, LaplacianKind::Combinatorial).unwrap();
        assert_eq!(
            Spectrum::compute(&op, SpectrumOptions::default()),
            Err(Error::Disconnected(2))
        );
        let opts = SpectrumOptions {
            dense_cap: 3,
            ..Default::default()
        };
        assert_eq!(
            Spectrum::compute(&op, opts),
            Err(Error::TooLarge { n: 4, cap: 3 })
        );
    }

    #[test]
    fn gft_round_trip() {
        let s = spectrum_of(&generators::path(5), LaplacianKind::Combinatorial);
        let f = [1.0, -2.0, 0.5, 3.0, 0.0];
        let back = s.igft(&s.gft(&f).unwrap()).unwrap();
        for (a, b) in back.iter().zip(f) {
            assert!((a - b).abs() < 1e-12);
        }
        let chi = s.eigenvector(2).to_vec();
        let op =
            LaplacianOperator::new(&generators::path(5), LaplacianKind::Combinatorial).unwrap();
        let lchi = op.apply(&chi).unwrap();
        for (a, b) in lchi.iter().zip(&chi) {
            assert!((a - s.eigenvalues()[2] * b).abs() < 1e-10);
        }
    }
}
