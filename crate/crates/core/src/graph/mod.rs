//! Graphs, Laplacian operators and their spectra.

mod spectrum;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

pub use spectrum::{EigenGroup, Spectrum, SpectrumOptions, DEFAULT_DENSE_CAP};

/// One undirected edge, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Weighted undirected graph without self-loops. Vertices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: CsrMatrix,
}

impl Graph {
    /// Builds a graph from undirected edges given once each.
    ///
    /// `(i, j)` and `(j, i)` name the same edge, so listing both is a
    /// [`Error::DuplicateEdge`]; symmetric closure of directed lists is the
    /// loader's job.
    pub fn from_edges<I>(n_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n_vertices == 0 {
            return Err(Error::InvalidParameters(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut seen = BTreeMap::new();
        let mut stored = Vec::new();
        for (i, j, w) in edges {
            for v in [i, j] {
                if v >= n_vertices {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        len: n_vertices,
                    });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::NegativeWeight { i, j, weight: w });
            }
            let key = (i.min(j), i.max(j));
            if seen.insert(key, ()).is_some() {
                return Err(Error::DuplicateEdge { i, j });
            }
            stored.push(Edge {
                i: key.0,
                j: key.1,
                weight: w,
            });
        }
        stored.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        let mut triplets = Vec::with_capacity(2 * stored.len());
        for e in &stored {
            triplets.push((e.i, e.j, e.weight));
            triplets.push((e.j, e.i, e.weight));
        }
        Ok(Self {
            n: n_vertices,
            adjacency: CsrMatrix::from_triplets(n_vertices, triplets),
            edges: stored,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weighted degrees `d_i = sum_j A_ij`.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.adjacency.row(i).map(|(_, w)| w).sum())
            .collect()
    }

    /// Adjacency weight `A_ij` (zero when there is no edge).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency.get(i, j)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency.row(i)
    }

    /// `A x` without forming any power of `A`.
    pub fn adjacency_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let mut y = vec![0.0; self.n];
        self.adjacency.mul_vec_into(x, &mut y);
        Ok(y)
    }

    /// Number of connected components, counting only edges of positive weight.
    pub fn component_count(&self) -> usize {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for (u, w) in self.adjacency.row(v) {
                    if w > 0.0 && label[u] == usize::MAX {
                        label[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

/// Which Laplacian defines the spectral domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplacianKind {
    /// `L = D - A`.
    Combinatorial,
    /// `D^{-1/2} (D - A) D^{-1/2}`.
    Normalized,
}

/// Sparse symmetric positive-semidefinite Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianOperator {
    kind: LaplacianKind,
    matrix: CsrMatrix,
    degrees: Vec<f64>,
    lambda_max_hint: Option<f64>,
}

impl LaplacianOperator {
    pub fn new(graph: &Graph, kind: LaplacianKind) -> Result<Self> {
        let degrees = graph.degrees();
        if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedVertex(v));
        }
        let n = graph.n_vertices();
        let mut triplets = Vec::with_capacity(n + 2 * graph.edges().len());
        match kind {
            LaplacianKind::Combinatorial => {
                for (i, &d) in degrees.iter().enumerate() {
                    triplets.push((i, i, d));
                }
                for e in graph.edges() {
                    triplets.push((e.i, e.j, -e.weight));
                    triplets.push((e.j, e.i, -e.weight));
                }
            }
            LaplacianKind::Normalized => {
                for i in 0..n {
                    triplets.push((i, i, 1.0));
                }
                for e in graph.edges() {
                    let v = -e.weight / (degrees[e.i] * degrees[e.j]).sqrt();
                    triplets.push((e.i, e.j, v));
                    triplets.push((e.j, e.i, v));
                }
            }
        }
        Ok(Self {
            kind,
            matrix: CsrMatrix::from_triplets(n, triplets),
            degrees,
            lambda_max_hint: None,
        })
    }

    /// Records an upper bound on the spectrum, used as the Chebyshev domain.
    pub fn with_lambda_max_hint(mut self, lambda_max: f64) -> Self {
        self.lambda_max_hint = Some(lambda_max);
        self
    }

    pub fn lambda_max_hint(&self) -> Option<f64> {
        self.lambda_max_hint
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Sparse product `L f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), f.len())?;
        let mut out = vec![0.0; self.n()];
        self.matrix.mul_vec_into(f, &mut out);
        Ok(out)
    }

    /// Unchecked `out = L f`.
    pub(crate) fn apply_into(&self, f: &[f64], out: &mut [f64]) {
        self.matrix.mul_vec_into(f, out);
    }

    /// Unit-norm generator of the null space of a connected graph's Laplacian:
    /// the constant vector, or `D^{1/2} 1` for the normalized form.
    pub fn null_vector(&self) -> Vec<f64> {
        let mut v: Vec<f64> = match self.kind {
            LaplacianKind::Combinatorial => vec![1.0; self.n()],
            LaplacianKind::Normalized => self.degrees.iter().map(|d| d.sqrt()).collect(),
        };
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, v) in self.matrix.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Safety factor applied to the power-iteration estimate.
pub const LAMBDA_MAX_MARGIN: f64 = 1.01;

/// Upper estimate of the largest Laplacian eigenvalue by power iteration.
///
/// Returns `1.01 * rho` where `rho` is the converged Rayleigh quotient. The start
/// vector comes from a fixed-seed generator, so the result is reproducible.
pub fn estimate_lambda_max(op: &LaplacianOperator, tol: f64, max_iter: usize) -> Result<f64> {
    let n = op.n();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6d62_6461);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.5).collect();
    normalize(&mut v);
    let mut w = vec![0.0; n];
    let mut rho = 0.0;
    for it in 0..max_iter {
        op.apply_into(&v, &mut w);
        let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if it > 0 && (next - rho).abs() <= tol * next.abs() {
            return Ok(LAMBDA_MAX_MARGIN * next);
        }
        rho = next;
    }
    Err(Error::NoConvergence(max_iter))
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
