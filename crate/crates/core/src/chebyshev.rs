//! Truncated Chebyshev expansions of spectral kernels, applied to signals
//! through the shifted three-term recurrence.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::graph::{check_len, LaplacianOperator};
use crate::kernels::ContinuousKernel;
use crate::{Error, Result};

/// Default order for smooth kernels.
pub const DEFAULT_ORDER: usize = 80;
/// Default order for warped Meyer-type kernels.
pub const DEFAULT_WARPED_ORDER: usize = 200;

/// Order used for banded density estimation with `bands` B-spline bands.
pub fn esd_order(bands: usize) -> usize {
    DEFAULT_ORDER.max(2 * bands)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFilter {
    coefficients: Vec<f64>,
    lambda_max: f64,
}

impl ChebyshevFilter {
    /// Coefficients of `kernel` up to `order` on `[0, lambda_max]`, by the
    /// trapezoidal rule on `quad_points` angles (default and minimum `8M + 1`).
    pub fn from_kernel(
        kernel: &ContinuousKernel,
        order: usize,
        lambda_max: f64,
        quad_points: Option<usize>,
    ) -> Result<Self> {
        Self::from_fn(|l| kernel.eval(l), order, lambda_max, quad_points)
    }

    pub fn from_fn<F: Fn(f64) -> f64>(
        kernel: F,
        order: usize,
        lambda_max: f64,
        quad_points: Option<usize>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        if !(lambda_max > 0.0) {
            return Err(Error::InvalidParameters(
                "Chebyshev domain must be nonempty".into(),
            ));
        }
        let q = quad_points.unwrap_or(8 * order + 1).max(8 * order + 1);
        let b = 0.5 * lambda_max;
        let h = PI / (q - 1) as f64;
        let samples: Vec<f64> = (0..q)
            .map(|i| {
                let theta = i as f64 * h;
                let lambda = (b * (theta.cos() + 1.0)).clamp(0.0, lambda_max);
                let w = if i == 0 || i == q - 1 { 0.5 } else { 1.0 };
                w * kernel(lambda)
            })
            .collect();
        let coefficients = (0..=order)
            .map(|p| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (p as f64 * i as f64 * h).cos())
                    .sum();
                2.0 / PI * h * s
            })
            .collect();
        Ok(Self {
            coefficients,
            lambda_max,
        })
    }

    pub fn from_coefficients(coefficients: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidOrder(coefficients.len().saturating_sub(1)));
        }
        Ok(Self {
            coefficients,
            lambda_max,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Value of the truncated series at `lambda`.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        let tol = 1e-12 * self.lambda_max;
        if !(lambda >= -tol && lambda <= self.lambda_max + tol) {
            return Err(Error::OutOfDomain {
                lambda,
                lambda_max: self.lambda_max,
            });
        }
        let b = 0.5 * self.lambda_max;
        let x = (lambda - b) / b;
        let d = &self.coefficients;
        let (mut prev, mut cur) = (1.0, x);
        let mut acc = 0.5 * d[0] + d[1] * x;
        for &dp in &d[2..] {
            let next = 2.0 * x * cur - prev;
            acc += dp * next;
            prev = cur;
            cur = next;
        }
        Ok(acc)
    }

    /// `P(L) f` without eigenvectors.
    pub fn apply(&self, op: &LaplacianOperator, f: &[f64]) -> Result<Vec<f64>> {
        let mut out = apply_many(op, core::slice::from_ref(self), f)?;
        Ok(out.pop().unwrap())
    }
}

/// Applies several filters sharing one domain to `f`, reusing the recurrence.
pub fn apply_many(
    op: &LaplacianOperator,
    filters: &[ChebyshevFilter],
    f: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let n = op.n();
    check_len(n, f.len())?;
    let Some(first) = filters.first() else {
        return Ok(Vec::new());
    };
    let lambda_max = first.lambda_max;
    if filters.iter().any(|c| c.lambda_max != lambda_max) {
        return Err(Error::InvalidParameters(
            "filters must share a Chebyshev domain".into(),
        ));
    }
    let order = filters.iter().map(ChebyshevFilter::order).max().unwrap();
    let b = 0.5 * lambda_max;
    let mut out: Vec<Vec<f64>> = filters
        .iter()
        .map(|c| f.iter().map(|v| 0.5 * c.coefficients[0] * v).collect())
        .collect();
    let mut prev = f.to_vec();
    let mut cur = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    // T1 f = (L - bI) f / b
    op.apply_into(&prev, &mut scratch);
    for i in 0..n {
        cur[i] = (scratch[i] - b * prev[i]) / b;
    }
    accumulate(&mut out, filters, 1, &cur);
    for p in 2..=order {
        op.apply_into(&cur, &mut scratch);
        for i in 0..n {
            // Tp f = (2/b)(L - bI) T_{p-1} f - T_{p-2} f, written over prev.
            prev[i] = 2.0 / b * (scratch[i] - b * cur[i]) - prev[i];
        }
        core::mem::swap(&mut prev, &mut cur);
        accumulate(&mut out, filters, p, &cur);
    }
    Ok(out)
}

fn accumulate(out: &mut [Vec<f64>], filters: &[ChebyshevFilter], p: usize, t: &[f64]) {
    for (o, c) in out.iter_mut().zip(filters) {
        if let Some(&d) = c.coefficients.get(p) {
            for (oi, ti) in o.iter_mut().zip(t) {
                *oi += d * ti;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::{LaplacianKind, Spectrum, SpectrumOptions};
    use crate::kernels::KernelSystem;

    #[test]
    fn constant_and_linear_coefficients() {
        let c = ChebyshevFilter::from_fn(|_| 1.0, 10, 2.0, None).unwrap();
        assert!((c.coefficients()[0] - 2.0).abs() < 1e-14);
        assert!(c.coefficients()[1..].iter().all(|d| d.abs() < 1e-14));
        for l in [0.0, 0.3, 1.0, 2.0] {
            assert!((c.eval(l).unwrap() - 1.0).abs() < 1e-14);
        }
        let c = ChebyshevFilter::from_fn(|l| l, 10, 2.0, None).unwrap();
        assert!((c.coefficients()[0] - 2.0).abs() < 1e-14);
        assert!((c.coefficients()[1] - 1.0).abs() < 1e-14);
        assert!(c.coefficients()[2..].iter().all(|d| d.abs() < 1e-14));
        assert!((c.eval(0.7).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(
            ChebyshevFilter::from_fn(|l| l, 0, 2.0, None),
            Err(Error::InvalidOrder(0))
        );
        assert!(matches!(c.eval(2.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn midpoint_uses_alternating_pattern() {
        let c =
            ChebyshevFilter::from_coefficients(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2.0).unwrap();
        // C_p(0) cycles 1, 0, -1, 0.
        assert!((c.eval(1.0).unwrap() - (0.5 - 3.0 + 5.0)).abs() < 1e-14);
    }

    #[test]
    fn umt_band_one_error() {
        let s = KernelSystem::umt_default(7, 2.0).unwrap();
        let c = ChebyshevFilter::from_kernel(s.kernel(0), 100, 2.0, None).unwrap();
        let err = crate::warp::uniform_grid(2.0, 4001)
            .iter()
            .map(|&l| (c.eval(l).unwrap() - s.kernel(0).eval(l)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-2, "{err}");
    }

    #[test]
    fn apply_reproduces_polynomials() {
        let g = generators::random_geometric(40, 0.35, false, 3).unwrap();
        let op = LaplacianOperator::new(&g, LaplacianKind::Combinatorial).unwrap();
        let lmax = crate::graph::estimate_lambda_max(&op, 1e-10, 10_000).unwrap();
        let f: Vec<f64> = (0..40).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let one = ChebyshevFilter::from_fn(|_| 1.0, 5, lmax, None).unwrap();
        let out = one.apply(&op, &f).unwrap();
        assert!(out.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-10));
        let lin = ChebyshevFilter::from_fn(|l| l, 1, lmax, None).unwrap();
        let lf = op.apply(&f).unwrap();
        let out = lin.apply(&op, &f).unwrap();
        assert!(out.iter().zip(&lf).all(|(a, b)| (a - b).abs() < 1e-10));
        let cubic = |l: f64| 0.5 - l + 0.25 * l * l * l;
        let poly = ChebyshevFilter::from_fn(cubic, 3, lmax, None).unwrap();
        let l2f = op.apply(&lf).unwrap();
        let l3f = op.apply(&l2f).unwrap();
        let out = poly.apply(&op, &f).unwrap();
        for i in 0..40 {
            let expected = 0.5 * f[i] - lf[i] + 0.25 * l3f[i];
            assert!((out[i] - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        }
        assert!(matches!(
            one.apply(&op, &f[..3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_matches_spectral_filtering() {
        let g = generators::path(3);
        let op = LaplacianOperator::new(&g, LaplacianKind::Combinatorial).unwrap();
        let spec = Spectrum::compute(&op, SpectrumOptions::default()).unwrap();
        let k = |l: f64| (-l).exp();
        let c = ChebyshevFilter::from_fn(k, 20, 3.0, None).unwrap();
        for l in 0..3 {
            let chi = spec.eigenvector(l);
            let out = c.apply(&op, chi).unwrap();
            let scale = k(spec.eigenvalues()[l]);
            assert!(out
                .iter()
                .zip(chi)
                .all(|(a, b)| (a - scale * b).abs() < 1e-10));
        }
    }
}
