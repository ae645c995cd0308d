//! Monotone warping functions of the spectral axis.
//!
//! Every warp maps `[0, lambda_max]` onto itself with `T(0) = 0` and
//! `T(lambda_max) = lambda_max`, and is a piecewise cubic Hermite interpolant
//! with Fritsch–Carlson limited tangents.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::energy::EnsembleEsd;
use crate::graph::Spectrum;
use crate::{Error, Result};

/// Piecewise cubic Hermite interpolant with shape-preserving tangents.
///
/// Monotone runs of data stay monotone and local extrema get zero slope.
/// Outside the knot range the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl PiecewiseCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::InvalidParameters(
                "interpolation needs at least two points".into(),
            ));
        }
        for k in 1..x.len() {
            if x[k] == x[k - 1] {
                return Err(Error::DuplicateAbscissa(k));
            }
            if !(x[k] > x[k - 1]) {
                return Err(Error::NonMonotoneInput(k));
            }
        }
        let m = fritsch_carlson(&x, &y);
        Ok(Self { x, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn tangents(&self) -> &[f64] {
        &self.m
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if !(t > self.x[0]) {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1]
    }
}

fn fritsch_carlson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1)
        .map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] <= 0.0 {
            0.0
        } else {
            0.5 * (delta[k - 1] + delta[k])
        };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        if a < 0.0 {
            m[k] = 0.0;
        }
        if b < 0.0 {
            m[k + 1] = 0.0;
        }
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}

/// Monotone map of `[0, lambda_max]` onto itself.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpFunction {
    curve: PiecewiseCubic,
}

impl WarpFunction {
    /// Monotone cubic through `points`: abscissas strictly increasing,
    /// ordinates nondecreasing.
    pub fn monotone_cubic(points: &[(f64, f64)]) -> Result<Self> {
        let (x, y): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        if let Some(k) = (1..y.len()).find(|&k| !(y[k] >= y[k - 1])) {
            if x[k] != x[k - 1] {
                return Err(Error::NonMonotoneInput(k));
            }
        }
        Ok(Self {
            curve: PiecewiseCubic::new(x, y)?,
        })
    }

    pub fn identity(lambda_max: f64) -> Self {
        Self::monotone_cubic(&[(0.0, 0.0), (lambda_max, lambda_max)]).expect("valid identity")
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.curve.eval(lambda)
    }

    pub fn lambda_max(&self) -> f64 {
        *self.curve.knots().last().unwrap()
    }

    pub fn knots(&self) -> &[f64] {
        self.curve.knots()
    }

    pub fn values(&self) -> &[f64] {
        self.curve.values()
    }

    pub fn tangents(&self) -> &[f64] {
        self.curve.tangents()
    }

    /// Checks the endpoint and monotonicity contract against `lambda_max`.
    pub fn validate(&self, lambda_max: f64) -> Result<()> {
        let tol = 1e-12 * lambda_max.abs().max(1.0);
        let knots = self.knots();
        let values = self.values();
        if knots[0].abs() > tol || values[0].abs() > tol {
            return Err(Error::InvalidWarp(format!(
                "T(0) = {} at knot {}",
                values[0], knots[0]
            )));
        }
        let (xe, ye) = (self.lambda_max(), *values.last().unwrap());
        if (xe - lambda_max).abs() > tol || (ye - lambda_max).abs() > tol {
            return Err(Error::InvalidWarp(format!(
                "T({xe}) = {ye}, expected {lambda_max}"
            )));
        }
        if values.windows(2).any(|w| w[1] < w[0]) || self.tangents().iter().any(|&m| m < 0.0) {
            return Err(Error::InvalidWarp("not monotone".into()));
        }
        Ok(())
    }

    /// Root-mean-square distance to `other` on a uniform grid of `points` points.
    pub fn l2_distance(&self, other: &WarpFunction, points: usize) -> f64 {
        let grid = uniform_grid(self.lambda_max(), points);
        let s: f64 = grid
            .iter()
            .map(|&t| (self.eval(t) - other.eval(t)).powi(2))
            .sum();
        (s / grid.len() as f64).sqrt()
    }

    /// Maximum absolute distance to `other` on a uniform grid.
    pub fn sup_distance(&self, other: &WarpFunction, points: usize) -> f64 {
        uniform_grid(self.lambda_max(), points)
            .iter()
            .map(|&t| (self.eval(t) - other.eval(t)).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn uniform_grid(lambda_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
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

/// Builds `(0,0) ∪ knots ∪ (lambda_max, lambda_max)`, dropping knots at or past
/// either end and clamping ordinates into range.
fn pinned(lambda_max: f64, knots: impl IntoIterator<Item = (f64, f64)>) -> Result<WarpFunction> {
    let tol = 1e-8 * lambda_max;
    let mut points = vec![(0.0, 0.0)];
    let mut level: f64 = 0.0;
    for (k, (x, y)) in knots.into_iter().enumerate() {
        if x <= tol || x >= lambda_max - tol {
            continue;
        }
        if y < level - tol {
            return Err(Error::NonMonotoneEsd(k));
        }
        level = level.max(y).min(lambda_max);
        points.push((x, level));
    }
    points.push((lambda_max, lambda_max));
    WarpFunction::monotone_cubic(&points)
}

/// Energy-equalizing warp from a per-eigenvalue ensemble density.
///
/// One knot per distinct nonzero eigenvalue below `lambda_max`, at the mean
/// cumulative energy of its group scaled by `lambda_max`. `lambda_max`
/// defaults to the largest eigenvalue.
pub fn energy_warp_exact(
    esd: &EnsembleEsd,
    spectrum: &Spectrum,
    lambda_max: Option<f64>,
) -> Result<WarpFunction> {
    let e = match esd {
        EnsembleEsd::Direct { density } => density,
        EnsembleEsd::Banded { .. } => {
            return Err(Error::InvalidParameters(
                "exact energy warp needs a per-eigenvalue density".into(),
            ))
        }
    };
    if e.len() != spectrum.len() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.len(),
            found: e.len(),
        });
    }
    let lmax = lambda_max.unwrap_or(spectrum.lambda_max());
    if lmax < spectrum.lambda_max() {
        return Err(Error::DomainMismatch {
            spectrum: spectrum.lambda_max(),
            domain: lmax,
        });
    }
    let mut cumulative = Vec::with_capacity(e.len());
    let mut acc = 0.0;
    for &v in e {
        if v < 0.0 {
            return Err(Error::NonMonotoneEsd(cumulative.len()));
        }
        acc += v;
        cumulative.push(acc);
    }
    let knots = spectrum.groups().iter().map(|g| {
        let s: f64 = cumulative[g.first..g.first + g.multiplicity].iter().sum();
        (g.value, lmax * s / g.multiplicity as f64)
    });
    pinned(lmax, knots)
}

/// Energy-equalizing warp from a banded density: knots at the band abscissas
/// with cumulative band energies as ordinates.
pub fn energy_warp_approx(esd: &EnsembleEsd) -> Result<WarpFunction> {
    let (energies, omega, system) = match esd {
        EnsembleEsd::Banded {
            energies,
            abscissas,
            system,
            ..
        } => (energies, abscissas, system),
        EnsembleEsd::Direct { .. } => {
            return Err(Error::InvalidParameters(
                "approximate energy warp needs a banded density".into(),
            ))
        }
    };
    let lmax = system.lambda_max();
    let mut acc = 0.0;
    let mut knots = Vec::with_capacity(energies.len());
    for (k, (&a, &w)) in energies.iter().zip(omega).enumerate() {
        if a < -1e-12 {
            return Err(Error::NonMonotoneEsd(k));
        }
        acc += a.max(0.0);
        knots.push((w, lmax * acc));
    }
    knots.pop();
    pinned(lmax, knots)
}

/// Spectrum-equalizing warp: eigenvalue rank mapped linearly onto
/// `[0, lambda_max]`, averaged over repeated eigenvalues.
pub fn spectrum_warp(spectrum: &Spectrum) -> Result<WarpFunction> {
    let n = spectrum.len();
    let lmax = spectrum.lambda_max();
    if n < 2 || !(lmax > 0.0) {
        return Err(Error::InvalidParameters(
            "spectrum warp needs a nontrivial spectrum".into(),
        ));
    }
    let scale = lmax / (n - 1) as f64;
    let knots = spectrum.groups().iter().map(|g| {
        let mean_rank = g.first as f64 + 0.5 * (g.multiplicity - 1) as f64;
        (g.value, scale * mean_rank)
    });
    pinned(lmax, knots)
}

/// Grid resolution used to sample the smoothed pivot map.
const PIVOT_SAMPLES: usize = 4097;

/// Smoothed piecewise-linear pivot warp.
///
/// The lines meet at `(lambda_piv, lambda_max * n_lower / n_total)`. The corner
/// is smoothed by a box kernel of `smooth_width` (default `0.4 * lambda_piv`),
/// and the result is refitted as a monotone cubic.
pub fn pivot_warp(
    lambda_piv: f64,
    n_lower: usize,
    n_total: usize,
    lambda_max: f64,
    smooth_width: Option<f64>,
) -> Result<WarpFunction> {
    if !(lambda_max > 0.0) || !(lambda_piv > 0.0 && lambda_piv < lambda_max) {
        return Err(Error::InvalidPivot(format!(
            "pivot {lambda_piv} outside (0, {lambda_max})"
        )));
    }
    if n_lower == 0 || n_lower >= n_total {
        return Err(Error::InvalidPivot(format!(
            "need 0 < {n_lower} < {n_total}"
        )));
    }
    let width = smooth_width.unwrap_or(0.4 * lambda_piv);
    let h = 0.5 * width;
    if !(width >= 0.0) || h >= lambda_piv || lambda_piv + h >= lambda_max {
        return Err(Error::InvalidPivot(format!(
            "smoothing width {width} reaches an endpoint"
        )));
    }
    let y_piv = n_lower as f64 / n_total as f64;
    let m1 = y_piv * lambda_max / lambda_piv;
    let m2 = (1.0 - y_piv) * lambda_max / (lambda_max - lambda_piv);
    // Box-smoothed ramp (t - p)_+.
    let ramp = |t: f64| {
        let u = t - lambda_piv;
        if u <= -h {
            0.0
        } else if u >= h {
            u
        } else {
            (u + h) * (u + h) / (2.0 * width)
        }
    };
    let grid = uniform_grid(lambda_max, PIVOT_SAMPLES);
    let mut points: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| (t, m1 * t + (m2 - m1) * ramp(t)))
        .collect();
    points[0].1 = 0.0;
    points[PIVOT_SAMPLES - 1].1 = lambda_max;
    for k in 1..points.len() {
        points[k].1 = points[k].1.max(points[k - 1].1).min(lambda_max);
    }
    WarpFunction::monotone_cubic(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Spectrum;

    fn synthetic(values: Vec<f64>) -> Spectrum {
        let n = values.len();
        let mut vectors = vec![0.0; n * n];
        for l in 0..n {
            vectors[l * n + l] = 1.0;
        }
        Spectrum::from_parts(values, vectors, None).unwrap()
    }

    fn monotone_on_grid(t: &WarpFunction, points: usize) -> bool {
        let g = uniform_grid(t.lambda_max(), points);
        g.windows(2).all(|w| t.eval(w[1]) >= t.eval(w[0]))
    }

    #[test]
    fn monotone_cubic_examples() {
        let t = WarpFunction::monotone_cubic(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert!((t.eval(0.5) - 0.5).abs() < 1e-15);
        let t = WarpFunction::monotone_cubic(&[(0.0, 0.0), (1.0, 0.9), (2.0, 1.0)]).unwrap();
        assert_eq!(t.eval(1.0), 0.9);
        assert!(monotone_on_grid(&t, 10_000));
        let t = WarpFunction::monotone_cubic(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 3.0)])
            .unwrap();
        assert_eq!(t.tangents()[1], 0.0);
        assert_eq!(t.tangents()[2], 0.0);
        assert!(monotone_on_grid(&t, 10_000));
        assert!((1..100).all(|k| t.eval(1.0 + k as f64 / 100.0) == 1.0));
    }

    #[test]
    fn monotone_cubic_errors() {
        assert_eq!(
            WarpFunction::monotone_cubic(&[(0.0, 0.0), (1.0, 1.0), (1.0, 1.5)]),
            Err(Error::DuplicateAbscissa(2))
        );
        assert_eq!(
            WarpFunction::monotone_cubic(&[(0.0, 0.0), (2.0, 1.0), (1.0, 1.5)]),
            Err(Error::NonMonotoneInput(2))
        );
        assert_eq!(
            WarpFunction::monotone_cubic(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]),
            Err(Error::NonMonotoneInput(2))
        );
    }

    #[test]
    fn pchip_frozen_values() {
        // Reference values from an independent Fritsch–Carlson implementation.
        let c = PiecewiseCubic::new(vec![0.0, 1.0, 2.0, 4.0], vec![0.0, 1.0, 4.0, 5.0]).unwrap();
        let expected = [
            (0.5, 0.375),
            (1.5, 2.5697142598173457),
            (3.0, 4.757551057403792),
        ];
        for (x, y) in expected {
            assert!((c.eval(x) - y).abs() < 1e-14, "{x}: {}", c.eval(x));
        }
        // Local maximum keeps a flat tangent.
        let c = PiecewiseCubic::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(c.tangents()[1], 0.0);
        assert!((c.eval(0.5) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn exact_warp_flat_energy_is_identity() {
        let s = synthetic((0..11).map(|k| k as f64 * 0.2).collect());
        let mut density = vec![0.1; 11];
        density[0] = 0.0;
        let t = energy_warp_exact(&EnsembleEsd::Direct { density }, &s, None).unwrap();
        t.validate(2.0).unwrap();
        let dev = uniform_grid(2.0, 1001)
            .iter()
            .map(|&x| (t.eval(x) - x).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn exact_warp_energy_at_bottom_jumps() {
        let s = synthetic((0..11).map(|k| k as f64 * 0.2).collect());
        let mut density = vec![0.0; 11];
        density[1] = 1.0;
        let t = energy_warp_exact(&EnsembleEsd::Direct { density }, &s, None).unwrap();
        for k in 0..100 {
            let x = 0.2 + 1.8 * k as f64 / 99.0;
            assert!(t.eval(x) >= 0.99 * 2.0);
        }
        assert_eq!(t.eval(0.0), 0.0);
        assert_eq!(t.eval(2.0), 2.0);
    }

    #[test]
    fn exact_warp_collapses_groups() {
        let s = synthetic(vec![0.0, 1.0, 1.0, 1.0, 2.0]);
        let density = vec![0.0, 0.2, 0.3, 0.1, 0.4];
        let t = energy_warp_exact(&EnsembleEsd::Direct { density }, &s, None).unwrap();
        assert_eq!(t.knots(), &[0.0, 1.0, 2.0]);
        // Mean of the cumulative sums 0.2, 0.5, 0.6.
        assert!((t.values()[1] - 2.0 * (1.3 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn spectrum_warp_examples() {
        let s = synthetic((0..21).map(|k| k as f64 * 0.1).collect());
        let t = spectrum_warp(&s).unwrap();
        for &x in &uniform_grid(2.0, 257) {
            assert!((t.eval(x) - x).abs() < 1e-12);
        }
        // Eigenvalues crowded near the top push the warp under the diagonal.
        let mut v: Vec<f64> = (0..5).map(|k| k as f64 * 0.3).collect();
        v.extend((0..45).map(|k| 1.6 + 0.4 * (k as f64 + 1.0) / 45.0));
        let s = synthetic(v);
        let t = spectrum_warp(&s).unwrap();
        assert!(t.eval(1.0) < 1.0);
        assert_eq!((t.eval(0.0), t.eval(2.0)), (0.0, 2.0));
    }

    #[test]
    fn pivot_identity_and_bounds() {
        let t = pivot_warp(1.0, 5, 10, 2.0, None).unwrap();
        for &x in &uniform_grid(2.0, 1001) {
            assert!((t.eval(x) - x).abs() < 1e-12);
        }
        let t = pivot_warp(0.1, 20, 57, 2.0, None).unwrap();
        t.validate(2.0).unwrap();
        assert!(monotone_on_grid(&t, 10_000));
        assert!((t.eval(0.05) - 0.05 * 2.0 * 20.0 / 57.0 / 0.1).abs() < 1e-9);
        assert!(matches!(
            pivot_warp(0.0, 1, 2, 2.0, None),
            Err(Error::InvalidPivot(_))
        ));
        assert!(matches!(
            pivot_warp(1.0, 3, 3, 2.0, None),
            Err(Error::InvalidPivot(_))
        ));
        assert!(matches!(
            pivot_warp(1.0, 1, 3, 2.0, Some(2.5)),
            Err(Error::InvalidPivot(_))
        ));
    }

    #[test]
    fn validate_rejects_bad_endpoints() {
        let t = WarpFunction::monotone_cubic(&[(0.0, 0.1), (2.0, 2.0)]).unwrap();
        assert!(matches!(t.validate(2.0), Err(Error::InvalidWarp(_))));
        let t = WarpFunction::monotone_cubic(&[(0.0, 0.0), (2.0, 1.9)]).unwrap();
        assert!(matches!(t.validate(2.0), Err(Error::InvalidWarp(_))));
    }
}
