//! Continuous spectral kernels and kernel systems.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::ops::Range;

use crate::graph::Spectrum;
use crate::warp::{pivot_warp, uniform_grid, WarpFunction};
use crate::{Error, Result, UMT_GAMMA};

/// Largest B-spline degree evaluated through the closed form.
pub const MAX_BSPLINE_DEGREE: usize = 25;

/// Simpson intervals used for kernel L2 norms.
pub const L2_INTERVALS: usize = 4096;

/// Centered B-spline of degree `n` at `x`.
pub fn bspline(n: usize, x: f64) -> Result<f64> {
    if n > MAX_BSPLINE_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    Ok(bspline_unchecked(n, x))
}

fn bspline_unchecked(n: usize, x: f64) -> f64 {
    let half = 0.5 * (n + 1) as f64;
    let ax = x.abs();
    if n == 0 {
        return if ax < 0.5 {
            1.0
        } else if ax == 0.5 {
            0.5
        } else {
            0.0
        };
    }
    if ax >= half {
        return 0.0;
    }
    // Evaluate at -|x| so only the few leading one-sided powers are active.
    let t0 = half - ax;
    let mut binom = 1.0;
    let mut sum = 0.0;
    let mut k = 0usize;
    while k <= n + 1 {
        let t = t0 - k as f64;
        if t <= 0.0 {
            break;
        }
        let term = binom * t.powi(n as i32);
        sum += if k % 2 == 0 { term } else { -term };
        binom = binom * (n + 1 - k) as f64 / (k + 1) as f64;
        k += 1;
    }
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    (sum / fact).max(0.0)
}

/// Meyer auxiliary polynomial, clamped to `[0, 1]` outside the unit interval.
pub fn meyer_aux(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let x4 = x * x * x * x;
    x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
}

/// Scale `a` and spacing `Delta` of a UMT system.
pub fn umt_parameters(bands: usize, lambda_max: f64, gamma: f64) -> (f64, f64) {
    let j = bands as f64;
    let a = lambda_max / (j * gamma - j - gamma + 3.0);
    (a, gamma * a - a)
}

fn umt_value(bands: usize, index: usize, gamma: f64, lambda_max: f64, lambda: f64) -> f64 {
    let (a, delta) = umt_parameters(bands, lambda_max, gamma);
    let ramp = |shift: f64| meyer_aux(((lambda - shift) / a - 1.0) / (gamma - 1.0)) * FRAC_PI_2;
    if index == 1 {
        return if lambda <= a {
            1.0
        } else if lambda <= gamma * a {
            ramp(0.0).cos()
        } else {
            0.0
        };
    }
    let offset = (index - 2) as f64 * delta;
    let (lo, hi) = (a + offset, gamma * a + offset);
    if lambda <= lo {
        0.0
    } else if lambda <= hi {
        ramp(offset).sin()
    } else if index == bands {
        1.0
    } else if lambda <= hi + delta {
        ramp(offset + delta).cos()
    } else {
        0.0
    }
}

fn bspline_band_value(
    degree: usize,
    bands: usize,
    index: usize,
    lambda_max: f64,
    lambda: f64,
) -> f64 {
    let x = lambda * (bands - 1) as f64 / lambda_max;
    let reach = degree as i64 + 2;
    let squared = if index == 1 {
        (-reach..=0)
            .map(|k| bspline_unchecked(degree, x - k as f64))
            .sum()
    } else if index == bands {
        let last = bands as i64 - 1;
        (last..=last + reach)
            .map(|k| bspline_unchecked(degree, x - k as f64))
            .sum()
    } else {
        bspline_unchecked(degree, x - (index - 1) as f64)
    };
    squared.max(0.0).sqrt()
}

/// A spectral kernel on `[0, lambda_max]`; zero outside that interval.
#[allow(unpredictable_function_pointer_comparisons)]
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousKernel {
    /// Band `index` (1-based) of a B-spline Parseval system, with folded end bands.
    BSplineBand {
        degree: usize,
        bands: usize,
        index: usize,
        lambda_max: f64,
    },
    /// Band `index` (1-based) of a uniform Meyer-type system.
    UmtBand {
        bands: usize,
        index: usize,
        gamma: f64,
        lambda_max: f64,
    },
    /// `base(T(lambda))`.
    Warped {
        base: Box<ContinuousKernel>,
        warp: Arc<WarpFunction>,
    },
    /// Square root of the summed squares of the members.
    Merged(Vec<ContinuousKernel>),
    Constant {
        value: f64,
        lambda_max: f64,
    },
    Function {
        f: fn(f64) -> f64,
        lambda_max: f64,
    },
    /// Piecewise-linear sample table over increasing abscissas starting at 0.
    Table {
        abscissas: Vec<f64>,
        values: Vec<f64>,
    },
    Scaled {
        base: Box<ContinuousKernel>,
        factor: f64,
    },
}

impl ContinuousKernel {
    pub fn lambda_max(&self) -> f64 {
        match self {
            Self::BSplineBand { lambda_max, .. }
            | Self::UmtBand { lambda_max, .. }
            | Self::Constant { lambda_max, .. }
            | Self::Function { lambda_max, .. } => *lambda_max,
            Self::Warped { warp, .. } => warp.lambda_max(),
            Self::Merged(members) => members[0].lambda_max(),
            Self::Table { abscissas, .. } => *abscissas.last().unwrap(),
            Self::Scaled { base, .. } => base.lambda_max(),
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        if !(lambda >= 0.0 && lambda <= self.lambda_max()) {
            return 0.0;
        }
        match self {
            Self::BSplineBand {
                degree,
                bands,
                index,
                lambda_max,
            } => bspline_band_value(*degree, *bands, *index, *lambda_max, lambda),
            Self::UmtBand {
                bands,
                index,
                gamma,
                lambda_max,
            } => umt_value(*bands, *index, *gamma, *lambda_max, lambda),
            Self::Warped { base, warp } => base.eval(warp.eval(lambda)),
            Self::Merged(members) => members
                .iter()
                .map(|k| k.eval(lambda).powi(2))
                .sum::<f64>()
                .sqrt(),
            Self::Constant { value, .. } => *value,
            Self::Function { f, .. } => f(lambda),
            Self::Table { abscissas, values } => {
                let k = abscissas.partition_point(|&x| x <= lambda);
                if k >= abscissas.len() {
                    return values[values.len() - 1];
                }
                let (x0, x1) = (abscissas[k - 1], abscissas[k]);
                let s = (lambda - x0) / (x1 - x0);
                values[k - 1] + s * (values[k] - values[k - 1])
            }
            Self::Scaled { base, factor } => factor * base.eval(lambda),
        }
    }

    /// `∫ K(λ)² dλ` over `[0, lambda_max]` by composite Simpson.
    pub fn l2_norm_squared(&self) -> f64 {
        let lmax = self.lambda_max();
        let n = L2_INTERVALS;
        let h = lmax / n as f64;
        let mut s = self.eval(0.0).powi(2) + self.eval(lmax).powi(2);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.eval(i as f64 * h).powi(2);
        }
        s * h / 3.0
    }

    /// `∫ K(λ) dλ` over `[0, lambda_max]` by composite Simpson on `intervals` (even).
    pub fn integral(&self, intervals: usize) -> f64 {
        let n = intervals + intervals % 2;
        let lmax = self.lambda_max();
        let h = lmax / n as f64;
        let mut s = self.eval(0.0) + self.eval(lmax);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.eval(i as f64 * h);
        }
        s * h / 3.0
    }
}

/// Which construction produced a system, with its design constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    BSpline { degree: usize, delta: usize },
    Umt { gamma: f64, a: f64, delta: f64 },
    Custom,
}

/// An ordered set of kernels over a common `[0, lambda_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSystem {
    kernels: Vec<ContinuousKernel>,
    lambda_max: f64,
    tight: bool,
    design: Design,
    warp: Option<Arc<WarpFunction>>,
}

/// Frame bounds measured on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameAnalysis {
    pub grid: Vec<f64>,
    pub g: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl KernelSystem {
    /// A system of arbitrary kernels. `tight` is a claim that callers rely on
    /// for reconstruction; it is checked when sampling.
    pub fn new(kernels: Vec<ContinuousKernel>, tight: bool) -> Result<Self> {
        let Some(first) = kernels.first() else {
            return Err(Error::InvalidParameters("empty kernel system".into()));
        };
        let lambda_max = first.lambda_max();
        if !(lambda_max > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "lambda_max {lambda_max} must be positive"
            )));
        }
        if kernels
            .iter()
            .any(|k| (k.lambda_max() - lambda_max).abs() > 1e-12 * lambda_max)
        {
            return Err(Error::InvalidParameters(
                "kernels disagree on lambda_max".into(),
            ));
        }
        Ok(Self {
            kernels,
            lambda_max,
            tight,
            design: Design::Custom,
            warp: None,
        })
    }

    /// B-spline Parseval system with `bands` kernels of degree `degree`.
    pub fn bspline(bands: usize, degree: usize, lambda_max: f64) -> Result<Self> {
        if bands < 2 || degree < 2 || !(lambda_max > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "B-spline system needs J >= 2, n >= 2 and lambda_max > 0 (got {bands}, {degree}, {lambda_max})"
            )));
        }
        if degree > MAX_BSPLINE_DEGREE {
            return Err(Error::DegreeTooLarge(degree));
        }
        let kernels = (1..=bands)
            .map(|index| ContinuousKernel::BSplineBand {
                degree,
                bands,
                index,
                lambda_max,
            })
            .collect();
        Ok(Self {
            kernels,
            lambda_max,
            tight: true,
            design: Design::BSpline {
                degree,
                delta: degree / 2 - 1,
            },
            warp: None,
        })
    }

    /// Uniform Meyer-type system.
    pub fn umt(bands: usize, lambda_max: f64, gamma: f64) -> Result<Self> {
        if bands < 2 || !(gamma > 1.0) || !(lambda_max > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "UMT system needs J >= 2, gamma > 1 and lambda_max > 0 (got {bands}, {gamma}, {lambda_max})"
            )));
        }
        let (a, delta) = umt_parameters(bands, lambda_max, gamma);
        let kernels = (1..=bands)
            .map(|index| ContinuousKernel::UmtBand {
                bands,
                index,
                gamma,
                lambda_max,
            })
            .collect();
        Ok(Self {
            kernels,
            lambda_max,
            tight: true,
            design: Design::Umt { gamma, a, delta },
            warp: None,
        })
    }

    /// UMT system with the default prototype parameter.
    pub fn umt_default(bands: usize, lambda_max: f64) -> Result<Self> {
        Self::umt(bands, lambda_max, UMT_GAMMA)
    }

    /// Multiresolution B-spline system (degree 3) warped by a smoothed pivot map
    /// so that the first `n_lower` of `n_total` bands sit below `lambda_piv`.
    pub fn sosks(
        n_total: usize,
        n_lower: usize,
        lambda_piv: f64,
        lambda_max: f64,
        smooth_width: Option<f64>,
    ) -> Result<Self> {
        let warp = pivot_warp(lambda_piv, n_lower, n_total, lambda_max, smooth_width)?;
        Self::bspline(n_total, 3, lambda_max)?.warped(warp)
    }

    /// Composes every kernel with `warp`.
    pub fn warped(&self, warp: WarpFunction) -> Result<Self> {
        warp.validate(self.lambda_max)?;
        let warp = Arc::new(warp);
        let kernels = self
            .kernels
            .iter()
            .map(|k| ContinuousKernel::Warped {
                base: Box::new(k.clone()),
                warp: warp.clone(),
            })
            .collect();
        Ok(Self {
            kernels,
            lambda_max: self.lambda_max,
            tight: self.tight,
            design: self.design.clone(),
            warp: Some(warp),
        })
    }

    /// Merges consecutive bands: each range becomes one kernel equal to the
    /// square root of its members' summed squares. Ranges must tile `0..J`.
    pub fn merged(&self, groups: &[Range<usize>]) -> Result<Self> {
        let mut next = 0;
        for g in groups {
            if g.start != next || g.end <= g.start {
                return Err(Error::InvalidParameters(format!(
                    "band groups must tile 0..{}",
                    self.len()
                )));
            }
            next = g.end;
        }
        if next != self.len() {
            return Err(Error::InvalidParameters(format!(
                "band groups must tile 0..{}",
                self.len()
            )));
        }
        let kernels = groups
            .iter()
            .map(|g| ContinuousKernel::Merged(self.kernels[g.clone()].to_vec()))
            .collect();
        Ok(Self {
            kernels,
            lambda_max: self.lambda_max,
            tight: self.tight,
            design: Design::Custom,
            warp: self.warp.clone(),
        })
    }

    /// Every kernel multiplied by `factor`; the result is no longer Parseval
    /// unless `factor` is 1.
    pub fn scaled(&self, factor: f64) -> Self {
        let kernels = self
            .kernels
            .iter()
            .map(|k| ContinuousKernel::Scaled {
                base: Box::new(k.clone()),
                factor,
            })
            .collect();
        Self {
            kernels,
            lambda_max: self.lambda_max,
            tight: self.tight && factor == 1.0,
            design: self.design.clone(),
            warp: self.warp.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    pub fn kernels(&self) -> &[ContinuousKernel] {
        &self.kernels
    }

    pub fn kernel(&self, j: usize) -> &ContinuousKernel {
        &self.kernels[j]
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn is_tight(&self) -> bool {
        self.tight
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn warp(&self) -> Option<&WarpFunction> {
        self.warp.as_deref()
    }

    /// All kernels at `lambda`.
    pub fn eval(&self, lambda: f64) -> Vec<f64> {
        self.kernels.iter().map(|k| k.eval(lambda)).collect()
    }

    /// `G(lambda) = sum_j K_j(lambda)^2`.
    pub fn frame_sum(&self, lambda: f64) -> f64 {
        self.kernels.iter().map(|k| k.eval(lambda).powi(2)).sum()
    }

    /// Samples `G` on `grid_points` uniform points and reports its extremes.
    pub fn frame_analysis(&self, grid_points: usize) -> Result<FrameAnalysis> {
        if grid_points < 1000 {
            return Err(Error::InvalidParameters(format!(
                "frame analysis needs at least 1000 grid points, got {grid_points}"
            )));
        }
        let grid = uniform_grid(self.lambda_max, grid_points);
        let g: Vec<f64> = grid.iter().map(|&t| self.frame_sum(t)).collect();
        let lower = g.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(FrameAnalysis {
            grid,
            g,
            lower,
            upper,
        })
    }

    /// Squared L2 norm of every kernel.
    pub fn l2_norms_squared(&self) -> Vec<f64> {
        self.kernels.iter().map(|k| k.l2_norm_squared()).collect()
    }

    /// Normalized cumulative squared norms `(lambda_max / C) sum_{k<=i} |K_k|^2`.
    pub fn band_abscissas(&self) -> Vec<f64> {
        let norms = self.l2_norms_squared();
        let total: f64 = norms.iter().sum();
        let mut acc = 0.0;
        let mut omega: Vec<f64> = norms
            .iter()
            .map(|n| {
                acc += n;
                self.lambda_max * acc / total
            })
            .collect();
        *omega.last_mut().unwrap() = self.lambda_max;
        omega
    }

    /// Evaluates every kernel at the eigenvalues of `spectrum`.
    pub fn sample<'s>(&self, spectrum: &'s Spectrum) -> Result<SampledSystem<'s>> {
        if spectrum.lambda_max() > self.lambda_max * (1.0 + 1e-12) {
            return Err(Error::DomainMismatch {
                spectrum: spectrum.lambda_max(),
                domain: self.lambda_max,
            });
        }
        let n = spectrum.len();
        let mut values = Vec::with_capacity(self.len() * n);
        for k in &self.kernels {
            values.extend(spectrum.eigenvalues().iter().map(|&l| k.eval(l)));
        }
        Ok(SampledSystem {
            spectrum,
            bands: self.len(),
            values,
            tight: self.tight,
        })
    }
}

/// Kernel values `k_j[l]` at the eigenvalues of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSystem<'s> {
    spectrum: &'s Spectrum,
    bands: usize,
    /// Row-major `bands x N`.
    values: Vec<f64>,
    tight: bool,
}

impl<'s> SampledSystem<'s> {
    /// Wraps explicit values, row-major `bands x N`.
    pub fn from_values(
        spectrum: &'s Spectrum,
        bands: usize,
        values: Vec<f64>,
        tight: bool,
    ) -> Result<Self> {
        if values.len() != bands * spectrum.len() {
            return Err(Error::DimensionMismatch {
                expected: bands * spectrum.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            spectrum,
            bands,
            values,
            tight,
        })
    }

    pub fn spectrum(&self) -> &'s Spectrum {
        self.spectrum
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn n(&self) -> usize {
        self.spectrum.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn value(&self, j: usize, l: usize) -> f64 {
        self.values[j * self.n() + l]
    }

    pub fn is_tight(&self) -> bool {
        self.tight
    }

    /// Largest `|sum_j k_j[l]^2 - 1|` over the eigenvalues.
    pub fn tightness_defect(&self) -> f64 {
        (0..self.n())
            .map(|l| {
                ((0..self.bands)
                    .map(|j| self.value(j, l).powi(2))
                    .sum::<f64>()
                    - 1.0)
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Search settings for the UMT prototype parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSearch {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    /// Quadrature step relative to `a`.
    pub quad_step: f64,
}

impl Default for GammaSearch {
    fn default() -> Self {
        Self {
            lower: 1.0,
            upper: 5.0,
            step: 1e-2,
            quad_step: 1e-4,
        }
    }
}

/// `∫_a^{γa} sin(π/2 ν((λ/a - 1)/(γ - 1))) dλ - a` with `a = 1`, by a right
/// Riemann sum of step `quad_step`. The value scales with `a`, so the root does
/// not depend on `lambda_max` or `J`.
pub fn gamma_residual(gamma: f64, quad_step: f64) -> f64 {
    let steps = ((gamma - 1.0) / quad_step).round() as usize;
    let h = (gamma - 1.0) / steps as f64;
    let mut s = 0.0;
    for i in 1..=steps {
        let lambda = 1.0 + i as f64 * h;
        s += (FRAC_PI_2 * meyer_aux((lambda - 1.0) / (gamma - 1.0))).sin();
    }
    s * h - 1.0
}

/// Grid search for the `gamma` that makes UMT bands of equal integral.
pub fn solve_gamma(search: GammaSearch) -> Result<f64> {
    if !(search.step > 0.0
        && search.quad_step > 0.0
        && search.upper > search.lower
        && search.lower >= 1.0)
    {
        return Err(Error::InvalidParameters(
            "invalid gamma search range".into(),
        ));
    }
    let count = ((search.upper - search.lower) / search.step).round() as usize;
    let mut best = (f64::INFINITY, search.upper);
    for k in 1..=count {
        let gamma = search.lower + k as f64 * search.step;
        let q = gamma_residual(gamma, search.quad_step).abs();
        if q < best.0 {
            best = (q, gamma);
        }
    }
    Ok(best.1)
}

/// Band groups for a coarse five-band design from fine-band energies.
///
/// The first `n_lower` bands form one group, the trailing bands holding at most
/// `tail_energy` of the total form the last, and the rest is split into
/// `n_middle` groups of roughly equal energy.
pub fn energy_merge_groups(
    energies: &[f64],
    n_lower: usize,
    n_middle: usize,
    tail_energy: f64,
) -> Result<Vec<Range<usize>>> {
    let j = energies.len();
    let total: f64 = energies.iter().sum();
    if !(total > 0.0) || n_middle == 0 || n_lower == 0 || n_lower + n_middle + 1 > j {
        return Err(Error::InvalidParameters(
            "cannot form the requested band groups".into(),
        ));
    }
    let mut tail_start = j - 1;
    let mut tail = energies[j - 1];
    while tail_start > n_lower + n_middle && tail + energies[tail_start - 1] <= tail_energy * total
    {
        tail_start -= 1;
        tail += energies[tail_start];
    }
    let middle_total: f64 = energies[n_lower..tail_start].iter().sum();
    let mut groups = vec![0..n_lower];
    let mut start = n_lower;
    let mut acc = 0.0;
    for b in n_lower..tail_start {
        acc += energies[b];
        let remaining_groups = n_middle - (groups.len() - 1);
        let bands_left = tail_start - b - 1;
        let target = middle_total * groups.len() as f64 / n_middle as f64;
        let must_close = bands_left + 1 == remaining_groups;
        if remaining_groups > 1
            && (acc >= target || must_close)
            && bands_left >= remaining_groups - 1
        {
            groups.push(start..b + 1);
            start = b + 1;
        }
    }
    groups.push(start..tail_start);
    groups.push(tail_start..j);
    Ok(groups)
}
