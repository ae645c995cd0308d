//! Output files for designs, warps, densities and experiments.

use std::fs;
use std::path::Path;

use graphspectra_core::kernels::Design;
use graphspectra_core::{KernelSystem, Spectrum, WarpFunction};
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::experiments::{grid, Comparison, NoiseReport, GRID_POINTS};
use crate::output::{write_json, write_table, Provenance};

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarpKnots {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl From<&WarpFunction> for WarpKnots {
    fn from(w: &WarpFunction) -> Self {
        Self {
            knots: w.knots().to_vec(),
            values: w.values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMeta {
    pub system: &'static str,
    pub bands: usize,
    pub lambda_max: f64,
    pub tight: bool,
    pub frame_bounds: FrameBounds,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub delta: Option<f64>,
    pub degree: Option<usize>,
    pub warp: Option<WarpKnots>,
    pub provenance: Provenance,
}

/// `lambda,k1,...,kJ,G` on the export grid, where `G` is the sum of squares.
pub fn write_design(path: &Path, sys: &KernelSystem) -> Result<FrameBounds> {
    let j = sys.len();
    let mut header = vec!["lambda".to_string()];
    header.extend((1..=j).map(|k| format!("k{k}")));
    header.push("G".into());
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    let rows: Vec<Vec<f64>> = grid(sys.lambda_max(), GRID_POINTS)
        .into_iter()
        .map(|l| {
            let mut row = Vec::with_capacity(j + 2);
            row.push(l);
            row.extend(sys.eval(l));
            let g: f64 = row[1..].iter().map(|k| k * k).sum();
            lower = lower.min(g);
            upper = upper.max(g);
            row.push(g);
            row
        })
        .collect();
    write_table(path, &header, rows)?;
    Ok(FrameBounds { lower, upper })
}

pub fn design_meta(sys: &KernelSystem, bounds: FrameBounds, provenance: Provenance) -> DesignMeta {
    let mut meta = DesignMeta {
        system: "custom",
        bands: sys.len(),
        lambda_max: sys.lambda_max(),
        tight: sys.is_tight(),
        frame_bounds: bounds,
        gamma: None,
        a: None,
        delta: None,
        degree: None,
        warp: sys.warp().map(WarpKnots::from),
        provenance,
    };
    match *sys.design() {
        Design::Umt { gamma, a, delta } => {
            meta.system = "umt";
            meta.gamma = Some(gamma);
            meta.a = Some(a);
            meta.delta = Some(delta);
        }
        Design::BSpline { degree, delta } => {
            meta.system = "bspline";
            meta.degree = Some(degree);
            meta.delta = Some(delta as f64);
        }
        Design::Custom => {}
    }
    meta
}

/// Design table plus its metadata as `<stem>.csv` and `<stem>.json`.
pub fn export_design(
    dir: &Path,
    stem: &str,
    sys: &KernelSystem,
    provenance: &Provenance,
) -> Result<DesignMeta> {
    let bounds = write_design(&dir.join(format!("{stem}.csv")), sys)?;
    let meta = design_meta(sys, bounds, provenance.clone());
    write_json(&dir.join(format!("{stem}.json")), &meta)?;
    Ok(meta)
}

/// `lambda,<name>...` for several warps on the export grid.
pub fn write_warps(path: &Path, lambda_max: f64, warps: &[(&str, &WarpFunction)]) -> Result<()> {
    let mut header = vec!["lambda"];
    header.extend(warps.iter().map(|(name, _)| *name));
    let rows = grid(lambda_max, GRID_POINTS).into_iter().map(|l| {
        let mut row = vec![l];
        row.extend(warps.iter().map(|(_, w)| w.eval(l)));
        row
    });
    write_table(path, &header, rows)
}

/// `lambda,<name>...,` densities per eigenvalue.
pub fn write_densities(
    path: &Path,
    spectrum: &Spectrum,
    densities: &[(&str, &[f64])],
) -> Result<()> {
    let mut header = vec!["lambda"];
    header.extend(densities.iter().map(|(name, _)| *name));
    let rows = spectrum
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(l, &lambda)| {
            let mut row = vec![lambda];
            row.extend(densities.iter().map(|(_, d)| d[l]));
            row
        });
    write_table(path, &header, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub smoothness: usize,
    pub signals: usize,
    pub first_band_edge: f64,
    pub band_energies: Vec<f64>,
    /// Sup distance between the exact and approximate warps.
    pub warp_sup_distance: f64,
    pub warp_exact: WarpKnots,
    pub warp_approx: WarpKnots,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub lambda_max: f64,
    pub f1: SetSummary,
    pub f2: SetSummary,
    /// The smoother set ends its first band at a lower frequency.
    pub f2_first_band_lower: bool,
    pub spectrum_warp: WarpKnots,
    pub provenance: Provenance,
}

pub fn export_comparison(
    dir: &Path,
    cmp: &Comparison,
    spectrum: &Spectrum,
    provenance: &Provenance,
) -> Result<ComparisonSummary> {
    write_densities(
        &dir.join("esd.csv"),
        spectrum,
        &[("F1", &cmp.f1.esd), ("F2", &cmp.f2.esd)],
    )?;
    write_warps(
        &dir.join("warps.csv"),
        cmp.lambda_max,
        &[
            ("T_F1", &cmp.f1.warp_exact),
            ("T_F1_approx", &cmp.f1.warp_approx),
            ("T_F2", &cmp.f2.warp_exact),
            ("T_F2_approx", &cmp.f2.warp_approx),
            ("T_L", &cmp.spectrum_warp),
        ],
    )?;
    export_design(dir, "adapted_F1", &cmp.f1.system, provenance)?;
    export_design(dir, "adapted_F2", &cmp.f2.system, provenance)?;
    export_design(dir, "spectrum_adapted", &cmp.spectrum_adapted, provenance)?;
    let set = |a: &crate::experiments::Adaptation| SetSummary {
        smoothness: a.smoothness,
        signals: a.set.len(),
        first_band_edge: a.first_band_edge,
        band_energies: a.band_energies.clone(),
        warp_sup_distance: a.warp_exact.sup_distance(&a.warp_approx, GRID_POINTS),
        warp_exact: WarpKnots::from(&a.warp_exact),
        warp_approx: WarpKnots::from(&a.warp_approx),
    };
    let summary = ComparisonSummary {
        lambda_max: cmp.lambda_max,
        f1: set(&cmp.f1),
        f2: set(&cmp.f2),
        f2_first_band_lower: cmp.f2.first_band_edge < cmp.f1.first_band_edge,
        spectrum_warp: WarpKnots::from(&cmp.spectrum_warp),
        provenance: provenance.clone(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSummary {
    pub lambda_max: f64,
    pub runs: usize,
    pub monotone_runs: usize,
    pub noisiest_near_spectrum_runs: usize,
    pub midpoint_runs: usize,
    /// At least four fifths of the runs satisfy every trend.
    pub monotone_trend: bool,
    pub provenance: Provenance,
}

pub fn export_noise(
    dir: &Path,
    report: &NoiseReport,
    provenance: &Provenance,
) -> Result<NoiseSummary> {
    write_table(
        &dir.join("noise.csv"),
        &["run", "snr_db", "to_clean", "to_spectrum", "to_midpoint"],
        report.points.iter().map(|p| {
            vec![
                p.run as f64,
                p.snr_db,
                p.to_clean,
                p.to_spectrum,
                p.to_midpoint,
            ]
        }),
    )?;
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    write_table(
        &dir.join("trends.csv"),
        &["run", "monotone", "noisiest_near_spectrum", "midpoint"],
        report.trends.iter().map(|t| {
            vec![
                t.run as f64,
                flag(t.monotone),
                flag(t.noisiest_near_spectrum),
                t.midpoint.map_or(f64::NAN, flag),
            ]
        }),
    )?;
    let runs = report.trends.len();
    let (monotone, near, mid) = report.counts();
    let needed = (4 * runs).div_ceil(5);
    let summary = NoiseSummary {
        lambda_max: report.lambda_max,
        runs,
        monotone_runs: monotone,
        noisiest_near_spectrum_runs: near,
        midpoint_runs: mid,
        monotone_trend: runs > 0 && monotone >= needed && near >= needed && mid >= needed,
        provenance: provenance.clone(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySummary {
    pub bands: usize,
    pub target: f64,
    pub band_energies: Vec<f64>,
    pub max_deviation: f64,
    pub provenance: Provenance,
}

pub fn export_energies(
    dir: &Path,
    energies: &[f64],
    provenance: &Provenance,
) -> Result<EnergySummary> {
    write_table(
        &dir.join("band_energies.csv"),
        &["band", "energy"],
        energies
            .iter()
            .enumerate()
            .map(|(j, &e)| vec![(j + 1) as f64, e]),
    )?;
    let target = 1.0 / energies.len() as f64;
    let summary = EnergySummary {
        bands: energies.len(),
        target,
        band_energies: energies.to_vec(),
        max_deviation: energies
            .iter()
            .map(|e| (e - target).abs())
            .fold(0.0, f64::max),
        provenance: provenance.clone(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}
