//! Serializable run configuration. Its canonical JSON form is hashed into
//! the provenance of every output.

use std::path::PathBuf;
use std::str::FromStr;

use graphspectra_core::generators;
use graphspectra_core::signal::SetSpec;
use graphspectra_core::{KernelSystem, LaplacianKind};
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::io::{self, GraphFormat, LoadedGraph};

/// Vertex count, radius and seed of the default stand-in graph.
pub const STANDIN_GRAPH: (usize, f64, u64) = (500, 0.055, 1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Laplacian {
    Comb,
    Norm,
}

impl From<Laplacian> for LaplacianKind {
    fn from(l: Laplacian) -> Self {
        match l {
            Laplacian::Comb => LaplacianKind::Combinatorial,
            Laplacian::Norm => LaplacianKind::Normalized,
        }
    }
}

/// A graph file or a seeded random geometric graph on the unit torus.
///
/// Parsed from a path, or from `rgg:N:RADIUS[:SEED]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    File {
        path: PathBuf,
        format: Option<GraphFormat>,
    },
    RandomGeometric {
        n: usize,
        radius: f64,
        seed: u64,
    },
}

impl Default for GraphSource {
    fn default() -> Self {
        let (n, radius, seed) = STANDIN_GRAPH;
        Self::RandomGeometric { n, radius, seed }
    }
}

impl FromStr for GraphSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let Some(spec) = s.strip_prefix("rgg:") else {
            return Ok(Self::File {
                path: PathBuf::from(s),
                format: None,
            });
        };
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || format!("expected rgg:N:RADIUS[:SEED], got {s:?}");
        if !(2..=3).contains(&parts.len()) {
            return Err(bad());
        }
        let n = parts[0].parse().map_err(|_| bad())?;
        let radius = parts[1].parse().map_err(|_| bad())?;
        let seed = match parts.get(2) {
            Some(p) => p.parse().map_err(|_| bad())?,
            None => STANDIN_GRAPH.2,
        };
        Ok(Self::RandomGeometric { n, radius, seed })
    }
}

impl GraphSource {
    pub fn with_format(self, format: Option<GraphFormat>) -> Self {
        match self {
            Self::File { path, .. } => Self::File { path, format },
            other => other,
        }
    }

    /// Missing files are configuration errors; unreadable contents are data errors.
    pub fn load(&self) -> Result<LoadedGraph> {
        match self {
            Self::File { path, format } => {
                if !path.is_file() {
                    return Err(AppError::Config(format!(
                        "graph file {} does not exist",
                        path.display()
                    )));
                }
                io::load_graph(path, *format)
            }
            &Self::RandomGeometric { n, radius, seed } => {
                if n < 2 || !(radius > 0.0 && radius <= 1.0) {
                    return Err(AppError::Config(format!(
                        "random geometric graph needs N >= 2 and radius in (0, 1], got {n}, {radius}"
                    )));
                }
                Ok(LoadedGraph {
                    graph: generators::random_geometric(n, radius, true, seed)?,
                    warnings: Vec::new(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Umt,
    Bspline,
    Sosks,
}

/// Prototype kernel system before any warping.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum Prototype {
    Umt {
        bands: usize,
        gamma: f64,
    },
    Bspline {
        bands: usize,
        degree: usize,
    },
    Sosks {
        bands: usize,
        lower: usize,
        pivot: f64,
        width: Option<f64>,
    },
}

impl Prototype {
    pub fn bands(&self) -> usize {
        match *self {
            Self::Umt { bands, .. } | Self::Bspline { bands, .. } | Self::Sosks { bands, .. } => {
                bands
            }
        }
    }

    pub fn build(&self, lambda_max: f64) -> Result<KernelSystem> {
        Ok(match *self {
            Self::Umt { bands, gamma } => KernelSystem::umt(bands, lambda_max, gamma)?,
            Self::Bspline { bands, degree } => KernelSystem::bspline(bands, degree, lambda_max)?,
            Self::Sosks {
                bands,
                lower,
                pivot,
                width,
            } => KernelSystem::sosks(bands, lower, pivot, lambda_max, width)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WarpMode {
    None,
    EnergyExact,
    EnergyApprox,
    Spectrum,
    Pivot,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarpSpec {
    pub mode: WarpMode,
    /// Bands of the B-spline system behind the approximate density.
    pub na: usize,
    /// Chebyshev order for the approximate density; exact filtering if absent.
    pub order: Option<usize>,
    /// `(pivot, lower, total, smoothing width)` for the pivot warp.
    pub pivot: Option<(f64, usize, usize, Option<f64>)>,
}

/// Signals read from a CSV file or generated from the spike model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignalSource {
    File {
        path: PathBuf,
    },
    Generated {
        densities: Vec<f64>,
        smoothness: usize,
        realizations: usize,
        seed: u64,
        snr_db: Option<f64>,
    },
}

impl SignalSource {
    pub fn set_spec(&self) -> Option<SetSpec> {
        match self {
            Self::File { .. } => None,
            Self::Generated {
                densities,
                smoothness,
                realizations,
                seed,
                ..
            } => Some(SetSpec {
                pairs: densities.iter().map(|&eta| (eta, *smoothness)).collect(),
                realizations: *realizations,
                seed: *seed,
            }),
        }
    }
}
