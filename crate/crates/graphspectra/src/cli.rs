//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphspectra_core::chebyshev::{esd_order, ChebyshevFilter};
use graphspectra_core::energy::{esd_banded, esd_direct, BandFilter, BandedOptions};
use graphspectra_core::graph::estimate_lambda_max;
use graphspectra_core::signal::{add_noise, make_sets};
use graphspectra_core::transform::{band_energies, decompose_cheb, decompose_direct, reconstruct};
use graphspectra_core::warp::{pivot_warp, spectrum_warp};
use graphspectra_core::{
    Coefficients, EnsembleEsd, Graph, KernelSystem, LaplacianOperator, MeanRemoval, SignalSet,
    WarpFunction, UMT_GAMMA,
};
use serde::Serialize;

use crate::config::{
    GraphSource, Laplacian, Prototype, SignalSource, SystemKind, WarpMode, WarpSpec,
};
use crate::error::{AppError, ExitStatus, Result};
use crate::experiments::{self, energy_warp, AdaptationConfig, Estimate, Fixture, NoiseConfig};
use crate::io::{self, GraphFormat};
use crate::output::{write_json, write_table, Provenance};
use crate::report::{self, WarpKnots};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "GRAPHSPECTRA_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "graphspectra",
    version,
    about = "Signal-adapted tight frames of spectral graph kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a graph and report its size and connectivity.
    #[command(visible_alias = "validate")]
    Load(GraphArgs),
    /// Laplacian eigenvalues and their multiplicities.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample a (possibly warped) kernel system on a uniform grid.
    Design(DesignArgs),
    /// Ensemble energy spectral density of a signal set.
    Esd(EsdArgs),
    /// Export a warping function.
    Warp(DesignArgs),
    /// Decompose signals with a kernel system.
    Decompose(DecomposeArgs),
    /// Generate spike-model signals.
    Synth {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        signals: SignalArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run one of the packaged experiments.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// Graph file, or `rgg:N:RADIUS[:SEED]` for a random geometric graph on the unit torus.
    #[arg(long, default_value = "rgg:500:0.055:1")]
    pub graph: GraphSource,
    /// File format; inferred from the extension if omitted.
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[arg(long, value_enum, default_value = "comb")]
    pub laplacian: Laplacian,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        let loaded = self.graph.clone().with_format(self.format).load()?;
        for w in &loaded.warnings {
            eprintln!("warning: {w}");
        }
        Ok(loaded.graph)
    }

    fn fixture(&self) -> Result<Fixture> {
        Fixture::new(self.load()?, self.laplacian.into())
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

impl OutArgs {
    fn dir(&self) -> Result<&PathBuf> {
        report::create_dir(&self.out)?;
        Ok(&self.out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SignalArgs {
    /// Signal CSV (one column per signal); generated from the spike model if omitted.
    #[arg(long)]
    pub signals: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.5")]
    pub densities: Vec<f64>,
    /// Adjacency power applied to the spikes.
    #[arg(long, default_value_t = 2)]
    pub smoothness: usize,
    #[arg(long, default_value_t = 10)]
    pub realizations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Add white Gaussian noise at this SNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<f64>,
}

impl SignalArgs {
    fn source(&self) -> SignalSource {
        match &self.signals {
            Some(path) => SignalSource::File { path: path.clone() },
            None => SignalSource::Generated {
                densities: self.densities.clone(),
                smoothness: self.smoothness,
                realizations: self.realizations,
                seed: self.seed,
                snr_db: self.snr,
            },
        }
    }

    fn load(&self, graph: &Graph) -> Result<SignalSet> {
        let set = match self.source() {
            SignalSource::File { path } => {
                if !path.is_file() {
                    return Err(AppError::Config(format!(
                        "signal file {} does not exist",
                        path.display()
                    )));
                }
                let set = io::read_signals(&path)?;
                if set.n_vertices() != graph.n_vertices() {
                    return Err(AppError::Config(format!(
                        "signals have {} entries but the graph has {} vertices",
                        set.n_vertices(),
                        graph.n_vertices()
                    )));
                }
                set
            }
            source => {
                if self.realizations == 0 || self.densities.is_empty() {
                    return Err(AppError::Config("no signals requested".into()));
                }
                make_sets(graph, &source.set_spec().unwrap())?
            }
        };
        match self.snr {
            Some(db) => Ok(add_noise(&set, db, self.seed.wrapping_add(1))?),
            None => Ok(set),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SystemArgs {
    #[arg(long, value_enum, default_value = "umt")]
    pub system: SystemKind,
    /// Number of kernels.
    #[arg(long, default_value_t = 7)]
    pub bands: usize,
    /// B-spline degree.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    /// UMT prototype parameter.
    #[arg(long, default_value_t = UMT_GAMMA)]
    pub gamma: f64,
    /// Bands below the pivot (SOSKS and pivot warps).
    #[arg(long)]
    pub lower: Option<usize>,
    /// Pivot eigenvalue (SOSKS and pivot warps).
    #[arg(long)]
    pub pivot: Option<f64>,
    /// Smoothing width of the pivot corner.
    #[arg(long)]
    pub width: Option<f64>,
}

impl SystemArgs {
    fn pivot(&self) -> Result<(f64, usize)> {
        match (self.pivot, self.lower) {
            (Some(p), Some(l)) => Ok((p, l)),
            _ => Err(AppError::Config("--pivot and --lower are required".into())),
        }
    }

    fn prototype(&self) -> Result<Prototype> {
        if self.bands < 2 {
            return Err(AppError::Config("--bands must be at least 2".into()));
        }
        Ok(match self.system {
            SystemKind::Umt => Prototype::Umt {
                bands: self.bands,
                gamma: self.gamma,
            },
            SystemKind::Bspline => Prototype::Bspline {
                bands: self.bands,
                degree: self.degree,
            },
            SystemKind::Sosks => {
                let (pivot, lower) = self.pivot()?;
                Prototype::Sosks {
                    bands: self.bands,
                    lower,
                    pivot,
                    width: self.width,
                }
            }
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WarpArgs {
    #[arg(long, value_enum, default_value = "none")]
    pub warp: WarpMode,
    /// Bands of the approximate density estimate.
    #[arg(long, default_value_t = 100)]
    pub na: usize,
    /// Chebyshev order; exact spectral filtering if omitted.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DesignArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub warp: WarpArgs,
    #[command(flatten)]
    pub signals: SignalArgs,
    /// Spectrum end; skips the graph when no warp needs it.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EsdArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub signals: SignalArgs,
    /// Band count of the B-spline estimate; per-eigenvalue density if omitted.
    #[arg(long)]
    pub na: Option<usize>,
    /// Chebyshev order for the banded estimate; exact filtering if omitted.
    #[arg(long)]
    pub order: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub warp: WarpArgs,
    #[command(flatten)]
    pub signals: SignalArgs,
    /// Decompose with Chebyshev filters of this order instead of eigenvectors.
    #[arg(long)]
    pub cheb: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    /// Two smoothness levels, their warps and adapted systems.
    Minnesota,
    /// Warp distances under additive noise.
    NoiseSweep,
    /// Band energies of a signal-adapted system on its own ensemble.
    EquiEnergy,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 7)]
    pub bands: usize,
    #[arg(long, default_value_t = UMT_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = 100)]
    pub na: usize,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.5")]
    pub densities: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub realizations: usize,
    /// Smoothness of the equal-energy set.
    #[arg(long, default_value_t = 2)]
    pub smoothness: usize,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-20,-10,0,10,20"
    )]
    pub snr_list: Vec<f64>,
    /// Independent noise-sweep repetitions.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitStatus::Config as i32
            } else {
                ExitStatus::Success as i32
            };
        }
    };
    match configure_threads().and_then(|_| execute(&cli.command)) {
        Ok(()) => ExitStatus::Success as i32,
        Err(e) => {
            eprintln!("error: {e}");
            e.status() as i32
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            AppError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Load(args) => load(args),
        Command::Spectrum { graph, out } => spectrum(graph, out),
        Command::Design(args) => design(args),
        Command::Esd(args) => esd(args),
        Command::Warp(args) => warp(args),
        Command::Decompose(args) => decompose(args),
        Command::Synth {
            graph,
            signals,
            out,
        } => synth(graph, signals, out),
        Command::Experiment(args) => experiment(args),
    }
}

fn load(args: &GraphArgs) -> Result<()> {
    let loaded = args.graph.clone().with_format(args.format).load()?;
    let g = &loaded.graph;
    println!("vertices {}", g.n_vertices());
    println!("edges {}", g.edges().len());
    println!("components {}", g.component_count());
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumMeta {
    vertices: usize,
    laplacian: Laplacian,
    lambda_max: f64,
    lambda_max_estimate: f64,
    distinct_eigenvalues: usize,
    provenance: Provenance,
}

fn spectrum(graph: &GraphArgs, out: &OutArgs) -> Result<()> {
    let fx = graph.fixture()?;
    let dir = out.dir()?;
    let groups = fx.spectrum.groups();
    let mut rows = Vec::with_capacity(fx.spectrum.len());
    for (g, group) in groups.iter().enumerate() {
        for l in group.first..group.first + group.multiplicity {
            rows.push(vec![
                (l + 1) as f64,
                fx.spectrum.eigenvalues()[l],
                (g + 1) as f64,
                group.multiplicity as f64,
            ]);
        }
    }
    write_table(
        &dir.join("spectrum.csv"),
        &["index", "lambda", "group", "multiplicity"],
        rows,
    )?;
    let estimate = estimate_lambda_max(
        &LaplacianOperator::new(&fx.graph, graph.laplacian.into())?,
        1e-10,
        100_000,
    )?;
    write_json(
        &dir.join("spectrum.json"),
        &SpectrumMeta {
            vertices: fx.graph.n_vertices(),
            laplacian: graph.laplacian,
            lambda_max: fx.lambda_max(),
            lambda_max_estimate: estimate,
            distinct_eigenvalues: groups.len(),
            provenance: Provenance::new(&("spectrum", graph), None),
        },
    )
}

/// Spectrum end and, when a warp needs one, the fixture.
fn domain(args: &DesignArgs) -> Result<(f64, Option<Fixture>)> {
    let needs_graph = matches!(
        args.warp.warp,
        WarpMode::EnergyExact | WarpMode::EnergyApprox | WarpMode::Spectrum
    );
    match args.lambda_max {
        Some(l) if !needs_graph => {
            if !(l > 0.0 && l.is_finite()) {
                return Err(AppError::Config(format!(
                    "--lambda-max must be positive, got {l}"
                )));
            }
            Ok((l, None))
        }
        Some(_) => Err(AppError::Config(format!(
            "--lambda-max cannot be combined with a {:?} warp, which needs the graph",
            args.warp.warp
        ))),
        None => {
            let fx = args.graph.fixture()?;
            Ok((fx.lambda_max(), Some(fx)))
        }
    }
}

fn build_warp(
    spec: &WarpSpec,
    lambda_max: f64,
    fx: Option<&Fixture>,
    signals: &SignalArgs,
) -> Result<Option<WarpFunction>> {
    let energy = |estimate| -> Result<WarpFunction> {
        let fx = fx.expect("energy warps load the graph");
        energy_warp(fx, &signals.load(&fx.graph)?, estimate)
    };
    Ok(match spec.mode {
        WarpMode::None => None,
        WarpMode::EnergyExact => Some(energy(Estimate::Exact)?),
        WarpMode::EnergyApprox => Some(energy(Estimate::Banded {
            bands: spec.na,
            order: spec.order,
        })?),
        WarpMode::Spectrum => Some(spectrum_warp(
            &fx.expect("spectrum warps load the graph").spectrum,
        )?),
        WarpMode::Pivot => {
            let (pivot, lower, total, width) = spec
                .pivot
                .ok_or_else(|| AppError::Config("--pivot and --lower are required".into()))?;
            Some(pivot_warp(pivot, lower, total, lambda_max, width)?)
        }
    })
}

fn warp_spec(system: &SystemArgs, warp: &WarpArgs) -> Result<WarpSpec> {
    Ok(WarpSpec {
        mode: warp.warp,
        na: warp.na,
        order: warp.order,
        pivot: match warp.warp {
            WarpMode::Pivot => {
                let (p, l) = system.pivot()?;
                Some((p, l, system.bands, system.width))
            }
            _ => None,
        },
    })
}

fn adapted_system(
    args: &DesignArgs,
    lambda_max: f64,
    fx: Option<&Fixture>,
) -> Result<KernelSystem> {
    let proto = args.system.prototype()?.build(lambda_max)?;
    let spec = warp_spec(&args.system, &args.warp)?;
    match build_warp(&spec, lambda_max, fx, &args.signals)? {
        Some(w) => Ok(proto.warped(w)?),
        None => Ok(proto),
    }
}

fn design(args: &DesignArgs) -> Result<()> {
    let (lambda_max, fx) = domain(args)?;
    let sys = adapted_system(args, lambda_max, fx.as_ref())?;
    let provenance = Provenance::new(&("design", args), Some(args.signals.seed));
    report::export_design(args.out.dir()?, "design", &sys, &provenance)?;
    Ok(())
}

#[derive(Serialize)]
struct WarpMeta {
    mode: WarpMode,
    lambda_max: f64,
    warp: WarpKnots,
    provenance: Provenance,
}

fn warp(args: &DesignArgs) -> Result<()> {
    if args.warp.warp == WarpMode::None {
        return Err(AppError::Config("choose a warp with --warp".into()));
    }
    let (lambda_max, fx) = domain(args)?;
    let spec = warp_spec(&args.system, &args.warp)?;
    let w =
        build_warp(&spec, lambda_max, fx.as_ref(), &args.signals)?.expect("a warp mode was chosen");
    let dir = args.out.dir()?;
    report::write_warps(&dir.join("warp.csv"), lambda_max, &[("T", &w)])?;
    write_json(
        &dir.join("warp.json"),
        &WarpMeta {
            mode: args.warp.warp,
            lambda_max,
            warp: WarpKnots::from(&w),
            provenance: Provenance::new(&("warp", args), Some(args.signals.seed)),
        },
    )
}

#[derive(Serialize)]
struct EsdMeta {
    kind: &'static str,
    total: f64,
    bands: Option<usize>,
    order: Option<usize>,
    provenance: Provenance,
}

fn esd(args: &EsdArgs) -> Result<()> {
    let fx = args.graph.fixture()?;
    let set = args.signals.load(&fx.graph)?;
    let dir = args.out.dir()?;
    let provenance = Provenance::new(&("esd", args), Some(args.signals.seed));
    let meta = match args.na {
        None => {
            let esd = esd_direct(&set, &fx.spectrum, MeanRemoval::Literal)?;
            let mut acc = 0.0;
            let cumulative: Vec<f64> = esd
                .values()
                .iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect();
            report::write_densities(
                &dir.join("esd.csv"),
                &fx.spectrum,
                &[("density", esd.values()), ("cumulative", &cumulative)],
            )?;
            EsdMeta {
                kind: "direct",
                total: esd.total(),
                bands: None,
                order: None,
                provenance,
            }
        }
        Some(bands) => {
            let filter = match args.order {
                Some(m) => BandFilter::Chebyshev { order: Some(m) },
                None => BandFilter::Exact,
            };
            let opts = BandedOptions {
                bands,
                filter,
                ..BandedOptions::default()
            };
            let esd = esd_banded(&set, &fx.op, Some(&fx.spectrum), &opts)?;
            let EnsembleEsd::Banded {
                energies,
                abscissas,
                ..
            } = &esd
            else {
                unreachable!("banded estimate")
            };
            write_table(
                &dir.join("esd.csv"),
                &["omega", "energy"],
                abscissas.iter().zip(energies).map(|(&w, &a)| vec![w, a]),
            )?;
            let (_, sampled) = esd.interpolate(Some(&fx.spectrum))?;
            report::write_densities(
                &dir.join("esd_interpolated.csv"),
                &fx.spectrum,
                &[("density", &sampled.unwrap())],
            )?;
            EsdMeta {
                kind: "banded",
                total: esd.total(),
                bands: Some(bands),
                order: match filter {
                    BandFilter::Chebyshev { .. } => {
                        Some(args.order.unwrap_or_else(|| esd_order(bands)))
                    }
                    BandFilter::Exact => None,
                },
                provenance,
            }
        }
    };
    write_json(&dir.join("esd.json"), &meta)
}

#[derive(Serialize)]
struct DecomposeMeta {
    mode: &'static str,
    order: Option<usize>,
    bands: usize,
    labels: Vec<String>,
    ensemble_band_energies: Vec<f64>,
    /// Largest relative reconstruction error; direct mode on tight systems only.
    reconstruction_error: Option<f64>,
    provenance: Provenance,
}

fn decompose(args: &DecomposeArgs) -> Result<()> {
    let design = DesignArgs {
        graph: args.graph.clone(),
        system: args.system.clone(),
        warp: args.warp.clone(),
        signals: args.signals.clone(),
        lambda_max: None,
        out: args.out.clone(),
    };
    let mut reconstruction_error = None;
    let (set, coefficients, bands) = match args.cheb {
        None => {
            let fx = args.graph.fixture()?;
            let sys = adapted_system(&design, fx.lambda_max(), Some(&fx))?;
            let set = args.signals.load(&fx.graph)?;
            let sampled = sys.sample(&fx.spectrum)?;
            let coefficients = set
                .signals()
                .iter()
                .map(|f| decompose_direct(f, &sampled))
                .collect::<Result<Vec<_>, _>>()?;
            if sys.is_tight() {
                let mut worst: f64 = 0.0;
                for (f, c) in set.signals().iter().zip(&coefficients) {
                    let back = reconstruct(c, &sampled)?;
                    let err: f64 = back
                        .iter()
                        .zip(f)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    let norm: f64 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        worst = worst.max(err / norm);
                    }
                }
                reconstruction_error = Some(worst);
            }
            (set, coefficients, sys.len())
        }
        Some(order) => {
            // Energy and spectrum warps need eigenvalues; otherwise stay eigenvector-free.
            let graph = args.graph.load()?;
            let (fx, op, lambda_max) = match args.warp.warp {
                WarpMode::None | WarpMode::Pivot => {
                    let op = LaplacianOperator::new(&graph, args.graph.laplacian.into())?;
                    let l = estimate_lambda_max(&op, 1e-8, 100_000)?;
                    (None, op, l)
                }
                _ => {
                    let fx = Fixture::new(graph.clone(), args.graph.laplacian.into())?;
                    let (op, l) = (fx.op.clone(), fx.lambda_max());
                    (Some(fx), op, l)
                }
            };
            let sys = adapted_system(&design, lambda_max, fx.as_ref())?;
            let filters = sys
                .kernels()
                .iter()
                .map(|k| ChebyshevFilter::from_kernel(k, order, lambda_max, None))
                .collect::<Result<Vec<_>, _>>()?;
            let set = args.signals.load(&graph)?;
            let coefficients = set
                .signals()
                .iter()
                .map(|f| decompose_cheb(f, &op, &filters))
                .collect::<Result<Vec<_>, _>>()?;
            (set, coefficients, sys.len())
        }
    };
    let energies = coefficients
        .iter()
        .map(band_energies)
        .collect::<Result<Vec<_>, _>>()?;
    let dir = args.out.dir()?;
    write_coefficients(&dir.join("coefficients.csv"), &coefficients)?;
    let mut header = vec!["signal".to_string()];
    header.extend((1..=bands).map(|j| format!("k{j}")));
    write_table(
        &dir.join("band_energies.csv"),
        &header,
        energies.iter().enumerate().map(|(s, e)| {
            let mut row = vec![s as f64];
            row.extend(e);
            row
        }),
    )?;
    let mut ensemble = vec![0.0; bands];
    for e in &energies {
        for (a, v) in ensemble.iter_mut().zip(e) {
            *a += v / energies.len() as f64;
        }
    }
    write_json(
        &dir.join("decompose.json"),
        &DecomposeMeta {
            mode: if args.cheb.is_some() {
                "chebyshev"
            } else {
                "direct"
            },
            order: args.cheb,
            bands,
            labels: set.labels().to_vec(),
            ensemble_band_energies: ensemble,
            reconstruction_error,
            provenance: Provenance::new(&("decompose", args), Some(args.signals.seed)),
        },
    )
}

/// `signal,vertex,k1,...,kJ`, signals and vertices 0-based.
fn write_coefficients(path: &std::path::Path, coefficients: &[Coefficients]) -> Result<()> {
    let bands = coefficients.first().map_or(0, Coefficients::bands);
    let mut header = vec!["signal".to_string(), "vertex".to_string()];
    header.extend((1..=bands).map(|j| format!("k{j}")));
    let rows = coefficients.iter().enumerate().flat_map(|(s, c)| {
        (0..c.n()).map(move |m| {
            let mut row = vec![s as f64, m as f64];
            row.extend((0..c.bands()).map(|j| c.row(j)[m]));
            row
        })
    });
    write_table(path, &header, rows)
}

#[derive(Serialize)]
struct SynthMeta {
    signals: usize,
    vertices: usize,
    labels: Vec<String>,
    provenance: Provenance,
}

fn synth(graph: &GraphArgs, signals: &SignalArgs, out: &OutArgs) -> Result<()> {
    if signals.signals.is_some() {
        return Err(AppError::Config(
            "synth generates signals; drop --signals".into(),
        ));
    }
    let g = graph.load()?;
    let set = signals.load(&g)?;
    let dir = out.dir()?;
    io::write_signals(&dir.join("signals.csv"), &set)?;
    if matches!(graph.graph, GraphSource::RandomGeometric { .. }) {
        io::write_edgelist(&dir.join("graph.txt"), &g)?;
    }
    write_json(
        &dir.join("signals.json"),
        &SynthMeta {
            signals: set.len(),
            vertices: set.n_vertices(),
            labels: set.labels().to_vec(),
            provenance: Provenance::new(&("synth", graph, signals), Some(signals.seed)),
        },
    )
}

fn experiment(args: &ExperimentArgs) -> Result<()> {
    if args.realizations == 0 || args.densities.is_empty() {
        return Err(AppError::Config("no signals requested".into()));
    }
    let fx = args.graph.fixture()?;
    let dir = args.out.dir()?;
    let provenance = Provenance::new(&("experiment", args), Some(args.seed));
    if matches!(args.graph.graph, GraphSource::RandomGeometric { .. }) {
        io::write_edgelist(&dir.join("graph.txt"), &fx.graph)?;
    }
    let adaptation = AdaptationConfig {
        bands: args.bands,
        gamma: args.gamma,
        na: args.na,
        order: args.order,
        densities: args.densities.clone(),
        realizations: args.realizations,
        seed: args.seed,
    };
    match args.name {
        ExperimentName::Minnesota => {
            let cmp = experiments::compare_sets(&fx, &adaptation)?;
            let s = report::export_comparison(dir, &cmp, &fx.spectrum, &provenance)?;
            println!(
                "first band edge: F1 {:.6}, F2 {:.6}",
                s.f1.first_band_edge, s.f2.first_band_edge
            );
        }
        ExperimentName::NoiseSweep => {
            if args.snr_list.is_empty() || args.runs == 0 {
                return Err(AppError::Config("noise sweep needs SNRs and runs".into()));
            }
            let cfg = NoiseConfig {
                snr_db: args.snr_list.clone(),
                runs: args.runs,
                seed: args.seed,
                smoothness: args.smoothness,
                densities: args.densities.clone(),
                realizations: args.realizations,
                ..NoiseConfig::default()
            };
            let noise = experiments::noise_sweep(&fx, &cfg)?;
            let s = report::export_noise(dir, &noise, &provenance)?;
            println!(
                "monotone {}/{}, noisiest near spectrum {}/{}, midpoint {}/{}",
                s.monotone_runs,
                s.runs,
                s.noisiest_near_spectrum_runs,
                s.runs,
                s.midpoint_runs,
                s.runs
            );
        }
        ExperimentName::EquiEnergy => {
            let a = experiments::adapt(&fx, &adaptation, args.smoothness)?;
            let s = report::export_energies(dir, &a.band_energies, &provenance)?;
            println!(
                "largest deviation from 1/{}: {:.6}",
                s.bands, s.max_deviation
            );
        }
    }
    Ok(())
}
