//! Signal-adapted tight frames of spectral graph kernels.
//!
//! The crate is `no_std` (with `alloc`) and contains every numerical piece of the
//! toolkit:
//!
//! * [`graph`]: weighted undirected graphs, Laplacian operators, dense spectra
//!   and a power-iteration bound on the largest eigenvalue.
//! * [`kernels`]: B-spline and uniform Meyer-type (UMT) kernel systems, warping,
//!   frame bounds and sampling at eigenvalues.
//! * [`chebyshev`]: truncated Chebyshev expansions applied through the
//!   three-term recurrence, without eigenvectors.
//! * [`energy`]: ensemble energy spectral density, both per eigenvalue and per
//!   band of a B-spline system.
//! * [`warp`]: monotone cubic interpolation and the energy-equalizing,
//!   spectrum-equalizing and pivot warping functions.
//! * [`transform`]: analysis, synthesis, atoms and band energies.
//! * [`signal`]: the spike/adjacency-power signal model and additive noise.
//! * [`generators`]: small deterministic graphs and seeded geometric graphs.
//!
//! File formats, experiments and the command line live in the `graphspectra`
//! crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chebyshev;
pub mod energy;
mod error;
pub mod generators;
pub mod graph;
pub mod kernels;
pub mod signal;
pub(crate) mod sparse;
pub mod transform;
pub mod warp;

pub use error::{Error, Result};

pub use chebyshev::ChebyshevFilter;
pub use energy::{EnsembleEsd, MeanRemoval, SignalSet};
pub use graph::{Graph, LaplacianKind, LaplacianOperator, Spectrum};
pub use kernels::{ContinuousKernel, KernelSystem, SampledSystem};
pub use transform::{Atom, Coefficients};
pub use warp::WarpFunction;

/// Default prototype parameter for UMT systems.
pub const UMT_GAMMA: f64 = 2.73;

/// Version of this crate, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
