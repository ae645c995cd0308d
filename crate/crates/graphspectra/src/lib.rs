//! File formats, experiment drivers and the command-line front end for
//! [`graphspectra_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod output;
pub mod report;

pub use error::{AppError, ExitStatus, Result};
