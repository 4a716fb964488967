//! Config-driven experiment runner behind the `lrp-ids` binary.

pub mod config;
pub mod plot;
pub mod run;

pub use config::ExperimentConfig;
pub use run::run;

use serde_json::json;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Sample one window and list its edges.
    Sample,
    /// Eigenvalues of one window with overlaps at the origin.
    Spectrum,
    /// Averaged normalized counting function.
    Ids,
    /// Projector-diagonal estimate at the origin or over an inner window.
    PasturShubin,
    /// Jump masses with the finite-scale error term.
    Atoms,
    /// Consecutive-scale sup distances along one coupled realization.
    Converge,
    /// Long-edge tail frequencies against the exponential bound.
    Concentration,
    /// Low-energy log-log fit.
    Lifshitz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Spectrum => "spectrum",
            Command::Ids => "ids",
            Command::PasturShubin => "pastur-shubin",
            Command::Atoms => "atoms",
            Command::Converge => "converge",
            Command::Concentration => "concentration",
            Command::Lifshitz => "lifshitz",
        }
    }
}

/// 0 success, 2 config error, 3 numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        2
    } else {
        3
    }
}

/// Machine-readable error for stderr.
pub fn error_json(err: &Error) -> String {
    let kind = if err.is_config() { "config" } else { "numerical" };
    let field = match err {
        Error::InvalidParameter { field, .. } => Some(field.clone()),
        _ => None,
    };
    json!({ "error": kind, "field": field, "message": err.to_string() }).to_string()
}
