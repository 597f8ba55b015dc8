//! Error taxonomy shared by all pipeline stages.

use thiserror::Error;

/// Library-wide error type.
///
/// Variants mirror the failure classes of the pipeline: bad inputs
/// (`Domain`), under-resolved grids (`Config`), solver breakdowns
/// (`Numerical`), failed bracketing (`Search`), WKB regime violations
/// (`Regime`) and multi-run study failures (`Study`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("search error: {0}")]
    Search(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("study error: {0}")]
    Study(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 3,
            Error::Config(_) => 2,
            Error::Numerical(_) => 4,
            Error::Search(_) => 5,
            Error::Regime(_) => 6,
            Error::Study(_) => 7,
        }
    }
}
