use std::path::PathBuf;

use thiserror::Error;

/// Evaluation strategy of the Mittag-Leffler routine that was active when a
/// failure occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlRegime {
    Taylor,
    Integral,
    Asymptotic,
}

impl std::fmt::Display for MlRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            MlRegime::Taylor => "taylor",
            MlRegime::Integral => "integral",
            MlRegime::Asymptotic => "asymptotic",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("Mittag-Leffler evaluation failed in {regime} regime: {detail}")]
    Evaluation { regime: MlRegime, detail: String },

    #[error("oracle precision budget exceeded: {0}")]
    OracleRange(String),

    #[error("singular argument: {0}")]
    SingularArgument(String),

    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),

    #[error("unsupported scheme/domain combination: {0}")]
    UnsupportedScheme(String),

    #[error("ellipticity violated: {0}")]
    Ellipticity(String),

    #[error("truncation policy unsatisfiable: {0}")]
    Truncation(String),

    #[error("time aggregation did not converge: {0}")]
    Aggregation(String),

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by bad user input rather than runtime
    /// conditions; the CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::ParameterDomain(_)
                | Error::UnsupportedScheme(_)
                | Error::UnsupportedProfile(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
