//! Command line front end, configuration and file formats for
//! [`shocklab_core`].
//!
//! - [`config`]: the versioned TOML experiment schema.
//! - [`io`]: output directories, CSV/JSON writers and reproducibility stamps.
//! - [`pipeline`]: profile/operator setup and tracked runs shared by the
//!   subcommands and the acceptance criteria.
//! - [`commands`]: one function per subcommand.
//! - [`criteria`]: the acceptance suite run by `verify`.
//! - [`report`]: aggregation of earlier outputs into a summary table.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod io;
pub mod pipeline;
pub mod report;

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Schema or usage problem; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Numerical failure inside one module; exit code 1.
    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: shocklab_core::Error,
    },
    #[error("io: {0}")]
    Io(String),
    /// A completed run whose checks did not pass.
    #[error("{0}")]
    Failed(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io(format!("{}: {e}", path.display()))
    }
}

/// Tags core errors with the module they came from.
pub trait Context<T> {
    fn during(self, module: &'static str) -> Result<T, Error>;
}

impl<T> Context<T> for shocklab_core::Result<T> {
    fn during(self, module: &'static str) -> Result<T, Error> {
        self.map_err(|source| Error::Numerical { module, source })
    }
}
