//! Front end for the `galerkin-collage` command: config loading, the
//! forward and inverse pipelines, and their CSV / plot emitters.

pub mod commands;
pub mod config;

use std::path::Path;

use thiserror::Error;

pub use commands::{cmd_forward, cmd_inverse, table1_config, table2_config};
pub use config::{load_config, parse_config, ConfigError, RunConfig};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(galerkin_collage::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<galerkin_collage::Error> for CliError {
    fn from(err: galerkin_collage::Error) -> Self {
        match err {
            // a config without exact solutions cannot produce error columns
            galerkin_collage::Error::MissingExact(_) => CliError::Config(ConfigError::Invalid(err.to_string())),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Io { .. } => exit::IO,
        }
    }
}

pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
