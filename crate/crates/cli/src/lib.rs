//! Command implementations for the `ergoscope` binary.
//!
//! The binary is a thin argument-parsing layer; everything it does lives
//! here so integration tests can drive the same code paths directly.
//! Commands communicate failure through [`CliError`], which carries the
//! process exit code:
//!
//! * 2 for malformed input (bad JSON, bad flags, unreadable files),
//! * 3 for well-formed but unphysical or unsupported states,
//! * 4 for exceeded resource budgets (partition scans past their cap),
//! * 5 for verification suites that ran and found violations.

pub mod commands;
pub mod records;
pub mod stats;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

/// Exit code for verification runs that complete but find failures.
pub const VERIFY_FAILURE_EXIT: u8 = 5;

/// Process exit code for a core library error.
///
/// Malformed input maps to 2, invalid or unsupported states to 3, and
/// exhausted resource budgets to 4.
pub fn core_exit_code(err: &ergoscope_core::Error) -> u8 {
    use ergoscope_core::Error as E;
    match err {
        E::Parse(_) | E::Shape(_) | E::InvalidArgument(_) => 2,
        E::InvalidState(_) | E::MixedState { .. } | E::Numeric(_) => 3,
        E::BudgetExceeded { .. } | E::StirlingRange { .. } => 4,
    }
}

/// Error type for command execution.
#[derive(Debug, Error)]
pub enum CliError {
    /// A computation or parsing failure from the core library.
    #[error(transparent)]
    Core(#[from] ergoscope_core::Error),
    /// A filesystem failure, tagged with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(err) => core_exit_code(err),
            // Unreadable inputs and unwritable outputs are usage errors.
            CliError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Result alias for command execution.
pub type Result<T> = std::result::Result<T, CliError>;

/// Cap the global rayon thread pool from the `ERGOSCOPE_THREADS`
/// environment variable. Unset means rayon's default (all cores).
pub fn init_thread_pool() -> Result<()> {
    let raw = match std::env::var("ERGOSCOPE_THREADS") {
        Err(_) => return Ok(()),
        Ok(raw) => raw,
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        ergoscope_core::Error::Parse(format!(
            "ERGOSCOPE_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    if threads == 0 {
        return Err(ergoscope_core::Error::Parse(
            "ERGOSCOPE_THREADS must be a positive integer, got \"0\"".into(),
        )
        .into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|err| {
            CliError::Core(ergoscope_core::Error::InvalidArgument(format!(
                "thread pool already initialized: {err}"
            )))
        })
}
