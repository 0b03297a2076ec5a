//! Scenario runner: turns a JSON experiment description into a deterministic
//! run of the `ergowalk-core` machinery, writing CSV/JSON artifacts and a
//! manifest with content digests.

pub mod build;
pub mod config;
pub mod manifest;
pub mod output;
pub mod run;
mod scenarios;

pub use config::Config;
pub use manifest::{FileEntry, RunManifest, RunStatus, StageTime, Verdict};
pub use run::{resolve_seed, run_scenario, run_scenario_in, RunOutcome};

/// Exit code for configurations that fail the schema.
pub const EXIT_SCHEMA: i32 = 2;
/// Exit code for runs that fail after output was started.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Schema(String),
    #[error("scenario failed: {source}")]
    Runtime {
        source: ergowalk_core::Error,
        /// Manifest written for the partial run, when output had started.
        manifest: Option<Box<RunManifest>>,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema(_) => EXIT_SCHEMA,
            Self::Runtime { .. } => EXIT_RUNTIME,
        }
    }
}
