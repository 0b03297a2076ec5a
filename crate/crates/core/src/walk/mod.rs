//! Quenched walks `S_{n+1} = S_n ± 1` with `P(+1) = p(f^{S_n} x)`.

mod export;
mod recurrence;
mod simulate;
mod tape;

pub use export::{read_steps, write_steps, StepRecord, DUMP_HEADER_LEN, DUMP_MAGIC, DUMP_VERSION};
pub use recurrence::{recurrence_stats, RecurrenceReport, WalkRecord};
pub use simulate::{simulate_ensemble, simulate_quenched, WalkConfig, WalkSample, WalkSeed, DEFAULT_STRIDE};
pub use tape::EnvironmentTape;
