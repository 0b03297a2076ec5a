//! Obstructions to solving `log φ = u∘f - u`.
//!
//! Segment and loop functionals sum orbit differences along stable and
//! unstable leaves; for a coboundary every segment contributes
//! `u(end) - u(start)` and every closed loop sums to zero. On the cat map the
//! periodic-orbit sums give the classical criterion, and on a rotation the
//! equation is solved directly in Fourier space.

mod fourier;
mod functional;
mod livshitz;
mod reconstruct;
mod report;

pub use fourier::{fourier_transfer, FourierTransfer};
pub use functional::{loop_functional, segment_functional, tail_bound, truncation_terms, LoopValue, SegmentValue};
pub use livshitz::livshitz_obstruction;
pub use reconstruct::{coboundary_residual, random_quadrilaterals, loop_report, transfer_from_paths, PathTransfer};
pub use report::{Classification, ObstructionRecord, ObstructionReport, Verdict, CLASSIFICATION_SLACK};
