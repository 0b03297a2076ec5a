//! Numerical laboratory for random walks whose environment is generated by a
//! deterministic dynamical system.
//!
//! A point `x` of a compact space `M` and a map `f: M -> M` define a nearest
//! neighbour walk on the integers: from position `k` the walk jumps right with
//! probability `p(f^k x)` and left otherwise. This crate builds the driving
//! systems (circle rotations, hyperbolic toral automorphisms and the time-one
//! geodesic map of a genus-two hyperbolic surface), the environment Markov
//! operator and its dual on densities, the cohomological obstructions that
//! decide whether a stationary density equivalent to the invariant volume
//! exists, and the Monte-Carlo machinery to check the dynamical consequences
//! (ergodic averages, central limit theorem, recurrence, Lyapunov balance).
//!
//! Modules:
//!
//! - [`dynamics`]: circle rotation and cat map, leaf flows, s-u paths,
//!   periodic points, quadrature and sampling of the invariant measure.
//! - [`geodesic`]: frame-bundle model of the unit tangent bundle of a genus-two
//!   surface, horocycle flows, fundamental-domain reduction, loop closing.
//! - [`markov`]: environment profiles, the operators `P` and `P*`, stationary
//!   density recovery.
//! - [`cohomology`]: segment and loop functionals, periodic-orbit obstruction,
//!   Fourier solver for rotations, path reconstruction of transfer functions.
//! - [`walk`]: quenched walk simulation, recurrence diagnostics, export.
//! - [`stats`]: Birkhoff averages, the martingale CLT experiment, Lyapunov
//!   balance.

// Guards are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cohomology;
pub mod dynamics;
pub mod error;
pub mod geodesic;
pub mod markov;
pub mod observable;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use observable::{Holder, HolderSource, Observable, Representation, TrigPoly, TrigTerm};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
