//! Driving systems and their geometry.

mod cat;
mod grid;
mod path;
mod periodic;
mod point;
mod rotation;
mod system;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use cat::{CatMap, Lift};
pub use grid::{CellPartition, GridSystem, Quadrature, Stencil, MIN_RESOLUTION};
pub use path::{Segment, SuLoop, SuPath, LOOP_CLOSURE_TOL};
pub use periodic::{PeriodicLattice, MAX_PERIOD};
pub use point::{from_fixed, rational_to_fixed, signed_diff, to_fixed, CirclePoint, TorusPoint};
pub use rotation::Rotation;
pub use system::{PhasePoint, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Forward,
    Backward,
}

impl Dir {
    /// `+1 -> Forward`, anything else `-> Backward`.
    pub fn from_step(step: i8) -> Self {
        if step > 0 {
            Dir::Forward
        } else {
            Dir::Backward
        }
    }

    pub fn step(self) -> i8 {
        match self {
            Dir::Forward => 1,
            Dir::Backward => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeafKind {
    #[serde(rename = "s")]
    Stable,
    #[serde(rename = "u")]
    Unstable,
}

impl fmt::Display for LeafKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LeafKind::Stable => "s",
            LeafKind::Unstable => "u",
        })
    }
}

/// An invertible map preserving a probability measure `μ`.
pub trait MapSystem: Send + Sync {
    type Point: Copy + fmt::Debug + PartialEq + Send + Sync + 'static;

    const NAME: &'static str;

    fn forward(&self, x: &Self::Point) -> Self::Point;
    fn backward(&self, x: &Self::Point) -> Self::Point;

    #[inline]
    fn apply(&self, x: &Self::Point, dir: Dir) -> Self::Point {
        match dir {
            Dir::Forward => self.forward(x),
            Dir::Backward => self.backward(x),
        }
    }

    /// `f^n x` for any integer `n`.
    fn iterate(&self, x: &Self::Point, n: i64) -> Self::Point {
        let mut y = *x;
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 { self.forward(&y) } else { self.backward(&y) };
        }
        y
    }

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Common Lipschitz constant of `f` and `f⁻¹` for [`MapSystem::distance`].
    fn lipschitz_factor(&self) -> f64;

    /// One draw from `μ`.
    fn sample_invariant<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
}

/// A system with uniformly contracted stable and unstable leaves.
pub trait HyperbolicSystem: MapSystem {
    fn leaf_flow(&self, x: &Self::Point, kind: LeafKind, t: f64) -> Self::Point;

    /// Signed factor applied to a leaf parameter by one contracting step:
    /// `f(flow(x, s, t)) = flow(f x, s, scale·t)` and
    /// `f⁻¹(flow(x, u, t)) = flow(f⁻¹ x, u, scale·t)`.
    fn leaf_scale(&self, kind: LeafKind) -> f64;

    /// Direction in which `kind` leaves contract.
    fn contracting_dir(kind: LeafKind) -> Dir {
        match kind {
            LeafKind::Stable => Dir::Forward,
            LeafKind::Unstable => Dir::Backward,
        }
    }
}
