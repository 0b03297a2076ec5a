//! Unit tangent bundle of a genus-two hyperbolic surface as `Γ \ SL(2,R)`.
//!
//! A frame `g` has base point `g·i` in the upper half plane. The time-one
//! geodesic map is `g -> g a` with `a = diag(e^{1/2}, e^{-1/2})`; the upper
//! unipotent orbit `g u(t)` is the stable leaf and the lower unipotent orbit
//! `g ℓ(r)` is the unstable leaf, both contracted by `e^{-1}` per step in their
//! contracting direction. `Γ` is generated by the side pairings of the regular
//! octagon with interior angles `π/4`, and frames are reduced so that their
//! base point lies in that octagon.

mod bump;
mod frame;
mod group;
mod loops;
mod model;

pub use bump::GroupAveragedBump;
pub use frame::{boost, lower, mat_inv, mat_mul, rot, upper, Frame, Mat2};
pub use group::{GroupValidation, Reduction, ReductionCheck, SurfaceGroup, MAX_REDUCTION_STEPS};
pub use loops::{alternating_kinds, close_loop, six_segment_loop, solve_closure, LoopClosure};
pub use model::GeodesicModel;
