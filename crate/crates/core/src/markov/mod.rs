//! The environment Markov operator `Pψ = p·ψ∘f + q·ψ∘f⁻¹`, its dual on
//! densities `P*ρ = (pρ)∘f⁻¹ + (qρ)∘f`, and stationary-density recovery.

mod density;
mod operator;
mod profile;
mod stationary;

pub use density::DensityField;
pub use operator::{
    apply_p, apply_p_nodes, apply_p_star_exact, duality_defect, stationarity_residual_exact,
    symmetry_defect, symmetry_defect_mc, Estimate, TransferMatrix,
};
pub use profile::{logistic, EnvironmentProfile, TransferProvenance, P_CLAMP_HI, P_CLAMP_LO};
pub use stationary::{stationary_iterate, StationaryDiagnostics, StationaryOptions, StationaryRun, DEGENERACY_RATIO};

/// Profiles with `|∫ log φ dμ|` at most this are treated as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;
