//! Long-run consequences of stationarity: ergodic averages, the central limit
//! theorem for `ψ - Pψ`, and the balance of the fiber Lyapunov exponent.

mod birkhoff;
mod clt;
mod ks;
mod lyapunov;
mod sampling;

pub use birkhoff::{birkhoff_average, birkhoff_checkpoints, birkhoff_ensemble, BirkhoffReport, BirkhoffTrace};
pub use clt::{clt_experiment, gordin_variance, CltOptions, CltReport, DecileRow, GordinVariance, DEFAULT_KS_THRESHOLD};
pub use ks::{ks_critical, ks_one_sample, ks_two_sample};
pub use lyapunov::{lyapunov_balance, BalanceReport, BALANCE_TOL};
pub use sampling::{sample_nu, NuSample};

use serde::{Deserialize, Serialize};

use crate::dynamics::{GridSystem, Quadrature};
use crate::error::{Error, Result};
use crate::markov::{stationarity_residual_exact, DensityField, EnvironmentProfile, TransferMatrix};

/// Densities entering the variance and balance formulas must be stationary to
/// this `L¹` residual.
pub const STATIONARY_TOL: f64 = 1e-8;

/// Stream tag for start points drawn from `ν`.
pub const START_TAG: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleOptions {
    pub walks: usize,
    pub len: usize,
}

/// `L¹` stationarity residual of `ρ`: pointwise `P*` for analytic densities,
/// the grid operator otherwise.
pub fn stationarity_residual<S: GridSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    rho: &DensityField<S::Point>,
    q: &Quadrature<S::Point>,
) -> Result<f64> {
    rho.check_aligned(q)?;
    match rho.exact() {
        Some(f) => Ok(stationarity_residual_exact(sys, profile, f, q)),
        None => TransferMatrix::build(sys, profile, q).residual(rho.values()),
    }
}

pub(crate) fn require_stationary<S: GridSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    rho: &DensityField<S::Point>,
    q: &Quadrature<S::Point>,
) -> Result<f64> {
    let r = stationarity_residual(sys, profile, rho, q)?;
    if r > STATIONARY_TOL {
        return Err(Error::Precondition(format!(
            "density is not stationary: residual {r:.3e} exceeds {STATIONARY_TOL:.0e}"
        )));
    }
    Ok(r)
}
