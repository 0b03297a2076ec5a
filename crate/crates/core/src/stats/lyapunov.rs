use rayon::prelude::*;
use serde::Serialize;

use super::{require_stationary, sampling::NuSample, EnsembleOptions, START_TAG};
use crate::dynamics::{CatMap, GridSystem, TorusPoint};
use crate::error::{Error, Result};
use crate::markov::{DensityField, Estimate, EnvironmentProfile};
use crate::rng::aux_stream;
use crate::walk::{simulate_quenched, WalkConfig, WalkSeed};

/// `|∫(p - q) dν|` bound asserted for profiles built from a transfer function.
pub const BALANCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceReport {
    pub log_lambda_u: f64,
    /// `log λ_u ∫ p dν`.
    pub lhs: f64,
    /// `log λ_u ∫ q dν`.
    pub rhs: f64,
    pub drift: f64,
    /// Only coboundary-built profiles carry the assertion `|drift| <= BALANCE_TOL`.
    pub balance_holds: Option<bool>,
    /// Per walk `log λ_u · S_N / N`, averaged over walks started from `ν`.
    pub fiber_exponent_mc: Estimate,
    /// `log λ_u · drift`.
    pub fiber_exponent_predicted: f64,
    /// Deviation of the estimate from the prediction in standard errors.
    pub z_score: f64,
    pub stationarity_residual: f64,
}

pub fn lyapunov_balance(
    cat: &CatMap,
    profile: &EnvironmentProfile<TorusPoint>,
    rho: &DensityField<TorusPoint>,
    resolution: usize,
    mc: EnsembleOptions,
    master_seed: u64,
) -> Result<BalanceReport> {
    if mc.walks < 2 || mc.len == 0 {
        return Err(Error::Config("balance needs at least two walks of positive length".into()));
    }
    let q = cat.quadrature(resolution)?;
    let residual = require_stationary(cat, profile, rho, &q)?;
    let ll = cat.lambda_u().ln();
    let ip = rho.integrate(&q, |x| profile.p_at(x));
    let iq = rho.integrate(&q, |x| profile.q_at(x));
    let drift = ip - iq;

    let starts = cat.sample_nu(rho, mc.walks, &mut aux_stream(master_seed, START_TAG))?;
    let cfg = WalkConfig::new(mc.len).with_stride(0);
    let per_walk: Vec<f64> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let w = simulate_quenched(cat, profile, *x, &cfg, WalkSeed { master: master_seed, stream: i as u64 });
            ll * w.final_position() as f64 / mc.len as f64
        })
        .collect();
    let est = Estimate::from_samples(&per_walk);
    let predicted = ll * drift;
    Ok(BalanceReport {
        log_lambda_u: ll,
        lhs: ll * ip,
        rhs: ll * iq,
        drift,
        balance_holds: profile.transfer().map(|_| drift.abs() <= BALANCE_TOL),
        fiber_exponent_mc: est,
        fiber_exponent_predicted: predicted,
        z_score: (est.value - predicted).abs() / est.stderr.max(f64::MIN_POSITIVE),
        stationarity_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_coin_balances_exactly() {
        let c = CatMap::standard();
        let q = c.quadrature(32).unwrap();
        let prof = EnvironmentProfile::constant(0.5).unwrap();
        let rho = DensityField::uniform(&q);
        let rep = lyapunov_balance(&c, &prof, &rho, 32, EnsembleOptions { walks: 20, len: 100 }, 4).unwrap();
        assert_eq!(rep.lhs, rep.rhs);
        assert!((rep.lhs - c.lambda_u().ln() / 2.0).abs() < 1e-15);
        assert_eq!(rep.balance_holds, None);
    }
}
