use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{require_stationary, sampling::NuSample, ks_one_sample, EnsembleOptions, START_TAG};
use crate::dynamics::{GridSystem, Quadrature};
use crate::error::{Error, Result};
use crate::markov::{apply_p, apply_p_nodes, DensityField, EnvironmentProfile};
use crate::observable::Observable;
use crate::rng::aux_stream;
use crate::walk::{simulate_quenched, WalkConfig, WalkSeed};

/// Normalized sums are compared with `N(0, σ²)` only above this variance.
const DEGENERATE_VARIANCE: f64 = 1e-12;
/// Negative `σ²` down to `-NEGATIVE_SLACK` is roundoff and clamps to zero.
const NEGATIVE_SLACK: f64 = 1e-12;

/// KS acceptance threshold at `10⁴` walks: the 1% critical value `0.0163`
/// plus room for the finite-length CLT bias.
pub const DEFAULT_KS_THRESHOLD: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GordinVariance {
    /// `max(0, ‖ψ‖² - ‖Pψ‖²)` in `L²(ν)`.
    pub sigma2: f64,
    pub psi_norm2: f64,
    pub p_psi_norm2: f64,
    pub clamped: bool,
    pub stationarity_residual: f64,
}

/// `σ² = ∫ψ²ρ dμ - ∫(Pψ)²ρ dμ` by the grid rule, with `P` applied pointwise.
pub fn gordin_variance<S: GridSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    rho: &DensityField<S::Point>,
    psi: &Observable<S::Point>,
    q: &Quadrature<S::Point>,
) -> Result<GordinVariance> {
    let residual = require_stationary(sys, profile, rho, q)?;
    let ppsi = apply_p_nodes(sys, profile, psi, q);
    let mut a = 0.0;
    let mut b = 0.0;
    for ((x, r), pp) in q.nodes.iter().zip(rho.values()).zip(&ppsi) {
        let v = psi.eval(x);
        a += v * v * r;
        b += pp * pp * r;
    }
    let (psi_norm2, p_psi_norm2) = (a * q.weight, b * q.weight);
    let raw = psi_norm2 - p_psi_norm2;
    if raw < -NEGATIVE_SLACK {
        return Err(Error::Numerical(format!("Gordin variance {raw:.3e} is negative beyond roundoff")));
    }
    let clamped = raw < 0.0;
    if clamped {
        log::warn!("Gordin variance {raw:.3e} clamped to 0");
    }
    Ok(GordinVariance { sigma2: raw.max(0.0), psi_norm2, p_psi_norm2, clamped, stationarity_residual: residual })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CltOptions {
    pub walks: usize,
    pub len: usize,
    pub ks_threshold: f64,
}

impl Default for CltOptions {
    fn default() -> Self {
        Self { walks: 10_000, len: 10_000, ks_threshold: DEFAULT_KS_THRESHOLD }
    }
}

impl From<EnsembleOptions> for CltOptions {
    fn from(e: EnsembleOptions) -> Self {
        Self { walks: e.walks, len: e.len, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecileRow {
    pub level: f64,
    pub empirical: f64,
    pub normal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub psi: String,
    pub sigma2: f64,
    pub variance: GordinVariance,
    pub walks: usize,
    pub length: usize,
    /// Sample variance of the normalized sums and its standard error.
    pub empirical_variance: f64,
    pub empirical_variance_stderr: f64,
    pub degenerate: bool,
    /// KS distance to `N(0, σ²)`; absent for a degenerate variance.
    pub ks: Option<f64>,
    pub ks_threshold: f64,
    pub ks_pass: Option<bool>,
    pub deciles: Vec<DecileRow>,
}

impl CltReport {
    pub fn write_deciles_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "level,empirical,normal")?;
        for d in &self.deciles {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", d.level, d.empirical, d.normal)?;
        }
        Ok(())
    }
}

fn quantile(sorted: &[f64], level: f64) -> f64 {
    let pos = level * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let t = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - t) + sorted[i + 1] * t
    } else {
        sorted[i]
    }
}

/// Walks start from `ν`; each contributes `n^{-1/2} Σ_{k<n} φ(ω_k)` with
/// `φ = ψ - Pψ`.
pub fn clt_experiment<S: GridSystem + NuSample>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    rho: &DensityField<S::Point>,
    psi: &Observable<S::Point>,
    q: &Quadrature<S::Point>,
    opts: &CltOptions,
    master_seed: u64,
) -> Result<CltReport> {
    if opts.walks < 2 || opts.len == 0 {
        return Err(Error::Config("CLT needs at least two walks of positive length".into()));
    }
    let variance = gordin_variance(sys, profile, rho, psi, q)?;
    let starts = sys.sample_nu(rho, opts.walks, &mut aux_stream(master_seed, START_TAG))?;
    let cfg = WalkConfig::new(opts.len).with_stride(0);
    let scale = 1.0 / (opts.len as f64).sqrt();
    let phi = |y: &S::Point| psi.eval(y) - apply_p(sys, profile, psi, y);
    let sums: Vec<f64> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let w = simulate_quenched(sys, profile, *x, &cfg, WalkSeed { master: master_seed, stream: i as u64 });
            w.additive_sums(sys, phi, &[opts.len])[0] * scale
        })
        .collect();

    let n = sums.len() as f64;
    let mean = sums.iter().sum::<f64>() / n;
    let m2 = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = sums.iter().map(|s| (s - mean).powi(4)).sum::<f64>() / n;
    let empirical_variance_stderr = ((m4 - m2 * m2).max(0.0) / n).sqrt();

    let mut sorted = sums.clone();
    sorted.sort_by(f64::total_cmp);
    let degenerate = variance.sigma2 < DEGENERATE_VARIANCE;
    let normal = (!degenerate).then(|| Normal::new(0.0, variance.sigma2.sqrt())).transpose();
    let normal = normal.map_err(|e| Error::Numerical(e.to_string()))?;
    let deciles = (1..10)
        .map(|d| {
            let level = d as f64 / 10.0;
            DecileRow {
                level,
                empirical: quantile(&sorted, level),
                normal: normal.as_ref().map_or(0.0, |g| g.inverse_cdf(level)),
            }
        })
        .collect();
    let ks = normal.as_ref().map(|g| ks_one_sample(&sorted, |x| g.cdf(x)));
    Ok(CltReport {
        psi: psi.label().to_string(),
        sigma2: variance.sigma2,
        variance,
        walks: opts.walks,
        length: opts.len,
        empirical_variance: m2,
        empirical_variance_stderr,
        degenerate,
        ks,
        ks_threshold: opts.ks_threshold,
        ks_pass: ks.map(|k| k <= opts.ks_threshold),
        deciles,
    })
}
