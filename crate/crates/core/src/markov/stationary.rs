use serde::{Deserialize, Serialize};

use super::density::DensityField;
use super::operator::TransferMatrix;
use crate::dynamics::Quadrature;
use crate::error::Result;

/// Sup/inf ratio above which a recovered density is reported as degenerating.
pub const DEGENERACY_RATIO: f64 = 1e2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StationaryOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub cesaro_window: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { max_iter: 100_000, tol: 1e-10, cesaro_window: 64 }
    }
}

/// Iteration record. Histories hold one entry per Cesàro window, for the
/// window average.
#[derive(Clone, Debug, Serialize)]
pub struct StationaryDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub best_iteration: usize,
    pub residual_history: Vec<(usize, f64)>,
    pub sup_inf_history: Vec<(usize, f64)>,
    pub max_sup_inf: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct StationaryRun<P> {
    pub density: DensityField<P>,
    pub residual: f64,
    pub diagnostics: StationaryDiagnostics,
}

fn sup_inf(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn rescale_to_unit_mass(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x /= mean);
}

/// Cesàro-averaged power iteration of the discrete `P*` from `ρ ≡ 1`.
///
/// Non-convergence is not an error: the best window average is returned with
/// `converged = false`.
pub fn stationary_iterate<P: Copy + 'static>(
    m: &TransferMatrix,
    q: &Quadrature<P>,
    opts: &StationaryOptions,
) -> Result<StationaryRun<P>> {
    let n = q.len();
    let window = opts.cesaro_window.max(1);
    let mut rho = vec![1.0; n];
    let r0 = m.residual(&rho)?;
    let mut diag = StationaryDiagnostics {
        iterations: 1,
        converged: r0 <= opts.tol,
        residual: r0,
        best_iteration: 0,
        residual_history: vec![(0, r0)],
        sup_inf_history: vec![(0, 1.0)],
        max_sup_inf: 1.0,
        degenerate: false,
    };
    let mut best = rho.clone();
    if diag.converged {
        let density = DensityField::from_values(q, best)?;
        return Ok(StationaryRun { density, residual: r0, diagnostics: diag });
    }

    let mut sum = vec![0.0; n];
    let mut in_window = 0;
    let mut k = 0;
    while k < opts.max_iter {
        rho = m.apply_p_star_values(&rho)?;
        rescale_to_unit_mass(&mut rho);
        k += 1;
        sum.iter_mut().zip(&rho).for_each(|(s, r)| *s += r);
        in_window += 1;
        if in_window == window || k == opts.max_iter {
            let mut avg: Vec<f64> = sum.iter().map(|s| s / in_window as f64).collect();
            rescale_to_unit_mass(&mut avg);
            let r = m.residual(&avg)?;
            let ratio = sup_inf(&avg);
            diag.residual_history.push((k, r));
            diag.sup_inf_history.push((k, ratio));
            diag.max_sup_inf = diag.max_sup_inf.max(ratio);
            if r < diag.residual {
                diag.residual = r;
                diag.best_iteration = k;
                best = avg;
            }
            sum.iter_mut().for_each(|s| *s = 0.0);
            in_window = 0;
            if r <= opts.tol {
                diag.converged = true;
                break;
            }
        }
    }
    diag.iterations = k;
    diag.degenerate = diag.max_sup_inf > DEGENERACY_RATIO;
    let density = DensityField::from_values(q, best)?;
    Ok(StationaryRun { residual: diag.residual, density, diagnostics: diag })
}
