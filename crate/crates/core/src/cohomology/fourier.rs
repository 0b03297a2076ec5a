use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Rotation;
use crate::error::{Error, Result};
use crate::observable::{TrigPoly, TrigTerm};

/// Observables with a larger mean are rejected.
const MEAN_TOL: f64 = 1e-10;

/// Solution of `u(x + α) - u(x) = obs(x)` by Fourier division.
#[derive(Clone, Debug, Serialize)]
pub struct FourierTransfer {
    pub u: TrigPoly,
    /// Frequencies `1..=K` with `|e^{2πikα} - 1| < δ`.
    pub flagged: Vec<i32>,
    pub min_denominator: f64,
    /// Bound on `sup |obs - (u∘f - u)|`: dropped harmonics plus roundoff.
    pub truncation_estimate: f64,
    pub dropped_terms: usize,
}

/// `û_k = ô_k / (e^{2πikα} - 1)` for `0 < |k| <= K`.
pub fn fourier_transfer(rot: &Rotation, obs: &TrigPoly, max_freq: i32, denom_floor: f64) -> Result<FourierTransfer> {
    if !obs.is_univariate() {
        return Err(Error::Config("rotation observables must not depend on y".into()));
    }
    let mean = obs.constant + obs.terms.iter().filter(|t| t.k[0] == 0).map(|t| t.cos).sum::<f64>();
    if mean.abs() > MEAN_TOL {
        return Err(Error::NotACoboundary { mean });
    }
    let alpha = rot.alpha();
    let denom = |k: i32| Complex64::from_polar(1.0, TAU * alpha * f64::from(k)) - 1.0;
    let mut flagged = Vec::new();
    let mut min_denominator = f64::INFINITY;
    for k in 1..=max_freq {
        let d = denom(k).norm();
        min_denominator = min_denominator.min(d);
        if d < denom_floor {
            flagged.push(k);
        }
    }

    let mut u = TrigPoly::default();
    let mut dropped = 0.0;
    let mut dropped_terms = 0;
    let mut work = 0.0;
    for t in obs.terms.iter().filter(|t| t.k[0] != 0) {
        let k = t.k[0];
        let amp = t.cos.hypot(t.sin);
        if k.abs() > max_freq {
            dropped += amp;
            dropped_terms += 1;
            continue;
        }
        // c cos + s sin = Re[(c - i s) e^{2πikx}].
        let o = Complex64::new(t.cos, -t.sin);
        let uh = o / denom(k);
        u.terms.push(TrigTerm { k: [k, 0], cos: uh.re, sin: -uh.im });
        work += (1.0 + TAU * f64::from(k.abs())) * (amp + uh.norm());
    }
    let truncation_estimate = dropped + 64.0 * f64::EPSILON * (work + 1.0);
    Ok(FourierTransfer { u, flagged, min_denominator, truncation_estimate, dropped_terms })
}
