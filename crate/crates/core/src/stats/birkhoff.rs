use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::MapSystem;
use crate::markov::EnvironmentProfile;
use crate::observable::Observable;
use crate::walk::{simulate_quenched, WalkConfig, WalkSeed};

/// Averages `(1/n) Σ_{k<n} obs(ω_k)` at the checkpoints of one walk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffTrace {
    pub seed: WalkSeed,
    pub checkpoints: Vec<usize>,
    pub averages: Vec<f64>,
}

impl BirkhoffTrace {
    pub fn last(&self) -> f64 {
        *self.averages.last().expect("at least one checkpoint")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffReport {
    pub observable: String,
    /// `∫ obs dν`.
    pub target: f64,
    pub walks: usize,
    pub length: usize,
    /// Mean and standard deviation over walks of the final averages.
    pub final_mean: f64,
    pub final_spread: f64,
    /// `|final_mean - target|`.
    pub error: f64,
    pub traces: Vec<BirkhoffTrace>,
}

impl BirkhoffReport {
    /// Fraction of walks whose final average is within `tol` of the target.
    pub fn fraction_within(&self, tol: f64) -> f64 {
        let hits = self.traces.iter().filter(|t| (t.last() - self.target).abs() <= tol).count();
        hits as f64 / self.walks.max(1) as f64
    }
}

/// Decades `10², 10³, …` below `n`, then `n`.
pub fn birkhoff_checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = [100, 1_000, 10_000, 100_000].into_iter().filter(|&c| c < n).collect();
    out.push(n);
    out
}

pub fn birkhoff_average<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    obs: &Observable<S::Point>,
    x: S::Point,
    len: usize,
    seed: WalkSeed,
) -> BirkhoffTrace {
    let w = simulate_quenched(sys, profile, x, &WalkConfig::new(len).with_stride(0), seed);
    let checkpoints = birkhoff_checkpoints(len);
    let sums = w.additive_sums(sys, |y| obs.eval(y), &checkpoints);
    let averages = sums.iter().zip(&checkpoints).map(|(s, &n)| s / n as f64).collect();
    BirkhoffTrace { seed, checkpoints, averages }
}

/// Walk `i` from `starts[i]` on stream `i`.
pub fn birkhoff_ensemble<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    obs: &Observable<S::Point>,
    starts: &[S::Point],
    len: usize,
    master_seed: u64,
    target: f64,
) -> BirkhoffReport {
    let traces: Vec<BirkhoffTrace> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x)| birkhoff_average(sys, profile, obs, *x, len, WalkSeed { master: master_seed, stream: i as u64 }))
        .collect();
    let finals: Vec<f64> = traces.iter().map(BirkhoffTrace::last).collect();
    let n = finals.len() as f64;
    let final_mean = finals.iter().sum::<f64>() / n;
    let final_spread = (finals.iter().map(|v| (v - final_mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    BirkhoffReport {
        observable: obs.label().to_string(),
        target,
        walks: traces.len(),
        length: len,
        final_mean,
        final_spread,
        error: (final_mean - target).abs(),
        traces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CirclePoint, Rotation};

    #[test]
    fn constant_observable_is_its_own_average() {
        let r = Rotation::golden();
        let prof = EnvironmentProfile::constant(0.5).unwrap();
        let t = birkhoff_average(&r, &prof, &Observable::constant(2.5), CirclePoint::new(0.4), 12_345, WalkSeed {
            master: 1,
            stream: 0,
        });
        assert_eq!(t.checkpoints, vec![100, 1_000, 10_000, 12_345]);
        assert!(t.averages.iter().all(|a| (a - 2.5).abs() < 1e-12));
    }
}
