//! Smooth functions on the surface built by averaging a Gaussian bump over a
//! ball of the surface group.

use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::frame::{base_point_of, cosh_distance, mat_mul, Frame, Mat2};
use super::group::{frame_at, SurfaceGroup};
use crate::observable::{Holder, HolderSource, Observable, Representation};

/// `amp · Σ_γ exp(-d(z, γc)² / 2σ²)` over words `γ` of bounded length,
/// keeping only centres that can reach the octagon.
#[derive(Clone, Debug, Serialize)]
pub struct GroupAveragedBump {
    #[serde(skip)]
    centers: Arc<Vec<Complex64>>,
    pub sigma: f64,
    pub amplitude: f64,
    pub word_radius: usize,
    pub center_count: usize,
    /// Largest `|u(z) - u(γz)|` over sampled boundary points `z` paired by `γ`.
    pub non_invariance: f64,
    /// Lipschitz bound in leaf parameter (includes a distortion factor 2).
    pub lipschitz: f64,
    /// Smallest hyperbolic distance between two distinct centres.
    pub separation: f64,
    /// `sup u`: at most one centre lies within `separation / 2` of any point.
    pub upper_bound: f64,
}

/// Centres farther than this many `σ` beyond the octagon are dropped.
const CUTOFF_SIGMAS: f64 = 8.0;

impl GroupAveragedBump {
    pub fn new(group: &SurfaceGroup, center: Complex64, sigma: f64, amplitude: f64, word_radius: usize) -> Self {
        let c = frame_at(center);
        let reach = (group.circumradius() + CUTOFF_SIGMAS * sigma).cosh();
        let mut seen = HashSet::new();
        let mut centers = Vec::new();
        let mut frontier: Vec<(Mat2, Option<usize>)> = vec![([[1.0, 0.0], [0.0, 1.0]], None)];
        let mut words: Vec<Mat2> = vec![[[1.0, 0.0], [0.0, 1.0]]];
        for _ in 0..word_radius {
            let mut next = Vec::new();
            for (w, last) in &frontier {
                for (j, p) in group.pairings().iter().enumerate() {
                    // Skip immediate cancellation: pairing j + 4 inverts j.
                    if last.is_some_and(|l| (l + 4) % 8 == j) {
                        continue;
                    }
                    let nw = mat_mul(p, w);
                    words.push(nw);
                    next.push((nw, Some(j)));
                }
            }
            frontier = next;
        }
        for w in &words {
            let z = base_point_of(&mat_mul(w, &c));
            if cosh_distance(z, Complex64::i()) > reach {
                continue;
            }
            let disk = super::frame::to_disk(z);
            let key = ((disk.re * 1e9).round() as i64, (disk.im * 1e9).round() as i64);
            if seen.insert(key) {
                centers.push(z);
            }
        }
        let lipschitz = 2.0 * amplitude / (sigma * 0.5f64.exp()) * centers.len() as f64;
        let mut separation = f64::INFINITY;
        for (i, &a) in centers.iter().enumerate() {
            for &b in &centers[i + 1..] {
                separation = separation.min(cosh_distance(a, b).max(1.0).acosh());
            }
        }
        let upper_bound = if centers.len() < 2 {
            amplitude
        } else {
            let half = 0.5 * separation;
            let far = (-half * half / (2.0 * sigma * sigma)).exp();
            (amplitude * (1.0 + (centers.len() - 1) as f64 * far)).min(amplitude * centers.len() as f64)
        };
        let mut bump = Self {
            separation,
            upper_bound,
            center_count: centers.len(),
            centers: Arc::new(centers),
            sigma,
            amplitude,
            word_radius,
            non_invariance: 0.0,
            lipschitz,
        };
        bump.non_invariance = bump.measure_non_invariance(group);
        bump
    }

    /// Defaults: centre off the octagon's symmetry axes, `σ = 0.35`,
    /// amplitude `0.5`, words of length at most 4.
    /// Off-centre point `rot(0.3) boost(0.6) · i`, chosen so the bump has no
    /// symmetry of the octagon.
    pub fn standard_center() -> Complex64 {
        let center = frame_at(Complex64::i());
        base_point_of(&mat_mul(&mat_mul(&super::frame::rot(0.3), &super::frame::boost(0.6)), &center))
    }

    pub fn standard(group: &SurfaceGroup) -> Self {
        Self::new(group, Self::standard_center(), 0.35, 0.5, 4)
    }

    pub fn eval_point(&self, z: Complex64) -> f64 {
        let s2 = 2.0 * self.sigma * self.sigma;
        self.amplitude
            * self
                .centers
                .iter()
                .map(|&c| {
                    let d = cosh_distance(z, c).max(1.0).acosh();
                    (-d * d / s2).exp()
                })
                .sum::<f64>()
    }

    fn measure_non_invariance(&self, group: &SurfaceGroup) -> f64 {
        let h = group.inradius();
        let mut worst: f64 = 0.0;
        for j in 0..8 {
            let p = &group.pairings()[j];
            let pinv = super::frame::mat_inv(p);
            for step in 0..=32 {
                let s = -h + 2.0 * h * step as f64 / 32.0;
                let z = group.side_point(j, s);
                let w = base_point_of(&mat_mul(&pinv, &frame_at(z)));
                worst = worst.max((self.eval_point(z) - self.eval_point(w)).abs());
            }
        }
        worst
    }

    pub fn observable(&self) -> Observable<Frame> {
        let me = self.clone();
        let upper = self.upper_bound;
        Observable::new(
            format!("bump(sigma={}, amp={}, words<={})", self.sigma, self.amplitude, self.word_radius),
            Representation::GroupAveragedBump,
            move |f: &Frame| me.eval_point(f.base_point()),
        )
        .with_holder(Holder::lipschitz(self.lipschitz, HolderSource::Derived))
        .with_bounds(0.0, upper)
    }
}

impl GroupAveragedBump {
    /// Largest difference quotient along stable and unstable leaves of length `step`.
    pub fn sampled_leaf_quotient(&self, frames: &[Frame], step: f64) -> f64 {
        use super::frame::{lower, upper};
        let mut worst: f64 = 0.0;
        for f in frames {
            for m in [upper(step), lower(step)] {
                let g = f.right_mul(&m);
                let q = (self.eval_point(f.base_point()) - self.eval_point(g.base_point())).abs() / step.abs();
                worst = worst.max(q);
            }
        }
        worst
    }
}
