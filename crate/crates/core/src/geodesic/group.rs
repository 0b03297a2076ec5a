use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::frame::{base_point_of, boost, det, frob2, mat_inv, mat_mul, psl_distance, rot, Frame, Mat2};
use crate::error::{Error, Result};

pub const MAX_REDUCTION_STEPS: usize = 10_000;

/// Relative slack when comparing distances to the origin; keeps boundary
/// points from bouncing between neighbouring copies.
const REDUCE_REL_TOL: f64 = 1e-12;

/// `g0 g1⁻¹ g2 g3⁻¹ g0⁻¹ g1 g2⁻¹ g3` as pairing indices (`j + 4` is `g_j⁻¹`).
pub const RELATION: [usize; 8] = [0, 5, 2, 7, 4, 1, 6, 3];

/// Side pairings of the regular octagon with angles `π/4`, centred at `i`.
///
/// Pairing `j` translates along the geodesic through `i` in direction `jπ/4`
/// by twice the inradius, mapping side `j + 4` onto side `j` (indices mod 8).
#[derive(Clone, Debug)]
pub struct SurfaceGroup {
    pairings: [Mat2; 8],
    inradius: f64,
    circumradius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupValidation {
    pub max_det_defect: f64,
    pub min_abs_trace: f64,
    pub relation_defect: f64,
    pub side_defect: f64,
    pub overlap_violations: usize,
}

/// Worst defects of [`SurfaceGroup::check_reduction`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReductionCheck {
    pub samples: usize,
    /// `d(reduce(reduce x), reduce x)`.
    pub idempotence: f64,
    /// `d(reduce(γ x), reduce x)` over the pairings `γ`.
    pub coset: f64,
}

/// Result of [`SurfaceGroup::reduce`]: `frame = word · input`, word letters applied left to right in order.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub frame: Frame,
    pub word: Vec<u8>,
}

impl SurfaceGroup {
    pub fn regular_octagon() -> Result<Self> {
        let inradius = (1.0 + 2f64.sqrt()).acosh();
        let circumradius = (3.0 + 2.0 * 2f64.sqrt()).acosh();
        let t = boost(2.0 * inradius);
        let mut pairings = [[[0.0; 2]; 2]; 8];
        for k in 0..4 {
            let r = rot(k as f64 * PI / 8.0);
            pairings[k] = mat_mul(&mat_mul(&r, &t), &mat_inv(&r));
            pairings[k + 4] = mat_inv(&pairings[k]);
        }
        let g = Self { pairings, inradius, circumradius };
        let v = g.validate();
        if v.max_det_defect > 1e-12
            || v.min_abs_trace <= 2.0
            || v.relation_defect > 1e-9
            || v.side_defect > 1e-9
            || v.overlap_violations > 0
        {
            return Err(Error::InvalidSystem(format!("octagon group failed validation: {v:?}")));
        }
        Ok(g)
    }

    pub fn pairings(&self) -> &[Mat2; 8] {
        &self.pairings
    }

    /// Distance from the centre to side midpoints; also the half side length.
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    /// Distance from the centre to the vertices.
    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    /// Point of side `j` at signed distance `s` from its midpoint, `|s| <= inradius`.
    pub fn side_point(&self, j: usize, s: f64) -> Complex64 {
        let m = mat_mul(
            &mat_mul(&rot(j as f64 * PI / 8.0), &boost(self.inradius)),
            &mat_mul(&rot(PI / 4.0), &boost(s)),
        );
        base_point_of(&m)
    }

    /// Whether `g·i` lies in the closed octagon (relative slack `tol`).
    pub fn contains(&self, m: &Mat2, tol: f64) -> bool {
        let n = frob2(m);
        self.pairings.iter().all(|p| n <= frob2(&mat_mul(p, m)) * (1.0 + tol))
    }

    pub fn relation_defect(&self) -> f64 {
        let w = RELATION.iter().fold([[1.0, 0.0], [0.0, 1.0]], |acc, &j| mat_mul(&acc, &self.pairings[j]));
        psl_distance(&w, &[[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn validate(&self) -> GroupValidation {
        let max_det_defect = self.pairings.iter().map(|p| (det(p) - 1.0).abs()).fold(0.0, f64::max);
        let min_abs_trace = self.pairings.iter().map(|p| (p[0][0] + p[1][1]).abs()).fold(f64::INFINITY, f64::min);
        let mut side_defect: f64 = 0.0;
        let mut overlap_violations = 0;
        let h = self.inradius;
        for j in 0..8 {
            let p = &self.pairings[j];
            for step in 0..=16 {
                let s = -h + 2.0 * h * step as f64 / 16.0;
                let z = self.side_point(j, s);
                let frame = frame_at(z);
                // On the bisector of i and p·i, and inside the closed octagon.
                let d_center = frob2(&frame);
                let d_neigh = frob2(&mat_mul(&mat_inv(p), &frame));
                side_defect = side_defect.max(((d_center - d_neigh) / d_center).abs());
                if !self.contains(&frame, 1e-9) {
                    overlap_violations += 1;
                }
                // Its preimage lies on the opposite side, also in the octagon.
                let back = mat_mul(&mat_inv(p), &frame);
                if !self.contains(&back, 1e-9) {
                    overlap_violations += 1;
                }
                // A point just inside side j is carried outside by p⁻¹ (the
                // neighbouring copy p·octagon does not overlap the octagon).
                if step > 0 && step < 16 {
                    let inner = frame_at(shrink_towards_i(z, 1e-6));
                    if self.contains(&mat_mul(&mat_inv(p), &inner), 0.0) {
                        overlap_violations += 1;
                    }
                }
            }
        }
        GroupValidation {
            max_det_defect,
            min_abs_trace,
            relation_defect: self.relation_defect(),
            side_defect,
            overlap_violations,
        }
    }

    /// Greedy descent of `d(g·i, i)` by left multiplication with pairings.
    pub fn reduce(&self, x: &Frame) -> Result<Reduction> {
        let mut m = *x.matrix();
        let mut word = Vec::new();
        let mut n = frob2(&m);
        loop {
            let mut best = (f64::INFINITY, 0);
            for (j, p) in self.pairings.iter().enumerate() {
                let c = frob2(&mat_mul(p, &m));
                if c < best.0 {
                    best = (c, j);
                }
            }
            if best.0 >= n * (1.0 - REDUCE_REL_TOL) {
                break;
            }
            if word.len() >= MAX_REDUCTION_STEPS {
                return Err(Error::ReductionFailure { steps: word.len() });
            }
            m = mat_mul(&self.pairings[best.1], &m);
            n = best.0;
            word.push(best.1 as u8);
        }
        let frame = if word.is_empty() { *x } else { Frame::new(m) };
        Ok(Reduction { frame: frame.mark_reduced(), word })
    }

    /// Reduction of each frame, of its reduction, and of its images under all
    /// pairings, compared in `PSL(2,R)`.
    pub fn check_reduction(&self, frames: &[Frame]) -> Result<ReductionCheck> {
        let mut out = ReductionCheck { samples: frames.len(), idempotence: 0.0, coset: 0.0 };
        for x in frames {
            let r = self.reduce(x)?.frame;
            let again = self.reduce(&r)?.frame;
            out.idempotence = out.idempotence.max(psl_distance(again.matrix(), r.matrix()));
            for p in &self.pairings {
                let moved = self.reduce(&x.left_mul(p))?.frame;
                out.coset = out.coset.max(psl_distance(moved.matrix(), r.matrix()));
            }
        }
        Ok(out)
    }

    /// Smallest max-norm distance between `a` and `±γ b` over `γ ∈ {1} ∪ pairings`.
    pub fn quotient_distance(&self, a: &Mat2, b: &Mat2) -> f64 {
        self.pairings
            .iter()
            .map(|p| psl_distance(a, &mat_mul(p, b)))
            .fold(psl_distance(a, b), f64::min)
    }
}

/// A frame whose base point is `z`.
pub(crate) fn frame_at(z: Complex64) -> Mat2 {
    let r = z.im.sqrt();
    [[r, z.re / r], [0.0, 1.0 / r]]
}

fn shrink_towards_i(z: Complex64, eps: f64) -> Complex64 {
    let w = super::frame::to_disk(z) * (1.0 - eps);
    let i = Complex64::i();
    // Inverse Cayley transform.
    i * (Complex64::new(1.0, 0.0) + w) / (Complex64::new(1.0, 0.0) - w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn validation_passes() {
        let g = SurfaceGroup::regular_octagon().unwrap();
        let v = g.validate();
        assert!(v.relation_defect <= 1e-9, "{v:?}");
        assert!(v.max_det_defect <= 1e-12 && v.min_abs_trace > 2.0);
        assert_eq!(v.overlap_violations, 0);
        // tr = 2 cosh(inradius) = 2 + 2√2.
        assert!((g.pairings()[0][0][0] + g.pairings()[0][1][1] - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn vertices_are_at_circumradius() {
        let g = SurfaceGroup::regular_octagon().unwrap();
        let v = g.side_point(3, g.inradius());
        let d = crate::geodesic::frame::cosh_distance(v, Complex64::i()).acosh();
        assert!((d - g.circumradius()).abs() < 1e-12);
    }

    #[test]
    fn reduce_is_idempotent_and_coset_invariant() {
        let g = SurfaceGroup::regular_octagon().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let m = mat_mul(&mat_mul(&rot(rng.gen_range(0.0..PI)), &boost(rng.gen_range(0.0..4.0))), &rot(rng.gen_range(0.0..PI)));
            let r = g.reduce(&Frame::new(m)).unwrap();
            let again = g.reduce(&r.frame).unwrap();
            assert!(again.word.is_empty());
            assert_eq!(again.frame, r.frame);
            for p in g.pairings() {
                let moved = g.reduce(&Frame::new(mat_mul(p, &m))).unwrap();
                assert!(psl_distance(moved.frame.matrix(), r.frame.matrix()) < 1e-9);
            }
        }
    }

    #[test]
    fn far_frames_reduce_quickly() {
        let g = SurfaceGroup::regular_octagon().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0;
        for _ in 0..200 {
            let m = mat_mul(&mat_mul(&rot(rng.gen_range(0.0..PI)), &boost(10.0)), &rot(rng.gen_range(0.0..PI)));
            let r = g.reduce(&Frame::new(m)).unwrap();
            assert!(g.contains(r.frame.matrix(), 1e-12));
            worst = worst.max(r.word.len());
        }
        assert!(worst <= 60, "worst reduction took {worst} steps");
    }

    #[test]
    fn word_reproduces_reduced_frame() {
        let g = SurfaceGroup::regular_octagon().unwrap();
        let m = mat_mul(&rot(0.3), &boost(5.0));
        let r = g.reduce(&Frame::new(m)).unwrap();
        let mut acc = m;
        for &j in &r.word {
            acc = mat_mul(&g.pairings()[j as usize], &acc);
        }
        assert!(psl_distance(&acc, r.frame.matrix()) < 1e-9);
    }
}
