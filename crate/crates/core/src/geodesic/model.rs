use std::f64::consts::{E, PI, TAU};
use std::sync::Arc;

use rand::Rng;

use super::frame::{boost, lower, mat_mul, rot, upper, Frame, Mat2};
use super::group::SurfaceGroup;
use crate::dynamics::{HyperbolicSystem, LeafKind, MapSystem};
use crate::error::Result;

/// Time-one geodesic map on `Γ \ SL(2,R)`.
#[derive(Clone, Debug)]
pub struct GeodesicModel {
    group: Arc<SurfaceGroup>,
    a_fwd: Mat2,
    a_bwd: Mat2,
}

impl GeodesicModel {
    pub fn new(group: SurfaceGroup) -> Self {
        Self { group: Arc::new(group), a_fwd: boost(1.0), a_bwd: boost(-1.0) }
    }

    pub fn regular_octagon() -> Result<Self> {
        Ok(Self::new(SurfaceGroup::regular_octagon()?))
    }

    pub fn group(&self) -> &SurfaceGroup {
        &self.group
    }

    /// Reduction that cannot fail on a validated group; on failure the
    /// unreduced frame is kept and the event logged.
    pub fn reduce(&self, x: &Frame) -> Frame {
        match self.group.reduce(x) {
            Ok(r) => r.frame,
            Err(e) => {
                log::warn!("keeping unreduced frame: {e}");
                *x
            }
        }
    }

    /// Right multiplication by `m`, then reduction.
    pub fn right(&self, x: &Frame, m: &Mat2) -> Frame {
        self.reduce(&x.right_mul(m))
    }

    /// Haar measure restricted to the octagon: polar coordinates about `i`,
    /// radial density `sinh r`, uniform angles, rejection outside the octagon.
    pub fn haar_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Frame {
        let span = self.group.circumradius().cosh() - 1.0;
        loop {
            let r = (1.0 + rng.gen::<f64>() * span).acosh();
            let theta: f64 = rng.gen_range(0.0..PI);
            let psi: f64 = rng.gen_range(0.0..TAU);
            let m = mat_mul(&mat_mul(&rot(theta), &boost(r)), &rot(psi));
            if self.group.contains(&m, 0.0) {
                return Frame::new(m).mark_reduced();
            }
        }
    }
}

impl MapSystem for GeodesicModel {
    type Point = Frame;
    const NAME: &'static str = "geodesic";

    fn forward(&self, x: &Frame) -> Frame {
        self.right(x, &self.a_fwd)
    }

    fn backward(&self, x: &Frame) -> Frame {
        self.right(x, &self.a_bwd)
    }

    /// Max-norm distance of matrices, minimized over sign and the neighbouring
    /// coset representatives.
    fn distance(&self, a: &Frame, b: &Frame) -> f64 {
        self.group.quotient_distance(a.matrix(), b.matrix())
    }

    /// Displacement of the base point along a leaf grows by at most `e` under
    /// one step of either map.
    fn lipschitz_factor(&self) -> f64 {
        E
    }

    fn sample_invariant<R: Rng + ?Sized>(&self, rng: &mut R) -> Frame {
        self.haar_sample(rng)
    }
}

impl HyperbolicSystem for GeodesicModel {
    fn leaf_flow(&self, x: &Frame, kind: LeafKind, t: f64) -> Frame {
        if t == 0.0 {
            return *x;
        }
        let m = match kind {
            LeafKind::Stable => upper(t),
            LeafKind::Unstable => lower(t),
        };
        self.right(x, &m)
    }

    fn leaf_scale(&self, _kind: LeafKind) -> f64 {
        (-1.0f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::frame::psl_distance;
    use rand::SeedableRng;

    fn model() -> GeodesicModel {
        GeodesicModel::regular_octagon().unwrap()
    }

    #[test]
    fn forward_backward_identity() {
        let g = model();
        let x = Frame::identity();
        let y = g.backward(&g.forward(&x));
        assert!(psl_distance(y.matrix(), x.matrix()) < 1e-12);
    }

    #[test]
    fn conjugation_by_the_geodesic_step() {
        // a⁻¹ u(s) a = u(s/e) and a ℓ(r) a⁻¹ = ℓ(r/e), as matrices.
        let a = boost(1.0);
        let ai = boost(-1.0);
        let lhs = mat_mul(&mat_mul(&ai, &upper(0.4)), &a);
        assert!(psl_distance(&lhs, &upper(0.4 / E)) < 1e-12);
        let lhs = mat_mul(&mat_mul(&a, &lower(0.4)), &ai);
        assert!(psl_distance(&lhs, &lower(0.4 / E)) < 1e-12);

        let g = model();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let x = g.haar_sample(&mut rng);
            let lhs = g.forward(&g.leaf_flow(&x, LeafKind::Stable, 0.4));
            let rhs = g.leaf_flow(&g.forward(&x), LeafKind::Stable, 0.4 * g.leaf_scale(LeafKind::Stable));
            assert!(g.distance(&lhs, &rhs) < 1e-12);
            let lhs = g.backward(&g.leaf_flow(&x, LeafKind::Unstable, 0.4));
            let rhs = g.leaf_flow(&g.backward(&x), LeafKind::Unstable, 0.4 * g.leaf_scale(LeafKind::Unstable));
            assert!(g.distance(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn leaf_group_law() {
        let g = model();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let x = g.haar_sample(&mut rng);
        for kind in [LeafKind::Stable, LeafKind::Unstable] {
            let two = g.leaf_flow(&g.leaf_flow(&x, kind, 0.7), kind, -0.25);
            let one = g.leaf_flow(&x, kind, 0.45);
            assert!(g.distance(&two, &one) < 1e-12);
        }
    }

    #[test]
    fn determinant_survives_many_steps() {
        let g = model();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut x = g.haar_sample(&mut rng);
        for _ in 0..100 {
            x = g.forward(&x);
        }
        assert!((x.det() - 1.0).abs() <= 1e-10);
        assert!(x.is_reduced());
    }

    #[test]
    fn haar_samples_are_reproducible_and_reduced() {
        let g = model();
        let a = g.haar_sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(42));
        let b = g.haar_sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        assert!((a.det() - 1.0).abs() < 1e-12);
        assert!(g.group().contains(a.matrix(), 1e-12));
    }
}
