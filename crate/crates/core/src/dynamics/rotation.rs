use rand::Rng;

use super::point::{signed_diff, to_fixed, CirclePoint};
use super::MapSystem;
use crate::error::{Error, Result};

/// `x -> x + α mod 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    alpha: f64,
    step: u64,
}

/// Denominators up to this size are checked against the angle.
const RATIONAL_GUARD_Q: u32 = 64;
const RATIONAL_GUARD_EPS: f64 = 1e-12;

impl Rotation {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSystem(format!("rotation angle {alpha} not in (0,1)")));
        }
        if let Some((p, q)) = rational_approximation(alpha) {
            return Err(Error::InvalidSystem(format!(
                "rotation angle {alpha} is within {RATIONAL_GUARD_EPS:e} of {p}/{q}"
            )));
        }
        Ok(Self::new_unchecked(alpha))
    }

    /// Skips the rationality guard; for rational test angles.
    pub fn new_unchecked(alpha: f64) -> Self {
        Self { alpha, step: to_fixed(alpha) }
    }

    /// `α = (√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::new_unchecked((5f64.sqrt() - 1.0) / 2.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn rational_approximation(alpha: f64) -> Option<(i64, u32)> {
    (1..=RATIONAL_GUARD_Q).find_map(|q| {
        let p = (alpha * f64::from(q)).round();
        ((alpha - p / f64::from(q)).abs() < RATIONAL_GUARD_EPS).then_some((p as i64, q))
    })
}

impl MapSystem for Rotation {
    type Point = CirclePoint;
    const NAME: &'static str = "rotation";

    #[inline]
    fn forward(&self, x: &CirclePoint) -> CirclePoint {
        CirclePoint(x.0.wrapping_add(self.step))
    }

    #[inline]
    fn backward(&self, x: &CirclePoint) -> CirclePoint {
        CirclePoint(x.0.wrapping_sub(self.step))
    }

    fn iterate(&self, x: &CirclePoint, n: i64) -> CirclePoint {
        CirclePoint(x.0.wrapping_add(self.step.wrapping_mul(n as u64)))
    }

    fn distance(&self, a: &CirclePoint, b: &CirclePoint) -> f64 {
        signed_diff(a.0, b.0).abs()
    }

    fn lipschitz_factor(&self) -> f64 {
        1.0
    }

    fn sample_invariant<R: Rng + ?Sized>(&self, rng: &mut R) -> CirclePoint {
        CirclePoint(rng.gen())
    }
}
