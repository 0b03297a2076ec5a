//! Fixed-point coordinates on the circle and the torus.
//!
//! A coordinate `x ∈ [0,1)` is stored as `round_down(x·2^64)`. Rotations and
//! integer matrices then act by wrapping integer arithmetic, which is exact:
//! `f⁻¹(f(x)) == x` bit for bit and an environment point reached by a walk is
//! exactly `f^{S_k} x` however the walk got there.

use serde::{Deserialize, Serialize};

const TWO_64: f64 = 18_446_744_073_709_551_616.0;
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// Fixed-point representation of `x mod 1`. Non-finite input maps to 0.
#[inline]
pub fn to_fixed(x: f64) -> u64 {
    let r = x - x.floor();
    if r < 1.0 {
        (r * TWO_64) as u64
    } else {
        0
    }
}

/// Nearest double in `[0, 1)`.
#[inline]
pub fn from_fixed(raw: u64) -> f64 {
    let v = raw as f64 / TWO_64;
    if v < 1.0 {
        v
    } else {
        ONE_BELOW
    }
}

/// Signed representative of a fixed-point difference, in `[-1/2, 1/2)`.
#[inline]
pub fn signed_diff(a: u64, b: u64) -> f64 {
    (a.wrapping_sub(b) as i64) as f64 / TWO_64
}

/// `m / d` as a fixed-point coordinate, for `0 <= m < d`.
#[inline]
pub fn rational_to_fixed(m: u64, d: u64) -> u64 {
    debug_assert!(m < d);
    (((m as u128) << 64) / d as u128) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CirclePoint(pub u64);

impl CirclePoint {
    pub fn new(x: f64) -> Self {
        Self(to_fixed(x))
    }

    pub fn x(&self) -> f64 {
        from_fixed(self.0)
    }

    pub fn raw(&self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint(pub [u64; 2]);

impl TorusPoint {
    pub fn from_coords(c: [f64; 2]) -> Self {
        Self([to_fixed(c[0]), to_fixed(c[1])])
    }

    pub fn coords(&self) -> [f64; 2] {
        [from_fixed(self.0[0]), from_fixed(self.0[1])]
    }

    pub fn raw(&self) -> [u64; 2] {
        self.0
    }

    /// Translation by a real vector, reduced mod 1.
    pub fn translate(&self, v: [f64; 2]) -> Self {
        Self([
            self.0[0].wrapping_add(to_fixed(v[0])),
            self.0[1].wrapping_add(to_fixed(v[1])),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_values() {
        assert_eq!(to_fixed(0.0), 0);
        assert_eq!(to_fixed(1.0), 0);
        assert_eq!(to_fixed(-0.25), 3 << 62);
        assert_eq!(to_fixed(f64::NAN), 0);
        assert_eq!(from_fixed(u64::MAX), ONE_BELOW);
        assert_eq!(rational_to_fixed(1, 2), 1 << 63);
    }

    proptest! {
        #[test]
        fn reduction_lands_in_unit_interval_and_is_idempotent(x in -1e6f64..1e6) {
            let c = CirclePoint::new(x);
            let y = c.x();
            prop_assert!((0.0..1.0).contains(&y));
            prop_assert_eq!(CirclePoint::new(y).x(), y);
            let r = x - x.floor();
            prop_assert!((y - r).abs() < 1e-15 || (1.0 - (y - r).abs()) < 1e-15);
        }

        #[test]
        fn signed_diff_is_small_for_close_points(x in 0.0f64..1.0, d in -0.4f64..0.4) {
            let a = to_fixed(x + d);
            let b = to_fixed(x);
            prop_assert!((signed_diff(a, b) - d).abs() < 1e-12);
        }
    }
}
