use num_complex::Complex64;

pub type Mat2 = [[f64; 2]; 2];

#[inline]
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Inverse of a unimodular matrix.
#[inline]
pub fn mat_inv(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

#[inline]
pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

#[inline]
pub fn frob2(a: &Mat2) -> f64 {
    a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1]
}

/// `[[1,t],[0,1]]`.
#[inline]
pub fn upper(t: f64) -> Mat2 {
    [[1.0, t], [0.0, 1.0]]
}

/// `[[1,0],[r,1]]`.
#[inline]
pub fn lower(r: f64) -> Mat2 {
    [[1.0, 0.0], [r, 1.0]]
}

/// Rotation about `i` by angle `2θ`.
pub fn rot(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// Translation by hyperbolic distance `l` along the imaginary axis.
pub fn boost(l: f64) -> Mat2 {
    [[(l / 2.0).exp(), 0.0], [0.0, (-l / 2.0).exp()]]
}

/// Max-norm distance between `a` and `±b`.
pub fn psl_distance(a: &Mat2, b: &Mat2) -> f64 {
    let mut plus: f64 = 0.0;
    let mut minus: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            plus = plus.max((a[i][j] - b[i][j]).abs());
            minus = minus.max((a[i][j] + b[i][j]).abs());
        }
    }
    plus.min(minus)
}

/// Point of the frame bundle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    m: Mat2,
    disk: Complex64,
    reduced: bool,
}

impl Frame {
    /// Rescales by `det^{-1/2}`; the determinant must be positive.
    pub fn new(m: Mat2) -> Self {
        let d = det(&m);
        assert!(d > 0.0, "frame matrix must have positive determinant, got {d}");
        let s = 1.0 / d.sqrt();
        let m = if (d - 1.0).abs() > f64::EPSILON {
            [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
        } else {
            m
        };
        Self { m, disk: to_disk(base_point_of(&m)), reduced: false }
    }

    pub fn identity() -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]])
    }

    pub(crate) fn mark_reduced(mut self) -> Self {
        self.reduced = true;
        self
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn det(&self) -> f64 {
        det(&self.m)
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// `g·i` in the upper half plane.
    pub fn base_point(&self) -> Complex64 {
        base_point_of(&self.m)
    }

    /// `g·i` in the Poincaré disk (`i -> 0`).
    pub fn disk_point(&self) -> Complex64 {
        self.disk
    }

    /// `cosh d(g·i, i) = |g|_F² / 2`.
    pub fn cosh_distance_to_origin(&self) -> f64 {
        frob2(&self.m) / 2.0
    }

    pub fn distance_to_origin(&self) -> f64 {
        self.cosh_distance_to_origin().max(1.0).acosh()
    }

    pub fn right_mul(&self, b: &Mat2) -> Self {
        Self::new(mat_mul(&self.m, b))
    }

    pub fn left_mul(&self, g: &Mat2) -> Self {
        Self::new(mat_mul(g, &self.m))
    }
}

pub fn base_point_of(m: &Mat2) -> Complex64 {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let n = c * c + d * d;
    Complex64::new((a * c + b * d) / n, det(m) / n)
}

pub fn to_disk(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (z - i) / (z + i)
}

/// `cosh` of the hyperbolic distance between two upper-half-plane points.
pub fn cosh_distance(z: Complex64, w: Complex64) -> f64 {
    1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_fixes_i_and_boost_moves_by_l() {
        let z = base_point_of(&rot(0.7));
        assert!((z - Complex64::i()).norm() < 1e-15);
        let f = Frame::new(boost(2.5));
        assert!((f.distance_to_origin() - 2.5).abs() < 1e-12);
        let w = base_point_of(&mat_mul(&rot(0.3), &boost(1.0)));
        assert!((cosh_distance(w, Complex64::i()) - 1f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn rot_turns_disk_by_twice_the_angle() {
        let w0 = Frame::new(boost(1.0)).disk_point();
        let w1 = Frame::new(mat_mul(&rot(0.4), &boost(1.0))).disk_point();
        let turn = (w1 / w0).arg();
        assert!((turn.abs() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn determinant_is_normalized() {
        let f = Frame::new([[2.0, 1.0], [1.0, 2.0]]);
        assert!((f.det() - 1.0).abs() < 1e-15);
    }
}
