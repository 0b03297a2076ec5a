use rand::Rng;
use serde::{Deserialize, Serialize};

use super::path::{Segment, SuPath};
use super::point::{signed_diff, TorusPoint};
use super::{HyperbolicSystem, LeafKind, MapSystem};
use crate::error::{Error, Result};

/// Hyperbolic toral automorphism `v -> A v mod Z²`, `det A = 1`, `|tr A| > 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CatMap {
    a: [[i64; 2]; 2],
    inv: [[i64; 2]; 2],
    /// Eigenvalues with `|lambda_u| > 1`, `lambda_u * lambda_s = 1`.
    lambda_u: f64,
    lambda_s: f64,
    e_u: [f64; 2],
    e_s: [f64; 2],
    norm: f64,
}

/// One integer lift in [`CatMap::su_connect_ranked`]: `t e_u + s e_s = (y - x) + k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lift {
    pub k: [i64; 2],
    pub t: f64,
    pub s: f64,
}

impl Lift {
    pub fn cost(&self) -> f64 {
        self.t.abs() + self.s.abs()
    }
}

impl CatMap {
    pub fn new(a: [[i64; 2]; 2]) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let tr = a[0][0] + a[1][1];
        if det != 1 {
            return Err(Error::InvalidSystem(format!("cat matrix has det {det}, need 1")));
        }
        if tr.abs() <= 2 {
            return Err(Error::InvalidSystem(format!("cat matrix has |trace| {} <= 2", tr.abs())));
        }
        let trf = tr as f64;
        let disc = (trf * trf - 4.0).sqrt();
        // Larger-modulus root without cancellation, the other from the product.
        let lambda_u = (trf + trf.signum() * disc) / 2.0;
        let lambda_s = 1.0 / lambda_u;
        let e_u = eigenvector(&a, lambda_u);
        let e_s = eigenvector(&a, lambda_s);
        let (p, q, r, s) = (a[0][0] as f64, a[0][1] as f64, a[1][0] as f64, a[1][1] as f64);
        let fro2 = p * p + q * q + r * r + s * s;
        // Largest singular value of a unimodular 2x2 matrix.
        let norm = ((fro2 + (fro2 * fro2 - 4.0).max(0.0).sqrt()) / 2.0).sqrt();
        Ok(Self {
            a,
            inv: [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]],
            lambda_u,
            lambda_s,
            e_u,
            e_s,
            norm,
        })
    }

    /// `[[2,1],[1,1]]`.
    pub fn standard() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("standard cat matrix is hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.a
    }

    /// Signed expanding eigenvalue.
    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    /// Signed contracting eigenvalue.
    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    /// `|λ_u|`, the exponential rate along unstable leaves.
    pub fn expansion(&self) -> f64 {
        self.lambda_u.abs()
    }

    pub fn unstable_direction(&self) -> [f64; 2] {
        self.e_u
    }

    pub fn stable_direction(&self) -> [f64; 2] {
        self.e_s
    }

    fn direction(&self, kind: LeafKind) -> [f64; 2] {
        match kind {
            LeafKind::Stable => self.e_s,
            LeafKind::Unstable => self.e_u,
        }
    }

    /// All lifts `k ∈ {-K..K}²`, cheapest first; ties by lexicographic `(t, s)`.
    pub fn su_connect_ranked(&self, x: &TorusPoint, y: &TorusPoint, radius: i64) -> Vec<Lift> {
        let d = [signed_diff(y.0[0], x.0[0]), signed_diff(y.0[1], x.0[1])];
        let (eu, es) = (self.e_u, self.e_s);
        let det = eu[0] * es[1] - es[0] * eu[1];
        let mut lifts = Vec::with_capacity(((2 * radius + 1) * (2 * radius + 1)) as usize);
        for k0 in -radius..=radius {
            for k1 in -radius..=radius {
                let v = [d[0] + k0 as f64, d[1] + k1 as f64];
                let t = (v[0] * es[1] - es[0] * v[1]) / det;
                let s = (eu[0] * v[1] - v[0] * eu[1]) / det;
                lifts.push(Lift { k: [k0, k1], t, s });
            }
        }
        lifts.sort_by(|a, b| {
            a.cost()
                .total_cmp(&b.cost())
                .then(a.t.total_cmp(&b.t))
                .then(a.s.total_cmp(&b.s))
        });
        lifts
    }

    /// Two-segment path `x -u(t)-> · -s(s)-> y` through the cheapest lift.
    pub fn su_connect(&self, x: &TorusPoint, y: &TorusPoint, radius: i64) -> SuPath<TorusPoint> {
        let best = self.su_connect_ranked(x, y, radius.max(1))[0];
        Self::lift_path(x, &best)
    }

    pub fn lift_path(x: &TorusPoint, lift: &Lift) -> SuPath<TorusPoint> {
        SuPath::new(
            *x,
            vec![Segment::new(LeafKind::Unstable, lift.t), Segment::new(LeafKind::Stable, lift.s)],
        )
    }

    #[inline]
    fn mul(m: &[[i64; 2]; 2], x: &TorusPoint) -> TorusPoint {
        let [u, v] = x.0;
        TorusPoint([
            (m[0][0] as u64).wrapping_mul(u).wrapping_add((m[0][1] as u64).wrapping_mul(v)),
            (m[1][0] as u64).wrapping_mul(u).wrapping_add((m[1][1] as u64).wrapping_mul(v)),
        ])
    }
}

fn eigenvector(a: &[[i64; 2]; 2], lambda: f64) -> [f64; 2] {
    // (A - λ) v = 0; |tr| > 2 with det 1 forces b != 0 or c != 0.
    let v = if a[0][1] != 0 {
        [a[0][1] as f64, lambda - a[0][0] as f64]
    } else {
        [lambda - a[1][1] as f64, a[1][0] as f64]
    };
    let n = v[0].hypot(v[1]);
    let mut e = [v[0] / n, v[1] / n];
    // Orientation convention: first nonzero coordinate positive.
    if e[0] < 0.0 || (e[0] == 0.0 && e[1] < 0.0) {
        e = [-e[0], -e[1]];
    }
    e
}

impl MapSystem for CatMap {
    type Point = TorusPoint;
    const NAME: &'static str = "cat";

    #[inline]
    fn forward(&self, x: &TorusPoint) -> TorusPoint {
        Self::mul(&self.a, x)
    }

    #[inline]
    fn backward(&self, x: &TorusPoint) -> TorusPoint {
        Self::mul(&self.inv, x)
    }

    fn distance(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        signed_diff(a.0[0], b.0[0]).hypot(signed_diff(a.0[1], b.0[1]))
    }

    fn lipschitz_factor(&self) -> f64 {
        self.norm
    }

    fn sample_invariant<R: Rng + ?Sized>(&self, rng: &mut R) -> TorusPoint {
        TorusPoint([rng.gen(), rng.gen()])
    }
}

impl HyperbolicSystem for CatMap {
    fn leaf_flow(&self, x: &TorusPoint, kind: LeafKind, t: f64) -> TorusPoint {
        if t == 0.0 {
            return *x;
        }
        let e = self.direction(kind);
        x.translate([t * e[0], t * e[1]])
    }

    /// `A e_s = λ_s e_s` and `A⁻¹ e_u = λ_s e_u`.
    fn leaf_scale(&self, _kind: LeafKind) -> f64 {
        self.lambda_s
    }
}
