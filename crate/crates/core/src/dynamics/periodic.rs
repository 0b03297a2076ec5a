//! Periodic points of a cat map by exact lattice enumeration.
//!
//! `A^n v ≡ v (mod Z²)` means `B v ∈ Z²` with `B = A^n - I`, so the solutions
//! are `B⁻¹ k mod 1`. Writing `D = det B`, each solution is `m / |D|` with the
//! integer residue `m = sign(D) adj(B) k mod |D|`; the residues in `[0,|D|)²`
//! are found by scanning `k` over the image of the unit square under `B`.
//! Everything is integer arithmetic, so the map acts on residues exactly.

use rayon::prelude::*;

use super::cat::CatMap;
use super::point::{rational_to_fixed, TorusPoint};
use crate::error::{Error, Result};

pub const MAX_PERIOD: u32 = 14;

/// Refuse lattices with more points than this (only reachable for large traces).
const MAX_POINTS: i128 = 50_000_000;

/// Points of period dividing `n`, as integer residues modulo `modulus`.
#[derive(Clone, Debug)]
pub struct PeriodicLattice {
    pub period: u32,
    pub modulus: u64,
    pub residues: Vec<[u64; 2]>,
    matrix: [[i64; 2]; 2],
}

type M2 = [[i128; 2]; 2];

fn mat_mul(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// `lo <= c·k + e <= hi` as an interval of integers `k` (empty when `lo > hi` returned).
fn solve_bounds(c: i128, e: i128, lo: i128, hi: i128) -> (i128, i128) {
    match c.signum() {
        1 => (div_ceil(lo - e, c), div_floor(hi - e, c)),
        -1 => (div_ceil(hi - e, c), div_floor(lo - e, c)),
        _ if (lo..=hi).contains(&e) => (i128::MIN / 4, i128::MAX / 4),
        _ => (1, 0),
    }
}

impl CatMap {
    /// Residue lattice of all points with `f^n x = x`.
    pub fn periodic_lattice(&self, n: u32) -> Result<PeriodicLattice> {
        if !(1..=MAX_PERIOD).contains(&n) {
            return Err(Error::OutOfRange {
                what: "period",
                value: i64::from(n),
                allowed: "1..=14",
            });
        }
        let a = self.matrix();
        let a128: M2 = [[a[0][0].into(), a[0][1].into()], [a[1][0].into(), a[1][1].into()]];
        let mut p: M2 = [[1, 0], [0, 1]];
        for _ in 0..n {
            p = mat_mul(&p, &a128);
        }
        let b: M2 = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let modulus = det.abs();
        if modulus == 0 {
            return Err(Error::Numerical("A^n - I is singular".into()));
        }
        if modulus > MAX_POINTS {
            return Err(Error::OutOfRange {
                what: "periodic point count",
                value: modulus as i64,
                allowed: "at most 5e7 points",
            });
        }
        let sign = det.signum();
        let adj: M2 = [[b[1][1], -b[0][1]], [-b[1][0], b[0][0]]];
        let k0_lo = b[0][0].min(0) + b[0][1].min(0);
        let k0_hi = b[0][0].max(0) + b[0][1].max(0);

        let mut residues = Vec::with_capacity(modulus as usize);
        for k0 in k0_lo..=k0_hi {
            let (l0, h0) = solve_bounds(sign * adj[0][1], sign * adj[0][0] * k0, 0, modulus - 1);
            let (l1, h1) = solve_bounds(sign * adj[1][1], sign * adj[1][0] * k0, 0, modulus - 1);
            for k1 in l0.max(l1)..=h0.min(h1) {
                let m0 = sign * (adj[0][0] * k0 + adj[0][1] * k1);
                let m1 = sign * (adj[1][0] * k0 + adj[1][1] * k1);
                residues.push([m0 as u64, m1 as u64]);
            }
        }
        if residues.len() as i128 != modulus {
            return Err(Error::Numerical(format!(
                "lattice scan found {} residues, expected {modulus}",
                residues.len()
            )));
        }
        Ok(PeriodicLattice { period: n, modulus: modulus as u64, residues, matrix: a })
    }

    /// All points with `f^n x = x`; there are `|det(A^n - I)|` of them.
    pub fn periodic_points(&self, n: u32) -> Result<Vec<TorusPoint>> {
        let lat = self.periodic_lattice(n)?;
        Ok(lat.residues.iter().map(|m| lat.point(m)).collect())
    }
}

impl PeriodicLattice {
    pub fn point(&self, m: &[u64; 2]) -> TorusPoint {
        TorusPoint([rational_to_fixed(m[0], self.modulus), rational_to_fixed(m[1], self.modulus)])
    }

    /// The cat map acting on residues, exactly.
    pub fn step(&self, m: &[u64; 2]) -> [u64; 2] {
        let d = i128::from(self.modulus);
        let a = &self.matrix;
        let (x, y) = (i128::from(m[0]), i128::from(m[1]));
        [
            (i128::from(a[0][0]) * x + i128::from(a[0][1]) * y).rem_euclid(d) as u64,
            (i128::from(a[1][0]) * x + i128::from(a[1][1]) * y).rem_euclid(d) as u64,
        ]
    }

    /// Orbits of exact minimal period `self.period`, each listed from its
    /// lexicographically smallest residue; orbits sorted by that residue.
    pub fn prime_orbits(&self) -> Vec<Vec<[u64; 2]>> {
        let n = self.period as usize;
        let mut orbits: Vec<Vec<[u64; 2]>> = self
            .residues
            .par_iter()
            .filter_map(|m| {
                let mut orbit = Vec::with_capacity(n);
                orbit.push(*m);
                let mut cur = self.step(m);
                while cur != *m {
                    if cur < *m || orbit.len() >= n {
                        return None;
                    }
                    orbit.push(cur);
                    cur = self.step(&cur);
                }
                (orbit.len() == n).then_some(orbit)
            })
            .collect();
        orbits.sort_unstable_by_key(|o| o[0]);
        orbits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MapSystem;

    /// `|det(A^n - I)| = L_{2n} - 2` for the standard matrix (Lucas numbers).
    fn lucas_count(n: u32) -> u64 {
        let (mut a, mut b) = (2u64, 1u64);
        for _ in 0..2 * n {
            (a, b) = (b, a + b);
        }
        a - 2
    }

    #[test]
    fn counts_match_determinant() {
        let c = CatMap::standard();
        for n in 1..=MAX_PERIOD {
            let lat = c.periodic_lattice(n).unwrap();
            assert_eq!(lat.residues.len() as u64, lucas_count(n), "n = {n}");
        }
        assert_eq!(c.periodic_points(1).unwrap(), vec![TorusPoint([0, 0])]);
        assert_eq!(c.periodic_points(2).unwrap().len(), 5);
    }

    #[test]
    fn range_guard() {
        assert!(CatMap::standard().periodic_lattice(0).is_err());
        assert!(CatMap::standard().periodic_lattice(15).is_err());
    }

    #[test]
    fn points_are_periodic() {
        let c = CatMap::standard();
        for n in [3, 5, 8] {
            for p in c.periodic_points(n).unwrap() {
                let q = c.iterate(&p, i64::from(n));
                assert!(c.distance(&p, &q) <= 1e-9);
            }
        }
    }

    #[test]
    fn residues_distinct_and_in_range() {
        let lat = CatMap::new([[3, 2], [1, 1]]).unwrap().periodic_lattice(4).unwrap();
        let mut r = lat.residues.clone();
        r.sort();
        r.dedup();
        assert_eq!(r.len(), lat.residues.len());
        assert!(r.iter().all(|m| m[0] < lat.modulus && m[1] < lat.modulus));
    }

    #[test]
    fn prime_orbits_partition_periodic_points() {
        // Points of period dividing 6 split into orbits of minimal period 1, 2, 3, 6.
        let c = CatMap::standard();
        let total: usize = [1, 2, 3, 6]
            .iter()
            .map(|&d| c.periodic_lattice(d).unwrap().prime_orbits().len() * d as usize)
            .sum();
        assert_eq!(total as u64, lucas_count(6));
        let lat = c.periodic_lattice(3).unwrap();
        for orbit in lat.prime_orbits() {
            assert_eq!(orbit.len(), 3);
            assert_eq!(*orbit.iter().min().unwrap(), orbit[0]);
        }
    }
}
