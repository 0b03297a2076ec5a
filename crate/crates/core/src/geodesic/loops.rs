//! Closing alternating stable/unstable loops by damped Newton iteration.
//!
//! With `u(t)` stable and `ℓ(r)` unstable, a loop based at `x` with parameters
//! `p_0, …, p_{n-1}` closes when `u(p_0) ℓ(p_1) u(p_2) ⋯ = I`. `SL(2,R)` has
//! dimension three, so three unknown parameters are solved for while the rest
//! are held fixed.
//!
//! Five segments only close by backtracking: `u(t_1) ℓ(r_1) u(t_2) ℓ(r_2) u(t_3) = I`
//! forces `t_2 = 0, r_2 = -r_1, t_3 = -t_1`, because as a cycle the first and
//! last stable moves merge into one and four-segment quadrilaterals close only
//! trivially. Six segments is the smallest pattern with genuine closed loops.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::frame::{lower, mat_mul, upper, Frame, Mat2};
use super::model::GeodesicModel;
use crate::dynamics::{LeafKind, Segment, SuLoop, SuPath};
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 200;
const STAGNATION_WINDOW: usize = 20;
const STAGNATION_FACTOR: f64 = 0.9;

/// Stable, unstable, stable, … for `n` segments.
pub fn alternating_kinds(n: usize) -> Vec<LeafKind> {
    (0..n).map(|i| if i % 2 == 0 { LeafKind::Stable } else { LeafKind::Unstable }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopClosure {
    pub params: Vec<f64>,
    /// `‖W - I‖_∞` for the segment product `W`.
    pub matrix_defect: f64,
    pub iterations: usize,
}

fn segment_matrix(kind: LeafKind, t: f64) -> Mat2 {
    match kind {
        LeafKind::Stable => upper(t),
        LeafKind::Unstable => lower(t),
    }
}

fn product(kinds: &[LeafKind], p: &[f64]) -> Mat2 {
    kinds
        .iter()
        .zip(p)
        .fold([[1.0, 0.0], [0.0, 1.0]], |acc, (&k, &t)| mat_mul(&acc, &segment_matrix(k, t)))
}

fn residual(w: &Mat2) -> Vector3<f64> {
    Vector3::new(w[0][1], w[1][0], w[0][0] - 1.0)
}

fn defect(w: &Mat2) -> f64 {
    (w[0][0] - 1.0).abs().max(w[0][1].abs()).max(w[1][0].abs()).max((w[1][1] - 1.0).abs())
}

/// Solves for the parameters not listed in `fixed`, starting from `seed`.
pub fn solve_closure(kinds: &[LeafKind], seed: &[f64], fixed: &[usize], tol: f64) -> Result<LoopClosure> {
    let n = kinds.len();
    if seed.len() != n {
        return Err(Error::Precondition(format!("{} seed parameters for {n} segments", seed.len())));
    }
    if n < 4 || fixed.len() + 3 != n || fixed.iter().any(|&i| i >= n) {
        return Err(Error::Precondition(format!(
            "need n >= 4 segments with exactly n - 3 fixed indices, got n = {n}, fixed = {fixed:?}"
        )));
    }
    let unknown: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    if unknown.len() != 3 {
        return Err(Error::Precondition(format!("fixed indices {fixed:?} repeat")));
    }
    let mut p = seed.to_vec();
    let mut w = product(kinds, &p);
    let mut history = vec![residual(&w).norm()];
    for it in 0..MAX_NEWTON {
        if defect(&w) <= tol {
            return Ok(LoopClosure { params: p, matrix_defect: defect(&w), iterations: it });
        }
        // d W / d p_j = prefix_j · E_j · suffix_j.
        let mut jac = Matrix3::zeros();
        for (col, &j) in unknown.iter().enumerate() {
            let pre = product(&kinds[..j], &p[..j]);
            let suf = product(&kinds[j + 1..], &p[j + 1..]);
            let e: Mat2 = match kinds[j] {
                LeafKind::Stable => [[0.0, 1.0], [0.0, 0.0]],
                LeafKind::Unstable => [[0.0, 0.0], [1.0, 0.0]],
            };
            let dw = mat_mul(&mat_mul(&pre, &e), &suf);
            jac.set_column(col, &Vector3::new(dw[0][1], dw[1][0], dw[0][0]));
        }
        let r = residual(&w);
        let step = jac.lu().solve(&(-r)).ok_or(Error::NoClosure { defect: defect(&w), iterations: it })?;
        let r0 = r.norm();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial = p.clone();
            for (col, &j) in unknown.iter().enumerate() {
                trial[j] += alpha * step[col];
            }
            let wt = product(kinds, &trial);
            if residual(&wt).norm() < r0 || defect(&wt) <= tol {
                accepted = Some((trial, wt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, wt)) = accepted else {
            return Err(Error::NoClosure { defect: defect(&w), iterations: it });
        };
        p = trial;
        w = wt;
        history.push(residual(&w).norm());
        let k = history.len() - 1;
        if k >= STAGNATION_WINDOW
            && defect(&w) > tol
            && history[k] > STAGNATION_FACTOR * history[k - STAGNATION_WINDOW]
        {
            return Err(Error::NoClosure { defect: defect(&w), iterations: it + 1 });
        }
    }
    if defect(&w) <= tol {
        Ok(LoopClosure { params: p, matrix_defect: defect(&w), iterations: MAX_NEWTON })
    } else {
        Err(Error::NoClosure { defect: defect(&w), iterations: MAX_NEWTON })
    }
}

/// Closed alternating loop based at `x`; pattern length is `seed.len()`.
pub fn close_loop(
    model: &GeodesicModel,
    x: &Frame,
    seed: &[f64],
    fixed: &[usize],
    tol: f64,
) -> Result<(SuLoop<Frame>, LoopClosure)> {
    let kinds = alternating_kinds(seed.len());
    let closure = if seed.iter().all(|&t| t == 0.0) {
        LoopClosure { params: seed.to_vec(), matrix_defect: 0.0, iterations: 0 }
    } else {
        solve_closure(&kinds, seed, fixed, tol)?
    };
    let segments = kinds.iter().zip(&closure.params).map(|(&k, &t)| Segment::new(k, t)).collect();
    let base = model.reduce(x);
    let lp = SuLoop::new(model, SuPath::new(base, segments))?;
    Ok((lp, closure))
}

/// Six-segment loop with the first three parameters given. The remaining
/// three have a closed form: with `u(t_1) ℓ(r_1) u(t_2) = [[A, B], [C, D]]`,
/// `ℓ(x) u(y) ℓ(z)` inverts it for `y = -B`, `x = (A - 1)/(-B)`,
/// `z = (D - 1)/(-B)`. Newton then polishes the closure to `tol`.
pub fn six_segment_loop(
    model: &GeodesicModel,
    x: &Frame,
    fixed: [f64; 3],
    tol: f64,
) -> Result<(SuLoop<Frame>, LoopClosure)> {
    let kinds = alternating_kinds(6);
    let m = product(&kinds[..3], &fixed);
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    if b.abs() < 1e-9 {
        return Err(Error::Precondition(format!("fixed parameters {fixed:?} give a degenerate hexagon")));
    }
    let seed = [fixed[0], fixed[1], fixed[2], (a - 1.0) / -b, -b, (d - 1.0) / -b];
    close_loop(model, x, &seed, &[0, 1, 2], tol)
}
