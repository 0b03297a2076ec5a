use serde::Serialize;

use crate::dynamics::{HyperbolicSystem, LeafKind, SuLoop, LOOP_CLOSURE_TOL};
use crate::error::{Error, Result};
use crate::observable::Observable;

/// Hard cap on summed terms (reached only for absurd tolerances).
const MAX_TERMS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SegmentValue {
    pub value: f64,
    /// Bound on the neglected tail.
    pub bound: f64,
    /// Truncation index `N`.
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopValue {
    pub value: f64,
    pub bound: f64,
    pub segments: Vec<SegmentValue>,
}

/// Smallest `N >= 0` with `H d^β λ^{(N+1)β} / (1 - λ^β) <= tol`, namely
/// `N = ⌈log(tol (1 - λ^β) / (H d^β)) / (β log λ)⌉` clamped at zero.
pub fn truncation_terms(h: f64, beta: f64, d: f64, lambda: f64, tol: f64) -> usize {
    let scale = h * d.powf(beta);
    if scale <= 0.0 {
        return 0;
    }
    let lb = lambda.powf(beta);
    let n = ((tol * (1.0 - lb) / scale).ln() / (beta * lambda.ln())).ceil();
    if n.is_nan() || n <= 0.0 {
        0
    } else {
        (n as usize).min(MAX_TERMS)
    }
}

/// `H d^β λ^{(N+1)β} / (1 - λ^β)`.
pub fn tail_bound(h: f64, beta: f64, d: f64, lambda: f64, n: usize) -> f64 {
    let lb = lambda.powf(beta);
    h * d.powf(beta) * lb.powi(n as i32 + 1) / (1.0 - lb)
}

/// Functional of the leaf segment from `x` to `flow(x, kind, t)`:
/// stable `Σ_{n≥0} obs(gⁿx) - obs(gⁿx')`, unstable `-Σ_{n≤-1} obs(gⁿx) - obs(gⁿx')`.
///
/// Orbit points on the leaf are generated by transporting the leaf
/// parameter, `gⁿ(flow(x, t)) = flow(gⁿx, scaleⁿ t)`, never by iterating `x'`.
pub fn segment_functional<S: HyperbolicSystem>(
    sys: &S,
    x: &S::Point,
    kind: LeafKind,
    t: f64,
    obs: &Observable<S::Point>,
    tol: f64,
) -> Result<SegmentValue> {
    let holder = obs.require_holder()?;
    let scale = sys.leaf_scale(kind);
    let lambda = scale.abs();
    let d = t.abs();
    if d == 0.0 {
        return Ok(SegmentValue { value: 0.0, bound: 0.0, terms: 0 });
    }
    let n = truncation_terms(holder.constant, holder.exponent, d, lambda, tol);
    let bound = tail_bound(holder.constant, holder.exponent, d, lambda, n);
    let mut acc = 0.0;
    let mut y = *x;
    let mut s = t;
    match kind {
        LeafKind::Stable => {
            for k in 0..=n {
                if k > 0 {
                    y = sys.forward(&y);
                    s *= scale;
                }
                acc += obs.eval(&y) - obs.eval(&sys.leaf_flow(&y, kind, s));
            }
        }
        LeafKind::Unstable => {
            for _ in 0..n {
                y = sys.backward(&y);
                s *= scale;
                acc += obs.eval(&y) - obs.eval(&sys.leaf_flow(&y, kind, s));
            }
            acc = -acc;
        }
    }
    Ok(SegmentValue { value: acc, bound, terms: n })
}

/// Sum of segment functionals around a closed loop; each segment gets
/// `tol / segments`.
pub fn loop_functional<S: HyperbolicSystem>(
    sys: &S,
    lp: &SuLoop<S::Point>,
    obs: &Observable<S::Point>,
    tol: f64,
) -> Result<LoopValue> {
    let path = lp.path();
    let verts = path.vertices(sys);
    let closure = sys.distance(verts.last().expect("nonempty"), path.base());
    if !(closure <= LOOP_CLOSURE_TOL) {
        return Err(Error::OpenLoop { defect: closure });
    }
    let per = tol / path.segments().len().max(1) as f64;
    let mut segments = Vec::with_capacity(path.segments().len());
    for (seg, x) in path.segments().iter().zip(&verts) {
        segments.push(segment_functional(sys, x, seg.kind, seg.t, obs, per)?);
    }
    Ok(LoopValue {
        value: segments.iter().map(|s| s.value).sum(),
        bound: segments.iter().map(|s| s.bound).sum(),
        segments,
    })
}
