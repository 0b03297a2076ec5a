use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::functional::{loop_functional, segment_functional};
use super::report::{ObstructionRecord, ObstructionReport};
use crate::dynamics::{CatMap, HyperbolicSystem, Lift, MapSystem, SuLoop, TorusPoint};
use crate::error::{Error, Result};
use crate::observable::Observable;

/// Extra slack in the path-independence check beyond the truncation bounds.
const PATH_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathTransfer {
    pub value: f64,
    pub bound: f64,
    /// Same quantity along the runner-up lift.
    pub alt_value: f64,
    pub alt_bound: f64,
}

fn path_value(cat: &CatMap, obs: &Observable<TorusPoint>, x0: &TorusPoint, lift: &Lift, tol: f64) -> Result<(f64, f64)> {
    let path = CatMap::lift_path(x0, lift);
    let verts = path.vertices(cat);
    let mut value = 0.0;
    let mut bound = 0.0;
    for (seg, x) in path.segments().iter().zip(&verts) {
        let s = segment_functional(cat, x, seg.kind, seg.t, obs, tol / 2.0)?;
        value += s.value;
        bound += s.bound;
    }
    Ok((value, bound))
}

/// `u(y) = F(path x0 -> y)(obs)` along the cheapest su-path, cross-checked
/// against the second cheapest lift. For a coboundary `obs = v∘f - v` this is
/// `v(y) - v(x0)`.
pub fn transfer_from_paths(
    cat: &CatMap,
    obs: &Observable<TorusPoint>,
    x0: &TorusPoint,
    targets: &[TorusPoint],
    tol: f64,
) -> Result<Vec<PathTransfer>> {
    targets
        .par_iter()
        .enumerate()
        .map(|(i, y)| {
            let lifts = cat.su_connect_ranked(x0, y, 2);
            let (value, bound) = path_value(cat, obs, x0, &lifts[0], tol)?;
            let (alt_value, alt_bound) = path_value(cat, obs, x0, &lifts[1], tol)?;
            let discrepancy = (value - alt_value).abs();
            let allowance = bound + alt_bound + PATH_SLACK;
            if discrepancy > allowance {
                return Err(Error::ObstructionLeak { target: i, discrepancy, allowance });
            }
            Ok(PathTransfer { value, bound, alt_value, alt_bound })
        })
        .collect()
}

/// `max |obs(x) - u(f x) + u(x)|` over the samples.
pub fn coboundary_residual<S: MapSystem>(
    sys: &S,
    obs: &Observable<S::Point>,
    u: &Observable<S::Point>,
    samples: &[S::Point],
) -> f64 {
    samples
        .par_iter()
        .map(|x| (obs.eval(x) - u.eval(&sys.forward(x)) + u.eval(x)).abs())
        .reduce(|| 0.0, f64::max)
}

/// Loops `u(t), s(s), u(-t), s(-s)` with `x ~ μ` and `t, s` uniform in `(-max_len, max_len)`.
pub fn random_quadrilaterals<R: Rng + ?Sized>(
    cat: &CatMap,
    count: usize,
    max_len: f64,
    rng: &mut R,
) -> Result<Vec<SuLoop<TorusPoint>>> {
    (0..count)
        .map(|_| {
            let x = cat.sample_invariant(rng);
            let t = rng.gen_range(-max_len..max_len);
            let s = rng.gen_range(-max_len..max_len);
            SuLoop::quadrilateral(cat, x, t, s)
        })
        .collect()
}

/// One record per loop, ids `loop-<index>`.
pub fn loop_report<S: HyperbolicSystem>(
    sys: &S,
    loops: &[SuLoop<S::Point>],
    obs: &Observable<S::Point>,
    tol: f64,
    extra_allowance: f64,
) -> Result<ObstructionReport> {
    let records = loops
        .par_iter()
        .enumerate()
        .map(|(i, lp)| {
            let v = loop_functional(sys, lp, obs, tol)?;
            Ok(ObstructionRecord::new(format!("loop-{i}"), v.value, v.bound + extra_allowance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ObstructionReport::new(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CirclePoint, Rotation};
    use crate::observable::TrigPoly;
    use rand::SeedableRng;

    #[test]
    fn anchor_maps_to_zero() {
        let cat = CatMap::standard();
        let u = TrigPoly::cos_x(0.2).on_torus();
        let obs = Observable::coboundary(&cat, &u);
        let x0 = TorusPoint([0, 0]);
        let r = transfer_from_paths(&cat, &obs, &x0, &[x0], 1e-12).unwrap();
        assert_eq!(r[0].value, 0.0);
    }

    #[test]
    fn known_transfer_is_recovered() {
        let cat = CatMap::standard();
        let u = TrigPoly::default().term([1, 0], 0.2, 0.0).term([0, 1], 0.0, 0.2).on_torus();
        let obs = Observable::coboundary(&cat, &u);
        let x0 = TorusPoint([0, 0]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let targets: Vec<TorusPoint> = (0..100).map(|_| cat.sample_invariant(&mut rng)).collect();
        let r = transfer_from_paths(&cat, &obs, &x0, &targets, 1e-12).unwrap();
        for (y, v) in targets.iter().zip(&r) {
            assert!((v.value - (u.eval(y) - u.eval(&x0))).abs() < 1e-10);
        }
    }

    #[test]
    fn non_coboundary_leaks() {
        let cat = CatMap::standard();
        let obs = TrigPoly::cos_x(0.1).on_torus();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let targets: Vec<TorusPoint> = (0..50).map(|_| cat.sample_invariant(&mut rng)).collect();
        let r = transfer_from_paths(&cat, &obs, &TorusPoint([0, 0]), &targets, 1e-12);
        assert!(matches!(r, Err(Error::ObstructionLeak { .. })));
    }

    #[test]
    fn residual_examples() {
        let rot = Rotation::golden();
        let obs = TrigPoly::cos_x(0.1).on_circle().unwrap();
        let zero = Observable::constant(0.0);
        let samples: Vec<CirclePoint> = (0..1000).map(|i| CirclePoint::new(i as f64 / 1000.0)).collect();
        assert!((coboundary_residual(&rot, &obs, &zero, &samples) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn quadrilateral_sweep_separates_cases() {
        let cat = CatMap::standard();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        let loops = random_quadrilaterals(&cat, 20, 0.5, &mut rng).unwrap();
        let cob = Observable::coboundary(&cat, &TrigPoly::sin_y(0.3).on_torus());
        let quiet = loop_report(&cat, &loops, &cob, 1e-10, 0.0).unwrap();
        assert_eq!(quiet.verdict, super::super::Verdict::NoObstructionFound);
        let loud = loop_report(&cat, &loops, &TrigPoly::cos_x(0.1).on_torus(), 1e-10, 0.0).unwrap();
        assert_eq!(loud.verdict, super::super::Verdict::Obstruction);
    }
}
