//! Turns the configuration into concrete systems and environment profiles.

use std::f64::consts::TAU;

use ergowalk_core::dynamics::{CatMap, CirclePoint, GridSystem, Rotation, TorusPoint};
use ergowalk_core::geodesic::{Frame, GeodesicModel, GroupAveragedBump};
use ergowalk_core::markov::EnvironmentProfile;
use ergowalk_core::{Holder, HolderSource, Observable, Representation, TrigPoly, TrigTerm};

use crate::config::{Config, ProfileSpec, SystemSpec};
use crate::RunError;

/// Systems whose observables can be given as trigonometric polynomials.
pub trait TrigSystem: GridSystem + Clone + 'static {
    fn trig(&self, p: &TrigPoly) -> ergowalk_core::Result<Observable<Self::Point>>;
}

impl TrigSystem for Rotation {
    fn trig(&self, p: &TrigPoly) -> ergowalk_core::Result<Observable<CirclePoint>> {
        p.on_circle()
    }
}

impl TrigSystem for CatMap {
    fn trig(&self, p: &TrigPoly) -> ergowalk_core::Result<Observable<TorusPoint>> {
        Ok(p.on_torus())
    }
}

/// A grid system with its profile and, when the profile came from a
/// trigonometric transfer function, that function.
pub struct GridSetup<S: GridSystem> {
    pub sys: S,
    pub profile: EnvironmentProfile<S::Point>,
    pub u: Option<TrigPoly>,
}

pub struct GeodesicSetup {
    pub model: GeodesicModel,
    pub profile: EnvironmentProfile<Frame>,
    pub bump: Option<GroupAveragedBump>,
}

pub enum Prepared {
    Rotation(GridSetup<Rotation>),
    Cat(GridSetup<CatMap>),
    Geodesic(GeodesicSetup),
}

fn schema(e: ergowalk_core::Error) -> RunError {
    RunError::Schema(e.to_string())
}

/// `u(x + α) - u(x)` as a trigonometric polynomial.
pub fn rotation_coboundary(u: &TrigPoly, alpha: f64) -> TrigPoly {
    let terms = u
        .terms
        .iter()
        .map(|t| {
            let (s, c) = (TAU * f64::from(t.k[0]) * alpha).sin_cos();
            TrigTerm { k: t.k, cos: t.cos * c + t.sin * s - t.cos, sin: t.sin * c - t.cos * s - t.sin }
        })
        .collect();
    TrigPoly { constant: 0.0, terms }
}

fn grid_profile<S: GridSystem + 'static>(resolution: usize, values: &[f64]) -> ergowalk_core::Result<EnvironmentProfile<S::Point>> {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let vals = values.to_vec();
    // Each bilinear piece has slope at most n·(hi - lo) per axis.
    let lip = (S::DIM as f64).sqrt() * resolution as f64 * (hi - lo);
    let p = Observable::new(format!("grid{resolution}"), Representation::Composite, move |x: &S::Point| {
        S::stencil(resolution, x).interpolate(&vals)
    })
    .with_bounds(lo, hi)
    .with_holder(Holder::lipschitz(lip, HolderSource::Derived));
    EnvironmentProfile::from_probability(p)
}

fn grid_setup<S: TrigSystem>(sys: S, spec: &ProfileSpec) -> Result<GridSetup<S>, RunError> {
    let (profile, u) = match spec {
        ProfileSpec::Constant { p } => (EnvironmentProfile::constant(*p).map_err(schema)?, None),
        ProfileSpec::Trig { log_phi } => {
            (EnvironmentProfile::from_log_ratio(sys.trig(log_phi).map_err(schema)?).map_err(schema)?, None)
        }
        ProfileSpec::Transfer { u: Some(u), .. } => {
            let obs = sys.trig(u).map_err(schema)?;
            (EnvironmentProfile::from_transfer(&sys, obs).map_err(schema)?, Some(u.clone()))
        }
        ProfileSpec::Transfer { u: None, .. } => {
            return Err(RunError::Schema("transfer profile needs u".into()));
        }
        ProfileSpec::Grid { resolution, p } => (grid_profile::<S>(*resolution, p).map_err(schema)?, None),
    };
    Ok(GridSetup { sys, profile, u })
}

fn geodesic_setup(spec: &ProfileSpec) -> Result<GeodesicSetup, RunError> {
    let model = GeodesicModel::regular_octagon().map_err(schema)?;
    let (profile, bump) = match spec {
        ProfileSpec::Constant { p } => (EnvironmentProfile::constant(*p).map_err(schema)?, None),
        ProfileSpec::Transfer { bump, .. } => {
            let b = bump.clone().unwrap_or_default();
            let bump = GroupAveragedBump::new(
                model.group(),
                GroupAveragedBump::standard_center(),
                b.sigma,
                b.amplitude,
                b.word_radius,
            );
            (EnvironmentProfile::from_transfer(&model, bump.observable()).map_err(schema)?, Some(bump))
        }
        other => return Err(RunError::Schema(format!("geodesic system does not support {} profiles", other.kind()))),
    };
    Ok(GeodesicSetup { model, profile, bump })
}

/// Builds everything the scenario needs; every failure here is a
/// configuration problem.
pub fn prepare(cfg: &Config) -> Result<Prepared, RunError> {
    cfg.validate()?;
    Ok(match &cfg.system {
        SystemSpec::Rotation { alpha } => Prepared::Rotation(grid_setup(Rotation::new(*alpha).map_err(schema)?, &cfg.profile)?),
        SystemSpec::Cat { matrix } => Prepared::Cat(grid_setup(CatMap::new(*matrix).map_err(schema)?, &cfg.profile)?),
        SystemSpec::Geodesic {} => Prepared::Geodesic(geodesic_setup(&cfg.profile)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ergowalk_core::dynamics::MapSystem;

    #[test]
    fn rotation_coboundary_matches_pointwise() {
        let r = Rotation::golden();
        let u = TrigPoly::cos_x(0.3).term([2, 0], -0.1, 0.25);
        let lp = rotation_coboundary(&u, r.alpha()).on_circle().unwrap();
        let uo = u.on_circle().unwrap();
        for i in 0..50 {
            let x = CirclePoint::new(i as f64 / 50.0);
            assert!((lp.eval(&x) - (uo.eval(&r.forward(&x)) - uo.eval(&x))).abs() < 1e-14);
        }
    }
}
