//! Runtime-typed systems and points, for configuration-driven callers.

use rand::Rng;

use super::grid::GridSystem;
use super::{CatMap, CirclePoint, Dir, HyperbolicSystem, LeafKind, MapSystem, Rotation, TorusPoint};
use crate::error::{Error, Result};
use crate::geodesic::{Frame, GeodesicModel};

#[derive(Clone, Debug)]
pub enum System {
    Rotation(Rotation),
    Cat(CatMap),
    Geodesic(GeodesicModel),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhasePoint {
    Circle(CirclePoint),
    Torus(TorusPoint),
    Frame(Frame),
}

impl PhasePoint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PhasePoint::Circle(_) => "circle",
            PhasePoint::Torus(_) => "torus",
            PhasePoint::Frame(_) => "frame",
        }
    }
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::Rotation(_) => Rotation::NAME,
            System::Cat(_) => CatMap::NAME,
            System::Geodesic(_) => GeodesicModel::NAME,
        }
    }

    fn mismatch(&self, x: &PhasePoint) -> Error {
        Error::KindMismatch { system: self.name(), point: x.kind_name() }
    }

    pub fn apply(&self, x: &PhasePoint, dir: Dir) -> Result<PhasePoint> {
        match (self, x) {
            (System::Rotation(s), PhasePoint::Circle(p)) => Ok(PhasePoint::Circle(s.apply(p, dir))),
            (System::Cat(s), PhasePoint::Torus(p)) => Ok(PhasePoint::Torus(s.apply(p, dir))),
            (System::Geodesic(s), PhasePoint::Frame(p)) => Ok(PhasePoint::Frame(s.apply(p, dir))),
            _ => Err(self.mismatch(x)),
        }
    }

    pub fn leaf_flow(&self, x: &PhasePoint, kind: LeafKind, t: f64) -> Result<PhasePoint> {
        match (self, x) {
            (System::Rotation(_), _) => {
                Err(Error::Unsupported { system: Rotation::NAME, structure: "stable or unstable leaves" })
            }
            (System::Cat(s), PhasePoint::Torus(p)) => Ok(PhasePoint::Torus(s.leaf_flow(p, kind, t))),
            (System::Geodesic(s), PhasePoint::Frame(p)) => Ok(PhasePoint::Frame(s.leaf_flow(p, kind, t))),
            _ => Err(self.mismatch(x)),
        }
    }

    pub fn mu_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        match self {
            System::Rotation(s) => PhasePoint::Circle(s.sample_invariant(rng)),
            System::Cat(s) => PhasePoint::Torus(s.sample_invariant(rng)),
            System::Geodesic(s) => PhasePoint::Frame(s.sample_invariant(rng)),
        }
    }

    /// Grid nodes and their common weight.
    pub fn mu_quadrature(&self, resolution: usize) -> Result<(Vec<PhasePoint>, f64)> {
        match self {
            System::Rotation(s) => {
                let q = s.quadrature(resolution)?;
                Ok((q.nodes.into_iter().map(PhasePoint::Circle).collect(), q.weight))
            }
            System::Cat(s) => {
                let q = s.quadrature(resolution)?;
                Ok((q.nodes.into_iter().map(PhasePoint::Torus).collect(), q.weight))
            }
            System::Geodesic(_) => {
                Err(Error::Unsupported { system: GeodesicModel::NAME, structure: "grid quadrature" })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn kind_errors() {
        let rot = System::Rotation(Rotation::golden());
        let cat = System::Cat(CatMap::standard());
        let tp = PhasePoint::Torus(TorusPoint([0, 0]));
        assert!(matches!(rot.apply(&tp, Dir::Forward), Err(Error::KindMismatch { .. })));
        assert!(matches!(
            rot.leaf_flow(&PhasePoint::Circle(CirclePoint(0)), LeafKind::Stable, 0.1),
            Err(Error::Unsupported { .. })
        ));
        assert!(cat.apply(&tp, Dir::Backward).is_ok());
        let geo = System::Geodesic(GeodesicModel::regular_octagon().unwrap());
        assert!(matches!(geo.mu_quadrature(16), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let cat = System::Cat(CatMap::standard());
        let a = cat.mu_sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(42));
        let b = cat.mu_sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }
}
