use serde::{Deserialize, Serialize};

use super::{HyperbolicSystem, LeafKind};
use crate::error::{Error, Result};

/// Loops must return to their base point within this distance.
pub const LOOP_CLOSURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: LeafKind,
    pub t: f64,
}

impl Segment {
    pub fn new(kind: LeafKind, t: f64) -> Self {
        Self { kind, t }
    }
}

/// Base point and ordered leaf moves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuPath<P> {
    base: P,
    segments: Vec<Segment>,
}

impl<P: Copy> SuPath<P> {
    pub fn new(base: P, segments: Vec<Segment>) -> Self {
        Self { base, segments }
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `x_0 = base, x_{i+1} = flow(x_i, segment_i)`; length `segments + 1`.
    pub fn vertices<S: HyperbolicSystem<Point = P>>(&self, sys: &S) -> Vec<P> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut x = self.base;
        out.push(x);
        for seg in &self.segments {
            x = sys.leaf_flow(&x, seg.kind, seg.t);
            out.push(x);
        }
        out
    }

    pub fn endpoint<S: HyperbolicSystem<Point = P>>(&self, sys: &S) -> P {
        *self.vertices(sys).last().expect("vertices are never empty")
    }

    /// Same moves traversed backwards from the endpoint.
    pub fn reversed<S: HyperbolicSystem<Point = P>>(&self, sys: &S) -> Self {
        Self {
            base: self.endpoint(sys),
            segments: self.segments.iter().rev().map(|s| Segment::new(s.kind, -s.t)).collect(),
        }
    }
}

/// A closed path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuLoop<P> {
    path: SuPath<P>,
    defect: f64,
}

impl<P: Copy> SuLoop<P> {
    /// Rejects paths whose endpoint is farther than [`LOOP_CLOSURE_TOL`] from the base.
    pub fn new<S: HyperbolicSystem<Point = P>>(sys: &S, path: SuPath<P>) -> Result<Self> {
        let defect = sys.distance(&path.endpoint(sys), &path.base);
        if !(defect <= LOOP_CLOSURE_TOL) {
            return Err(Error::OpenLoop { defect });
        }
        Ok(Self { path, defect })
    }

    /// `u(t), s(s), u(-t), s(-s)`: closes on any system whose leaves are
    /// translations (the torus).
    pub fn quadrilateral<S: HyperbolicSystem<Point = P>>(sys: &S, base: P, t: f64, s: f64) -> Result<Self> {
        Self::new(
            sys,
            SuPath::new(
                base,
                vec![
                    Segment::new(LeafKind::Unstable, t),
                    Segment::new(LeafKind::Stable, s),
                    Segment::new(LeafKind::Unstable, -t),
                    Segment::new(LeafKind::Stable, -s),
                ],
            ),
        )
    }

    pub fn path(&self) -> &SuPath<P> {
        &self.path
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn reversed<S: HyperbolicSystem<Point = P>>(&self, sys: &S) -> Result<Self> {
        Self::new(sys, self.path.reversed(sys))
    }

    /// `self` followed by `other`; both must share the base point.
    pub fn concat<S: HyperbolicSystem<Point = P>>(&self, sys: &S, other: &Self) -> Result<Self> {
        let gap = sys.distance(&self.path.base, &other.path.base);
        if !(gap <= LOOP_CLOSURE_TOL) {
            return Err(Error::Precondition(format!("loops have different base points (gap {gap:e})")));
        }
        let mut segs = self.path.segments.clone();
        segs.extend_from_slice(&other.path.segments);
        Self::new(sys, SuPath::new(self.path.base, segs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CatMap, TorusPoint};
    use proptest::prelude::*;

    #[test]
    fn zero_segment_is_identity() {
        let c = CatMap::standard();
        let x = TorusPoint::from_coords([0.2, 0.9]);
        assert_eq!(c.leaf_flow(&x, LeafKind::Stable, 0.0), x);
    }

    #[test]
    fn open_path_is_rejected() {
        let c = CatMap::standard();
        let p = SuPath::new(TorusPoint([0, 0]), vec![Segment::new(LeafKind::Unstable, 0.1)]);
        assert!(matches!(SuLoop::new(&c, p), Err(Error::OpenLoop { .. })));
    }

    proptest! {
        #[test]
        fn quadrilaterals_close(x in 0.0f64..1.0, y in 0.0f64..1.0, t in -2.0f64..2.0, s in -2.0f64..2.0) {
            let c = CatMap::standard();
            let l = SuLoop::quadrilateral(&c, TorusPoint::from_coords([x, y]), t, s).unwrap();
            prop_assert!(l.defect() <= 1e-12);
            let v = l.path().vertices(&c);
            prop_assert_eq!(v.len(), 5);
        }
    }
}
