//! Uniform cell-centred grids, interpolation stencils and cell partitions.
//!
//! Node `i` of an `n`-grid sits at `(i + 1/2)/n`. Stencils are computed in
//! fixed point so that the interpolation weights of a translated grid are
//! identical at every node.

use super::cat::CatMap;
use super::point::{from_fixed, rational_to_fixed, CirclePoint, TorusPoint};
use super::rotation::Rotation;
use super::MapSystem;
use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 8;

/// Equal-weight rule for `μ`.
#[derive(Clone, Debug)]
pub struct Quadrature<P> {
    pub resolution: usize,
    pub nodes: Vec<P>,
    pub weight: f64,
}

impl<P> Quadrature<P> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w f(x_i)` with a fixed summation order.
    pub fn integrate<F: Fn(&P) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(f).sum::<f64>() * self.weight
    }

    /// `Σ w v_i`.
    pub fn integrate_values(&self, v: &[f64]) -> f64 {
        v.iter().sum::<f64>() * self.weight
    }
}

/// Linear or bilinear interpolation weights; unused slots have weight 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub len: usize,
    pub idx: [usize; 4],
    pub w: [f64; 4],
}

impl Stencil {
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.idx[..self.len].iter().copied().zip(self.w[..self.len].iter().copied())
    }

    pub fn interpolate(&self, values: &[f64]) -> f64 {
        self.entries().map(|(i, w)| w * values[i]).sum()
    }
}

/// Lower neighbour index and fractional offset of `raw` on a cell-centred `n`-grid.
#[inline]
fn axis(raw: u64, n: usize) -> (usize, usize, f64) {
    let prod = u128::from(raw) * n as u128;
    let ip = (prod >> 64) as usize;
    let frac = prod as u64;
    const HALF: u64 = 1 << 63;
    let (i, f) = if frac >= HALF { (ip, frac - HALF) } else { (ip + n - 1, frac + HALF) };
    let i0 = i % n;
    let t = from_fixed(f);
    (i0, (i0 + 1) % n, t)
}

fn node_raw(i: usize, n: usize) -> u64 {
    rational_to_fixed(2 * i as u64 + 1, 2 * n as u64)
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::OutOfRange {
            what: "grid resolution",
            value: resolution as i64,
            allowed: ">= 8",
        });
    }
    Ok(())
}

/// A system with a grid discretization of `μ`.
pub trait GridSystem: MapSystem {
    const DIM: usize;

    fn quadrature(&self, resolution: usize) -> Result<Quadrature<Self::Point>>;

    /// Interpolation weights of `x` on the `resolution` grid.
    fn stencil(resolution: usize, x: &Self::Point) -> Stencil;

    /// Coordinates for export (`y` is ignored on the circle).
    fn coords(x: &Self::Point) -> [f64; 2];
}

impl GridSystem for Rotation {
    const DIM: usize = 1;

    fn quadrature(&self, resolution: usize) -> Result<Quadrature<CirclePoint>> {
        check_resolution(resolution)?;
        Ok(Quadrature {
            resolution,
            nodes: (0..resolution).map(|i| CirclePoint(node_raw(i, resolution))).collect(),
            weight: 1.0 / resolution as f64,
        })
    }

    #[inline]
    fn stencil(n: usize, x: &CirclePoint) -> Stencil {
        let (i0, i1, t) = axis(x.0, n);
        Stencil { len: 2, idx: [i0, i1, 0, 0], w: [1.0 - t, t, 0.0, 0.0] }
    }

    fn coords(x: &CirclePoint) -> [f64; 2] {
        [x.x(), 0.0]
    }
}

impl GridSystem for CatMap {
    const DIM: usize = 2;

    fn quadrature(&self, resolution: usize) -> Result<Quadrature<TorusPoint>> {
        check_resolution(resolution)?;
        let n = resolution;
        let mut nodes = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                nodes.push(TorusPoint([node_raw(ix, n), node_raw(iy, n)]));
            }
        }
        Ok(Quadrature { resolution, nodes, weight: 1.0 / (n * n) as f64 })
    }

    #[inline]
    fn stencil(n: usize, x: &TorusPoint) -> Stencil {
        let (x0, x1, tx) = axis(x.0[0], n);
        let (y0, y1, ty) = axis(x.0[1], n);
        Stencil {
            len: 4,
            idx: [y0 * n + x0, y0 * n + x1, y1 * n + x0, y1 * n + x1],
            w: [(1.0 - tx) * (1.0 - ty), tx * (1.0 - ty), (1.0 - tx) * ty, tx * ty],
        }
    }

    fn coords(x: &TorusPoint) -> [f64; 2] {
        x.coords()
    }
}

/// Fixed partition used for orbit-density diagnostics: 64 arcs of the circle,
/// 64 x 64 squares of the torus.
pub trait CellPartition: MapSystem {
    fn cell_count(&self) -> usize;
    fn cell_of(&self, x: &Self::Point) -> usize;
}

impl CellPartition for Rotation {
    fn cell_count(&self) -> usize {
        64
    }

    fn cell_of(&self, x: &CirclePoint) -> usize {
        (x.0 >> 58) as usize
    }
}

impl CellPartition for CatMap {
    fn cell_count(&self) -> usize {
        64 * 64
    }

    fn cell_of(&self, x: &TorusPoint) -> usize {
        (x.0[0] >> 58) as usize + 64 * (x.0[1] >> 58) as usize
    }
}
