use std::io::Write;

use crate::dynamics::{GridSystem, Quadrature};
use crate::error::{Error, Result};
use crate::observable::Observable;

/// Grid density with respect to `μ`, aligned with an equal-weight quadrature.
#[derive(Clone, Debug)]
pub struct DensityField<P> {
    resolution: usize,
    weight: f64,
    values: Vec<f64>,
    /// Normalized analytic density, when one is known.
    exact: Option<Observable<P>>,
}

impl<P: Copy + 'static> DensityField<P> {
    /// `ρ ≡ 1`, i.e. `ν = μ`.
    pub fn uniform(q: &Quadrature<P>) -> Self {
        let exact = Some(Observable::constant(1.0));
        Self { resolution: q.resolution, weight: q.weight, values: vec![1.0; q.len()], exact }
    }

    /// Takes nonnegative node values and rescales them to unit mass.
    pub fn from_values(q: &Quadrature<P>, values: Vec<f64>) -> Result<Self> {
        if values.len() != q.len() {
            return Err(Error::GridMismatch { expected: q.len(), found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Precondition(format!("density value {v} is negative or not finite")));
        }
        let mut d = Self { resolution: q.resolution, weight: q.weight, values, exact: None };
        d.normalize()?;
        Ok(d)
    }

    /// Samples `f` at the nodes; `f` divided by its quadrature mass is kept as the
    /// exact density.
    pub fn from_observable(q: &Quadrature<P>, f: &Observable<P>) -> Result<Self> {
        let raw: Vec<f64> = q.nodes.iter().map(|x| f.eval(x)).collect();
        let mass = q.integrate_values(&raw);
        let mut d = Self::from_values(q, raw)?;
        d.exact = Some(f.scaled(1.0 / mass).with_label(format!("{} / {mass:.17e}", f.label())));
        Ok(d)
    }

    pub(crate) fn from_parts(resolution: usize, weight: f64, values: Vec<f64>) -> Self {
        Self { resolution, weight, values, exact: None }
    }

    pub(crate) fn normalize(&mut self) -> Result<()> {
        let m = self.mass();
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Numerical(format!("density mass {m} cannot be normalized")));
        }
        let inv = 1.0 / m;
        self.values.iter_mut().for_each(|v| *v *= inv);
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn exact(&self) -> Option<&Observable<P>> {
        self.exact.as_ref()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.weight
    }

    pub fn check_aligned(&self, q: &Quadrature<P>) -> Result<()> {
        if self.values.len() != q.len() || self.resolution != q.resolution {
            return Err(Error::GridMismatch { expected: q.len(), found: self.values.len() });
        }
        Ok(())
    }

    /// `sup ρ / inf ρ` over the nodes (infinite when some node is 0).
    pub fn sup_inf_ratio(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if lo > 0.0 {
            hi / lo
        } else {
            f64::INFINITY
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Exact density if known, otherwise grid interpolation.
    pub fn eval<S: GridSystem<Point = P>>(&self, x: &P) -> f64 {
        match &self.exact {
            Some(f) => f.eval(x),
            None => S::stencil(self.resolution, x).interpolate(&self.values),
        }
    }

    /// `∫ g ρ dμ` by the grid rule.
    pub fn integrate(&self, q: &Quadrature<P>, g: impl Fn(&P) -> f64) -> f64 {
        q.nodes.iter().zip(&self.values).map(|(x, r)| g(x) * r).sum::<f64>() * self.weight
    }

    /// `max_i |ρ_i - σ_i| / max_i σ_i`.
    pub fn relative_linf(&self, other: &[f64]) -> f64 {
        let scale = other.iter().copied().fold(0.0, f64::max);
        self.values.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
    }

    /// CSV with header `index,x,value` (circle) or `index,x,y,value` (torus);
    /// floats with 17 significant digits.
    pub fn write_csv<S: GridSystem<Point = P>, W: Write>(&self, q: &Quadrature<P>, mut w: W) -> Result<()> {
        self.check_aligned(q)?;
        if S::DIM == 1 {
            writeln!(w, "index,x,value")?;
        } else {
            writeln!(w, "index,x,y,value")?;
        }
        for (i, (x, v)) in q.nodes.iter().zip(&self.values).enumerate() {
            let c = S::coords(x);
            if S::DIM == 1 {
                writeln!(w, "{i},{:.16e},{:.16e}", c[0], v)?;
            } else {
                writeln!(w, "{i},{:.16e},{:.16e},{:.16e}", c[0], c[1], v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CatMap, Rotation};
    use crate::observable::TrigPoly;

    #[test]
    fn normalization_and_alignment() {
        let q = Rotation::golden().quadrature(16).unwrap();
        let d = DensityField::from_values(&q, (0..16).map(|i| i as f64 + 1.0).collect()).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-15);
        assert!(DensityField::from_values(&q, vec![1.0; 15]).is_err());
        assert!(DensityField::from_values(&q, vec![-1.0; 16]).is_err());
        let q2 = Rotation::golden().quadrature(32).unwrap();
        assert!(matches!(d.check_aligned(&q2), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn csv_round_trip_is_bit_faithful() {
        let cat = CatMap::standard();
        let q = cat.quadrature(8).unwrap();
        let f = TrigPoly::constant(2.0).term([1, 1], 0.3, 0.1).on_torus();
        let d = DensityField::from_observable(&q, &f).unwrap();
        let mut buf = Vec::new();
        d.write_csv::<CatMap, _>(&q, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,x,y,value"));
        for (line, v) in lines.zip(d.values()) {
            let parsed: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
        let exact = d.exact().unwrap();
        assert!((q.integrate(|x| exact.eval(x)) - 1.0).abs() < 1e-14);
    }
}
