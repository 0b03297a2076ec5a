use rand::Rng;

use crate::dynamics::{CatMap, CirclePoint, GridSystem, Rotation, TorusPoint};
use crate::error::{Error, Result};
use crate::markov::DensityField;

/// Draws from `ν = ρ μ`.
pub trait NuSample: GridSystem {
    fn sample_nu<R: Rng + ?Sized>(
        &self,
        rho: &DensityField<Self::Point>,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Self::Point>>;
}

/// Inverse CDF of the piecewise-constant density on the grid cells.
impl NuSample for Rotation {
    fn sample_nu<R: Rng + ?Sized>(
        &self,
        rho: &DensityField<CirclePoint>,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<CirclePoint>> {
        let n = rho.len();
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for v in rho.values() {
            acc += v;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Precondition("density has no mass".into()));
        }
        Ok((0..count)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                let cell = cdf.partition_point(|c| *c <= u).min(n - 1);
                CirclePoint::new((cell as f64 + rng.gen::<f64>()) / n as f64)
            })
            .collect())
    }
}

/// Rejection from `μ` against `sup ρ`.
impl NuSample for CatMap {
    fn sample_nu<R: Rng + ?Sized>(
        &self,
        rho: &DensityField<TorusPoint>,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<TorusPoint>> {
        use crate::dynamics::MapSystem;
        // Bilinear interpolation never exceeds the largest node value; an
        // analytic density brings its own bound.
        let bound = match rho.exact() {
            Some(f) => f.bounds().map(|b| b.1).ok_or_else(|| {
                Error::Precondition("analytic density has no upper bound for rejection sampling".into())
            })?,
            None => rho.max_value(),
        };
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::Precondition(format!("rejection bound {bound} is unusable")));
        }
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x = self.sample_invariant(rng);
            let r = rho.eval::<CatMap>(&x);
            if r > bound * (1.0 + 1e-12) {
                return Err(Error::Numerical(format!("density {r} exceeds rejection bound {bound}")));
            }
            if rng.gen::<f64>() * bound < r {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// `count` draws from `ν` on a generator owned by the caller.
pub fn sample_nu<S: NuSample, R: Rng + ?Sized>(
    sys: &S,
    rho: &DensityField<S::Point>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<S::Point>> {
    sys.sample_nu(rho, count, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::TrigPoly;
    use crate::stats::ks_one_sample;
    use rand::SeedableRng;
    use std::f64::consts::TAU;

    #[test]
    fn rotation_inverse_cdf_matches_the_density() {
        let r = Rotation::golden();
        let q = r.quadrature(1024).unwrap();
        // ρ = 1 + 0.5 sin 2πx, CDF x + (1 - cos 2πx)/(4π).
        let f = TrigPoly::constant(1.0).term([1, 0], 0.0, 0.5).on_circle().unwrap();
        let rho = DensityField::from_observable(&q, &f).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<f64> = r.sample_nu(&rho, 20_000, &mut rng).unwrap().iter().map(|p| p.x()).collect();
        let d = ks_one_sample(&xs, |x| x + (1.0 - (TAU * x).cos()) / (2.0 * TAU));
        assert!(d < 0.015, "{d}");
    }

    #[test]
    fn cat_rejection_matches_the_density() {
        let c = CatMap::standard();
        let q = c.quadrature(64).unwrap();
        let f = TrigPoly::constant(1.0).term([1, 0], 0.6, 0.0).on_torus();
        let rho = DensityField::from_observable(&q, &f).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let pts = c.sample_nu(&rho, 20_000, &mut rng).unwrap();
        // E cos 2πx = 0.6 / 2.
        let m = pts.iter().map(|p| (TAU * p.coords()[0]).cos()).sum::<f64>() / pts.len() as f64;
        assert!((m - 0.3).abs() < 0.02, "{m}");
    }
}
