use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::density::DensityField;
use super::profile::EnvironmentProfile;
use crate::dynamics::{GridSystem, MapSystem, Quadrature};
use crate::error::{Error, Result};
use crate::observable::Observable;

/// `Pψ(x) = p(x) ψ(f x) + q(x) ψ(f⁻¹ x)`.
#[inline]
pub fn apply_p<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    psi: &Observable<S::Point>,
    x: &S::Point,
) -> f64 {
    let p = profile.p_at(x);
    p * psi.eval(&sys.forward(x)) + (1.0 - p) * psi.eval(&sys.backward(x))
}

/// [`apply_p`] at every node.
pub fn apply_p_nodes<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    psi: &Observable<S::Point>,
    q: &Quadrature<S::Point>,
) -> Vec<f64> {
    q.nodes.par_iter().map(|x| apply_p(sys, profile, psi, x)).collect()
}

/// `P*ρ(x) = p(f⁻¹x) ρ(f⁻¹x) + q(f x) ρ(f x)` for an analytic density.
#[inline]
pub fn apply_p_star_exact<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    rho: &Observable<S::Point>,
    x: &S::Point,
) -> f64 {
    let b = sys.backward(x);
    let f = sys.forward(x);
    profile.p_at(&b) * rho.eval(&b) + profile.q_at(&f) * rho.eval(&f)
}

/// `∫ |P*ρ - ρ| dμ` on the grid, with `P*` applied pointwise to the analytic density.
pub fn stationarity_residual_exact<S: MapSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    rho: &Observable<S::Point>,
    q: &Quadrature<S::Point>,
) -> f64 {
    let terms: Vec<f64> = q
        .nodes
        .par_iter()
        .map(|x| (apply_p_star_exact(sys, profile, rho, x) - rho.eval(x)).abs())
        .collect();
    q.integrate_values(&terms)
}

/// `∫ log φ dμ` by the grid rule.
pub fn symmetry_defect<P: 'static>(profile: &EnvironmentProfile<P>, q: &Quadrature<P>) -> f64 {
    q.integrate(|x| profile.log_phi().eval(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        Self { value: mean, stderr: (var / n).sqrt(), samples: xs.len() }
    }
}

/// Monte-Carlo `∫ log φ dμ` for systems without a grid.
pub fn symmetry_defect_mc<S: MapSystem, R: Rng + ?Sized>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    samples: usize,
    rng: &mut R,
) -> Estimate {
    let xs: Vec<f64> = (0..samples).map(|_| profile.log_phi().eval(&sys.sample_invariant(rng))).collect();
    Estimate::from_samples(&xs)
}

/// Row-stochastic matrix `M` of the push-forward discretization: node `i`
/// sends probability `p(x_i)` to the interpolation stencil of `f(x_i)` and
/// `q(x_i)` to that of `f⁻¹(x_i)`. `P ≈ M` acts on functions, `P* ≈ Mᵀ` on
/// densities; both are stored in compressed rows.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    n: usize,
    resolution: usize,
    rows: Csr,
    cols: Csr,
}

#[derive(Clone, Debug)]
struct Csr {
    ptr: Vec<usize>,
    idx: Vec<u32>,
    val: Vec<f64>,
}

impl Csr {
    #[inline]
    fn dot(&self, i: usize, v: &[f64]) -> f64 {
        let (a, b) = (self.ptr[i], self.ptr[i + 1]);
        self.idx[a..b].iter().zip(&self.val[a..b]).map(|(&j, &w)| w * v[j as usize]).sum()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.ptr.len() - 1;
        let mut out = vec![0.0; n];
        out.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
            for (k, o) in chunk.iter_mut().enumerate() {
                *o = self.dot(c * 1024 + k, v);
            }
        });
        out
    }
}

impl TransferMatrix {
    pub fn build<S: GridSystem>(sys: &S, profile: &EnvironmentProfile<S::Point>, q: &Quadrature<S::Point>) -> Self {
        let n = q.len();
        let res = q.resolution;
        let row_entries: Vec<Vec<(u32, f64)>> = q
            .nodes
            .par_iter()
            .map(|x| {
                let p = profile.p_at(x);
                let fwd = S::stencil(res, &sys.forward(x));
                let bwd = S::stencil(res, &sys.backward(x));
                fwd.entries()
                    .map(|(j, w)| (j as u32, p * w))
                    .chain(bwd.entries().map(|(j, w)| (j as u32, (1.0 - p) * w)))
                    .collect()
            })
            .collect();
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        let mut idx = Vec::new();
        let mut val = Vec::new();
        let mut counts = vec![0usize; n];
        for r in &row_entries {
            for &(j, w) in r {
                idx.push(j);
                val.push(w);
                counts[j as usize] += 1;
            }
            ptr.push(idx.len());
        }
        let rows = Csr { ptr, idx, val };

        // Transpose by counting sort; entries of each column in row order.
        let mut cptr = vec![0usize; n + 1];
        for j in 0..n {
            cptr[j + 1] = cptr[j] + counts[j];
        }
        let mut fill = cptr.clone();
        let mut cidx = vec![0u32; rows.idx.len()];
        let mut cval = vec![0.0; rows.idx.len()];
        for i in 0..n {
            for k in rows.ptr[i]..rows.ptr[i + 1] {
                let j = rows.idx[k] as usize;
                cidx[fill[j]] = i as u32;
                cval[fill[j]] = rows.val[k];
                fill[j] += 1;
            }
        }
        let cols = Csr { ptr: cptr, idx: cidx, val: cval };
        Self { n, resolution: res, rows, cols }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::GridMismatch { expected: self.n, found: len });
        }
        Ok(())
    }

    /// Grid `Pψ`.
    pub fn apply_p(&self, psi: &[f64]) -> Result<Vec<f64>> {
        self.check(psi.len())?;
        Ok(self.rows.apply(psi))
    }

    /// Grid `P*ρ` on raw values (mass preserved up to roundoff).
    pub fn apply_p_star_values(&self, rho: &[f64]) -> Result<Vec<f64>> {
        self.check(rho.len())?;
        Ok(self.cols.apply(rho))
    }

    /// `P*ρ`, renormalized to unit mass.
    pub fn apply_p_star<P: Copy + 'static>(&self, rho: &DensityField<P>) -> Result<DensityField<P>> {
        self.check(rho.len())?;
        if rho.resolution() != self.resolution {
            return Err(Error::GridMismatch { expected: self.n, found: rho.len() });
        }
        let v = self.cols.apply(rho.values());
        let mut out = DensityField::from_parts(self.resolution, 1.0 / self.n as f64, v);
        out.normalize()?;
        Ok(out)
    }

    /// `∫ |P*ρ - ρ| dμ` for grid values.
    pub fn residual(&self, rho: &[f64]) -> Result<f64> {
        let next = self.apply_p_star_values(rho)?;
        Ok(next.iter().zip(rho).map(|(a, b)| (a - b).abs()).sum::<f64>() / self.n as f64)
    }
}

/// `⟨Pψ, ρ⟩_μ - ⟨ψ, P*ρ⟩_μ` on the grid.
pub fn duality_defect(m: &TransferMatrix, psi: &[f64], rho: &[f64]) -> Result<f64> {
    let ppsi = m.apply_p(psi)?;
    let prho = m.apply_p_star_values(rho)?;
    let w = 1.0 / m.len() as f64;
    let a: f64 = ppsi.iter().zip(rho).map(|(x, y)| x * y).sum::<f64>() * w;
    let b: f64 = psi.iter().zip(&prho).map(|(x, y)| x * y).sum::<f64>() * w;
    Ok(a - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CatMap, CirclePoint, Rotation, TorusPoint};
    use crate::observable::TrigPoly;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::f64::consts::TAU;

    #[test]
    fn constants_are_preserved() {
        let r = Rotation::golden();
        let prof = EnvironmentProfile::from_probability(
            TrigPoly::constant(0.5).term([1, 0], 0.2, 0.0).on_circle().unwrap(),
        )
        .unwrap();
        let one = Observable::constant(3.0);
        for i in 0..10 {
            let x = CirclePoint::new(i as f64 / 10.0);
            assert!((apply_p(&r, &prof, &one, &x) - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fair_coin_on_cosine() {
        let r = Rotation::golden();
        let prof = EnvironmentProfile::constant(0.5).unwrap();
        let psi = TrigPoly::cos_x(1.0).on_circle().unwrap();
        for i in 0..20 {
            let x = CirclePoint::new(i as f64 / 20.0);
            let expect = (TAU * r.alpha()).cos() * (TAU * x.x()).cos();
            assert!((apply_p(&r, &prof, &psi, &x) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn cat_two_term_example() {
        let c = CatMap::standard();
        let prof = EnvironmentProfile::from_probability(TrigPoly::constant(0.5).term([1, 0], 0.1, 0.0).on_torus()).unwrap();
        let psi = TrigPoly::sin_y(1.0).on_torus();
        let (x, y) = (0.2f64, 0.3f64);
        let p = 0.5 + 0.1 * (TAU * x).cos();
        // A(x,y) = (2x+y, x+y), A⁻¹(x,y) = (x-y, -x+2y).
        let expect = p * (TAU * (x + y)).sin() + (1.0 - p) * (TAU * (-x + 2.0 * y)).sin();
        let got = apply_p(&c, &prof, &psi, &TorusPoint::from_coords([x, y]));
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn grid_operator_is_stochastic_and_dual() {
        let r = Rotation::golden();
        let q = r.quadrature(64).unwrap();
        let prof = EnvironmentProfile::from_transfer(&r, TrigPoly::cos_x(0.3).on_circle().unwrap()).unwrap();
        let m = TransferMatrix::build(&r, &prof, &q);
        let ones = vec![1.0; 64];
        assert!(m.apply_p(&ones).unwrap().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let rho: Vec<f64> = (0..64).map(|i| 1.0 + (i as f64 / 7.0).sin()).collect();
        let out = m.apply_p_star_values(&rho).unwrap();
        assert!((out.iter().sum::<f64>() - rho.iter().sum::<f64>()).abs() < 1e-12);
        assert!(duality_defect(&m, &ones, &rho).unwrap().abs() < 1e-14);
        assert!(m.apply_p(&[1.0; 3]).is_err());
    }

    #[test]
    fn fair_coin_fixes_uniform_density() {
        let c = CatMap::standard();
        let q = c.quadrature(32).unwrap();
        let m = TransferMatrix::build(&c, &EnvironmentProfile::constant(0.5).unwrap(), &q);
        let d = m.apply_p_star(&DensityField::uniform(&q)).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn symmetry_defect_of_constants() {
        let q = Rotation::golden().quadrature(64).unwrap();
        let half = EnvironmentProfile::<CirclePoint>::constant(0.5).unwrap();
        assert_eq!(symmetry_defect(&half, &q), 0.0);
        let biased = EnvironmentProfile::<CirclePoint>::constant(0.6).unwrap();
        assert!((symmetry_defect(&biased, &q) - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_density_is_exactly_stationary() {
        let c = CatMap::standard();
        let u = TrigPoly::default().term([1, 0], 0.2, 0.0).term([0, 1], 0.0, 0.2).on_torus();
        let prof = EnvironmentProfile::from_transfer(&c, u).unwrap();
        let q = c.quadrature(64).unwrap();
        let rho = &prof.transfer().unwrap().density;
        assert!(stationarity_residual_exact(&c, &prof, rho, &q) < 1e-14);
    }

    proptest! {
        #[test]
        fn p_is_monotone_and_bounded(a in -1.0f64..1.0, b in -1.0f64..1.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let c = CatMap::standard();
            let prof = EnvironmentProfile::from_probability(TrigPoly::constant(0.5).term([1, 1], 0.2, 0.1).on_torus()).unwrap();
            let psi = TrigPoly::default().term([1, 0], a, b).on_torus();
            let psi2 = psi.linear_combination(1.0, &Observable::constant(0.25), 1.0);
            let pt = TorusPoint::from_coords([x, y]);
            let v = apply_p(&c, &prof, &psi, &pt);
            let amp = a.hypot(b);
            prop_assert!(v >= -amp - 1e-12 && v <= amp + 1e-12);
            prop_assert!(apply_p(&c, &prof, &psi2, &pt) >= v);
        }
    }

    #[test]
    fn mc_symmetry_defect_has_error_bar() {
        let c = CatMap::standard();
        let prof = EnvironmentProfile::from_log_ratio(TrigPoly::cos_x(0.1).on_torus()).unwrap();
        let est = symmetry_defect_mc(&c, &prof, 20_000, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        assert!(est.value.abs() < 5.0 * est.stderr);
    }
}
