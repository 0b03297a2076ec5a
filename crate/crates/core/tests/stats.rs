//! Gordin variance invariants, KS machinery, sampling from `ν`, and ergodic
//! averages of the environment process.

use ergowalk_core::dynamics::{CatMap, CirclePoint, GridSystem, Quadrature, Rotation, TorusPoint};
use ergowalk_core::markov::{DensityField, EnvironmentProfile};
use ergowalk_core::rng::stream;
use ergowalk_core::stats::{birkhoff_ensemble, gordin_variance, ks_critical, ks_one_sample, NuSample};
use ergowalk_core::{Observable, Representation, TrigPoly};
use proptest::prelude::*;

struct Setup {
    rot: Rotation,
    profile: EnvironmentProfile<CirclePoint>,
    q: Quadrature<CirclePoint>,
    rho: DensityField<CirclePoint>,
}

fn setup(a: f64) -> Setup {
    let rot = Rotation::golden();
    let u = TrigPoly::cos_x(a).on_circle().unwrap();
    let profile = EnvironmentProfile::from_transfer(&rot, u).unwrap();
    let q = rot.quadrature(4096).unwrap();
    let rho = DensityField::from_observable(&q, &profile.transfer().unwrap().density).unwrap();
    Setup { rot, profile, q, rho }
}

fn psi(c: f64, s: f64) -> Observable<CirclePoint> {
    TrigPoly::cos_x(c).term([2, 0], 0.0, s).on_circle().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gordin_variance_ignores_constants_and_scales_quadratically(
        a in -0.4f64..0.4, c in -1.0f64..1.0, s in -1.0f64..1.0, shift in -5.0f64..5.0, k in -3.0f64..3.0,
    ) {
        let st = setup(a);
        let base = psi(c, s);
        let v = gordin_variance(&st.rot, &st.profile, &st.rho, &base, &st.q).unwrap();
        prop_assert!(v.sigma2 >= 0.0);
        let shifted = base.linear_combination(1.0, &Observable::constant(shift), 1.0);
        let vs = gordin_variance(&st.rot, &st.profile, &st.rho, &shifted, &st.q).unwrap();
        prop_assert!((vs.sigma2 - v.sigma2).abs() <= 1e-10 * (1.0 + shift * shift));
        let scaled = base.scaled(k);
        let vk = gordin_variance(&st.rot, &st.profile, &st.rho, &scaled, &st.q).unwrap();
        prop_assert!((vk.sigma2 - k * k * v.sigma2).abs() <= 1e-12 * (1.0 + k * k));
    }
}

#[test]
fn fair_coin_variance_matches_closed_form() {
    let rot = Rotation::golden();
    let q = rot.quadrature(4096).unwrap();
    let prof = EnvironmentProfile::constant(0.5).unwrap();
    let rho = DensityField::uniform(&q);
    for k in 1..4 {
        let psi = TrigPoly::constant(0.0).term([k, 0], 1.0, 0.0).on_circle().unwrap();
        let v = gordin_variance(&rot, &prof, &rho, &psi, &q).unwrap();
        let closed = (std::f64::consts::TAU * k as f64 * rot.alpha()).sin().powi(2) / 2.0;
        assert!((v.sigma2 - closed).abs() <= 1e-12, "k = {k}: {} vs {closed}", v.sigma2);
    }
}

#[test]
fn gordin_rejects_non_stationary_densities() {
    let st = setup(0.3);
    let wrong = DensityField::uniform(&st.q);
    assert!(gordin_variance(&st.rot, &st.profile, &wrong, &psi(1.0, 0.0), &st.q).is_err());
}

#[test]
fn ks_critical_value_at_ten_thousand() {
    assert!((ks_critical(10_000, None, 0.01) - 0.0163).abs() < 1e-4);
    let two = ks_critical(10_000, Some(10_000), 0.01);
    assert!((two - 0.0163 * 2f64.sqrt()).abs() < 1e-4);
}

#[test]
fn ks_statistic_on_exact_quantiles_is_half_a_step() {
    let n = 1000;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    assert!((ks_one_sample(&xs, |x| x) - 0.5 / n as f64).abs() < 1e-12);
}

#[test]
fn nu_samples_follow_the_stationary_law() {
    let st = setup(0.3);
    let mut rng = stream(11, 0);
    let xs: Vec<f64> = st.rot.sample_nu(&st.rho, 20_000, &mut rng).unwrap().iter().map(|p| p.x()).collect();
    // CDF of ρ by the grid rule, evaluated at node boundaries and interpolated.
    let n = st.rho.len();
    let mut cdf = vec![0.0; n + 1];
    for (i, v) in st.rho.values().iter().enumerate() {
        cdf[i + 1] = cdf[i] + v / n as f64;
    }
    let f = |x: f64| {
        let t = x * n as f64;
        let i = (t as usize).min(n - 1);
        cdf[i] + (t - i as f64) * (cdf[i + 1] - cdf[i])
    };
    let d = ks_one_sample(&xs, f);
    assert!(d <= ks_critical(xs.len(), None, 1e-3), "KS {d}");
}

#[test]
fn environment_averages_converge_to_the_stationary_mean() {
    let st = setup(0.3);
    let obs = psi(1.0, 0.5);
    let target = st.rho.integrate(&st.q, |x| obs.eval(x));
    let starts = st.rot.sample_nu(&st.rho, 200, &mut stream(12, 0)).unwrap();
    let rep = birkhoff_ensemble(&st.rot, &st.profile, &obs, &starts, 100_000, 13, target);
    // Started from ν the environment process is stationary, so the ensemble
    // mean is unbiased and its error is statistical.
    let band = 4.0 * rep.final_spread / (rep.walks as f64).sqrt() + 1e-4;
    assert!(rep.error <= band, "error {} > band {band}", rep.error);
    assert!(rep.final_spread < 0.2, "spread {}", rep.final_spread);
}

#[test]
fn gordin_variance_is_nonnegative_for_random_trig_observables() {
    use rand::Rng;
    let st = setup(0.3);
    let mut rng = stream(21, 0);
    for _ in 0..100 {
        let mut t = TrigPoly::constant(rng.gen_range(-1.0..1.0));
        for k in 1..=4 {
            t = t.term([k, 0], rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let v = gordin_variance(&st.rot, &st.profile, &st.rho, &t.on_circle().unwrap(), &st.q).unwrap();
        assert!(v.sigma2 >= 0.0 && v.p_psi_norm2 <= v.psi_norm2 + 1e-12);
    }
}

#[test]
fn fair_coin_rotation_averages_stay_in_band() {
    let rot = Rotation::golden();
    let prof = EnvironmentProfile::constant(0.5).unwrap();
    let obs = TrigPoly::cos_x(1.0).on_circle().unwrap();
    let starts: Vec<CirclePoint> = (0..100).map(|i| CirclePoint::new(i as f64 / 100.0 + 0.003)).collect();
    let rep = birkhoff_ensemble(&rot, &prof, &obs, &starts, 10_000, 23, 0.0);
    assert!(rep.fraction_within(0.05) >= 0.95, "only {} within 0.05", rep.fraction_within(0.05));
}

#[test]
fn cat_exponential_average_within_two_percent() {
    // One walk at N = 10⁵ sees only a few hundred sites of the orbit, so the
    // check is on the ensemble mean and on the typical (median) walk.
    let cat = CatMap::standard();
    let u = TrigPoly::cos_x(0.2).term([0, 1], 0.0, 0.2).on_torus();
    let prof = EnvironmentProfile::from_transfer(&cat, u.clone()).unwrap();
    let q = cat.quadrature(256).unwrap();
    let rho = DensityField::from_observable(&q, &prof.transfer().unwrap().density).unwrap();
    let eu = Observable::new("exp u", Representation::Composite, move |x: &TorusPoint| u.eval(x).exp());
    let target = rho.integrate(&q, |x| eu.eval(x));
    let starts = cat.sample_nu(&rho, 100, &mut stream(24, 0)).unwrap();
    let rep = birkhoff_ensemble(&cat, &prof, &eu, &starts, 100_000, 25, target);
    assert!(rep.error <= 0.02 * target, "ensemble mean {} vs {target}", rep.final_mean);
    let mut errs: Vec<f64> = rep.traces.iter().map(|t| (t.last() - target).abs() / target).collect();
    errs.sort_by(f64::total_cmp);
    assert!(errs[errs.len() / 2] <= 0.02, "median walk error {}", errs[errs.len() / 2]);
}

#[test]
fn invariant_sampling_has_the_right_mean() {
    use ergowalk_core::dynamics::MapSystem;
    let rot = Rotation::golden();
    let obs = TrigPoly::cos_x(1.0).on_circle().unwrap();
    let mut rng = stream(26, 0);
    let mean = (0..1_000_000).map(|_| obs.eval(&rot.sample_invariant(&mut rng))).sum::<f64>() / 1e6;
    assert!(mean.abs() <= 4e-3, "{mean}");
}
