/// `sup_x |F_n(x) - F(x)|` for the sample `xs`.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let c = cdf(x);
        d.max(c - i as f64 / n).max((i + 1) as f64 / n - c)
    })
}

/// `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value at level `alpha` for sample sizes `n` and `m`
/// (`m = None` for the one-sample test).
pub fn ks_critical(n: usize, m: Option<usize>, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let eff = match m {
        Some(m) => (n * m) as f64 / (n + m) as f64,
        None => n as f64,
    };
    c / eff.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn hand_computed_one_sample() {
        // Points 0.1, 0.6 against U(0,1): steps at 0.5 and 1.0.
        let d = ks_one_sample(&[0.6, 0.1], |x| x);
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn two_sample_extremes() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_two_sample(&[0.0, 0.1], &[5.0, 6.0]), 1.0);
    }

    #[test]
    fn critical_value_at_one_percent() {
        assert!((ks_critical(10_000, None, 0.01) - 0.016276).abs() < 1e-5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
        assert!(ks_one_sample(&xs, |x| x) < ks_critical(10_000, None, 0.01));
    }
}
