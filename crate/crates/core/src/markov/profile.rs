use crate::dynamics::MapSystem;
use crate::error::{Error, Result};
use crate::observable::{Holder, HolderSource, Observable, Representation};

pub const P_CLAMP_LO: f64 = 1e-4;
pub const P_CLAMP_HI: f64 = 1.0 - 1e-4;

#[inline]
pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Record kept when `log φ = u∘f - u` is built from a transfer function `u`.
#[derive(Clone, Debug)]
pub struct TransferProvenance<P> {
    pub u: Observable<P>,
    /// `e^u + e^{u∘f}`, not normalized; stationary for `P*`.
    pub density: Observable<P>,
}

/// Right-jump probability `p` and its derived quantities.
#[derive(Clone, Debug)]
pub struct EnvironmentProfile<P> {
    p: Observable<P>,
    log_phi: Observable<P>,
    p_min: f64,
    p_max: f64,
    transfer: Option<TransferProvenance<P>>,
}

fn check_clamp(p_min: f64, p_max: f64) -> Result<()> {
    if !(p_min >= P_CLAMP_LO && p_max <= P_CLAMP_HI) {
        return Err(Error::Clamp { p_min, p_max, lo: P_CLAMP_LO, hi: P_CLAMP_HI });
    }
    Ok(())
}

fn known_bounds<P: 'static>(obs: &Observable<P>) -> Result<(f64, f64)> {
    obs.bounds()
        .ok_or_else(|| Error::Config(format!("observable `{}` has no declared range", obs.label())))
}

impl<P: 'static> EnvironmentProfile<P> {
    pub fn constant(p: f64) -> Result<Self> {
        check_clamp(p, p)?;
        Ok(Self::constant_unchecked(p))
    }

    /// Constant profile without the clamp, for degenerate walks such as `p ≡ 1`.
    pub fn constant_unchecked(p: f64) -> Self {
        let lp = (p / (1.0 - p)).ln();
        Self {
            p: Observable::constant(p),
            log_phi: Observable::constant(lp),
            p_min: p,
            p_max: p,
            transfer: None,
        }
    }

    /// `p = 1 / (1 + e^{-log φ})`.
    pub fn from_log_ratio(log_phi: Observable<P>) -> Result<Self> {
        let (lo, hi) = known_bounds(&log_phi)?;
        let (p_min, p_max) = (logistic(lo), logistic(hi));
        check_clamp(p_min, p_max)?;
        let p = log_phi
            .map(format!("logistic({})", log_phi.label()), 0.25, Some((p_min, p_max)), logistic);
        Ok(Self { p, log_phi, p_min, p_max, transfer: None })
    }

    /// `log φ = log(p / (1 - p))`.
    pub fn from_probability(p: Observable<P>) -> Result<Self> {
        let (p_min, p_max) = known_bounds(&p)?;
        check_clamp(p_min, p_max)?;
        let slope = 1.0 / (p_min * (1.0 - p_min)).min(p_max * (1.0 - p_max));
        let lb = ((p_min / (1.0 - p_min)).ln(), (p_max / (1.0 - p_max)).ln());
        let log_phi = p.map(format!("logit({})", p.label()), slope, Some(lb), |v| (v / (1.0 - v)).ln());
        Ok(Self { p, log_phi, p_min, p_max, transfer: None })
    }

    /// `log φ = u∘f - u`, equivalently `p = e^{u∘f} / (e^u + e^{u∘f})`.
    pub fn from_transfer<S>(system: &S, u: Observable<P>) -> Result<Self>
    where
        S: MapSystem<Point = P> + Clone + 'static,
    {
        let (ulo, uhi) = known_bounds(&u)?;
        let log_phi = Observable::coboundary(system, &u);
        let mut profile = Self::from_log_ratio(log_phi)?;
        let (sys, uu) = (system.clone(), u.clone());
        let mut density = Observable::new(
            format!("exp({0}) + exp({0}∘f)", u.label()),
            Representation::Composite,
            move |x: &P| uu.eval(x).exp() + uu.eval(&sys.forward(x)).exp(),
        )
        .with_bounds(2.0 * ulo.exp(), 2.0 * uhi.exp());
        if let Some(h) = u.holder() {
            let lf = system.lipschitz_factor().powf(h.exponent);
            density = density.with_holder(Holder {
                exponent: h.exponent,
                constant: uhi.exp() * h.constant * (1.0 + lf),
                source: HolderSource::Derived,
            });
        }
        profile.transfer = Some(TransferProvenance { u, density });
        Ok(profile)
    }

    pub fn p(&self) -> &Observable<P> {
        &self.p
    }

    pub fn log_phi(&self) -> &Observable<P> {
        &self.log_phi
    }

    #[inline]
    pub fn p_at(&self, x: &P) -> f64 {
        self.p.eval(x)
    }

    #[inline]
    pub fn q_at(&self, x: &P) -> f64 {
        1.0 - self.p.eval(x)
    }

    pub fn phi_at(&self, x: &P) -> f64 {
        self.log_phi.eval(x).exp()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.p_min, self.p_max)
    }

    pub fn transfer(&self) -> Option<&TransferProvenance<P>> {
        self.transfer.as_ref()
    }

    pub fn label(&self) -> &str {
        self.p.label()
    }
}
