//! Real scalar fields on a phase space, carrying the Hölder data that the
//! truncation bounds of the loop functionals need.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{CirclePoint, MapSystem, TorusPoint};
use crate::error::{Error, Result};

/// How a Hölder constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolderSource {
    /// Derivative bound of an explicit formula.
    Exact,
    /// Product/sum rules applied to exact constants.
    Derived,
    /// Estimated from sampled difference quotients, inflated by a safety factor.
    Estimated,
}

/// `|g(x) - g(y)| <= constant * d(x, y)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Holder {
    pub exponent: f64,
    pub constant: f64,
    pub source: HolderSource,
}

impl Holder {
    pub fn lipschitz(constant: f64, source: HolderSource) -> Self {
        Self { exponent: 1.0, constant, source }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Constant(f64),
    Trig(TrigPoly),
    /// Bilinear interpolation of grid values.
    Grid,
    /// Truncated average of a bump over a surface-group orbit.
    GroupAveragedBump,
    /// Built from other observables (coboundaries, sums, compositions).
    Composite,
}

type EvalFn<P> = dyn Fn(&P) -> f64 + Send + Sync;

/// An evaluable field. Cloning is cheap (the closure is shared).
pub struct Observable<P> {
    label: String,
    repr: Representation,
    holder: Option<Holder>,
    bounds: Option<(f64, f64)>,
    eval: Arc<EvalFn<P>>,
}

impl<P> Clone for Observable<P> {
    fn clone(&self) -> Self {
        Self {
            label: self.label.clone(),
            repr: self.repr.clone(),
            holder: self.holder,
            bounds: self.bounds,
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<P> fmt::Debug for Observable<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("label", &self.label)
            .field("repr", &self.repr)
            .field("holder", &self.holder)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl<P: 'static> Observable<P> {
    pub fn new<F>(label: impl Into<String>, repr: Representation, eval: F) -> Self
    where
        F: Fn(&P) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            repr,
            holder: None,
            bounds: None,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), Representation::Constant(c), move |_| c)
            .with_holder(Holder::lipschitz(0.0, HolderSource::Exact))
            .with_bounds(c, c)
    }

    pub fn with_holder(mut self, holder: Holder) -> Self {
        self.holder = Some(holder);
        self
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = Some((lo, hi));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, x: &P) -> f64 {
        (self.eval)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn holder(&self) -> Option<Holder> {
        self.holder
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn require_holder(&self) -> Result<Holder> {
        self.holder.ok_or_else(|| {
            Error::Config(format!("observable `{}` carries no Hölder data", self.label))
        })
    }

    /// `a * self + b * other`. Hölder data combine when both exponents agree.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        let (f, g) = (Arc::clone(&self.eval), Arc::clone(&other.eval));
        let mut out = Self::new(
            format!("{a}*({})+{b}*({})", self.label, other.label),
            Representation::Composite,
            move |x| a * f(x) + b * g(x),
        );
        if let (Some(h1), Some(h2)) = (self.holder, other.holder) {
            if h1.exponent == h2.exponent {
                out.holder = Some(Holder {
                    exponent: h1.exponent,
                    constant: a.abs() * h1.constant + b.abs() * h2.constant,
                    source: weaker(h1.source, h2.source),
                });
            }
        }
        if let (Some((l1, u1)), Some((l2, u2))) = (self.bounds, other.bounds) {
            let (al, ah) = if a >= 0.0 { (a * l1, a * u1) } else { (a * u1, a * l1) };
            let (bl, bh) = if b >= 0.0 { (b * l2, b * u2) } else { (b * u2, b * l2) };
            out.bounds = Some((al + bl, ah + bh));
        }
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.linear_combination(a, &Self::constant(0.0), 0.0)
            .with_label(format!("{a}*({})", self.label))
    }

    /// `u∘f - u` for the given system.
    pub fn coboundary<S>(system: &S, u: &Self) -> Self
    where
        S: MapSystem<Point = P> + Clone + 'static,
    {
        let sys = system.clone();
        let g = Arc::clone(&u.eval);
        let mut out = Self::new(
            format!("cob({})", u.label),
            Representation::Composite,
            move |x| g(&sys.forward(x)) - g(x),
        );
        if let Some(h) = u.holder {
            let lf = system.lipschitz_factor().powf(h.exponent);
            out.holder = Some(Holder {
                exponent: h.exponent,
                constant: h.constant * (lf + 1.0),
                source: weaker(h.source, HolderSource::Derived),
            });
        }
        if let Some((lo, hi)) = u.bounds {
            out.bounds = Some((lo - hi, hi - lo));
        }
        out
    }

    /// `self∘f`.
    pub fn compose_forward<S>(&self, system: &S) -> Self
    where
        S: MapSystem<Point = P> + Clone + 'static,
    {
        let sys = system.clone();
        let g = Arc::clone(&self.eval);
        let mut out = Self::new(
            format!("({})∘f", self.label),
            Representation::Composite,
            move |x| g(&sys.forward(x)),
        );
        if let Some(h) = self.holder {
            out.holder = Some(Holder {
                exponent: h.exponent,
                constant: h.constant * system.lipschitz_factor().powf(h.exponent),
                source: weaker(h.source, HolderSource::Derived),
            });
        }
        out.bounds = self.bounds;
        out
    }

    /// Pointwise map through a function with known Lipschitz constant on the
    /// observable's range.
    pub fn map<F>(&self, label: impl Into<String>, lipschitz: f64, bounds: Option<(f64, f64)>, h: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let g = Arc::clone(&self.eval);
        let mut out = Self::new(label, Representation::Composite, move |x| h(g(x)));
        if let Some(hd) = self.holder {
            out.holder = Some(Holder {
                exponent: hd.exponent,
                constant: hd.constant * lipschitz,
                source: weaker(hd.source, HolderSource::Derived),
            });
        }
        out.bounds = bounds;
        out
    }
}

fn weaker(a: HolderSource, b: HolderSource) -> HolderSource {
    use HolderSource::*;
    match (a, b) {
        (Estimated, _) | (_, Estimated) => Estimated,
        (Derived, _) | (_, Derived) => Derived,
        _ => Exact,
    }
}

/// One term `cos_coef * cos(2π k·x) + sin_coef * sin(2π k·x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: [i32; 2],
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Real trigonometric polynomial on the circle (`k[1] == 0`) or torus.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: Vec::new() }
    }

    pub fn term(mut self, k: [i32; 2], cos: f64, sin: f64) -> Self {
        self.terms.push(TrigTerm { k, cos, sin });
        self
    }

    /// `a cos 2πx`.
    pub fn cos_x(a: f64) -> Self {
        Self::default().term([1, 0], a, 0.0)
    }

    pub fn sin_y(a: f64) -> Self {
        Self::default().term([0, 1], 0.0, a)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = self.constant;
        for t in &self.terms {
            let phase = f64::from(t.k[0]) * x + f64::from(t.k[1]) * y;
            let (s, c) = (TAU * (phase - phase.floor())).sin_cos();
            acc += t.cos * c + t.sin * s;
        }
        acc
    }

    /// Sum of term amplitudes: a bound on `|self - constant|`.
    pub fn amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.cos.hypot(t.sin)).sum()
    }

    /// Euclidean-gradient bound `Σ 2π|k| amplitude_k`.
    pub fn lipschitz(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k = f64::from(t.k[0]).hypot(f64::from(t.k[1]));
                TAU * k * t.cos.hypot(t.sin)
            })
            .sum()
    }

    pub fn degree(&self) -> i32 {
        self.terms
            .iter()
            .map(|t| t.k[0].abs().max(t.k[1].abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn is_univariate(&self) -> bool {
        self.terms.iter().all(|t| t.k[1] == 0)
    }

    fn bounds(&self) -> (f64, f64) {
        let a = self.amplitude();
        (self.constant - a, self.constant + a)
    }

    fn describe(&self) -> String {
        let mut s = format!("{}", self.constant);
        for t in &self.terms {
            s.push_str(&format!(" + [{},{}]:({},{})", t.k[0], t.k[1], t.cos, t.sin));
        }
        s
    }

    pub fn on_circle(&self) -> Result<Observable<CirclePoint>> {
        if !self.is_univariate() {
            return Err(Error::Config(
                "trigonometric polynomial on the circle must not depend on y".into(),
            ));
        }
        let me = self.clone();
        let (lo, hi) = self.bounds();
        Ok(Observable::new(self.describe(), Representation::Trig(self.clone()), move |p: &CirclePoint| {
            me.eval(p.x(), 0.0)
        })
        .with_holder(Holder::lipschitz(self.lipschitz(), HolderSource::Exact))
        .with_bounds(lo, hi))
    }

    pub fn on_torus(&self) -> Observable<TorusPoint> {
        let me = self.clone();
        let (lo, hi) = self.bounds();
        Observable::new(self.describe(), Representation::Trig(self.clone()), move |p: &TorusPoint| {
            let [x, y] = p.coords();
            me.eval(x, y)
        })
        .with_holder(Holder::lipschitz(self.lipschitz(), HolderSource::Exact))
        .with_bounds(lo, hi)
    }
}
