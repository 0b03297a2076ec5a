//! Experiment configuration. Every optional field has a module default; the
//! parsed value (defaults filled in) is what the manifest echoes.

use std::path::Path;

use ergowalk_core::markov::StationaryOptions;
use ergowalk_core::TrigPoly;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::RunError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemSpec,
    pub profile: ProfileSpec,
    pub scenario: Scenario,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub mc: MonteCarlo,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "kebab-case")]
pub enum SystemSpec {
    Rotation {
        #[serde(default = "golden")]
        alpha: f64,
    },
    Cat {
        #[serde(default = "standard_matrix")]
        matrix: [[i64; 2]; 2],
    },
    Geodesic {},
}

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn standard_matrix() -> [[i64; 2]; 2] {
    [[2, 1], [1, 1]]
}

impl SystemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Rotation { .. } => "rotation",
            Self::Cat { .. } => "cat",
            Self::Geodesic {} => "geodesic",
        }
    }
}

/// Parameters of the group-averaged bump used as a transfer function on the
/// geodesic model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    #[serde(default = "bump_sigma")]
    pub sigma: f64,
    #[serde(default = "bump_amplitude")]
    pub amplitude: f64,
    #[serde(default = "bump_radius")]
    pub word_radius: usize,
}

fn bump_sigma() -> f64 {
    0.35
}
fn bump_amplitude() -> f64 {
    0.5
}
fn bump_radius() -> usize {
    4
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self { sigma: bump_sigma(), amplitude: bump_amplitude(), word_radius: bump_radius() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "kebab-case")]
pub enum ProfileSpec {
    /// `p ≡ p`.
    Constant { p: f64 },
    /// `log φ` given as a trigonometric polynomial.
    Trig { log_phi: TrigPoly },
    /// `log φ = u∘f - u`; `u` is a trigonometric polynomial or, on the
    /// geodesic model, a group-averaged bump.
    Transfer {
        #[serde(default)]
        u: Option<TrigPoly>,
        #[serde(default)]
        bump: Option<BumpSpec>,
    },
    /// `p` sampled at the grid nodes of the given resolution, interpolated.
    Grid { resolution: usize, p: Vec<f64> },
}

impl ProfileSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Trig { .. } => "trig",
            Self::Transfer { .. } => "transfer",
            Self::Grid { .. } => "grid",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scenario {
    Stationary {},
    Obstruction {
        #[serde(default = "max_period")]
        max_period: u32,
        #[serde(default = "loop_count")]
        loops: usize,
        #[serde(default = "loop_len")]
        max_len: f64,
    },
    Transfer {
        #[serde(default = "transfer_targets")]
        targets: usize,
        #[serde(default = "max_freq")]
        max_freq: i32,
        #[serde(default = "small_denominator")]
        small_denominator: f64,
    },
    Walks {
        #[serde(default)]
        dump_steps: bool,
    },
    Clt {
        #[serde(default = "default_psi")]
        psi: TrigPoly,
    },
    Balance {},
    GeodesicLoops {
        #[serde(default = "geodesic_loops")]
        loops: usize,
        #[serde(default = "geodesic_len")]
        max_len: f64,
    },
}

fn max_period() -> u32 {
    6
}
fn loop_count() -> usize {
    100
}
fn loop_len() -> f64 {
    0.5
}
fn transfer_targets() -> usize {
    1000
}
fn max_freq() -> i32 {
    64
}
fn small_denominator() -> f64 {
    1e-6
}
fn default_psi() -> TrigPoly {
    TrigPoly::cos_x(1.0)
}
fn geodesic_loops() -> usize {
    20
}
fn geodesic_len() -> f64 {
    0.5
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Stationary {} => "stationary",
            Self::Obstruction { .. } => "obstruction",
            Self::Transfer { .. } => "transfer",
            Self::Walks { .. } => "walks",
            Self::Clt { .. } => "clt",
            Self::Balance {} => "balance",
            Self::GeodesicLoops { .. } => "geodesic-loops",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `L¹` residual at which the stationary iteration stops.
    pub stationary: f64,
    /// Relative `L∞` error for "density recovered".
    pub density: f64,
    /// `|∫ log φ dμ|` above which a profile is treated as asymmetric.
    pub symmetry: f64,
    /// Truncation tolerance of the loop functional series.
    pub series: f64,
    /// Loop closure in Newton's method.
    pub closure: f64,
    pub ks: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { stationary: 1e-10, density: 1e-3, symmetry: 1e-8, series: 1e-10, closure: 1e-13, ks: 0.03 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub grid: usize,
    pub iterations: usize,
    pub cesaro_window: usize,
    pub tolerances: Tolerances,
}

impl Default for Numerics {
    fn default() -> Self {
        let s = StationaryOptions::default();
        Self { grid: 256, iterations: s.max_iter, cesaro_window: s.cesaro_window, tolerances: Tolerances::default() }
    }
}

impl Numerics {
    pub fn stationary_options(&self) -> StationaryOptions {
        StationaryOptions { max_iter: self.iterations, tol: self.tolerances.stationary, cesaro_window: self.cesaro_window }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarlo {
    pub walks: usize,
    pub length: usize,
    pub stride: usize,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self { walks: 1000, length: 10_000, stride: ergowalk_core::walk::DEFAULT_STRIDE }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let value: Value = serde_json::from_str(text).map_err(|e| RunError::Schema(e.to_string()))?;
        Self::from_value(value)
    }

    /// Accepts `"scenario": "name"` as shorthand for `{"name": "name"}` and
    /// an absent `parameters` object as `{}`.
    pub fn from_value(mut value: Value) -> Result<Self, RunError> {
        if let Some(s) = value.get_mut("scenario") {
            if let Value::String(name) = s {
                *s = serde_json::json!({ "name": name });
            }
        }
        for key in ["system", "profile"] {
            if let Some(Value::Object(m)) = value.get_mut(key) {
                m.entry("parameters").or_insert_with(|| serde_json::json!({}));
            }
        }
        let cfg: Self = serde_json::from_value(value).map_err(|e| RunError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Cross-field checks that serde cannot express.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Schema(m));
        let (sys, prof, scen) = (self.system.kind(), self.profile.kind(), self.scenario.name());
        let allowed: &[&str] = match &self.scenario {
            Scenario::Stationary {} | Scenario::Walks { .. } | Scenario::Clt { .. } | Scenario::Transfer { .. } => {
                &["rotation", "cat"]
            }
            Scenario::Obstruction { .. } | Scenario::Balance {} => &["cat"],
            Scenario::GeodesicLoops { .. } => &["geodesic"],
        };
        if !allowed.contains(&sys) {
            return bad(format!("scenario {scen} needs system kind {allowed:?}, got {sys}"));
        }
        match &self.profile {
            ProfileSpec::Constant { p } if !(0.0..=1.0).contains(p) => {
                return bad(format!("constant p = {p} is not a probability"));
            }
            ProfileSpec::Transfer { u, bump } => match (sys, u, bump) {
                ("geodesic", None, _) => {}
                ("geodesic", Some(_), _) => return bad("geodesic transfer profiles take a bump, not u".into()),
                (_, Some(_), None) => {}
                _ => return bad(format!("{sys} transfer profiles take exactly a trigonometric u")),
            },
            ProfileSpec::Grid { resolution, p } => {
                let n = if sys == "cat" { resolution * resolution } else { *resolution };
                if sys == "geodesic" {
                    return bad("grid profiles need a grid system".into());
                }
                if p.len() != n {
                    return bad(format!("grid profile needs {n} values, got {}", p.len()));
                }
            }
            _ => {}
        }
        if sys == "geodesic" && !matches!(self.profile, ProfileSpec::Transfer { .. } | ProfileSpec::Constant { .. }) {
            return bad(format!("geodesic system does not support {prof} profiles"));
        }
        if let (Scenario::Transfer { .. }, false) =
            (&self.scenario, matches!(self.profile, ProfileSpec::Transfer { .. } | ProfileSpec::Trig { .. }))
        {
            return bad("transfer scenario needs a trig or transfer profile".into());
        }
        if let SystemSpec::Rotation { alpha } = self.system {
            if !(alpha > 0.0 && alpha < 1.0) {
                return bad(format!("rotation angle {alpha} outside (0, 1)"));
            }
        }
        if self.numerics.grid < ergowalk_core::dynamics::MIN_RESOLUTION {
            return bad(format!("grid {} below {}", self.numerics.grid, ergowalk_core::dynamics::MIN_RESOLUTION));
        }
        if matches!(self.scenario, Scenario::Walks { .. } | Scenario::Clt { .. } | Scenario::Balance {})
            && (self.mc.walks < 2 || self.mc.length == 0)
        {
            return bad("Monte-Carlo scenarios need mc.walks >= 2 and mc.length >= 1".into());
        }
        Ok(())
    }
}
