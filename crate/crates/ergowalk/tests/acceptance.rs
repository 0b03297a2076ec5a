//! Acceptance criteria 1-10, run against the configs shipped in `configs/`.
//!
//! Prints one PASS/FAIL line per criterion and exits nonzero when any fails.
//! Thresholds are the published ones; a criterion that the implementation
//! does not reach is reported as a failure rather than relaxed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ergowalk::{resolve_seed, run_scenario_in, Config, RunOutcome};
use ergowalk_core::dynamics::{CatMap, GridSystem, Rotation};
use ergowalk_core::markov::{duality_defect, DensityField, EnvironmentProfile, TransferMatrix};
use ergowalk_core::rng::stream;
use ergowalk_core::stats::gordin_variance;
use ergowalk_core::TrigPoly;
use rand::Rng;
use serde_json::{json, Value};

struct Check {
    label: &'static str,
    pass: bool,
    detail: String,
}

fn check(label: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check { label, pass, detail: detail.into() }
}

type Criterion = fn(&Path) -> Result<Vec<Check>, String>;

fn config_value(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).expect("config parses")
}

fn run(value: Value, dir: &Path) -> Result<RunOutcome, String> {
    let cfg = Config::from_value(value).map_err(|e| e.to_string())?;
    let seed = resolve_seed(&cfg, None);
    run_scenario_in(&cfg, dir, seed).map_err(|e| e.to_string())
}

fn metric(out: &RunOutcome, key: &str) -> Result<f64, String> {
    out.manifest
        .verdict
        .as_ref()
        .and_then(|v| v.metrics.get(key))
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("metric {key} missing"))
}

fn summary(out: &RunOutcome) -> String {
    out.manifest.verdict.as_ref().map(|v| v.summary.clone()).unwrap_or_default()
}

fn read_json(out: &RunOutcome, file: &str) -> Result<Value, String> {
    let text = std::fs::read_to_string(out.dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{file}: {e}"))
}

fn seconds(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn random_pairs<S: GridSystem>(
    sys: &S,
    profile: &EnvironmentProfile<S::Point>,
    resolution: usize,
    pairs: u64,
    seed: u64,
) -> Result<f64, String> {
    let q = sys.quadrature(resolution).map_err(|e| e.to_string())?;
    let m = TransferMatrix::build(sys, profile, &q);
    let mut worst: f64 = 0.0;
    for i in 0..pairs {
        let mut rng = stream(seed, i);
        let psi: Vec<f64> = (0..m.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rho: Vec<f64> = (0..m.len()).map(|_| rng.gen_range(0.0..2.0)).collect();
        worst = worst.max(duality_defect(&m, &psi, &rho).map_err(|e| e.to_string())?.abs());
    }
    Ok(worst)
}

fn duality(_: &Path) -> Result<Vec<Check>, String> {
    let t = Instant::now();
    let rot = Rotation::golden();
    let u = TrigPoly::cos_x(0.3).on_circle().map_err(|e| e.to_string())?;
    let rp = EnvironmentProfile::from_transfer(&rot, u).map_err(|e| e.to_string())?;
    let r = random_pairs(&rot, &rp, 4096, 100, 101)?;
    let cat = CatMap::standard();
    let cp = EnvironmentProfile::from_log_ratio(TrigPoly::cos_x(0.1).on_torus()).map_err(|e| e.to_string())?;
    let c = random_pairs(&cat, &cp, 256, 100, 102)?;
    let secs = seconds(t);
    Ok(vec![
        check("rotation-4096", r <= 1e-10, format!("max defect {r:.2e}")),
        check("cat-256", c <= 1e-10, format!("max defect {c:.2e}")),
        check("time", secs < 60.0, format!("{secs:.1}s")),
    ])
}

fn rotation_density(dir: &Path) -> Result<Vec<Check>, String> {
    let t = Instant::now();
    let out = run(config_value("stationary-rotation"), dir)?;
    let secs = seconds(t);
    let residual = metric(&out, "residual")?;
    let err = metric(&out, "linf_relative_error")?;
    Ok(vec![
        check("verdict", summary(&out) == "density recovered", summary(&out)),
        check("residual", residual <= 1e-10, format!("{residual:.2e}")),
        check("linf", err <= 1e-3, format!("{err:.2e}")),
        check("time", secs < 60.0, format!("{secs:.1}s")),
    ])
}

fn cat_density(dir: &Path) -> Result<Vec<Check>, String> {
    let t = Instant::now();
    let stat = run(config_value("stationary-cat"), &dir.join("stationary"))?;
    let err = metric(&stat, "linf_relative_error")?;
    let mut obs = config_value("stationary-cat");
    obs["scenario"] = json!({ "name": "obstruction", "max_period": 6, "loops": 100, "max_len": 0.5 });
    let sweep = run(obs, &dir.join("obstruction"))?;
    let secs = seconds(t);
    let report = read_json(&sweep, "obstruction.json")?;
    let loop_obs = report["loops"]["obstructions"].as_u64().unwrap_or(u64::MAX);
    let loop_count = report["loops"]["records"].as_u64().unwrap_or(0);
    let livshitz = metric(&sweep, "livshitz_max_abs")?;
    Ok(vec![
        check("linf", err <= 1e-2, format!("{err:.2e}")),
        check(
            "loops",
            loop_obs == 0 && loop_count == 100,
            format!("{loop_obs} of {loop_count} loops exceed bound + 1e-8, max |F| {:.2e}", metric(&sweep, "loop_max_abs")?),
        ),
        check("livshitz", livshitz <= 1e-8, format!("max orbit sum {livshitz:.2e}")),
        check("time", secs < 300.0, format!("{secs:.1}s")),
    ])
}

fn obstruction(dir: &Path) -> Result<Vec<Check>, String> {
    let sweep = run(config_value("obstruction-cat"), &dir.join("obstruction"))?;
    let csv = std::fs::read_to_string(sweep.dir.join("livshitz.csv")).map_err(|e| e.to_string())?;
    let fixed: f64 = csv
        .lines()
        .find(|l| l.starts_with("p1:"))
        .and_then(|l| l.split(',').nth(1))
        .and_then(|v| v.parse().ok())
        .ok_or("no fixed-point record")?;
    let loop_max = metric(&sweep, "loop_max_abs")?;

    let mut stat = config_value("obstruction-cat");
    stat["scenario"] = json!("stationary");
    stat["numerics"] = json!({ "grid": 256, "iterations": 10000, "tolerances": { "stationary": 1e-15 } });
    let it = run(stat, &dir.join("stationary"))?;
    let ratio = metric(&it, "max_sup_inf")?;
    let iterations = metric(&it, "iterations")?;
    Ok(vec![
        check("verdict", summary(&sweep) == "obstruction found", summary(&sweep)),
        check("fixed-point", (fixed - 0.1).abs() <= 1e-12, format!("sum {fixed}")),
        check("loops", loop_max > 1e-3, format!("max |F| {loop_max:.3e}")),
        check("sup/inf", ratio > 1e2, format!("max {ratio:.3} after {iterations} iterations")),
    ])
}

fn transfer(dir: &Path) -> Result<Vec<Check>, String> {
    let cat = run(config_value("transfer-cat"), &dir.join("cat"))?;
    let info = read_json(&cat, "transfer.json")?;
    let targets = info["targets"].as_u64().unwrap_or(0);
    let err = metric(&cat, "max_error_vs_known")?;
    let rot = run(config_value("transfer-rotation"), &dir.join("rotation"))?;
    let residual = metric(&rot, "residual")?;
    let estimate = metric(&rot, "truncation_estimate")?;
    let samples = config_value("transfer-rotation")["scenario"]["targets"].as_u64().unwrap_or(0);
    Ok(vec![
        check("paths", targets == 1000 && err <= 1e-4, format!("{targets} points, max error {err:.2e}")),
        check(
            "fourier",
            samples == 10_000 && residual <= estimate,
            format!("{samples} points, residual {residual:.2e} vs estimate {estimate:.2e}"),
        ),
    ])
}

fn clt(dir: &Path) -> Result<Vec<Check>, String> {
    let rot = Rotation::golden();
    let q = rot.quadrature(4096).map_err(|e| e.to_string())?;
    let profile = EnvironmentProfile::constant(0.5).map_err(|e| e.to_string())?;
    let psi = TrigPoly::cos_x(1.0).on_circle().map_err(|e| e.to_string())?;
    let rho = DensityField::uniform(&q);
    let g = gordin_variance(&rot, &profile, &rho, &psi, &q).map_err(|e| e.to_string())?;
    let closed = (std::f64::consts::TAU * rot.alpha()).sin().powi(2) / 2.0;
    let gap = (g.sigma2 - closed).abs();

    let t = Instant::now();
    let out = run(config_value("clt-rotation"), dir)?;
    let secs = seconds(t);
    let ks = metric(&out, "ks")?;
    let mc = &out.manifest.config.mc;
    Ok(vec![
        check("quadrature", gap <= 1e-10, format!("sigma2 {:.12} vs {closed:.12}", g.sigma2)),
        check(
            "ks",
            mc.walks == 10_000 && mc.length == 10_000 && ks <= 0.03,
            format!("{} walks x {} steps, KS {ks:.4}", mc.walks, mc.length),
        ),
        check("time", secs < 300.0, format!("{secs:.1}s")),
    ])
}

fn recurrence(dir: &Path) -> Result<Vec<Check>, String> {
    let out = run(config_value("walks-cat"), dir)?;
    let rec = read_json(&out, "recurrence.json")?;
    let field = |k: &str| rec[k].as_u64().unwrap_or(0);
    let (walks, length, cells) = (field("walks"), field("length"), field("cell_count"));
    let ret = metric(&out, "return_fraction")?;
    let sign = metric(&out, "sign_coverage")?;
    let cov = metric(&out, "median_cell_coverage")?;
    Ok(vec![
        check(
            "scale",
            walks == 1000 && length == 100_000 && cells == 4096,
            format!("{walks} x {length}, {cells} cells"),
        ),
        check("return", ret >= 0.98, format!("{ret:.3}")),
        check("signs", sign >= 0.98, format!("{sign:.3}")),
        check("cells", cov >= 0.9, format!("median {cov:.3}")),
    ])
}

fn balance(dir: &Path) -> Result<Vec<Check>, String> {
    let out = run(config_value("balance-cat"), dir)?;
    let drift = metric(&out, "drift")?;
    let z = metric(&out, "z_score")?;
    Ok(vec![
        check("drift", drift.abs() <= 1e-8, format!("{drift:.2e}")),
        check("fiber exponent", z.abs() <= 3.0, format!("z = {z:.2}")),
    ])
}

fn geodesic(dir: &Path) -> Result<Vec<Check>, String> {
    let out = run(config_value("geodesic-loops"), dir)?;
    let relation = metric(&out, "relation_defect")?;
    let idem = metric(&out, "reduction_idempotence")?;
    let coset = metric(&out, "reduction_coset")?;
    let five = metric(&out, "five_segment_max_defect")?;
    let six = metric(&out, "six_segment_max_defect")?;
    let f = metric(&out, "loop_max_abs")?;
    let allowance = metric(&out, "non_invariance")?;
    let csv = std::fs::read_to_string(out.dir.join("loops.csv")).map_err(|e| e.to_string())?;
    let loops = csv.lines().count().saturating_sub(1);
    Ok(vec![
        check("relation", relation <= 1e-9, format!("{relation:.2e}")),
        check("reduce", idem <= 1e-9 && coset <= 1e-9, format!("idempotence {idem:.2e}, coset {coset:.2e}")),
        check("closure", five <= 1e-10 && six <= 1e-10, format!("5-segment {five:.2e}, 6-segment {six:.2e}")),
        check(
            "functional",
            loops == 20 && f <= 1e-4 + allowance,
            format!("{loops} loops, max |F| {f:.2e}, allowance {allowance:.2e}"),
        ),
    ])
}

fn digests(out: &RunOutcome) -> BTreeMap<String, String> {
    out.manifest.files.iter().map(|f| (f.path.clone(), f.sha256.clone())).collect()
}

fn determinism(dir: &Path) -> Result<Vec<Check>, String> {
    let mut small_clt = config_value("clt-rotation");
    small_clt["mc"] = json!({ "walks": 500, "length": 2000 });
    let mut small_walks = config_value("walks-cat");
    small_walks["mc"] = json!({ "walks": 50, "length": 5000, "stride": 16 });
    let runs = [
        ("stationary", config_value("stationary-rotation")),
        ("obstruction", config_value("obstruction-cat")),
        ("transfer", config_value("transfer-cat")),
        ("clt", small_clt),
        ("walks", small_walks),
        ("geodesic", config_value("geodesic-loops")),
    ];
    let mut checks = Vec::new();
    let mut same = 0;
    let mut files = 0;
    let mut broken = Vec::new();
    for (name, value) in runs {
        let a = run(value.clone(), &dir.join(name).join("a"))?;
        let b = run(value, &dir.join(name).join("b"))?;
        let bad = a.manifest.verify(&a.dir).len() + b.manifest.verify(&b.dir).len();
        files += a.manifest.files.len();
        if digests(&a) == digests(&b) && bad == 0 {
            same += 1;
        } else {
            broken.push(name);
        }
    }
    checks.push(check(
        "digests",
        broken.is_empty(),
        format!("{same} of 6 scenarios reproduce all {files} files bit for bit{}", if broken.is_empty() {
            String::new()
        } else {
            format!(", differing: {broken:?}")
        }),
    ));
    Ok(checks)
}

fn main() {
    let criteria: [(u32, &str, Criterion); 10] = [
        (1, "operator duality", duality),
        (2, "rotation stationary density", rotation_density),
        (3, "cat stationary density and vanishing obstructions", cat_density),
        (4, "cat obstruction detection", obstruction),
        (5, "transfer reconstruction", transfer),
        (6, "martingale CLT", clt),
        (7, "recurrence", recurrence),
        (8, "Lyapunov balance", balance),
        (9, "geodesic model", geodesic),
        (10, "determinism", determinism),
    ];
    let root = tempfile::tempdir().expect("temporary directory");
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        let dir: PathBuf = root.path().join(format!("c{n}"));
        let t = Instant::now();
        let outcome = f(&dir);
        let secs = seconds(t);
        let (pass, detail) = match outcome {
            Ok(checks) => {
                let pass = checks.iter().all(|c| c.pass);
                let detail = checks
                    .iter()
                    .map(|c| format!("{}{} {}", if c.pass { "" } else { "FAILED " }, c.label, c.detail))
                    .collect::<Vec<_>>()
                    .join("; ");
                (pass, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        println!("criterion {n:>2} {}: {name} [{secs:.1}s] {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} of 10 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
