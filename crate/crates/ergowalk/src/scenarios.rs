//! The seven scenarios. Each writes its artifacts through [`OutputDir`] and
//! returns the headline verdict; mathematical findings (an obstruction, a
//! rejected fit) are verdicts, only broken computations are errors.

use std::time::Instant;

use ergowalk_core::cohomology::{
    coboundary_residual, fourier_transfer, livshitz_obstruction, loop_functional, loop_report,
    random_quadrilaterals, transfer_from_paths, ObstructionRecord, ObstructionReport, Verdict as Finding,
};
use ergowalk_core::dynamics::{CatMap, CellPartition, GridSystem, MapSystem, Quadrature, Rotation, TorusPoint};
use ergowalk_core::geodesic::{close_loop, six_segment_loop};
use ergowalk_core::markov::{
    stationarity_residual_exact, stationary_iterate, symmetry_defect, DensityField, TransferMatrix,
};
use ergowalk_core::rng::aux_stream;
use ergowalk_core::stats::{clt_experiment, lyapunov_balance, CltOptions, EnsembleOptions, NuSample, START_TAG};
use ergowalk_core::walk::{recurrence_stats, simulate_ensemble, write_steps, WalkConfig};
use ergowalk_core::{Error, Observable, Representation, Result};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::build::{rotation_coboundary, GeodesicSetup, GridSetup, Prepared, TrigSystem};
use crate::config::{Config, ProfileSpec, Scenario};
use crate::manifest::{StageTime, Verdict};
use crate::output::OutputDir;

// Auxiliary stream tags; walk streams use the low ids.
const LOOP_TAG: u32 = 2;
const TARGET_TAG: u32 = 3;
const FRAME_TAG: u32 = 4;

pub(crate) struct Ctx<'a> {
    pub cfg: &'a Config,
    pub seed: u64,
    pub out: &'a mut OutputDir,
    pub stages: Vec<StageTime>,
}

impl Ctx<'_> {
    fn stage(&mut self, name: &str, since: Instant) {
        self.stages.push(StageTime { stage: name.to_string(), seconds: since.elapsed().as_secs_f64() });
    }
}

pub(crate) fn dispatch(ctx: &mut Ctx<'_>, prepared: &Prepared) -> Result<Verdict> {
    let scenario = ctx.cfg.scenario.clone();
    match (&scenario, prepared) {
        (Scenario::Stationary {}, Prepared::Rotation(s)) => stationary(ctx, s),
        (Scenario::Stationary {}, Prepared::Cat(s)) => stationary(ctx, s),
        (Scenario::Walks { dump_steps }, Prepared::Rotation(s)) => walks(ctx, s, *dump_steps),
        (Scenario::Walks { dump_steps }, Prepared::Cat(s)) => walks(ctx, s, *dump_steps),
        (Scenario::Clt { psi }, Prepared::Rotation(s)) => clt(ctx, s, &s.sys.trig(psi)?),
        (Scenario::Clt { psi }, Prepared::Cat(s)) => clt(ctx, s, &s.sys.trig(psi)?),
        (Scenario::Transfer { max_freq, small_denominator, targets }, Prepared::Rotation(s)) => {
            fourier(ctx, s, *max_freq, *small_denominator, *targets)
        }
        (Scenario::Transfer { targets, .. }, Prepared::Cat(s)) => paths(ctx, s, *targets),
        (Scenario::Obstruction { max_period, loops, max_len }, Prepared::Cat(s)) => {
            obstruction(ctx, s, *max_period, *loops, *max_len)
        }
        (Scenario::Balance {}, Prepared::Cat(s)) => balance(ctx, s),
        (Scenario::GeodesicLoops { loops, max_len }, Prepared::Geodesic(s)) => geodesic_loops(ctx, s, *loops, *max_len),
        (s, _) => Err(Error::Unsupported { system: ctx.cfg.system.kind(), structure: s.name() }),
    }
}

/// Closed form when the profile comes from a transfer function, `μ` for
/// constant profiles, otherwise the converged grid iteration.
fn stationary_density<S: GridSystem>(
    ctx: &mut Ctx<'_>,
    setup: &GridSetup<S>,
    q: &Quadrature<S::Point>,
) -> Result<(DensityField<S::Point>, &'static str)> {
    let t = Instant::now();
    let out = if let Some(tr) = setup.profile.transfer() {
        (DensityField::from_observable(q, &tr.density)?, "closed-form")
    } else if matches!(setup.profile.p().representation(), Representation::Constant(_)) {
        (DensityField::uniform(q), "uniform")
    } else {
        let m = TransferMatrix::build(&setup.sys, &setup.profile, q);
        let run = stationary_iterate(&m, q, &ctx.cfg.numerics.stationary_options())?;
        if !run.diagnostics.converged {
            return Err(Error::Precondition(format!(
                "stationary iteration stopped at residual {:.3e}",
                run.residual
            )));
        }
        (run.density, "iterated")
    };
    ctx.stage("stationary-density", t);
    Ok(out)
}

fn stationary<S: TrigSystem>(ctx: &mut Ctx<'_>, s: &GridSetup<S>) -> Result<Verdict> {
    let tol = ctx.cfg.numerics.tolerances.clone();
    let q = s.sys.quadrature(ctx.cfg.numerics.grid)?;
    let defect = symmetry_defect(&s.profile, &q);
    if defect.abs() > tol.symmetry {
        ctx.out.write_json("stationary.json", &json!({ "symmetry_defect": defect, "iterated": false }))?;
        return Ok(Verdict::new("symmetry violated").metric("symmetry_defect", defect));
    }
    let t = Instant::now();
    let m = TransferMatrix::build(&s.sys, &s.profile, &q);
    ctx.stage("build-operator", t);
    let t = Instant::now();
    let run = stationary_iterate(&m, &q, &ctx.cfg.numerics.stationary_options())?;
    ctx.stage("iterate", t);
    ctx.out.write_with("density.csv", |w| run.density.write_csv::<S, _>(&q, w))?;

    let mut oracle = serde_json::Value::Null;
    let mut verdict = if run.diagnostics.degenerate {
        Verdict::new("density degenerating")
    } else if run.diagnostics.converged {
        Verdict::new("density computed")
    } else {
        Verdict::new("not converged")
    };
    if let Some(tr) = s.profile.transfer() {
        let exact = DensityField::from_observable(&q, &tr.density)?;
        let err = run.density.relative_linf(exact.values());
        let exact_residual = stationarity_residual_exact(&s.sys, &s.profile, exact.exact().expect("analytic"), &q);
        oracle = json!({ "linf_relative_error": err, "exact_density_residual": exact_residual });
        let recovered = run.diagnostics.converged && err <= tol.density;
        verdict = Verdict::new(if recovered { "density recovered" } else { "density not recovered" })
            .metric("linf_relative_error", err);
    }
    ctx.out.write_json(
        "stationary.json",
        &json!({ "symmetry_defect": defect, "iterated": true, "diagnostics": run.diagnostics, "oracle": oracle }),
    )?;
    Ok(verdict
        .metric("symmetry_defect", defect)
        .metric("residual", run.residual)
        .metric("iterations", run.diagnostics.iterations)
        .metric("max_sup_inf", run.diagnostics.max_sup_inf))
}

#[derive(Serialize)]
struct RecurrenceSummary {
    density: &'static str,
    walks: usize,
    length: usize,
    cell_count: usize,
    return_fraction: f64,
    sign_coverage: f64,
    median_cell_coverage: f64,
}

fn walks<S>(ctx: &mut Ctx<'_>, s: &GridSetup<S>, dump: bool) -> Result<Verdict>
where
    S: TrigSystem + NuSample + CellPartition,
{
    let q = s.sys.quadrature(ctx.cfg.numerics.grid)?;
    let (rho, source) = stationary_density(ctx, s, &q)?;
    let mc = ctx.cfg.mc.clone();
    let t = Instant::now();
    let starts = s.sys.sample_nu(&rho, mc.walks, &mut aux_stream(ctx.seed, START_TAG))?;
    let cfg = WalkConfig::new(mc.length).with_stride(mc.stride);
    let ws = simulate_ensemble(&s.sys, &s.profile, &starts, &cfg, ctx.seed);
    ctx.stage("simulate", t);
    let rep = recurrence_stats(&s.sys, &ws)?;
    ctx.out.write_with("walks.csv", |w| rep.write_csv(w))?;
    if dump {
        ctx.out.write_with("steps.bin", |w| ws.iter().try_for_each(|x| write_steps(&mut *w, x)))?;
    }
    ctx.out.write_json(
        "recurrence.json",
        &RecurrenceSummary {
            density: source,
            walks: rep.walks,
            length: rep.length,
            cell_count: rep.cell_count,
            return_fraction: rep.return_fraction,
            sign_coverage: rep.sign_coverage,
            median_cell_coverage: rep.median_cell_coverage,
        },
    )?;
    Ok(Verdict::new("walks simulated")
        .metric("return_fraction", rep.return_fraction)
        .metric("sign_coverage", rep.sign_coverage)
        .metric("median_cell_coverage", rep.median_cell_coverage))
}

fn clt<S: TrigSystem + NuSample>(ctx: &mut Ctx<'_>, s: &GridSetup<S>, psi: &Observable<S::Point>) -> Result<Verdict> {
    let q = s.sys.quadrature(ctx.cfg.numerics.grid)?;
    let (rho, _) = stationary_density(ctx, s, &q)?;
    let opts = CltOptions { walks: ctx.cfg.mc.walks, len: ctx.cfg.mc.length, ks_threshold: ctx.cfg.numerics.tolerances.ks };
    let t = Instant::now();
    let rep = clt_experiment(&s.sys, &s.profile, &rho, psi, &q, &opts, ctx.seed)?;
    ctx.stage("clt", t);
    ctx.out.write_json("clt.json", &rep)?;
    ctx.out.write_with("deciles.csv", |w| rep.write_deciles_csv(w))?;
    let summary = match rep.ks_pass {
        None => "degenerate variance",
        Some(true) => "clt consistent",
        Some(false) => "clt rejected",
    };
    Ok(Verdict::new(summary)
        .metric("sigma2", rep.sigma2)
        .metric("ks", rep.ks)
        .metric("empirical_variance", rep.empirical_variance))
}

fn balance(ctx: &mut Ctx<'_>, s: &GridSetup<CatMap>) -> Result<Verdict> {
    let grid = ctx.cfg.numerics.grid;
    let q = s.sys.quadrature(grid)?;
    let (rho, _) = stationary_density(ctx, s, &q)?;
    let mc = EnsembleOptions { walks: ctx.cfg.mc.walks, len: ctx.cfg.mc.length };
    let t = Instant::now();
    let rep = lyapunov_balance(&s.sys, &s.profile, &rho, grid, mc, ctx.seed)?;
    ctx.stage("balance", t);
    ctx.out.write_json("balance.json", &rep)?;
    let summary = match rep.balance_holds {
        Some(true) => "balance holds",
        Some(false) => "balance violated",
        None => "balance reported",
    };
    Ok(Verdict::new(summary)
        .metric("drift", rep.drift)
        .metric("fiber_exponent_mc", rep.fiber_exponent_mc.value)
        .metric("z_score", rep.z_score))
}

fn finding(report: &ObstructionReport) -> &'static str {
    match report.verdict {
        Finding::Obstruction => "obstruction found",
        Finding::NoObstructionFound => "no obstruction found",
    }
}

fn obstruction(ctx: &mut Ctx<'_>, s: &GridSetup<CatMap>, max_period: u32, loops: usize, max_len: f64) -> Result<Verdict> {
    let obs = s.profile.log_phi();
    let t = Instant::now();
    let livshitz = livshitz_obstruction(&s.sys, obs, max_period)?;
    ctx.stage("livshitz", t);
    let t = Instant::now();
    let lps = random_quadrilaterals(&s.sys, loops, max_len, &mut aux_stream(ctx.seed, LOOP_TAG))?;
    let sweep = loop_report(&s.sys, &lps, obs, ctx.cfg.numerics.tolerances.series, 0.0)?;
    ctx.stage("loops", t);
    ctx.out.write_with("livshitz.csv", |w| livshitz.write_csv(w))?;
    ctx.out.write_with("loops.csv", |w| sweep.write_csv(w))?;
    let summary = |r: &ObstructionReport| {
        json!({ "records": r.records.len(), "obstructions": r.obstruction_count(), "max_abs_value": r.max_abs_value(), "verdict": r.verdict })
    };
    ctx.out.write_json("obstruction.json", &json!({ "livshitz": summary(&livshitz), "loops": summary(&sweep) }))?;
    let both = livshitz.clone().merge(sweep.clone());
    Ok(Verdict::new(finding(&both))
        .metric("livshitz_max_abs", livshitz.max_abs_value())
        .metric("loop_max_abs", sweep.max_abs_value())
        .metric("obstructions", both.obstruction_count()))
}

fn fourier(ctx: &mut Ctx<'_>, s: &GridSetup<Rotation>, max_freq: i32, floor: f64, samples: usize) -> Result<Verdict> {
    let log_phi = match (&ctx.cfg.profile, &s.u) {
        (ProfileSpec::Trig { log_phi }, _) => log_phi.clone(),
        (_, Some(u)) => rotation_coboundary(u, s.sys.alpha()),
        _ => return Err(Error::Precondition("Fourier transfer needs a trigonometric log φ".into())),
    };
    let sol = match fourier_transfer(&s.sys, &log_phi, max_freq, floor) {
        Ok(sol) => sol,
        Err(Error::NotACoboundary { mean }) => {
            ctx.out.write_json("transfer.json", &json!({ "method": "fourier", "mean": mean }))?;
            return Ok(Verdict::new("not a coboundary").metric("mean", mean));
        }
        Err(e) => return Err(e),
    };
    let mut rng = aux_stream(ctx.seed, TARGET_TAG);
    let pts: Vec<_> = (0..samples).map(|_| s.sys.sample_invariant(&mut rng)).collect();
    let residual = coboundary_residual(&s.sys, s.profile.log_phi(), &sol.u.on_circle()?, &pts);
    ctx.out.write_json("transfer.json", &json!({ "method": "fourier", "solution": sol, "residual": residual }))?;
    let ok = residual <= sol.truncation_estimate;
    Ok(Verdict::new(if ok { "transfer recovered" } else { "transfer residual exceeds estimate" })
        .metric("residual", residual)
        .metric("truncation_estimate", sol.truncation_estimate)
        .metric("flagged", sol.flagged.len()))
}

fn paths(ctx: &mut Ctx<'_>, s: &GridSetup<CatMap>, targets: usize) -> Result<Verdict> {
    let x0 = TorusPoint([0, 0]);
    let mut rng = aux_stream(ctx.seed, TARGET_TAG);
    let ys: Vec<TorusPoint> = (0..targets).map(|_| s.sys.sample_invariant(&mut rng)).collect();
    let t = Instant::now();
    let res = transfer_from_paths(&s.sys, s.profile.log_phi(), &x0, &ys, ctx.cfg.numerics.tolerances.series);
    ctx.stage("paths", t);
    let vals = match res {
        Ok(v) => v,
        Err(Error::ObstructionLeak { target, discrepancy, allowance }) => {
            let info = json!({ "method": "paths", "target": target, "discrepancy": discrepancy, "allowance": allowance });
            ctx.out.write_json("transfer.json", &info)?;
            return Ok(Verdict::new("obstruction found").metric("discrepancy", discrepancy));
        }
        Err(e) => return Err(e),
    };
    let u = s.u.as_ref().map(|u| u.on_torus());
    let mut err: Option<f64> = None;
    ctx.out.write_with("transfer.csv", |w| -> Result<()> {
        use std::io::Write;
        writeln!(w, "index,x,y,value,bound,alt_value,alt_bound,known")?;
        for (i, (y, v)) in ys.iter().zip(&vals).enumerate() {
            let [a, b] = y.coords();
            let known = u.as_ref().map(|u| u.eval(y) - u.eval(&x0));
            if let Some(k) = known {
                err = Some(err.unwrap_or(0.0).max((v.value - k).abs()));
            }
            let ks = known.map(|k| format!("{k:.16e}")).unwrap_or_default();
            writeln!(
                w,
                "{i},{a:.16e},{b:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{ks}",
                v.value, v.bound, v.alt_value, v.alt_bound
            )?;
        }
        Ok(())
    })?;
    let worst_bound = vals.iter().map(|v| v.bound).fold(0.0, f64::max);
    ctx.out.write_json(
        "transfer.json",
        &json!({ "method": "paths", "targets": targets, "max_bound": worst_bound, "max_error_vs_known": err }),
    )?;
    Ok(Verdict::new("transfer recovered").metric("max_bound", worst_bound).metric("max_error_vs_known", err))
}

fn geodesic_loops(ctx: &mut Ctx<'_>, s: &GeodesicSetup, loops: usize, max_len: f64) -> Result<Verdict> {
    let g = &s.model;
    let tol = ctx.cfg.numerics.tolerances.clone();
    let t = Instant::now();
    let validation = g.group().validate();
    let mut rng = aux_stream(ctx.seed, FRAME_TAG);
    let frames: Vec<_> = (0..loops.max(1) * 5).map(|_| g.haar_sample(&mut rng)).collect();
    let reduction = g.group().check_reduction(&frames)?;
    ctx.stage("group-checks", t);

    let t = Instant::now();
    let mut five = Vec::with_capacity(loops);
    let mut six = Vec::with_capacity(loops);
    for i in 0..loops {
        let seed5: Vec<f64> = (0..5).map(|_| rng.gen_range(-max_len..max_len)).collect();
        let (_, c5) = close_loop(g, &frames[i], &seed5, &[0, 1], tol.closure)?;
        five.push(c5.matrix_defect);
        let fixed = [rng.gen_range(0.1..max_len), rng.gen_range(0.1..max_len), rng.gen_range(0.1..max_len)];
        six.push(six_segment_loop(g, &frames[loops + i], fixed, tol.closure)?);
    }
    ctx.stage("close-loops", t);

    let t = Instant::now();
    let allowance = s.bump.as_ref().map_or(0.0, |b| b.non_invariance);
    let records = six
        .iter()
        .enumerate()
        .map(|(i, (lp, _))| {
            let v = loop_functional(g, lp, s.profile.log_phi(), tol.series)?;
            Ok(ObstructionRecord::new(format!("hexagon-{i}"), v.value, v.bound + allowance))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ObstructionReport::new(records);
    ctx.stage("loop-functionals", t);

    ctx.out.write_with("loops.csv", |w| report.write_csv(w))?;
    let six_defects: Vec<f64> = six.iter().map(|(lp, _)| lp.defect()).collect();
    let max_of = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    ctx.out.write_json(
        "geodesic.json",
        &json!({
            "validation": validation,
            "reduction": reduction,
            "bump": s.bump,
            "five_segment_max_defect": max_of(&five),
            "six_segment_max_defect": max_of(&six_defects),
            "loop_max_abs": report.max_abs_value(),
            "verdict": report.verdict,
        }),
    )?;
    Ok(Verdict::new(finding(&report))
        .metric("relation_defect", validation.relation_defect)
        .metric("reduction_idempotence", reduction.idempotence)
        .metric("reduction_coset", reduction.coset)
        .metric("five_segment_max_defect", max_of(&five))
        .metric("six_segment_max_defect", max_of(&six_defects))
        .metric("loop_max_abs", report.max_abs_value())
        .metric("non_invariance", allowance))
}
