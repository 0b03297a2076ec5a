use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::build::prepare;
use crate::config::Config;
use crate::manifest::{RunManifest, RunStatus, MANIFEST_NAME};
use crate::output::OutputDir;
use crate::scenarios::{dispatch, Ctx};
use crate::RunError;

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

/// Command-line seed, else the config's, else 0.
pub fn resolve_seed(cfg: &Config, cli: Option<u64>) -> u64 {
    cli.or(cfg.seed).unwrap_or(0)
}

/// Runs into `<out_dir>/<scenario>/<timestamp>-<seed>/`.
pub fn run_scenario(config: &Config, out_dir: &Path, master_seed: u64) -> Result<RunOutcome, RunError> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
    let base = out_dir.join(config.scenario.name());
    let mut dir = base.join(format!("{stamp}-{master_seed}"));
    let mut n = 1;
    while dir.exists() {
        dir = base.join(format!("{stamp}-{master_seed}-{n}"));
        n += 1;
    }
    run_scenario_in(config, &dir, master_seed)
}

/// Runs into exactly `dir`.
pub fn run_scenario_in(config: &Config, dir: &Path, master_seed: u64) -> Result<RunOutcome, RunError> {
    let prepared = prepare(config)?;
    let runtime = |source: ergowalk_core::Error| RunError::Runtime { source, manifest: None };
    let mut out = OutputDir::create(dir.to_path_buf()).map_err(|e| runtime(e.into()))?;
    let mut effective = config.clone();
    effective.seed = Some(master_seed);
    let created = chrono::Utc::now().to_rfc3339();

    let mut ctx = Ctx { cfg: &effective, seed: master_seed, out: &mut out, stages: Vec::new() };
    let result = dispatch(&mut ctx, &prepared);
    let stages = std::mem::take(&mut ctx.stages);

    let versions = BTreeMap::from([
        ("ergowalk".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("ergowalk-core".to_string(), ergowalk_core::VERSION.to_string()),
    ]);
    let (status, error, verdict) = match &result {
        Ok(v) => (RunStatus::Ok, None, Some(v.clone())),
        Err(e) => (RunStatus::Failed, Some(e.to_string()), None),
    };
    let manifest = RunManifest {
        tool: "ergowalk".into(),
        versions,
        scenario: config.scenario.name().into(),
        master_seed,
        config: effective.clone(),
        created,
        threads: rayon::current_num_threads(),
        stage_seconds: stages,
        files: out.files().to_vec(),
        status,
        error,
        verdict,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    let written = std::fs::write(dir.join(MANIFEST_NAME), bytes);
    match (result, written) {
        (Ok(_), Ok(())) => Ok(RunOutcome { dir: dir.to_path_buf(), manifest }),
        (Ok(_), Err(e)) => Err(runtime(e.into())),
        (Err(source), _) => {
            log::error!("{} failed: {source}", config.scenario.name());
            Err(RunError::Runtime { source, manifest: Some(Box::new(manifest)) })
        }
    }
}
