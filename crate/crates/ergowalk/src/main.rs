use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergowalk::build::prepare;
use ergowalk::manifest::RunManifest;
use ergowalk::{resolve_seed, run_scenario, Config, RunError, EXIT_RUNTIME, EXIT_SCHEMA};

#[derive(Parser)]
#[command(name = "ergowalk", version, about = "Random walks in dynamically defined environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seed; overrides the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: available parallelism).
        #[arg(long, env = "ERGOWALK_THREADS")]
        threads: Option<usize>,
    },
    /// Check a config against the schema without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the verdicts of a finished run and re-check its file digests.
    Report {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config, out, seed, threads } => {
            if let Some(k) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                    log::warn!("thread pool already initialized: {e}");
                }
            }
            let cfg = match Config::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run_scenario(&cfg, &out, resolve_seed(&cfg, seed)) {
                Ok(o) => {
                    let v = o.manifest.verdict.as_ref().map_or("", |v| v.summary.as_str());
                    println!("{}: {v}", o.dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config } => match Config::load(&config).and_then(|c| prepare(&c).map(|_| c)) {
            Ok(c) => {
                println!("{}", serde_json::to_string_pretty(&c).expect("config serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Report { manifest } => {
            let m = match RunManifest::load(&manifest) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", manifest.display());
                    return ExitCode::from(EXIT_SCHEMA as u8);
                }
            };
            print!("{}", m.render());
            let dir = manifest.parent().unwrap_or(std::path::Path::new("."));
            let bad = m.verify(dir);
            for (f, why) in &bad {
                println!("  MISMATCH {f}: {why}");
            }
            if bad.is_empty() {
                println!("all {} files match their digests", m.files.len());
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_RUNTIME as u8)
            }
        }
    }
}
