use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qepot::effective::{CurvaturePolicy, FhConvention};
use qepot::scenario::config::DEFAULT_CONTINUATION_CAP;
use qepot::scenario::presets::{preset, PresetOverrides};
use qepot::scenario::{parse_config, report, run_all, write_outputs, ScenarioConfig, ScenarioResult};

#[derive(Parser)]
#[command(
    name = "qepot",
    version,
    about = "Effective classical potentials for 1-D quantum thermal densities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in benchmark set.
    Preset {
        #[arg(value_parser = ["fig1", "fig2", "fig3"])]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Feynman-Hibbs width: twelfth (beta hbar^2 / 12m) or third (beta hbar^2 / 3m).
        #[arg(long = "fh-a2", value_enum)]
        fh_a2: Option<FhArg>,
        /// Base sampler seed; chain i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario file and Metropolis-sample its sampler method.
    Sample {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Check {
        /// Only these criteria (1-9).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        /// Pinned Morse oracle values; written on first use, compared afterwards.
        #[arg(long)]
        pins: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Clamp,
    Continuation,
}

#[derive(Clone, Copy, ValueEnum)]
enum FhArg {
    Twelfth,
    Third,
}

fn load(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn finish(results: &[ScenarioResult], dir: &Path, preset: Option<&str>) -> ExitCode {
    print!("{}", report(results));
    match write_outputs(dir, results, preset) {
        Ok(files) => eprintln!("wrote {} files to {}", files.len(), dir.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    if results.iter().all(ScenarioResult::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_file(config: &Path, out: Option<PathBuf>, sample: bool) -> ExitCode {
    let cfg = match load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if sample && cfg.sampler.is_none() {
        eprintln!("error: {}: no sampler.* keys", config.display());
        return ExitCode::from(2);
    }
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("qepot-out").join(&cfg.name));
    match run_all(std::slice::from_ref(&cfg), sample) {
        Ok(results) => finish(&results, &dir, None),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => run_file(&config, out, false),
        Command::Sample { config, out } => run_file(&config, out, true),
        Command::Preset {
            name,
            out,
            policy,
            fh_a2,
            seed,
        } => {
            let overrides = PresetOverrides {
                policy: policy.map(|p| match p {
                    PolicyArg::Clamp => CurvaturePolicy::ClampToZero,
                    PolicyArg::Continuation => CurvaturePolicy::ContinuationCapped {
                        cap: DEFAULT_CONTINUATION_CAP,
                    },
                }),
                fh_convention: fh_a2.map(|f| match f {
                    FhArg::Twelfth => FhConvention::Twelfth,
                    FhArg::Third => FhConvention::Third,
                }),
                seed,
            };
            let configs = match preset(&name, &overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("qepot-out").join(&name));
            match run_all(&configs, false) {
                Ok(results) => finish(&results, &dir, Some(&name)),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Check { only, pins } => {
            if let Some(bad) = only.iter().find(|id| !(1..=9).contains(*id)) {
                eprintln!("error: no criterion {bad} (expected 1-9)");
                return ExitCode::from(2);
            }
            let outcomes = qepot::acceptance::run(&only, &qepot::acceptance::Options { pins });
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
