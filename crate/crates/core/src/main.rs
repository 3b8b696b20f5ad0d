use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use locrel::config::ExperimentConfig;
use locrel::experiments::{exit_code, run_to_dir, shipped_config, Registry, EXIT_CONFIG};
use locrel::LabError;

#[derive(Parser)]
#[command(name = "locrel", version, about = "Localized relative energy experiments for isentropic gas dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML); the shipped default is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports and summary.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Grid and analytic flux-domination constants of a state box.
    Constant,
    /// One solver run with admissibility and conservation checks.
    Simulate,
    /// Local weak-strong uniqueness under refinement.
    WeakStrong,
    /// Support growth of a small perturbation.
    FiniteSpeed,
    /// Both sides of the localized relative energy inequality.
    Gronwall,
    /// Incompressible pairs.
    Incompressible,
    /// Sampled nonnegativity and flux domination over boxes.
    LemmaSweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constant => "constant",
            Command::Simulate => "simulate",
            Command::WeakStrong => "weak-strong",
            Command::FiniteSpeed => "finite-speed",
            Command::Gronwall => "gronwall",
            Command::Incompressible => "incompressible",
            Command::LemmaSweep => "lemma-sweep",
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let name = cli.command.name();
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::from_toml(shipped_config(name).expect("every subcommand ships a config"))?,
    };
    if cfg.experiment != name {
        return Err(LabError::Config(format!(
            "config is for experiment '{}', not '{name}'",
            cfg.experiment
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.experiment));

    let outcome = run_to_dir(&Registry::builtin(), &cfg, &out);
    match &outcome {
        Ok(report) => {
            for c in &report.criteria {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {} value={:e} bound={:e}", c.name, c.value, c.bound);
            }
            for (k, v) in &report.values {
                println!("{k} = {v}");
            }
            println!("reports written to {}", out.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
