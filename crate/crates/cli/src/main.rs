use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use choireg_cli::config::{load_file_config, FileConfig, Method, Scenario, ScenarioConfig};
use choireg_cli::scenario::{run_scenario, to_csv, to_sidecar, RunError};

/// Detect and repair complete-positivity violations of approximate
/// open-system dynamics by projecting Choi operators onto the physical space.
#[derive(Parser)]
#[command(name = "choireg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude-damping qubit: closed-form exact/Born/Redfield dynamics.
    Qubit(RunArgs),
    /// Spin-boson model driven by the Redfield engine.
    SpinBoson(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bath coupling rate γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Bath spectral width μ.
    #[arg(long)]
    mu: Option<f64>,
    /// Qubit frequency ω (qubit scenario).
    #[arg(long)]
    omega: Option<f64>,
    /// Energy gap ε (spin-boson scenario).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Tunneling strength δ (spin-boson scenario).
    #[arg(long)]
    delta: Option<f64>,
    /// Bath resonance frequency ω₀ (spin-boson scenario).
    #[arg(long)]
    omega0: Option<f64>,
    /// End of the time grid.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Number of uniform grid points (including both endpoints).
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated method list.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON sidecar path (defaults to the CSV path with .json).
    #[arg(long = "json-out")]
    json_out: Option<PathBuf>,
    /// External reference Choi-trajectory CSV.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Warm-start projections from the previous time step.
    #[arg(long = "warm-start")]
    warm_start: bool,
}

fn usage_exit(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, args) = match cli.command {
        Command::Qubit(args) => (Scenario::Qubit, args),
        Command::SpinBoson(args) => (Scenario::SpinBoson, args),
    };

    let mut file = match &args.config {
        Some(path) => match load_file_config(path) {
            Ok(f) => f,
            Err(e) => return usage_exit(&e),
        },
        None => FileConfig::default(),
    };

    // flags override file fields
    if let Some(v) = args.gamma {
        file.gamma = Some(v);
    }
    if let Some(v) = args.mu {
        file.mu = Some(v);
    }
    if let Some(v) = args.omega {
        file.omega = Some(v);
    }
    if let Some(v) = args.epsilon {
        file.epsilon = Some(v);
    }
    if let Some(v) = args.delta {
        file.delta = Some(v);
    }
    if let Some(v) = args.omega0 {
        file.omega0 = Some(v);
    }
    if let Some(v) = args.t_max {
        file.t_max = Some(v);
    }
    if let Some(v) = args.steps {
        file.steps = Some(v);
    }
    if let Some(names) = &args.methods {
        let mut methods = Vec::new();
        for name in names {
            match Method::parse(name) {
                Ok(m) => methods.push(m),
                Err(e) => return usage_exit(&e),
            }
        }
        file.methods = Some(methods);
    }
    if let Some(p) = args.out {
        file.out = Some(p);
    }
    if let Some(p) = args.json_out {
        file.json_out = Some(p);
    }
    if let Some(p) = args.reference {
        file.reference = Some(p);
    }
    if args.warm_start {
        file.projection.warm_start = true;
    }

    let config = match ScenarioConfig::resolve(scenario, file) {
        Ok(c) => c,
        Err(e) => return usage_exit(&e),
    };

    let output = match run_scenario(&config) {
        Ok(o) => o,
        Err(RunError::Usage(m)) => return usage_exit(&m),
        Err(RunError::Failure(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };

    for warning in &output.warnings {
        eprintln!("warning: {warning}");
    }

    let csv = to_csv(&output);
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            let sidecar_path = config
                .json_out
                .clone()
                .unwrap_or_else(|| path.with_extension("json"));
            if let Err(e) = std::fs::write(&sidecar_path, to_sidecar(&output)) {
                eprintln!("error: cannot write {}: {e}", sidecar_path.display());
                return ExitCode::from(1);
            }
        }
        None => {
            print!("{csv}");
            if let Some(path) = &config.json_out {
                if let Err(e) = std::fs::write(path, to_sidecar(&output)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
        }
    }
    ExitCode::SUCCESS
}
