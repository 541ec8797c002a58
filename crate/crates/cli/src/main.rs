use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use weakval_cli::{emit, parse_scenario, run_with_tolerances, CliError, Format, Kind, ScenarioConfig};

#[derive(Parser)]
#[command(name = "weakval", version, about = "Run weak-measurement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weak value by pointer extraction, compared with the analytic value.
    Weakvalue(RunArgs),
    /// Derailment check of an observable on a state.
    Derail(RunArgs),
    /// Weak values of two observables and their sum.
    Additivity(RunArgs),
    /// Interferometer tap sweep with dark-arm amplitude.
    Mzi(RunArgs),
    /// Divided-quantity sweep toward g = 0.
    Sweep(RunArgs),
    /// Parse and validate a scenario without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the format declared in the scenario.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scales every tolerance: strict ×0.01, loose ×100.
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Profile {
    Default,
    Strict,
    Loose,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &PathBuf) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_scenario(&text)?)
}

fn execute(command: Command) -> Result<(), CliError> {
    let (kind, args) = match command {
        Command::Validate { scenario } => {
            let config = load(&scenario)?;
            println!("valid {} scenario", config.kind);
            return Ok(());
        }
        Command::Weakvalue(a) => (Kind::WeakValue, a),
        Command::Derail(a) => (Kind::Derail, a),
        Command::Additivity(a) => (Kind::Additivity, a),
        Command::Mzi(a) => (Kind::Mzi, a),
        Command::Sweep(a) => (Kind::Sweep, a),
    };
    let config = load(&args.scenario)?;
    if config.kind != kind {
        return Err(CliError::KindMismatch {
            expected: kind.to_string(),
            found: config.kind.to_string(),
        });
    }
    let tol = match args.tolerance_profile {
        Profile::Default => config.tolerances,
        Profile::Strict => config.tolerances.scaled(0.01),
        Profile::Loose => config.tolerances.scaled(100.0),
    };
    let format = match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => config.format,
    };
    let report = run_with_tolerances(&config, &tol)?;
    let bytes = emit(&report, format);
    match args.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(())
}
