use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trapdiff::harness::{self, Level, Scenario, Solver, ValidateOptions};
use trapdiff::{Error, Result};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "trapdiff", version, about = "Transport with power-law trapping versus time-fractional diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute density profiles and write them as CSV.
    Profile(ProfileArgs),
    /// Like `profile`, with difference columns between the solvers.
    Compare(ProfileArgs),
    /// Run the self-check suite and write a JSON report.
    Validate(ValidateArgs),
    /// List the built-in scenarios.
    Scenarios,
}

#[derive(Args)]
struct ProfileArgs {
    /// Scenario name(s): a built-in or a section of --config.
    #[arg(long, required = true, value_delimiter = ',')]
    scenario: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// TOML file with one [label] section per scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write a gnuplot script.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Log-scale y axis in the plot script.
    #[arg(long)]
    logy: bool,
    /// Override the output times (min).
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Override the solver set (rte, fde, normal).
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
    /// Override the inversion truncation J.
    #[arg(long)]
    j: Option<u32>,
    /// Override the number of positive ordinates.
    #[arg(long)]
    ordinates: Option<usize>,
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "fast")]
    level: LevelArg,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Inversion truncation J to validate instead of the default.
    #[arg(long)]
    j: Option<u32>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Profile(args) => profile(&args, false),
        Command::Compare(args) => profile(&args, true),
        Command::Validate(args) => return validate(&args),
        Command::Scenarios => {
            list_scenarios();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE })
        }
    }
}

fn load(args: &ProfileArgs) -> Result<Vec<Scenario>> {
    let config = match &args.config {
        Some(path) => harness::parse_config(&fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    let flags = harness::Overrides {
        times: args.times.clone(),
        solvers: args.solvers.clone(),
        j: args.j,
        ordinates: args.ordinates,
        x_min: args.x_min,
        x_max: args.x_max,
        count: args.count,
        ..Default::default()
    };
    args.scenario
        .iter()
        .map(|name| {
            let mut sc = harness::resolve(name, &config)?;
            flags.apply(&mut sc)?;
            Ok(sc)
        })
        .collect()
}

fn profile(args: &ProfileArgs, compare: bool) -> Result<()> {
    let scenarios = load(args)?;
    let mut profiles = Vec::new();
    for sc in &scenarios {
        log::info!("running {} ({})", sc.label, sc.fingerprint());
        profiles.extend(harness::run_scenario(sc)?);
    }
    if compare {
        harness::emit_compare_csv(&profiles, &args.out)?;
    } else {
        harness::emit_csv(&profiles, &args.out)?;
    }
    if let Some(plot) = &args.plot {
        harness::emit_plot_script(&profiles, plot, &args.out, args.logy)?;
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> ExitCode {
    let level = match args.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let report = harness::validate(ValidateOptions { level, j: args.j });
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            if let Err(e) = write(path, &json) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => println!("{json}"),
    }
    for c in report.checks.iter().filter(|c| c.status == harness::Status::Fail) {
        eprintln!("FAIL {} (measured {:?}, tolerance {:e})", c.check, c.measured, c.tolerance);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).map_err(Error::from)
}

fn list_scenarios() {
    println!("{:<8} {:>8} {:>10} {:>7} {:>6}  solvers", "name", "t [min]", "sigma_trap", "gamma", "alpha");
    for sc in harness::builtins() {
        let w = sc.transport.waiting;
        let solvers: Vec<&str> = sc.solvers.iter().map(|s: &Solver| s.tag()).collect();
        println!(
            "{:<8} {:>8} {:>10} {:>7} {:>6}  {}",
            sc.label,
            sc.times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
            sc.transport.sigma_trap,
            w.gamma(),
            w.alpha(),
            solvers.join(",")
        );
    }
}
