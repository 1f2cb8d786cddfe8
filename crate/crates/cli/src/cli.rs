use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use cbe_core::bounds::CorrelationCategory;
use cbe_core::composite::EffectMeasure;
use cbe_core::exec::Exec;
use cbe_core::sizing::VarianceEstimator;
use clap::{Args, Parser, Subcommand};

use crate::error::AppError;
use crate::ops::Command;
use crate::params::{OutputConfig, Params, SearchKind};
use crate::report::{render, render_error, run};
use crate::server::{self, ServerConfig, BIND_ENV, DEFAULT_BIND};

#[derive(Debug, Parser)]
#[command(name = "cbe", version, about = "Sample size and power for trials with a composite binary endpoint")]
pub struct Cli {
    /// TOML config; command-line flags override its keys
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<String>,
    /// Full-precision floats instead of six significant digits
    #[arg(long, global = true)]
    pub raw: bool,
    /// Worker threads (0 or unset: all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Composite rates, effects and joint tables from the component margins
    Derive(InputArgs),
    /// Feasible correlation range and its weak/moderate/strong thirds
    Bounds(InputArgs),
    /// Sample size at one correlation
    Size(InputArgs),
    /// Power of a trial of given size
    Power(InputArgs),
    /// Sample size for each correlation category
    Recommend(InputArgs),
    /// Sample size across the feasible correlation range
    Curve(TableArgs),
    /// Monte Carlo power and type I error over a scenario grid
    Simulate(TableArgs),
    /// Run the HTTP JSON service
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Write the CSV table here ("-" prints it instead of the JSON report)
    #[arg(long, value_name = "FILE")]
    pub csv: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = BIND_ENV, default_value = DEFAULT_BIND)]
    pub bind: String,
    #[arg(long, env = "CBE_STATIC_DIR")]
    pub static_dir: Option<PathBuf>,
    /// Largest number of simulated trials accepted by /api/v1/simulate
    #[arg(long, env = "CBE_MAX_TRIALS")]
    pub max_trials: Option<u64>,
    /// Simulation requests run at once
    #[arg(long, default_value_t = 2)]
    pub max_concurrent_simulations: usize,
}

#[derive(Debug, Default, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Target power
    #[arg(long)]
    pub power: Option<f64>,
    /// Effect measure tested: rd, rr or or
    #[arg(long)]
    pub measure: Option<EffectMeasure>,
    /// pooled or unpooled
    #[arg(long)]
    pub variance: Option<VarianceEstimator>,
    /// Control-arm rate of the first component
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Risk differences of the components
    #[arg(long, allow_negative_numbers = true)]
    pub d1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d2: Option<f64>,
    /// Risk ratios of the components
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    /// Odds ratios of the components
    #[arg(long)]
    pub or1: Option<f64>,
    #[arg(long)]
    pub or2: Option<f64>,
    #[arg(long)]
    pub p1_low: Option<f64>,
    #[arg(long)]
    pub p1_high: Option<f64>,
    #[arg(long)]
    pub p2_low: Option<f64>,
    #[arg(long)]
    pub p2_high: Option<f64>,
    /// Common correlation of the components
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho1: Option<f64>,
    /// weak, moderate, strong or no_prior
    #[arg(long)]
    pub category: Option<CorrelationCategory>,
    /// Total sample size (power)
    #[arg(long)]
    pub n_total: Option<u64>,
    /// Points on the correlation curve
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long, value_enum)]
    pub search: Option<SearchKind>,
    #[arg(long)]
    pub search_points: Option<usize>,
    #[arg(long)]
    pub power_sweep: Option<usize>,
    /// Replications per simulated design
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl InputArgs {
    fn params(&self) -> Params {
        Params {
            alpha: self.alpha,
            power: self.power,
            measure: self.measure,
            variance: self.variance,
            p1: self.p1,
            p2: self.p2,
            d1: self.d1,
            d2: self.d2,
            r1: self.r1,
            r2: self.r2,
            or1: self.or1,
            or2: self.or2,
            p1_low: self.p1_low,
            p1_high: self.p1_high,
            p2_low: self.p2_low,
            p2_high: self.p2_high,
            rho: self.rho,
            rho0: self.rho0,
            rho1: self.rho1,
            category: self.category,
            n_total: self.n_total,
            n_points: self.n_points,
            search: self.search,
            search_points: self.search_points,
            power_sweep: self.power_sweep,
            reps: self.reps,
            seed: self.seed,
            ..Params::default()
        }
    }
}

fn write_file(path: &str, text: &str) -> Result<(), AppError> {
    std::fs::write(path, text).map_err(|e| AppError::Io(format!("cannot write {path}: {e}")))
}

fn load_config(path: &Option<PathBuf>) -> Result<Params, AppError> {
    match path {
        None => Ok(Params::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| AppError::Io(format!("cannot read {}: {e}", p.display())))?;
            Params::from_toml(&text)
        }
    }
}

fn execute(cli: &Cli, cmd: Command, input: &InputArgs, csv: Option<&str>, stdout: &mut dyn Write) -> Result<(), AppError> {
    let flags = Params {
        workers: cli.workers,
        output: Some(OutputConfig {
            out: cli.out.clone(),
            csv: csv.map(str::to_string),
            raw: cli.raw.then_some(true),
        }),
        ..input.params()
    };
    let params = load_config(&cli.config)?.overlay(flags);
    let output = params.output.clone().unwrap_or_default();
    let exec = Exec::from_workers(params.workers);
    let (report, table) = run(cmd, &params, exec)?;
    let text = render(&report, output.raw.unwrap_or(false));

    let mut print = |s: &str| stdout.write_all(s.as_bytes()).map_err(|e| AppError::Io(e.to_string()));
    let csv_to_stdout = output.csv.as_deref() == Some("-");
    if let (Some(path), Some(table)) = (output.csv.as_deref(), table.as_deref()) {
        if csv_to_stdout {
            print(table)?;
        } else {
            write_file(path, table)?;
        }
    }
    match output.out.as_deref() {
        Some(path) => write_file(path, &text)?,
        None if !csv_to_stdout => print(&text)?,
        None => {}
    }
    Ok(())
}

fn serve(args: &ServeArgs, workers: Option<usize>) -> Result<(), AppError> {
    let base = ServerConfig::default();
    let config = ServerConfig {
        static_dir: args.static_dir.clone().unwrap_or(base.static_dir),
        max_trials: args.max_trials.unwrap_or(base.max_trials),
        workers: workers.filter(|&w| w > 0).unwrap_or(base.workers),
        max_concurrent_simulations: args.max_concurrent_simulations,
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| AppError::Io(e.to_string()))?;
    rt.block_on(server::serve(&args.bind, config))
        .map_err(|e| AppError::Io(format!("cannot serve on {}: {e}", args.bind)))
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match &cli.command {
        Sub::Derive(a) => execute(&cli, Command::Derive, a, None, stdout),
        Sub::Bounds(a) => execute(&cli, Command::Bounds, a, None, stdout),
        Sub::Size(a) => execute(&cli, Command::Size, a, None, stdout),
        Sub::Power(a) => execute(&cli, Command::Power, a, None, stdout),
        Sub::Recommend(a) => execute(&cli, Command::Recommend, a, None, stdout),
        Sub::Curve(t) => execute(&cli, Command::Curve, &t.input, t.csv.as_deref(), stdout),
        Sub::Simulate(t) => execute(&cli, Command::Simulate, &t.input, t.csv.as_deref(), stdout),
        Sub::Serve(s) => serve(s, cli.workers),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = stderr.write_all(render_error(&e).as_bytes());
            e.exit_code()
        }
    }
}
