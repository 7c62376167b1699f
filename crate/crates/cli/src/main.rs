use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use galerkin_collage::ObjectiveMode;
use galerkin_collage_cli::{
    cmd_forward, cmd_inverse, load_config, table1_config, table2_config, write_output, CliError, ConfigError,
    RunConfig,
};

#[derive(Parser)]
#[command(name = "galerkin-collage", version, about = "Schauder-basis Galerkin solver and collage-type coefficient identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward problem for every `m` and print the error table.
    Forward(Opts),
    /// Recover (lambda1, lambda2) from forward solutions used as targets.
    Inverse(Opts),
    /// `forward` on the built-in benchmark, m = 3, 7, 15, 31, 63.
    Table1(Opts),
    /// `inverse` on the built-in benchmark, targets m = 3, 7, 15, 31.
    Table2(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Run configuration (`key = value` lines). Required for forward/inverse.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Objective: paper-abs-sum, l1, l2 or dual-norm.
    #[arg(long)]
    mode: Option<ObjectiveMode>,
    /// Grid points per axis for the coarse scan.
    #[arg(long)]
    grid: Option<usize>,
    /// Number of test functions in the residual.
    #[arg(long)]
    n: Option<usize>,
    /// gnuplot data file with sampled solutions (forward commands).
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl Opts {
    fn apply(&self, mut config: RunConfig) -> Result<RunConfig, CliError> {
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
        if let Some(grid) = self.grid {
            if grid < 2 {
                return Err(ConfigError::Invalid("--grid needs at least 2 points".into()).into());
            }
            config.grid = grid;
        }
        if let Some(n) = self.n {
            if n == 0 {
                return Err(ConfigError::Invalid("--n must be at least 1".into()).into());
            }
            config.n = n;
        }
        if self.out.is_some() {
            config.out.clone_from(&self.out);
        }
        if self.plot.is_some() {
            config.plot.clone_from(&self.plot);
        }
        Ok(config)
    }

    fn load(&self) -> Result<RunConfig, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("--config <path> is required".into()))?;
        self.apply(load_config(path)?)
    }
}

fn forward(config: &RunConfig) -> Result<(), CliError> {
    let out = cmd_forward(config)?;
    write_output(config.out.as_deref(), &out.csv)?;
    if let Some(plot) = &config.plot {
        write_output(Some(plot), &out.plot)?;
    }
    Ok(())
}

fn inverse(config: &RunConfig) -> Result<(), CliError> {
    let out = cmd_inverse(config)?;
    for row in out.rows.iter().filter(|r| !r.identifiable) {
        eprintln!("warning: target m = {}: lambda not identifiable, grid result reported", row.target_m);
    }
    write_output(config.out.as_deref(), &out.csv)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Forward(opts) => forward(&opts.load()?),
        Command::Inverse(opts) => inverse(&opts.load()?),
        Command::Table1(opts) => forward(&opts.apply(table1_config())?),
        Command::Table2(opts) => inverse(&opts.apply(table2_config())?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
