//! `pminimal`: generate p-minimal tubes and graphs and run the verification
//! suite on them.
//!
//! Exit codes: 0 when everything passed, 1 when a check failed, 2 on bad
//! input or options, 3 when the graph solver did not converge.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod builtins;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use builtins::Builtin;
use commands::Input;
use config::{parse_tolerance, rewrite_tolerance_flags, Boundary, SuiteConfig};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pminimal::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(pminimal::Error::Convergence { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "pminimal", version, about = "Laboratory for p-minimal tubes and graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the equality profile and write profile.csv, surface.csv and tube.json.
    GenerateTube(Overrides),
    /// Solve the Dirichlet problem for a p-minimal graph and write graph.csv.
    SolveGraph(Overrides),
    /// Run the verification suite and write report.json.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print a saved report.json as a table.
    Report {
        #[arg(default_value = "out/report.json")]
        path: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Directory written by generate-tube.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// graph.csv written by solve-graph; runs the Gauss-map check only.
    #[arg(long)]
    graph: Option<PathBuf>,
}

/// Flags override the `--config` file, which overrides the defaults.
#[derive(Args)]
struct Overrides {
    /// JSON file with any subset of the configuration fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Sets p = 1 + (n - 1) / beta.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    tau_span: Option<f64>,
    #[arg(long)]
    theta_count: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long, value_enum)]
    boundary: Option<Boundary>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated check names; all checks by default.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Tolerance override, also spelled `--tol.NAME=VALUE`.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
}

impl Overrides {
    fn resolve(self) -> Result<SuiteConfig, Failure> {
        let mut c = match &self.config {
            Some(path) => SuiteConfig::load(path)?,
            None => SuiteConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { c.$field = v; })* };
        }
        set!(n, r, h, tau_span, theta_count, grid, refine, boundary, seed, trials, resolution, out, checks);
        if self.p.is_some() {
            c.p = self.p;
            c.beta = None;
        }
        if self.beta.is_some() {
            c.beta = self.beta;
        }
        c.tolerances.extend(self.tolerances);
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::GenerateTube(o) => commands::generate_tube(&o.resolve()?).map(|_| true),
        Command::SolveGraph(o) => commands::solve_graph(&o.resolve()?).map(|_| true),
        Command::Verify { source, overrides } => {
            let config = overrides.resolve()?;
            let input = match (source.input, source.builtin, source.graph) {
                (Some(dir), _, _) => Input::Dir(dir),
                (_, Some(b), _) => Input::Builtin(b),
                (_, _, Some(g)) => Input::Graph(g),
                _ => unreachable!("clap requires one source"),
            };
            commands::verify(input, &config)
        }
        Command::Report { path } => commands::report(&path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(rewrite_tolerance_flags(std::env::args()));
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
