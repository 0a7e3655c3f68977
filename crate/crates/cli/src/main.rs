//! `isingfem`: solve finite element systems with sampler-driven direct
//! search, check cosine measures and benchmark time to target.

mod config;
mod cosine;
mod gen;
mod solve;
mod ttt;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isingfem::ising::Functional;
use isingfem::sampler::SaConfig;
use isingfem::search::{Method, ToleranceMode};
use isingfem::spanning::{MeasureOptions, SetKind};
use isingfem::ttt::TttConfig;

use config::{ProblemSpec, RunConfig, SamplerSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("sampler error: {0}")]
    Sampler(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("tolerance not reached")]
    NotConverged,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Sampler(_) => 3,
            CliError::NotConverged => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "isingfem", version, about = "Ising-sampler direct search for finite element systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and write trace, solution and manifest.
    Solve(SolveArgs),
    /// Estimate the cosine measure of a grid spanning set.
    Cosine(CosineArgs),
    /// Time-to-target comparison for a Hamiltonian or a recorded run.
    Ttt(TttArgs),
    /// Write a problem's linear system to a file.
    GenSystem(GenArgs),
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// poisson1d, poisson2d, wave1d or system
    #[arg(long)]
    problem: Option<String>,
    /// Nodes (per side for poisson2d).
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    case: Option<u32>,
    /// System JSON for `--problem system`.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

impl ProblemArgs {
    fn apply(&self, base: Option<ProblemSpec>) -> Result<ProblemSpec, CliError> {
        let mut p = match (&self.problem, base) {
            (Some(name), _) => ProblemSpec::from_name(name)?,
            (None, Some(p)) => p,
            (None, None) => return Err(CliError::Config("select a problem with --problem or --config".into())),
        };
        if let Some(n) = self.nodes {
            p.set_nodes(n);
        }
        if let Some(c) = self.case {
            p.set_case(c);
        }
        match &mut p {
            ProblemSpec::System { path } => {
                if let Some(s) = &self.system {
                    *path = s.clone();
                }
                if path.as_os_str().is_empty() {
                    return Err(CliError::Config("--problem system needs --system FILE".into()));
                }
            }
            ProblemSpec::Wave1d { dt, steps, .. } => {
                if let Some(v) = self.dt {
                    *dt = v;
                }
                if let Some(v) = self.steps {
                    *steps = v;
                }
            }
            _ => {}
        }
        Ok(p)
    }
}

#[derive(Args)]
struct SolveArgs {
    /// RunConfig JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    method: Option<Method>,
    /// f (energy) or g (least squares)
    #[arg(long)]
    functional: Option<String>,
    /// sa, exhaustive or remote
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Treat the tolerance as an absolute residual.
    #[arg(long)]
    absolute: bool,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    no_expansion: bool,
    /// Keep poll snapshots and write replay.json for `ttt`.
    #[arg(long)]
    record_snapshots: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = self.config.as_deref().map(RunConfig::load).transpose()?;
        let problem = self.problem.apply(base.as_ref().map(|c| c.problem.clone()))?;
        let mut cfg = match base {
            Some(mut c) => {
                c.problem = problem;
                c
            }
            None => RunConfig::new(problem),
        };
        if let Some(name) = &self.sampler {
            cfg.sampler = SamplerSpec::from_name(name)?;
        }
        if let Some(sweeps) = self.sweeps {
            match &mut cfg.sampler {
                SamplerSpec::SimulatedAnnealing(sa) => sa.sweeps = sweeps,
                _ => cfg.sampler = SamplerSpec::SimulatedAnnealing(SaConfig::with_sweeps(sweeps)),
            }
        }
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        let functional = match self.functional.as_deref() {
            None => None,
            Some("f") | Some("energy") => Some(Functional::Energy),
            Some("g") | Some("least_squares") => Some(Functional::LeastSquares),
            Some(other) => return Err(CliError::Config(format!("unknown functional {other:?}"))),
        };
        let s = cfg.search_mut();
        if let Some(m) = self.method {
            s.method = m;
        }
        if functional.is_some() {
            s.functional = functional;
        }
        if let Some(r) = self.reads {
            s.reads = r;
        }
        if let Some(t) = self.tolerance {
            s.tolerance = t;
        }
        if self.absolute {
            s.tolerance_mode = ToleranceMode::Absolute;
        }
        if let Some(a) = self.alpha0 {
            s.alpha0 = Some(a);
        }
        if let Some(m) = self.max_iterations {
            s.max_iterations = m;
        }
        if self.no_expansion {
            s.expansion = false;
        }
        if self.record_snapshots {
            s.record_snapshots = true;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct CosineArgs {
    /// dplus, d2, d3, d4 or d4radix
    #[arg(long)]
    kind: SetKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[derive(Args)]
struct TttArgs {
    /// Hamiltonian JSON or a solve run's replay.json.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated sweep counts.
    #[arg(long, default_value = "10,20,40,100,200,400,1000,2000,4000,10000")]
    grid: String,
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    /// Target percentile of the reference energies.
    #[arg(long, default_value_t = 10.0)]
    q: f64,
    /// sa, exhaustive or remote
    #[arg(long, default_value = "sa")]
    reference: String,
    #[arg(long, default_value_t = 1000)]
    reference_sweeps: usize,
    #[arg(long)]
    reference_time_us: Option<f64>,
    #[arg(long)]
    sweep_time_us: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    job_overhead_us: f64,
    #[arg(long, default_value_t = 0.0)]
    read_overhead_us: f64,
    /// Iterations sampled from a replay.
    #[arg(long, default_value_t = 20)]
    iterations: usize,
    #[arg(long, default_value_t = 2)]
    per_iteration: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "isingfem-ttt")]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// `.mtx` writes the matrix in Matrix Market form, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let cfg = args.resolve()?;
            let manifest = solve::cmd_solve(&cfg)?;
            println!(
                "converged in {} iterations, residual {:e}",
                manifest.iterations,
                manifest.final_residual.unwrap_or(0.0)
            );
            Ok(())
        }
        Command::Cosine(args) => {
            let opts = MeasureOptions { restarts: args.restarts, seed: args.seed, ..MeasureOptions::default() };
            cosine::cmd_cosine(args.kind, args.n, &opts, args.out.as_deref()).map(|_| ())
        }
        Command::Ttt(args) => {
            let grid = parse_grid(&args.grid).map_err(CliError::Config)?;
            let cfg = TttConfig {
                sweep_grid: grid,
                reads: args.reads,
                percentile: args.q,
                seed: args.seed,
                reference_time_us: args.reference_time_us,
                sweep_time_us: args.sweep_time_us,
                per_job_overhead_us: args.job_overhead_us,
                per_read_overhead_us: args.read_overhead_us,
                ..TttConfig::default()
            };
            let reference = match SamplerSpec::from_name(&args.reference)? {
                SamplerSpec::SimulatedAnnealing(_) => {
                    SamplerSpec::SimulatedAnnealing(SaConfig::with_sweeps(args.reference_sweeps))
                }
                other => other,
            }
            .build()?;
            let input = ttt::TttInput::load(&args.input)?;
            ttt::cmd_ttt(&input, reference.as_ref(), &cfg, args.iterations, args.per_iteration, &args.out)
        }
        Command::GenSystem(args) => {
            let problem = args.problem.apply(None)?;
            gen::cmd_gen_system(&problem, &args.out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isingfem: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
