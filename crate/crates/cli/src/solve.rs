use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use isingfem::fem::{newmark_step, LinearSystem, SystemFile, WaveProblem};
use isingfem::ising::Functional;
use isingfem::sampler::Sampler;
use isingfem::search::{run, Method, SearchConfig, SearchError, SearchTrace, Termination};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

/// A finished static solve with the snapshots needed to rebuild its
/// Hamiltonians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    pub system: SystemFile<f64>,
    pub method: Method,
    pub functional: Functional,
    pub trace: SearchTrace<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub time: f64,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub started_at: String,
    pub finished_at: String,
    /// Files written to the output directory, manifest excluded.
    pub outputs: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub normalized_residual: Option<f64>,
    pub termination: Option<Termination>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepSummary>,
    pub failure: Option<String>,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

fn search_error(e: SearchError) -> CliError {
    match e {
        SearchError::Sampler(e) => CliError::Sampler(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn to_json<S: Serialize>(v: &S) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

/// Runs the configured problem, writing traces, solution and manifest to the
/// output directory. The manifest is written on every path once the
/// directory exists.
pub fn cmd_solve(cfg: &RunConfig) -> Result<RunManifest, CliError> {
    let search = cfg.search_config();
    search.validate().map_err(search_error)?;
    let sampler = cfg.sampler.build()?;
    let static_sys = cfg.problem.build_static()?;
    let wave = cfg.problem.build_wave()?;

    let mut out = Outputs::create(&cfg.output_dir)?;
    let mut manifest = RunManifest {
        tool: "isingfem".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        started_at: now(),
        finished_at: String::new(),
        outputs: Vec::new(),
        converged: false,
        iterations: 0,
        final_residual: None,
        normalized_residual: None,
        termination: None,
        steps: Vec::new(),
        failure: None,
    };
    let result = match (static_sys, wave) {
        (Some(sys), _) => solve_static(&sys, &search, sampler.as_ref(), &mut out, &mut manifest),
        (None, Some((problem, dt, steps))) => {
            solve_wave(&problem, dt, steps, &search, sampler.as_ref(), &mut out, &mut manifest)
        }
        (None, None) => Err(CliError::Config("no problem selected".into())),
    };
    if let Err(e) = &result {
        manifest.failure = Some(e.to_string());
    } else if !manifest.converged {
        manifest.failure = Some(CliError::NotConverged.to_string());
    }
    manifest.finished_at = now();
    manifest.outputs = out.written.clone();
    out.write(MANIFEST, &to_json(&manifest))?;
    result?;
    if manifest.converged {
        Ok(manifest)
    } else {
        Err(CliError::NotConverged)
    }
}

fn solve_static(
    sys: &LinearSystem<f64>,
    search: &SearchConfig,
    sampler: &dyn Sampler<f64>,
    out: &mut Outputs,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let trace = run(sys, search, sampler).map_err(search_error)?;
    out.write("trace.csv", &trace.to_csv())?;
    let mut csv = String::from("node,u\n");
    for (i, v) in trace.solution.iter().enumerate() {
        let _ = writeln!(csv, "{i},{v:e}");
    }
    out.write("solution.csv", &csv)?;
    if search.record_snapshots {
        let replay = Replay {
            system: SystemFile::from_system(sys),
            method: search.method,
            functional: search.functional_for(sys),
            trace: trace.clone(),
        };
        out.write("replay.json", &to_json(&replay))?;
    }
    manifest.converged = trace.converged();
    manifest.iterations = trace.iterations();
    manifest.final_residual = Some(trace.final_residual());
    manifest.normalized_residual = Some(trace.normalized_residual());
    manifest.termination = Some(trace.termination);
    Ok(())
}

fn solve_wave(
    problem: &WaveProblem<f64>,
    dt: f64,
    steps: usize,
    search: &SearchConfig,
    sampler: &dyn Sampler<f64>,
    out: &mut Outputs,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let n = problem.mesh.node_count();
    let mut header = String::from("step,time");
    for i in 0..n {
        let _ = write!(header, ",u{i}");
    }
    let row = |step: usize, time: f64, u: &[f64]| {
        let mut line = format!("{step},{time:e}");
        for v in u {
            let _ = write!(line, ",{v:e}");
        }
        line
    };
    let mut state = problem.initial_state(dt).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rows = vec![header, row(0, state.time, &state.u)];
    manifest.converged = true;

    for step in 1..=steps {
        let step_cfg = SearchConfig {
            seed: search.seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            ..search.clone()
        };
        let mut failed = None;
        let mut trace = None;
        let next = newmark_step(&state, problem.stiffness(), |sys| match run(sys, &step_cfg, sampler) {
            Ok(t) => {
                let u = t.solution.clone();
                trace = Some(t);
                Ok(u)
            }
            Err(e) => {
                let msg = e.to_string();
                failed = Some(e);
                Err(msg)
            }
        });
        if let Some(e) = failed {
            out.write("solution.csv", &(rows.join("\n") + "\n"))?;
            return Err(search_error(e));
        }
        state = next.map_err(|e| CliError::Config(e.to_string()))?;
        let trace = trace.expect("step produced a trace");
        out.write(&format!("trace_step{step}.csv"), &trace.to_csv())?;
        rows.push(row(step, state.time, &state.u));
        manifest.steps.push(StepSummary {
            step,
            time: state.time,
            iterations: trace.iterations(),
            final_residual: trace.final_residual(),
            converged: trace.converged(),
        });
        manifest.converged &= trace.converged();
        manifest.iterations += trace.iterations();
        let worst = manifest.final_residual.unwrap_or(0.0).max(trace.final_residual());
        manifest.final_residual = Some(worst);
        manifest.termination = Some(match (manifest.termination, trace.termination) {
            (Some(t), _) if t != Termination::Converged => t,
            (_, t) => t,
        });
    }
    out.write("solution.csv", &(rows.join("\n") + "\n"))?;
    Ok(())
}
