use std::fmt::Write as _;
use std::path::Path;

use isingfem::ising::StandardIsing;
use isingfem::sampler::Sampler;
use isingfem::ttt::{batch_ttt_over_iterations, ttt_compare, BatchReport, TttConfig, TttError};
use serde_json::Value;

use crate::solve::Replay;
use crate::CliError;

pub enum TttInput {
    Hamiltonian(StandardIsing<f64>),
    Replay(Box<Replay>),
}

impl TttInput {
    /// A replay file has a `trace` member; anything else is read as a
    /// Hamiltonian in `{linear, quadratic, offset}` form.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if value.get("trace").is_some() {
            let replay: Replay = serde_json::from_value(value).map_err(|e| CliError::Config(format!("replay: {e}")))?;
            Ok(TttInput::Replay(Box::new(replay)))
        } else {
            let h = StandardIsing::from_json(&value).map_err(|e| CliError::Config(format!("hamiltonian: {e}")))?;
            Ok(TttInput::Hamiltonian(h))
        }
    }
}

fn ttt_error(e: TttError) -> CliError {
    match e {
        TttError::Sampler(e) => CliError::Sampler(e.to_string()),
        TttError::Search(e) => CliError::Config(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(name), contents).map_err(|e| CliError::Io(e.to_string()))
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "inf".to_string(), |x| format!("{x:e}"))
}

pub fn batch_csv(batch: &BatchReport) -> String {
    let mut out = String::from("report,target,reference_ttt_us,best_sweeps,best_ttt_us,ratio\n");
    for (k, r) in batch.reports.iter().enumerate() {
        let best = r.best_row();
        let _ = writeln!(
            out,
            "{k},{:e},{},{},{},{}",
            r.target,
            fmt(r.reference.ttt_us),
            best.and_then(|b| b.sweeps).map_or_else(String::new, |s| s.to_string()),
            fmt(best.and_then(|b| b.ttt_us)),
            fmt(r.ratio())
        );
    }
    out
}

pub fn cmd_ttt(
    input: &TttInput,
    reference: &dyn Sampler<f64>,
    cfg: &TttConfig,
    iterations: usize,
    per_iteration: usize,
    out: &Path,
) -> Result<(), CliError> {
    cfg.validate().map_err(ttt_error)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(e.to_string()))?;
    match input {
        TttInput::Hamiltonian(h) => {
            let report = ttt_compare(h, reference, cfg).map_err(ttt_error)?;
            write(out, "ttt_report.csv", &report.to_csv())?;
            write(out, "ttt_report.json", &report.to_json().expect("report serializes"))?;
            println!("target {:e}  ratio {}", report.target, fmt(report.ratio()));
            Ok(())
        }
        TttInput::Replay(replay) => {
            let sys = replay
                .system
                .clone()
                .into_system()
                .map_err(|e| CliError::Config(e.to_string()))?;
            let batch = batch_ttt_over_iterations(
                &sys,
                &replay.trace,
                replay.method,
                replay.functional,
                iterations,
                per_iteration,
                reference,
                cfg,
            )
            .map_err(ttt_error)?;
            write(out, "ttt_batch.csv", &batch_csv(&batch))?;
            write(out, "ttt_batch.json", &serde_json::to_string_pretty(&batch).expect("report serializes"))?;
            println!(
                "{} hamiltonians from {} iterations  mean ratio {}",
                batch.reports.len(),
                batch.iterations.len(),
                fmt(batch.aggregate.mean_ratio)
            );
            Ok(())
        }
    }
}
