use std::path::Path;

use isingfem::fem::{write_matrix_market, LinearSystem, SystemFile};

use crate::config::ProblemSpec;
use crate::CliError;

/// System of a problem; the wave problem yields its first Newmark step.
pub fn problem_system(problem: &ProblemSpec) -> Result<LinearSystem<f64>, CliError> {
    if let Some(sys) = problem.build_static()? {
        return Ok(sys);
    }
    let (wave, dt, _) = problem.build_wave()?.expect("wave problem");
    let state = wave.initial_state(dt).map_err(|e| CliError::Config(e.to_string()))?;
    state
        .effective_system(wave.stiffness())
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Writes JSON, or the matrix alone in Matrix Market form for `.mtx` paths.
pub fn cmd_gen_system(problem: &ProblemSpec, out: &Path) -> Result<(), CliError> {
    let sys = problem_system(problem)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", out.display()));
    if out.extension().is_some_and(|e| e == "mtx") {
        let file = std::fs::File::create(out).map_err(io)?;
        write_matrix_market(sys.matrix(), std::io::BufWriter::new(file)).map_err(io)?;
    } else {
        std::fs::write(out, SystemFile::from_system(&sys).to_json()).map_err(io)?;
    }
    Ok(())
}
