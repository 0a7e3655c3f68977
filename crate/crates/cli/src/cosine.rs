use std::path::Path;

use isingfem::spanning::{cosine_measure, generate, is_positive_spanning, CosineMeasureReport, MeasureOptions, SetKind};

use crate::CliError;

/// Largest gap between estimate and closed form that counts as agreement.
pub const CHECK_TOLERANCE: f64 = 1e-3;

pub fn cmd_cosine(
    kind: SetKind,
    n: usize,
    opts: &MeasureOptions,
    out: Option<&Path>,
) -> Result<CosineMeasureReport, CliError> {
    let set = generate(kind, n).map_err(|e| CliError::Config(e.to_string()))?;
    let report = cosine_measure(&set, opts).map_err(|e| CliError::Config(e.to_string()))?;
    print!("{}", report.to_table());
    if n <= 12 {
        println!("spanning    {}", is_positive_spanning(&set).spanning);
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(e.to_string()))?;
        let name = format!("cosine_{}_{n}.json", format!("{kind:?}").to_lowercase());
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(dir.join(name), json).map_err(|e| CliError::Io(e.to_string()))?;
    }
    match report.closed_form {
        Some(exact) if (report.estimate - exact).abs() > CHECK_TOLERANCE => Err(CliError::NotConverged),
        _ => Ok(report),
    }
}
