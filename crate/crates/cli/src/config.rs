use std::path::{Path, PathBuf};

use isingfem::fem::{
    assemble_poisson_1d, ramp_forcing, BoundarySpec, LinearSystem, Mesh1D, Mesh2D, Poisson2dCase, SystemFile,
    WaveCase, WaveProblem,
};
use isingfem::sampler::{ExhaustiveSampler, RemoteConfig, RemoteSampler, SaConfig, Sampler, SimulatedAnnealer};
use isingfem::search::{SearchConfig, ToleranceMode};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Poisson1d {
        nodes: usize,
        #[serde(default = "unit")]
        length: f64,
    },
    Poisson2d {
        case: u32,
        nodes: usize,
        #[serde(default = "unit")]
        length: f64,
    },
    Wave1d {
        case: u32,
        nodes: usize,
        #[serde(default = "unit")]
        length: f64,
        #[serde(default = "unit")]
        speed: f64,
        #[serde(default = "default_dt")]
        dt: f64,
        #[serde(default = "default_steps")]
        steps: usize,
    },
    System {
        path: PathBuf,
    },
}

fn unit() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    0.05
}
fn default_steps() -> usize {
    4
}

impl ProblemSpec {
    /// Default spec for a problem name, used when flags select the problem.
    pub fn from_name(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "poisson1d" => ProblemSpec::Poisson1d { nodes: 25, length: 1.0 },
            "poisson2d" => ProblemSpec::Poisson2d { case: 1, nodes: 5, length: 1.0 },
            "wave1d" => ProblemSpec::Wave1d {
                case: 1,
                nodes: 51,
                length: 1.0,
                speed: 1.0,
                dt: default_dt(),
                steps: default_steps(),
            },
            "system" => ProblemSpec::System { path: PathBuf::new() },
            other => return Err(CliError::Config(format!("unknown problem {other:?}"))),
        })
    }

    pub fn set_nodes(&mut self, n: usize) {
        match self {
            ProblemSpec::Poisson1d { nodes, .. }
            | ProblemSpec::Poisson2d { nodes, .. }
            | ProblemSpec::Wave1d { nodes, .. } => *nodes = n,
            ProblemSpec::System { .. } => {}
        }
    }

    pub fn set_case(&mut self, c: u32) {
        match self {
            ProblemSpec::Poisson2d { case, .. } | ProblemSpec::Wave1d { case, .. } => *case = c,
            _ => {}
        }
    }

    /// Static system; `None` for the wave problem, which is stepped.
    pub fn build_static(&self) -> Result<Option<LinearSystem<f64>>, CliError> {
        let cfg = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
        match self {
            ProblemSpec::Poisson1d { nodes, length } => {
                let mesh = Mesh1D::new(*length, *nodes).map_err(|e| cfg(&e))?;
                let f = ramp_forcing(&mesh);
                let sys = assemble_poisson_1d(&mesh, &f, BoundarySpec::fixed_ends(*nodes)).map_err(|e| cfg(&e))?;
                Ok(Some(sys))
            }
            ProblemSpec::Poisson2d { case, nodes, length } => {
                let case = Poisson2dCase::from_number(*case)
                    .ok_or_else(|| CliError::Config(format!("poisson2d has cases 1 and 2, got {case}")))?;
                let mesh = Mesh2D::new(*length, *nodes).map_err(|e| cfg(&e))?;
                Ok(Some(case.assemble(&mesh).map_err(|e| cfg(&e))?))
            }
            ProblemSpec::System { path } => Ok(Some(load_system(path)?)),
            ProblemSpec::Wave1d { .. } => Ok(None),
        }
    }

    pub fn build_wave(&self) -> Result<Option<(WaveProblem<f64>, f64, usize)>, CliError> {
        let ProblemSpec::Wave1d { case, nodes, length, speed, dt, steps } = self else {
            return Ok(None);
        };
        let case = WaveCase::from_number(*case)
            .ok_or_else(|| CliError::Config(format!("wave1d has cases 1 to 5, got {case}")))?;
        if !(*dt > 0.0 && dt.is_finite()) {
            return Err(CliError::Config("dt must be positive".into()));
        }
        let mesh = Mesh1D::new(*length, *nodes).map_err(|e| CliError::Config(e.to_string()))?;
        let problem = WaveProblem::new(mesh, case, *speed).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Some((problem, *dt, *steps)))
    }
}

pub fn load_system(path: &Path) -> Result<LinearSystem<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read system {}: {e}", path.display())))?;
    SystemFile::from_json(&text)
        .and_then(SystemFile::into_system)
        .map_err(|e| CliError::Config(format!("system {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerSpec {
    SimulatedAnnealing(SaConfig),
    Exhaustive,
    Remote(RemoteConfig),
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec::SimulatedAnnealing(SaConfig::default())
    }
}

impl SamplerSpec {
    pub fn from_name(name: &str) -> Result<Self, CliError> {
        match name {
            "sa" | "simulated_annealing" => Ok(Self::default()),
            "exhaustive" => Ok(SamplerSpec::Exhaustive),
            "remote" => RemoteConfig::from_env().map(SamplerSpec::Remote).ok_or_else(|| {
                CliError::Config(format!(
                    "remote sampler needs an endpoint in {}",
                    isingfem::sampler::ENDPOINT_ENV
                ))
            }),
            other => Err(CliError::Config(format!("unknown sampler {other:?}"))),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Sampler<f64>>, CliError> {
        Ok(match self {
            SamplerSpec::SimulatedAnnealing(cfg) => {
                Box::new(SimulatedAnnealer::new(cfg.clone()).map_err(|e| CliError::Config(e.to_string()))?)
            }
            SamplerSpec::Exhaustive => Box::new(ExhaustiveSampler),
            SamplerSpec::Remote(cfg) => Box::new(RemoteSampler::http(cfg.clone().with_env_token())),
        })
    }
}

/// One reproducible solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    /// Unset picks the problem's default: relative `1e-5`, or absolute
    /// `1e-4` per time step for the wave problem.
    #[serde(default)]
    pub search: Option<SearchConfig>,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    /// Overrides `search.seed`.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_out() -> PathBuf {
    PathBuf::from("isingfem-out")
}

impl RunConfig {
    pub fn new(problem: ProblemSpec) -> Self {
        Self { problem, search: None, sampler: SamplerSpec::default(), output_dir: default_out(), seed: None }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Search settings with problem defaults and the seed override applied.
    pub fn search_config(&self) -> SearchConfig {
        let mut s = self.search.clone().unwrap_or_else(|| match self.problem {
            ProblemSpec::Wave1d { .. } => SearchConfig {
                tolerance: 1e-4,
                tolerance_mode: ToleranceMode::Absolute,
                ..SearchConfig::default()
            },
            _ => SearchConfig::default(),
        });
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    pub fn search_mut(&mut self) -> &mut SearchConfig {
        let s = self.search_config();
        self.search.insert(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::from_json(r#"{"problem": {"kind": "poisson1d", "nodes": 11}}"#).unwrap();
        assert_eq!(cfg.problem, ProblemSpec::Poisson1d { nodes: 11, length: 1.0 });
        assert_eq!(cfg.sampler, SamplerSpec::default());
        assert_eq!(cfg.search_config(), SearchConfig::default());
    }

    #[test]
    fn wave_defaults_to_absolute_tolerance() {
        let cfg = RunConfig::new(ProblemSpec::from_name("wave1d").unwrap());
        let s = cfg.search_config();
        assert_eq!(s.tolerance_mode, ToleranceMode::Absolute);
        assert_eq!(s.tolerance, 1e-4);
    }

    #[test]
    fn parses_full_config() {
        let text = r#"{
            "problem": {"kind": "wave1d", "case": 2, "nodes": 21, "dt": 0.01, "steps": 2},
            "search": {"method": "poll3", "reads": 5},
            "sampler": {"kind": "simulated_annealing", "sweeps": 200},
            "output_dir": "out",
            "seed": 9
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let s = cfg.search_config();
        assert_eq!(s.reads, 5);
        assert_eq!(s.seed, 9);
        assert_eq!(
            cfg.sampler,
            SamplerSpec::SimulatedAnnealing(SaConfig { sweeps: 200, ..SaConfig::default() })
        );
        assert!(cfg.problem.build_wave().unwrap().is_some());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_json("{").is_err());
        assert!(RunConfig::from_json(r#"{"problem": {"kind": "heat"}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"problem": {"kind": "poisson1d", "nodes": 5}, "extra": 1}"#).is_err());
        let bad_case = ProblemSpec::Poisson2d { case: 3, nodes: 5, length: 1.0 };
        assert!(bad_case.build_static().is_err());
    }
}
