use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Sample, Sampler, SamplerError};
use crate::ising::{Spin, StandardIsing};
use crate::scalar::Real;

pub const ENDPOINT_ENV: &str = "ISINGFEM_ENDPOINT";
pub const TOKEN_ENV: &str = "ISINGFEM_TOKEN";

/// Connection and problem-range settings for a remote annealer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub endpoint: String,
    #[serde(default, skip_serializing)]
    pub token: Option<String>,
    #[serde(default = "default_anneal")]
    pub annealing_time_us: f64,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    /// Rescale out-of-range problems instead of failing.
    #[serde(default)]
    pub auto_rescale: bool,
    #[serde(default = "default_h_range")]
    pub h_range: f64,
    #[serde(default = "default_j_range")]
    pub j_range: f64,
}

fn default_anneal() -> f64 {
    20.0
}
fn default_timeout() -> u64 {
    30_000
}
fn default_retries() -> usize {
    3
}
fn default_backoff() -> u64 {
    250
}
fn default_h_range() -> f64 {
    2.0
}
fn default_j_range() -> f64 {
    1.0
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            token: None,
            annealing_time_us: default_anneal(),
            timeout_ms: default_timeout(),
            max_retries: default_retries(),
            backoff_ms: default_backoff(),
            auto_rescale: false,
            h_range: default_h_range(),
            j_range: default_j_range(),
        }
    }

    /// Endpoint and token from the environment; `None` without an endpoint.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty())?;
        let mut cfg = Self::new(endpoint);
        cfg.token = std::env::var(TOKEN_ENV).ok().filter(|s| !s.is_empty());
        Some(cfg)
    }

    /// Fills a missing token from the environment.
    pub fn with_env_token(mut self) -> Self {
        if self.token.is_none() {
            self.token = std::env::var(TOKEN_ENV).ok().filter(|s| !s.is_empty());
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    /// Timeouts, dropped connections, 429 and 5xx responses.
    #[error("{0}")]
    Retriable(String),
    #[error("{0}")]
    Fatal(String),
}

/// Posts a JSON request and returns the JSON reply.
pub trait Transport: Send + Sync {
    fn post(
        &self,
        endpoint: &str,
        token: Option<&str>,
        body: &Value,
        timeout: Duration,
    ) -> Result<Value, TransportError>;
}

/// Blocking HTTP transport; the token goes in a bearer `Authorization` header.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn post(
        &self,
        endpoint: &str,
        token: Option<&str>,
        body: &Value,
        timeout: Duration,
    ) -> Result<Value, TransportError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        let mut req = agent.post(endpoint).header("Accept", "application/json");
        if let Some(t) = token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req.send_json(body).map_err(classify)?;
        resp.body_mut()
            .read_json::<Value>()
            .map_err(|e| TransportError::Fatal(format!("response is not JSON: {e}")))
    }
}

fn classify(e: ureq::Error) -> TransportError {
    use ureq::Error as E;
    match e {
        E::StatusCode(code) if code == 429 || code >= 500 => {
            TransportError::Retriable(format!("HTTP status {code}"))
        }
        E::StatusCode(code) => TransportError::Fatal(format!("HTTP status {code}")),
        E::Timeout(_) | E::Io(_) | E::ConnectionFailed | E::HostNotFound | E::BodyStalled => {
            TransportError::Retriable(e.to_string())
        }
        other => TransportError::Fatal(other.to_string()),
    }
}

/// Samples from one remote call, with any energy-mismatch warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct RemoteBatch<T> {
    pub samples: Vec<Sample<T>>,
    pub warnings: Vec<String>,
    /// Factor the problem was divided by before sending (1 if unscaled).
    pub scale: T,
    pub retries: usize,
}

pub struct RemoteSampler<Tr = HttpTransport> {
    pub config: RemoteConfig,
    transport: Tr,
    warnings: Mutex<Vec<String>>,
}

impl RemoteSampler<HttpTransport> {
    pub fn http(config: RemoteConfig) -> Self {
        Self::with_transport(config, HttpTransport)
    }
}

impl<Tr: Transport> RemoteSampler<Tr> {
    pub fn with_transport(config: RemoteConfig, transport: Tr) -> Self {
        Self {
            config,
            transport,
            warnings: Mutex::new(Vec::new()),
        }
    }

    /// Warnings accumulated by [`Sampler::sample`] calls, drained.
    pub fn take_warnings(&self) -> Vec<String> {
        std::mem::take(&mut *self.warnings.lock().expect("warning lock"))
    }

    /// Sends `h` (rescaled if allowed and needed) and parses the reply.
    /// Returned energies are always the local evaluation on the unscaled `h`.
    pub fn remote_sample<T: Real>(
        &self,
        h: &StandardIsing<T>,
        reads: usize,
    ) -> Result<RemoteBatch<T>, SamplerError> {
        if reads == 0 {
            return Err(SamplerError::NoReads);
        }
        let cfg = &self.config;
        let in_range = h.max_abs_bias().as_f64() <= cfg.h_range && h.max_abs_coupling().as_f64() <= cfg.j_range;
        let (sent, scale) = if in_range {
            (h.clone(), T::one())
        } else if cfg.auto_rescale {
            h.rescaled()
        } else {
            return Err(SamplerError::RangeViolation {
                max_bias: h.max_abs_bias().as_f64(),
                max_coupling: h.max_abs_coupling().as_f64(),
            });
        };
        let body = serde_json::json!({
            "ising": sent.to_json(),
            "num_reads": reads,
            "annealing_time_us": cfg.annealing_time_us,
        });
        let (reply, retries) = self.post_with_retry(&body)?;
        let (samples, warnings) = parse_response(h, &reply, reads, scale)?;
        Ok(RemoteBatch {
            samples,
            warnings,
            scale,
            retries,
        })
    }

    fn post_with_retry(&self, body: &Value) -> Result<(Value, usize), SamplerError> {
        let cfg = &self.config;
        let timeout = Duration::from_millis(cfg.timeout_ms);
        let mut retries = 0;
        loop {
            match self
                .transport
                .post(&cfg.endpoint, cfg.token.as_deref(), body, timeout)
            {
                Ok(v) => return Ok((v, retries)),
                Err(TransportError::Retriable(msg)) if retries < cfg.max_retries => {
                    retries += 1;
                    log::warn!("remote sampler attempt {retries} failed: {msg}; retrying");
                    if cfg.backoff_ms > 0 {
                        std::thread::sleep(Duration::from_millis(cfg.backoff_ms << (retries - 1).min(6)));
                    }
                }
                Err(TransportError::Retriable(message)) | Err(TransportError::Fatal(message)) => {
                    return Err(SamplerError::Remote { message, retries });
                }
            }
        }
    }
}

fn parse_response<T: Real>(
    h: &StandardIsing<T>,
    reply: &Value,
    reads: usize,
    scale: T,
) -> Result<(Vec<Sample<T>>, Vec<String>), SamplerError> {
    let bad = |m: String| SamplerError::MalformedResponse(m);
    let rows = reply
        .get("samples")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing samples array".into()))?;
    let energies = reply
        .get("energies")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing energies array".into()))?;
    if energies.len() != rows.len() {
        return Err(bad(format!(
            "{} energies for {} samples",
            energies.len(),
            rows.len()
        )));
    }
    let counts: Vec<u64> = match reply.get("num_occurrences") {
        None | Some(Value::Null) => vec![1; rows.len()],
        Some(v) => {
            let arr = v.as_array().ok_or_else(|| bad("num_occurrences must be an array".into()))?;
            if arr.len() != rows.len() {
                return Err(bad("num_occurrences length differs from samples".into()));
            }
            arr.iter()
                .map(|c| c.as_u64().ok_or_else(|| bad("bad occurrence count".into())))
                .collect::<Result<_, _>>()?
        }
    };

    let n = h.n();
    let mut out = Vec::with_capacity(reads);
    let mut warnings = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let arr = row.as_array().ok_or_else(|| bad(format!("sample {r} is not an array")))?;
        if arr.len() != n {
            return Err(bad(format!("sample {r} has {} spins, expected {n}", arr.len())));
        }
        let spins: Vec<Spin> = arr
            .iter()
            .map(|s| match s.as_i64() {
                Some(1) => Ok(1),
                Some(-1) => Ok(-1),
                _ => Err(bad(format!("sample {r} has a spin other than +1/-1"))),
            })
            .collect::<Result<_, _>>()?;
        let reported = energies[r]
            .as_f64()
            .ok_or_else(|| bad(format!("energy {r} is not a number")))?;
        let sample = Sample::evaluate(h, spins);
        let reported = reported * scale.as_f64();
        if (reported - sample.energy.as_f64()).abs() > 1e-6 {
            let msg = format!(
                "sample {r}: reported energy {reported} differs from local {}; using local",
                sample.energy
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        for _ in 0..counts[r] {
            out.push(sample.clone());
        }
    }
    if out.len() < reads {
        return Err(bad(format!("{} reads returned, {reads} requested", out.len())));
    }
    out.truncate(reads);
    Ok((out, warnings))
}

impl<T: Real, Tr: Transport> Sampler<T> for RemoteSampler<Tr> {
    fn sample(&self, h: &StandardIsing<T>, reads: usize, _seed: u64) -> Result<Vec<Sample<T>>, SamplerError> {
        let batch = self.remote_sample(h, reads)?;
        self.warnings
            .lock()
            .expect("warning lock")
            .extend(batch.warnings);
        Ok(batch.samples)
    }

    fn name(&self) -> &str {
        "remote"
    }

    fn time_per_sample_us(&self) -> Option<f64> {
        Some(self.config.annealing_time_us)
    }
}
