use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::OddFunction;
use crate::geodesics::{PeriodOptions, DEFAULT_CLOSURE_TOL, DEFAULT_HORIZON, DEFAULT_TOL};

pub const DEFAULT_NODES: usize = 2048;
pub const DEFAULT_SAMPLES: usize = 32;
pub const MIN_NODES: usize = 64;
/// Largest period spread still certified as Zoll.
pub const DEFAULT_SPREAD_TOL: f64 = 1e-5;
pub const DEFAULT_FLOW_HORIZON: f64 = 0.1;
pub const DEFAULT_CHECKPOINT_EVERY: f64 = 0.01;
pub const DEFAULT_LPRIME_OFFSETS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
/// `|l'(0)|` above which a certified Zoll input raises the contradiction flag.
pub const DEFAULT_LPRIME_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Round,
    GongRaw,
    GongNormalized,
    /// Coefficients `a_k` of `h(x) = sum a_k x^(2k+1)`.
    Michel { coeffs: Vec<f64> },
}

impl SurfaceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceSpec::Round => "round",
            SurfaceSpec::GongRaw => "gong_raw",
            SurfaceSpec::GongNormalized => "gong_normalized",
            SurfaceSpec::Michel { .. } => "michel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridOptions {
    pub n_nodes: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { n_nodes: DEFAULT_NODES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicOptions {
    pub n_samples: usize,
    pub tol: f64,
    pub closure_tol: f64,
    pub horizon: f64,
    pub spread_tol: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            closure_tol: DEFAULT_CLOSURE_TOL,
            horizon: DEFAULT_HORIZON,
            spread_tol: DEFAULT_SPREAD_TOL,
        }
    }
}

impl GeodesicOptions {
    pub fn period_options(&self) -> PeriodOptions {
        PeriodOptions { tol: self.tol, closure_tol: self.closure_tol, horizon: self.horizon }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowOptions {
    /// Flow horizon. `flow` falls back to [`DEFAULT_FLOW_HORIZON`]; the other
    /// commands evolve first only when it is set.
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub checkpoint_every: f64,
    /// Cap on the time step, under the stability bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Run a period sweep at every checkpoint.
    pub sweeps: bool,
    pub lprime_offsets: Vec<f64>,
    pub lprime_threshold: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            horizon: None,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            dt: None,
            sweeps: false,
            lprime_offsets: DEFAULT_LPRIME_OFFSETS.to_vec(),
            lprime_threshold: DEFAULT_LPRIME_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub grid: GridOptions,
    pub geodesics: GeodesicOptions,
    pub flow: FlowOptions,
    pub output: OutputOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            surface: SurfaceSpec::Round,
            grid: GridOptions::default(),
            geodesics: GeodesicOptions::default(),
            flow: FlowOptions::default(),
            output: OutputOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("config parse error: {0}")]
    Parse(String),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

fn positive(field: &'static str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let SurfaceSpec::Michel { coeffs } = &self.surface {
            OddFunction::new(coeffs.clone()).map_err(|e| invalid("surface.coeffs", e.to_string()))?;
        }
        if self.grid.n_nodes < MIN_NODES {
            return Err(invalid("grid.n_nodes", format!("must be at least {MIN_NODES}, got {}", self.grid.n_nodes)));
        }
        let g = &self.geodesics;
        if g.n_samples < 2 {
            return Err(invalid("geodesics.n_samples", format!("must be at least 2, got {}", g.n_samples)));
        }
        positive("geodesics.tol", g.tol)?;
        positive("geodesics.closure_tol", g.closure_tol)?;
        positive("geodesics.horizon", g.horizon)?;
        positive("geodesics.spread_tol", g.spread_tol)?;
        let f = &self.flow;
        if let Some(t) = f.horizon {
            positive("flow.T", t)?;
        }
        positive("flow.checkpoint_every", f.checkpoint_every)?;
        if let Some(dt) = f.dt {
            positive("flow.dt", dt)?;
        }
        if f.lprime_offsets.is_empty() {
            return Err(invalid("flow.lprime_offsets", "needs at least one offset"));
        }
        for &h in &f.lprime_offsets {
            positive("flow.lprime_offsets", h)?;
        }
        positive("flow.lprime_threshold", f.lprime_threshold)?;
        Ok(())
    }

    /// Michel odd function, when the surface is one.
    pub fn odd_function(&self) -> Option<OddFunction> {
        match &self.surface {
            SurfaceSpec::Michel { coeffs } => OddFunction::new(coeffs.clone()).ok(),
            _ => None,
        }
    }

    /// SHA-256 of the compact JSON config without the output path.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.path = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Default horizon for `flow`.
pub(super) fn flow_horizon(c: &RunConfig) -> f64 {
    c.flow.horizon.unwrap_or(DEFAULT_FLOW_HORIZON)
}

