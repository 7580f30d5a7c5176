use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::config::RunConfig;

/// Float printed with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fixed(self.0)).expect("valid JSON number");
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn fixed(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub surface: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<Num>>,
    pub n_nodes: usize,
    pub n_samples: usize,
    pub tol: Num,
    pub closure_tol: Num,
    pub horizon: Num,
    pub spread_tol: Num,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub flow_horizon: Option<Num>,
    pub checkpoint_every: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<Num>,
}

impl Settings {
    pub fn of(c: &RunConfig, flow_horizon: Option<f64>) -> Self {
        let coeffs = match &c.surface {
            super::SurfaceSpec::Michel { coeffs } => Some(coeffs.iter().map(|&a| Num(a)).collect()),
            _ => None,
        };
        let g = &c.geodesics;
        Self {
            surface: c.surface.name(),
            coeffs,
            n_nodes: c.grid.n_nodes,
            n_samples: g.n_samples,
            tol: Num(g.tol),
            closure_tol: Num(g.closure_tol),
            horizon: Num(g.horizon),
            spread_tol: Num(g.spread_tol),
            flow_horizon: flow_horizon.map(Num),
            checkpoint_every: Num(c.flow.checkpoint_every),
            dt: c.flow.dt.map(Num),
        }
    }

    /// `key=value` pairs for a CSV comment line.
    pub fn line(&self) -> String {
        let mut parts = vec![format!("surface={}", self.surface)];
        if let Some(c) = &self.coeffs {
            parts.push(format!("coeffs={}", c.iter().map(|a| fixed(a.0)).collect::<Vec<_>>().join(";")));
        }
        parts.push(format!("n_nodes={}", self.n_nodes));
        parts.push(format!("n_samples={}", self.n_samples));
        let mut num = |k: &str, v: Option<Num>| {
            if let Some(v) = v {
                parts.push(format!("{k}={}", fixed(v.0)));
            }
        };
        num("tol", Some(self.tol));
        num("closure_tol", Some(self.closure_tol));
        num("horizon", Some(self.horizon));
        num("spread_tol", Some(self.spread_tol));
        num("T", self.flow_horizon);
        num("checkpoint_every", Some(self.checkpoint_every));
        num("dt", self.dt);
        parts.join(" ")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub command: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub settings: Settings,
}

impl Header {
    pub fn new(command: &'static str, c: &RunConfig, flow_horizon: Option<f64>) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: c.hash(),
            settings: Settings::of(c, flow_horizon),
        }
    }

    pub fn csv_lines(&self) -> String {
        format!(
            "# zollflow {} {} config_sha256={}\n# {}\n",
            self.command,
            self.version,
            self.config_sha256,
            self.settings.line()
        )
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn csv_row(values: &[f64]) -> String {
    let mut line = values.iter().map(|&x| fixed(x)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}
