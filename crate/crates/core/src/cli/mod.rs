//! Run configuration, the five commands behind the `zollflow` binary and
//! their reports.
//!
//! Commands return the report text; writing it and mapping outcomes to exit
//! codes is left to the binary.

mod config;
mod format;

use serde::Serialize;

pub use config::{
    ConfigError, FlowOptions, Format, GeodesicOptions, GridOptions, OutputOptions, RunConfig, SurfaceSpec,
    DEFAULT_CHECKPOINT_EVERY, DEFAULT_FLOW_HORIZON, DEFAULT_LPRIME_OFFSETS, DEFAULT_LPRIME_THRESHOLD, DEFAULT_NODES,
    DEFAULT_SAMPLES, DEFAULT_SPREAD_TOL, MIN_NODES,
};
pub use format::{fixed, Num};

use crate::catalog::{self, CatalogError};
use crate::geodesics::{self, GeodesicError, PeriodReport};
use crate::profile::{self, MeridianCurve, ProfileError, ProfileMetric, ROUND_AREA};
use crate::ricci::{self, FlowState, RicciError};
use crate::weinstein::{self, WeinsteinError};
use format::{csv_row, json, Header};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Describe,
    VerifyZoll,
    Flow,
    Weinstein,
    Lprime,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Describe => "describe",
            Command::VerifyZoll => "verify-zoll",
            Command::Flow => "flow",
            Command::Weinstein => "weinstein",
            Command::Lprime => "lprime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Period sweep or Weinstein pipeline did not certify the metric.
    ZollFailed,
    /// A certified Zoll input whose equator length moves under the flow.
    ZollNotPreserved,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::ZollFailed | Status::ZollNotPreserved => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub status: Status,
    /// One line for the terminal.
    pub summary: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Ricci(#[from] RicciError),
    #[error(transparent)]
    Weinstein(#[from] WeinsteinError),
    #[error("flow aborted after t = {t}: {reason}")]
    FlowAborted {
        t: f64,
        reason: String,
        /// Report covering the checkpoints reached.
        partial: String,
        /// JSON dump of the last finite state.
        last_good: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 3,
        }
    }
}

pub fn run(command: Command, config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    match command {
        Command::Describe => cmd_describe(config),
        Command::VerifyZoll => cmd_verify_zoll(config),
        Command::Flow => cmd_flow(config),
        Command::Weinstein => cmd_weinstein(config),
        Command::Lprime => cmd_lprime(config),
    }
}

fn meridian(config: &RunConfig) -> Option<MeridianCurve> {
    match config.surface {
        SurfaceSpec::Round => Some(catalog::round_sphere()),
        SurfaceSpec::GongRaw => Some(catalog::gong_raw()),
        SurfaceSpec::GongNormalized => Some(catalog::gong_normalized()),
        SurfaceSpec::Michel { .. } => None,
    }
}

fn michel(config: &RunConfig) -> Result<ProfileMetric, CliError> {
    let h = config.odd_function().expect("validated michel coefficients");
    Ok(catalog::michel_surface(&h, config.grid.n_nodes)?)
}

/// The selected surface at its own scale.
pub fn surface_metric(config: &RunConfig) -> Result<ProfileMetric, CliError> {
    match meridian(config) {
        Some(m) => Ok(profile::to_arclength(&m)?),
        None => michel(config),
    }
}

/// The selected surface rescaled to area `4 pi`, as the flow requires.
pub fn flow_metric(config: &RunConfig) -> Result<ProfileMetric, CliError> {
    match meridian(config) {
        Some(m) => Ok(profile::to_arclength(&profile::normalize_to_volume(&m, ROUND_AREA)?)?),
        None => michel(config),
    }
}

fn require_symmetric(p: &ProfileMetric, what: &str) -> Result<(), CliError> {
    if p.is_symmetric() {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            field: "surface",
            message: format!("{what} needs a reflection-symmetric surface"),
        }
        .into())
    }
}

pub fn initial_state(config: &RunConfig) -> Result<FlowState, CliError> {
    let p = flow_metric(config)?;
    require_symmetric(&p, "the flow")?;
    Ok(FlowState::from_metric(&p, config.grid.n_nodes)?)
}

/// Metric the geodesic commands act on: the surface itself, or its area-`4 pi`
/// rescaling evolved to `flow.T` when a horizon is configured.
fn target(config: &RunConfig) -> Result<(ProfileMetric, Option<FlowState>), CliError> {
    match config.flow.horizon {
        None => Ok((surface_metric(config)?, None)),
        Some(t) => {
            let state = ricci::advance_to(&initial_state(config)?, t, config.flow.dt)?;
            Ok((state.to_profile_metric()?, Some(state)))
        }
    }
}

fn sweep(config: &RunConfig, p: &ProfileMetric) -> Result<PeriodReport, CliError> {
    Ok(geodesics::zoll_sweep(p, config.geodesics.n_samples, &config.geodesics.period_options())?)
}

fn certified(config: &RunConfig, report: &PeriodReport) -> bool {
    report.all_closed() && report.summary.spread <= config.geodesics.spread_tol
}

#[derive(Serialize)]
struct Description {
    header: Header,
    area: Num,
    #[serde(rename = "K_bar")]
    k_bar: Num,
    #[serde(rename = "K_equator")]
    k_equator: Num,
    meridian_length: Num,
    equator_length: Num,
}

/// Area, average curvature, curvature on the widest parallel, meridian and
/// equator lengths of the surface at its own scale.
pub fn cmd_describe(config: &RunConfig) -> Result<Report, CliError> {
    let p = surface_metric(config)?;
    let (s_eq, rho_eq) = p.widest_parallel();
    let (area, k_bar, k_equator) = match meridian(config) {
        Some(m) => {
            let mid = m.mid();
            (profile::area(&m)?, profile::average_curvature(&m)?, profile::curvature_meridian(&m, mid)?)
        }
        None => (p.area(), p.average_curvature(), profile::curvature_arclength(&p, s_eq)?),
    };
    let d = Description {
        header: Header::new(Command::Describe.name(), config, None),
        area: Num(area),
        k_bar: Num(k_bar),
        k_equator: Num(k_equator),
        meridian_length: Num(p.total_length()),
        equator_length: Num(std::f64::consts::TAU * rho_eq),
    };
    let summary = format!(
        "{}: area {} K_bar {} K_equator {}",
        config.surface.name(),
        fixed(area),
        fixed(k_bar),
        fixed(k_equator)
    );
    Ok(Report { body: json(&d), status: Status::Pass, summary })
}

#[derive(Serialize)]
struct SweepSummary {
    min: Num,
    max: Num,
    spread: Num,
    mean: Num,
    flagged: usize,
    certified: bool,
}

impl SweepSummary {
    fn of(config: &RunConfig, r: &PeriodReport) -> Self {
        Self {
            min: Num(r.summary.min),
            max: Num(r.summary.max),
            spread: Num(r.summary.spread),
            mean: Num(r.summary.mean),
            flagged: r.entries.iter().filter(|e| e.flagged).count(),
            certified: certified(config, r),
        }
    }
}

#[derive(Serialize)]
struct SweepEntry {
    clairaut_c: Num,
    period: Num,
    closure_error: Num,
    flagged: bool,
}

#[derive(Serialize)]
struct SweepDocument {
    header: Header,
    summary: SweepSummary,
    entries: Vec<SweepEntry>,
}

/// Period sweep of the target metric; fails certification when a geodesic
/// does not close or the spread exceeds `geodesics.spread_tol`.
pub fn cmd_verify_zoll(config: &RunConfig) -> Result<Report, CliError> {
    let (p, _) = target(config)?;
    let report = sweep(config, &p)?;
    let header = Header::new(Command::VerifyZoll.name(), config, config.flow.horizon);
    let summary = SweepSummary::of(config, &report);
    let ok = summary.certified;
    let line = format!(
        "period spread {} over {} geodesics, {} unclosed: {}",
        fixed(report.summary.spread),
        report.entries.len(),
        summary.flagged,
        if ok { "Zoll" } else { "not Zoll" }
    );
    let body = match config.output.format {
        Format::Json => json(&SweepDocument {
            header,
            summary,
            entries: report
                .entries
                .iter()
                .map(|e| SweepEntry {
                    clairaut_c: Num(e.clairaut_c),
                    period: Num(e.period),
                    closure_error: Num(e.closure_error),
                    flagged: e.flagged,
                })
                .collect(),
        }),
        Format::Csv => {
            let mut out = header.csv_lines();
            out.push_str(&format!(
                "# spread={} mean={} flagged={} certified={}\n",
                fixed(report.summary.spread),
                fixed(report.summary.mean),
                summary.flagged,
                ok
            ));
            out.push_str("clairaut_c,period,closure_error\n");
            for e in &report.entries {
                out.push_str(&csv_row(&[e.clairaut_c, e.period, e.closure_error]));
            }
            out
        }
    };
    Ok(Report { body, status: if ok { Status::Pass } else { Status::ZollFailed }, summary: line })
}

#[derive(Serialize)]
struct FlowRow {
    t: Num,
    equator_length: Num,
    #[serde(rename = "max_abs_K_minus_1")]
    max_abs_k_minus_1: Num,
    area: Num,
    #[serde(rename = "K_bar")]
    k_bar: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    period_spread: Option<Num>,
}

#[derive(Serialize)]
struct FlowDocument<'a> {
    header: Header,
    rows: &'a [FlowRow],
}

#[derive(Serialize)]
struct StateDump {
    t: Num,
    u: Vec<Num>,
}

fn flow_row(config: &RunConfig, state: &FlowState) -> Result<FlowRow, CliError> {
    let period_spread = if config.flow.sweeps {
        Some(Num(sweep(config, &state.to_profile_metric()?)?.summary.spread))
    } else {
        None
    };
    let d = &state.diagnostics;
    Ok(FlowRow {
        t: Num(state.t),
        equator_length: Num(state.equator_length()),
        max_abs_k_minus_1: Num(d.max_abs_k_minus_1()),
        area: Num(d.area),
        k_bar: Num(d.k_bar),
        period_spread,
    })
}

fn flow_body(config: &RunConfig, header: Header, rows: &[FlowRow]) -> String {
    match config.output.format {
        Format::Json => json(&FlowDocument { header, rows }),
        Format::Csv => {
            let mut out = header.csv_lines();
            out.push_str("t,equator_length,max_abs_K_minus_1,area,K_bar");
            out.push_str(if config.flow.sweeps { ",period_spread\n" } else { "\n" });
            for r in rows {
                let mut v = vec![r.t.0, r.equator_length.0, r.max_abs_k_minus_1.0, r.area.0, r.k_bar.0];
                v.extend(r.period_spread.map(|n| n.0));
                out.push_str(&csv_row(&v));
            }
            out
        }
    }
}

/// Normalized Ricci flow of the area-`4 pi` rescaled surface with one row per
/// checkpoint.
pub fn cmd_flow(config: &RunConfig) -> Result<Report, CliError> {
    let horizon = config::flow_horizon(config);
    let header = || Header::new(Command::Flow.name(), config, Some(horizon));
    let mut state = initial_state(config)?;
    let mut rows = vec![flow_row(config, &state)?];
    let cadence = config.flow.checkpoint_every;
    let mut k = 1;
    loop {
        let target = (cadence * k as f64).min(horizon);
        state = match ricci::advance_to(&state, target, config.flow.dt) {
            Ok(s) => s,
            Err(RicciError::NonFinite { last_good }) => {
                let dump = StateDump { t: Num(last_good.t), u: last_good.profile.values().iter().map(|&u| Num(u)).collect() };
                return Err(CliError::FlowAborted {
                    t: last_good.t,
                    reason: "non-finite conformal factor".into(),
                    partial: flow_body(config, header(), &rows),
                    last_good: json(&dump),
                });
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(flow_row(config, &state)?);
        if target >= horizon * (1.0 - 1e-12) {
            break;
        }
        k += 1;
    }
    let first = rows[0].equator_length.0;
    let last = rows.last().expect("rows").equator_length.0;
    let summary = format!(
        "{} checkpoints to t = {}: equator length {} -> {}",
        rows.len(),
        fixed(horizon),
        fixed(first),
        fixed(last)
    );
    Ok(Report { body: flow_body(config, header(), &rows), status: Status::Pass, summary })
}

#[derive(Serialize)]
struct PeriodVerdict {
    spread: Num,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    l: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uncertainty: Option<Num>,
}

#[derive(Serialize)]
struct IntegerVerdict {
    volume: Num,
    i: Num,
    nearest: i64,
    residual: Num,
}

#[derive(Serialize)]
struct DiscretenessVerdict {
    value: Num,
    nearest: i64,
    pass: bool,
}

#[derive(Serialize)]
struct WeinsteinDocument {
    header: Header,
    period: PeriodVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    weinstein: Option<IntegerVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discreteness: Option<DiscretenessVerdict>,
    verdict: &'static str,
    reasons: Vec<String>,
}

/// Sweep, common period `2 pi L`, Weinstein integer and the discreteness
/// check on `2 / L^2`.
pub fn cmd_weinstein(config: &RunConfig) -> Result<Report, CliError> {
    let (p, _) = target(config)?;
    let report = sweep(config, &p)?;
    let mut reasons = Vec::new();
    let mut doc = WeinsteinDocument {
        header: Header::new(Command::Weinstein.name(), config, config.flow.horizon),
        period: PeriodVerdict { spread: Num(report.summary.spread), l: None, uncertainty: None },
        weinstein: None,
        discreteness: None,
        verdict: "fail",
        reasons: Vec::new(),
    };
    match weinstein::common_period(&report) {
        Ok(cp) => {
            doc.period.l = Some(Num(cp.l));
            doc.period.uncertainty = Some(Num(cp.uncertainty));
            let volume = p.area();
            let w = weinstein::weinstein_integer(volume, cp.l, 2)?;
            if (w.i_value - w.nearest as f64).abs() > weinstein::INTEGER_TOL {
                reasons.push(format!("i = {} is not an integer", fixed(w.i_value)));
            }
            doc.weinstein = Some(IntegerVerdict {
                volume: Num(volume),
                i: Num(w.i_value),
                nearest: w.nearest,
                residual: Num(w.residual),
            });
            match weinstein::discreteness_check(volume, cp.l) {
                Ok(d) => {
                    if !d.pass {
                        reasons.push(format!("2/L^2 = {} is not an integer", fixed(d.value)));
                    }
                    doc.discreteness = Some(DiscretenessVerdict { value: Num(d.value), nearest: d.nearest, pass: d.pass });
                }
                Err(e) => reasons.push(e.to_string()),
            }
        }
        Err(e) => reasons.push(e.to_string()),
    }
    let ok = reasons.is_empty();
    doc.verdict = if ok { "pass" } else { "fail" };
    let summary = if ok {
        format!("L = {}, i = {}", fixed(doc.period.l.expect("set").0), doc.weinstein.as_ref().expect("set").nearest)
    } else {
        format!("Weinstein pipeline failed: {}", reasons.join("; "))
    };
    doc.reasons = reasons;
    Ok(Report { body: json(&doc), status: if ok { Status::Pass } else { Status::ZollFailed }, summary })
}

#[derive(Serialize)]
struct NumericLprime {
    value: Num,
    residual: Num,
    converged: bool,
    slopes: Vec<[Num; 2]>,
}

#[derive(Serialize)]
struct LprimeDocument {
    header: Header,
    analytic: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<NumericLprime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    area_as_given: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_as_given: Option<Num>,
    spread: Num,
    certified_zoll: bool,
    flag: &'static str,
}

/// `l'(0)` in closed form and by extrapolated finite differences, on the
/// area-`4 pi` rescaling. A certified Zoll input with `|l'(0)|` above
/// `flow.lprime_threshold` is flagged.
pub fn cmd_lprime(config: &RunConfig) -> Result<Report, CliError> {
    let (p, state) = match config.flow.horizon {
        None => (flow_metric(config)?, None),
        Some(_) => target(config)?,
    };
    let analytic = ricci::lprime_analytic(&p)?;
    let mut doc = LprimeDocument {
        header: Header::new(Command::Lprime.name(), config, config.flow.horizon),
        analytic: Num(analytic),
        numeric: None,
        numeric_skipped: None,
        area_as_given: None,
        analytic_as_given: None,
        spread: Num(f64::NAN),
        certified_zoll: false,
        flag: "none",
    };
    if config.flow.horizon.is_none() {
        let given = surface_metric(config)?;
        let area = given.area();
        if (area - ROUND_AREA).abs() > 1e-6 {
            doc.area_as_given = Some(Num(area));
            doc.analytic_as_given = Some(Num(ricci::lprime_analytic(&given)?));
        }
    }
    if p.is_symmetric() {
        let start = match state {
            Some(s) => s,
            None => FlowState::from_metric(&p, config.grid.n_nodes)?,
        };
        let (value, residual, converged, slopes) = match ricci::lprime_numeric(&start, &config.flow.lprime_offsets) {
            Ok(est) => (est.value, est.residual, true, est.slopes),
            Err(RicciError::ExtrapolationResidual { value, residual }) => (value, residual, false, Vec::new()),
            Err(e) => return Err(e.into()),
        };
        doc.numeric = Some(NumericLprime {
            value: Num(value),
            residual: Num(residual),
            converged,
            slopes: slopes.iter().map(|&(h, v)| [Num(h), Num(v)]).collect(),
        });
    } else {
        doc.numeric_skipped = Some("the conformal flow needs a reflection-symmetric surface".into());
    }
    let report = sweep(config, &p)?;
    doc.spread = Num(report.summary.spread);
    doc.certified_zoll = certified(config, &report);
    let broken = doc.certified_zoll && analytic.abs() > config.flow.lprime_threshold;
    doc.flag = if broken { "Zoll not preserved" } else { "none" };
    let summary = format!(
        "l'(0) = {} ({}), {}",
        fixed(analytic),
        if doc.certified_zoll { "certified Zoll" } else { "not certified Zoll" },
        if broken { "Zoll not preserved" } else { "no contradiction" }
    );
    Ok(Report { body: json(&doc), status: if broken { Status::ZollNotPreserved } else { Status::Pass }, summary })
}
