use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use zollflow::cli::{self, CliError, Command, Format, RunConfig, SurfaceSpec};

#[derive(Parser)]
#[command(name = "zollflow", version, about = "Zoll surfaces of revolution, geodesic periods and Ricci flow")]
struct Cli {
    #[command(subcommand)]
    command: Action,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Action {
    /// Area, average curvature, equator curvature and lengths
    Describe,
    /// Period sweep over the Clairaut family
    VerifyZoll,
    /// Normalized Ricci flow with checkpoint diagnostics
    Flow,
    /// Common period, Weinstein integer and discreteness
    Weinstein,
    /// First variation of the equator length
    Lprime,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Surface {
    Round,
    GongRaw,
    GongNormalized,
    Michel,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct Overrides {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    surface: Option<Surface>,
    /// Michel coefficients a_k of h(x) = sum a_k x^(2k+1)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long, global = true)]
    nodes: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Geodesic integrator tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Flow horizon; verify-zoll, weinstein and lprime evolve to it first
    #[arg(long = "T", global = true)]
    horizon: Option<f64>,
    /// Time step cap
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    checkpoint_every: Option<f64>,
    /// Run a period sweep at every flow checkpoint
    #[arg(long, global = true)]
    sweeps: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
}

impl Overrides {
    fn apply(&self, c: &mut RunConfig) -> Result<()> {
        if let Some(s) = self.surface {
            c.surface = match s {
                Surface::Round => SurfaceSpec::Round,
                Surface::GongRaw => SurfaceSpec::GongRaw,
                Surface::GongNormalized => SurfaceSpec::GongNormalized,
                Surface::Michel => SurfaceSpec::Michel { coeffs: Vec::new() },
            };
        }
        if let Some(coeffs) = &self.coeffs {
            match &mut c.surface {
                SurfaceSpec::Michel { coeffs: slot } => *slot = coeffs.clone(),
                _ => anyhow::bail!("--coeffs only applies to --surface michel"),
            }
        }
        if let Some(n) = self.nodes {
            c.grid.n_nodes = n;
        }
        if let Some(n) = self.samples {
            c.geodesics.n_samples = n;
        }
        if let Some(t) = self.tol {
            c.geodesics.tol = t;
        }
        if self.horizon.is_some() {
            c.flow.horizon = self.horizon;
        }
        if self.dt.is_some() {
            c.flow.dt = self.dt;
        }
        if let Some(k) = self.checkpoint_every {
            c.flow.checkpoint_every = k;
        }
        if self.sweeps {
            c.flow.sweeps = true;
        }
        if self.out.is_some() {
            c.output.path = self.out.clone();
        }
        if let Some(f) = self.format {
            c.output.format = match f {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            };
        }
        Ok(())
    }
}

fn load_config(o: &Overrides) -> Result<RunConfig> {
    let mut c = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    o.apply(&mut c)?;
    c.validate()?;
    Ok(c)
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(config: &RunConfig, body: &str) -> Result<()> {
    match &config.output.path {
        Some(path) => write_atomic(path, body),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn set_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ZOLLFLOW_THREADS") {
        let n: usize = v.parse().with_context(|| format!("ZOLLFLOW_THREADS={v} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn last_good_path(config: &RunConfig) -> PathBuf {
    match &config.output.path {
        Some(p) => {
            let mut name = p.file_name().unwrap_or_default().to_os_string();
            name.push(".last_good.json");
            p.with_file_name(name)
        }
        None => PathBuf::from("zollflow.last_good.json"),
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let config = match set_threads().and_then(|_| load_config(&args.overrides)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let command = match args.command {
        Action::Describe => Command::Describe,
        Action::VerifyZoll => Command::VerifyZoll,
        Action::Flow => Command::Flow,
        Action::Weinstein => Command::Weinstein,
        Action::Lprime => Command::Lprime,
    };
    match cli::run(command, &config) {
        Ok(report) => {
            if let Err(e) = emit(&config, &report.body) {
                eprintln!("error: {e:#}");
                return ExitCode::from(3);
            }
            eprintln!("{}", report.summary);
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(CliError::FlowAborted { t, reason, partial, last_good }) => {
            let dump = last_good_path(&config);
            let saved = emit(&config, &partial).and_then(|_| write_atomic(&dump, &last_good));
            eprintln!("error: flow aborted after t = {t}: {reason}; last good state in {}", dump.display());
            if let Err(e) = saved {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
