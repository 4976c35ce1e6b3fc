//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 integration failure,
//! 4 monitor failure, 5 output or input file error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ConfigError, IoError, SimError};
use crate::logio::{read_log_file, write_json, write_log_file, write_text};
use crate::monitor::{monitor_suite, MonitorReport, Status};
use crate::scenario::{catalogue, preset, ControllerKind, ScenarioConfig};
use crate::sim::{simulate, SimLog, Summary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_MONITOR: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// File names written into a run directory.
pub const CONFIG_FILE: &str = "config.toml";
pub const LOG_FILE: &str = "log.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MONITOR_FILE: &str = "monitor.json";

#[derive(Debug, Parser)]
#[command(
    name = "usv-igc",
    version,
    about = "Integrated guidance and control path-following simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one preset or configuration file and write its outputs.
    Run(RunArgs),
    /// Re-run the monitor suite on an existing log.
    Monitor(MonitorArgs),
    /// Run many presets concurrently.
    Sweep(SweepArgs),
    /// List the available presets.
    Presets {
        /// Print the catalogue as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args, Clone)]
pub struct Overrides {
    /// Integration step (s).
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Simulated time (s).
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Clip the sliding-mode demand to the actuator bounds.
    #[arg(long)]
    pub smc_clip: Option<bool>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(c) = self.smc_clip {
            cfg.smc_clip = c;
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Reference path preset (ellipse or eight).
    #[arg(long, default_value = "ellipse", conflicts_with = "config")]
    pub path: String,
    /// Starting point (P1, P2, P3; C1 on the eight path).
    #[arg(long, default_value = "P1", conflicts_with = "config")]
    pub ic: String,
    /// Controller (smc_adhoc or backstepping_sat); smc_adhoc for presets
    /// when omitted, the file's choice for configuration files.
    #[arg(long)]
    pub controller: Option<ControllerKind>,
    /// Scenario file in TOML; replaces the preset selection.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "IGC_OUT_DIR", default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// CSV log to check.
    pub log: PathBuf,
    /// Scenario of the log; defaults to config.toml beside it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Paths to include; all when omitted.
    #[arg(long = "path")]
    pub paths: Vec<String>,
    /// Starting points to include; all when omitted.
    #[arg(long = "ic")]
    pub ics: Vec<String>,
    /// Controllers to include; both when omitted.
    #[arg(long = "controller")]
    pub controllers: Vec<ControllerKind>,
    /// Output directory; one subdirectory per scenario.
    #[arg(long, env = "IGC_OUT_DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Error of one CLI action, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(SimError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("monitor failed: {0}")]
    Monitor(String),
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => CliError::Config(c),
            other => CliError::Sim(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Sim(_) => EXIT_INTEGRATION,
            CliError::Monitor(_) => EXIT_MONITOR,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Everything produced by one scenario.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub log: SimLog,
    pub summary: Summary,
    pub report: MonitorReport,
}

/// Simulates, monitors and writes the four output files into `dir`.
pub fn run_to_dir(cfg: &ScenarioConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(|source| IoError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_text(&dir.join(CONFIG_FILE), &cfg.to_toml_string())?;
    let log = simulate(cfg)?;
    let summary = Summary::from_log(&log, cfg);
    let report = monitor_suite(&log, cfg)?;
    write_log_file(&dir.join(LOG_FILE), &log.rows)?;
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    write_json(&dir.join(MONITOR_FILE), &report)?;
    Ok(RunOutcome { log, summary, report })
}

fn monitor_error(report: &MonitorReport) -> CliError {
    let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    CliError::Monitor(names.join(", "))
}

fn fmt_time(t: Option<f64>) -> String {
    t.map_or_else(|| "never".into(), |t| format!("{t:.3} s"))
}

fn print_report(out: &mut impl Write, report: &MonitorReport) -> std::io::Result<()> {
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        writeln!(out, "  {status:<4} {:<22} {}", c.name, c.detail)?;
    }
    Ok(())
}

fn cmd_run(args: &RunArgs, out: &mut impl Write) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => preset(
            &args.path,
            &args.ic,
            args.controller.unwrap_or(ControllerKind::SmcAdhoc),
        )?,
    };
    if let Some(c) = args.controller {
        cfg.controller = c;
    }
    args.overrides.apply(&mut cfg);
    let outcome = run_to_dir(&cfg, &args.out)?;
    let s = &outcome.summary;
    let _ = writeln!(out, "controller       {}", cfg.controller);
    let _ = writeln!(out, "samples          {}", s.samples);
    let _ = writeln!(out, "aligned from     {}", fmt_time(s.t_align));
    let _ = writeln!(out, "reached from     {}", fmt_time(s.t_reach));
    let _ = writeln!(
        out,
        "max |tau|        {:.4} N, {:.4} N m",
        s.max_abs_tau[0], s.max_abs_tau[1]
    );
    let _ = writeln!(out, "bound violations {}", s.bound_violations);
    let _ = writeln!(out, "tail mean R      {:.3e} m", s.tail_mean_range);
    let _ = writeln!(out, "outputs in       {}", args.out.display());
    let _ = print_report(out, &outcome.report);
    if outcome.report.passed() {
        Ok(())
    } else {
        Err(monitor_error(&outcome.report))
    }
}

fn cmd_monitor(args: &MonitorArgs, out: &mut impl Write) -> Result<(), CliError> {
    let cfg_path = match &args.config {
        Some(p) => p.clone(),
        None => args.log.parent().unwrap_or(Path::new(".")).join(CONFIG_FILE),
    };
    let cfg = ScenarioConfig::from_file(&cfg_path)?;
    let rows = read_log_file(&args.log)?;
    let log = SimLog {
        controller: cfg.controller,
        rows,
    };
    let report = monitor_suite(&log, &cfg)?;
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    let _ = print_report(out, &report);
    if report.passed() {
        Ok(())
    } else {
        Err(monitor_error(&report))
    }
}

/// One line of the sweep table.
#[derive(Debug, Serialize)]
struct SweepLine {
    name: String,
    exit: i32,
    message: String,
}

fn sweep_names(args: &SweepArgs) -> Vec<(String, ScenarioConfig)> {
    catalogue()
        .into_iter()
        .filter(|p| args.paths.is_empty() || args.paths.iter().any(|x| x == p.path))
        .filter(|p| args.ics.is_empty() || args.ics.iter().any(|x| x == p.initial))
        .filter(|p| args.controllers.is_empty() || args.controllers.contains(&p.controller))
        .map(|p| {
            let mut cfg = preset(p.path, p.initial, p.controller).expect("catalogue entries resolve");
            args.overrides.apply(&mut cfg);
            (p.name, cfg)
        })
        .collect()
}

fn cmd_sweep(args: &SweepArgs, out: &mut impl Write) -> Result<i32, CliError> {
    let jobs = sweep_names(args);
    if jobs.is_empty() {
        return Err(ConfigError::UnknownPreset("no preset matches the sweep filters".into()).into());
    }
    for (name, cfg) in &jobs {
        cfg.validate()
            .map_err(|e| ConfigError::Invalid(format!("{name}: {e}")))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    let lines: Vec<SweepLine> = pool.install(|| {
        jobs.par_iter()
            .map(|(name, cfg)| {
                let dir = args.out.join(name);
                let (exit, message) = match run_to_dir(cfg, &dir) {
                    Ok(o) if o.report.passed() => (EXIT_OK, "ok".to_string()),
                    Ok(o) => (EXIT_MONITOR, monitor_error(&o.report).to_string()),
                    Err(e) => (e.exit_code(), e.to_string()),
                };
                SweepLine {
                    name: name.clone(),
                    exit,
                    message,
                }
            })
            .collect()
    });
    for l in &lines {
        let _ = writeln!(out, "{:<32} {} {}", l.name, l.exit, l.message);
    }
    write_json(&args.out.join("sweep.json"), &lines)?;
    // the most severe outcome decides the exit code
    let rank = |c: i32| match c {
        EXIT_OK => 0,
        EXIT_MONITOR => 1,
        EXIT_INTEGRATION => 2,
        EXIT_IO => 3,
        _ => 4,
    };
    Ok(lines.iter().map(|l| l.exit).max_by_key(|&c| rank(c)).unwrap_or(EXIT_OK))
}

fn cmd_presets(json: bool, out: &mut impl Write) -> std::io::Result<()> {
    let cat = catalogue();
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&cat).expect("catalogue serializes")
        )?;
    } else {
        for p in &cat {
            writeln!(out, "{:<32} {}", p.name, p.description)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Normal output goes to `out`, errors to `err`.
pub fn main_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out).map(|()| EXIT_OK),
        Command::Monitor(a) => cmd_monitor(a, out).map(|()| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Presets { json } => cmd_presets(*json, out).map(|()| EXIT_OK).map_err(|source| {
            CliError::Io(IoError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
