//! `hom` — coherence-model simulator of Hong-Ou-Mandel interference.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 I/O error,
//! 3 oracle-deviation regression.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hom::output::{compare_report_json, write_intensities_csv, write_sweep_csv};
use hom::{
    compare_models, correlation_sweep, mean_intensities, parse_config, ExperimentConfig, Panel,
    MAX_ORACLE_DEVIATION,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_DEVIATION: u8 = 3;

/// Worker-thread cap; never affects output bytes.
const THREADS_ENV: &str = "HOM_THREADS";

#[derive(Parser)]
#[command(name = "hom", version, about = "Hong-Ou-Mandel coherence-model simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct IoArgs {
    /// Experiment configuration file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Correlation curve over the configured delay grid.
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        /// Cap on emitted per-pair trace columns (used when `keep_traces` is set).
        #[arg(long, default_value_t = 64)]
        traces: usize,
    },
    /// Sweep with a dip panel's (θ₀, Q) preset applied.
    Panel {
        #[command(flatten)]
        io: IoArgs,
        /// Panel letter, one of a..f.
        #[arg(long)]
        panel: String,
        /// Cap on emitted per-pair trace columns (panel b).
        #[arg(long, default_value_t = 64)]
        traces: usize,
    },
    /// Ensemble-averaged port intensities.
    Intensities {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Deviation report of the coherence model against the amplitude oracle.
    Compare {
        #[command(flatten)]
        io: IoArgs,
    },
}

enum Failure {
    Config(String),
    Io(String),
    Deviation,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
            Failure::Deviation => EXIT_DEVIATION,
        }
    }
}

impl From<hom::Error> for Failure {
    fn from(e: hom::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Config(msg) | Failure::Io(msg) => eprintln!("hom: {msg}"),
                Failure::Deviation => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Sweep { io, traces } => {
            let cfg = load_config(&io.config)?;
            let csv = in_thread_pool(|| sweep_csv(&cfg, traces))??;
            write_output(io.out.as_deref(), &csv)
        }
        Cmd::Panel { io, panel, traces } => {
            let panel: Panel = panel.parse().map_err(Failure::Config)?;
            let cfg = load_config(&io.config)?.for_panel(panel);
            let csv = in_thread_pool(|| sweep_csv(&cfg, traces))??;
            write_output(io.out.as_deref(), &csv)
        }
        Cmd::Intensities { io } => {
            let cfg = load_config(&io.config)?;
            let csv = in_thread_pool(|| intensities_csv(&cfg))??;
            write_output(io.out.as_deref(), &csv)
        }
        Cmd::Compare { io } => {
            let cfg = load_config(&io.config)?;
            let (json, within_bound) = in_thread_pool(|| compare_json(&cfg))??;
            write_output(io.out.as_deref(), &json)?;
            if within_bound {
                Ok(())
            } else {
                Err(Failure::Deviation)
            }
        }
    }
}

fn load_config(path: &std::path::Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Runs `f` inside a rayon pool capped by `HOM_THREADS` when the variable is
/// set; the default pool otherwise.
fn in_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(f()),
        Err(e) => Err(Failure::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(raw) => {
            let n: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    Failure::Config(format!(
                        "{THREADS_ENV} must be a positive integer (got `{raw}`)"
                    ))
                })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Config(format!("{THREADS_ENV}: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn sweep_csv(cfg: &ExperimentConfig, traces_cap: usize) -> Result<String, Failure> {
    let params = cfg.model_params()?;
    let pairs = cfg.build_ensemble()?;
    let grid = cfg.tau_grid()?;
    let curve = correlation_sweep(&pairs, &grid, &params, false)?;

    // Per-pair traces come from a second sweep over just the emitted pairs,
    // so the full ensemble never has to hold a trace matrix.
    let kept = traces_cap.min(pairs.len());
    let traces = if cfg.keep_traces && kept > 0 {
        Some(correlation_sweep(&pairs[..kept], &grid, &params, true)?
            .per_pair
            .expect("traces requested"))
    } else {
        None
    };

    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &curve, cfg.bandwidth, traces.as_deref())
        .map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}

fn intensities_csv(cfg: &ExperimentConfig) -> Result<String, Failure> {
    let params = cfg.model_params()?;
    let pairs = cfg.build_ensemble()?;
    // The summary is delay-independent (swap cancellation); evaluate at a
    // representative nonzero delay, Δτ = 1.
    let tau = 1.0 / cfg.bandwidth;
    let summary = mean_intensities(&pairs, tau, &params)?;
    let mut buf = Vec::new();
    write_intensities_csv(&mut buf, &summary).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}

fn compare_json(cfg: &ExperimentConfig) -> Result<(String, bool), Failure> {
    let params = cfg.model_params()?;
    let pairs = cfg.build_ensemble()?;
    let grid = cfg.tau_grid()?;
    let report = compare_models(&pairs, &grid, &params)?;
    Ok((compare_report_json(&report), report.max_abs_dev <= MAX_ORACLE_DEVIATION))
}

fn write_output(out: Option<&std::path::Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}
