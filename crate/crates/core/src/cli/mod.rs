//! Command-line front end: config loading, dispatch, result files, manifest
//! and replay.
//!
//! Exit status: 0 success, 2 usage or config error, 3 computation failure
//! (finished results are still flushed), 4 I/O failure, 5 replay mismatch.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::{Error, Result};
use config::ExperimentConfig;
use output::{sha256_file, Manifest, OutputSet, CONFIG_FILE, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_REPLAY: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "anderson2p", version, about = "Two-particle Anderson model multi-scale analysis toolkit")]
pub struct Cli {
    /// Experiment config (TOML); defaults apply to every missing key.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "ANDERSON2P_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Config override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Force exhaustive enumeration of the disorder.
    #[arg(long, global = true)]
    pub exhaustive: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Length and mass schedules.
    Schedule,
    /// Spectrum of one cube Hamiltonian.
    Spectrum,
    /// Green function row from one source site.
    Green,
    /// Resonance, non-resonance, singularity and tunnelling flags.
    Classify,
    EstimateW1,
    EstimateW2,
    EstimateS0,
    EstimateDsk,
    EstimateLifshitz,
    /// Combes–Thomas bound over random instances.
    VerifyCt,
    /// Eigenfunction decay fits.
    Decay,
    /// Rerun a recorded run and byte-compare its result files.
    Replay {
        /// A manifest file or the directory holding it.
        manifest: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Schedule => "schedule",
            Command::Spectrum => "spectrum",
            Command::Green => "green",
            Command::Classify => "classify",
            Command::EstimateW1 => "estimate-w1",
            Command::EstimateW2 => "estimate-w2",
            Command::EstimateS0 => "estimate-s0",
            Command::EstimateDsk => "estimate-dsk",
            Command::EstimateLifshitz => "estimate-lifshitz",
            Command::VerifyCt => "verify-ct",
            Command::Decay => "decay",
            Command::Replay { .. } => "replay",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "schedule" => Command::Schedule,
            "spectrum" => Command::Spectrum,
            "green" => Command::Green,
            "classify" => Command::Classify,
            "estimate-w1" => Command::EstimateW1,
            "estimate-w2" => Command::EstimateW2,
            "estimate-s0" => Command::EstimateS0,
            "estimate-dsk" => Command::EstimateDsk,
            "estimate-lifshitz" => Command::EstimateLifshitz,
            "verify-ct" => Command::VerifyCt,
            "decay" => Command::Decay,
            _ => return None,
        })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::ReplayMismatch(_) => EXIT_REPLAY,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_COMPUTE,
    }
}

fn dispatch(cmd: &Command, cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<commands::Lines> {
    match cmd {
        Command::Schedule => commands::schedule(cfg, out),
        Command::Spectrum => commands::spectrum(cfg, out),
        Command::Green => commands::green(cfg, out),
        Command::Classify => commands::classify_cmd(cfg, out),
        Command::EstimateW1 => commands::estimate_w1_cmd(cfg, out),
        Command::EstimateW2 => commands::estimate_w2_cmd(cfg, out),
        Command::EstimateS0 => commands::estimate_s0_cmd(cfg, out),
        Command::EstimateDsk => commands::estimate_dsk_cmd(cfg, out),
        Command::EstimateLifshitz => commands::estimate_lifshitz_cmd(cfg, out),
        Command::VerifyCt => commands::verify_ct(cfg, out),
        Command::Decay => commands::decay_cmd(cfg, out),
        Command::Replay { .. } => Err(Error::Config("replay cannot be recorded".into())),
    }
}

/// Outcome of a recorded run.
#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub lines: commands::Lines,
    pub error: Option<Error>,
}

/// Runs `cmd` on a worker pool of `cfg.run.workers` threads and records the
/// config, result files and manifest under `dir`.
pub fn run_recorded(cmd: &Command, cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    let started = Instant::now();
    let hash = cfg.hash();
    let mut out = OutputSet::create(dir, &hash, &cfg.output.formats)?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_toml())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let result = pool.install(|| dispatch(cmd, cfg, &mut out));
    let (lines, error) = match result {
        Ok(l) => (l, None),
        Err(e) => (Vec::new(), Some(e)),
    };
    let manifest = Manifest {
        command: cmd.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hash,
        config_file: CONFIG_FILE.to_string(),
        seed: cfg.run.seed,
        workers: pool.current_num_threads(),
        wall_time_s: started.elapsed().as_secs_f64(),
        status: match &error {
            None => "ok".into(),
            Some(e) => format!("failed: {e}"),
        },
        files: out.entries()?,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(RunOutcome { manifest, lines, error })
}

/// Loads the config file (if any) and applies overrides and flags.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = cli.set.clone();
    if let Some(s) = cli.seed {
        overrides.push(format!("run.seed={s}"));
    }
    if let Some(w) = cli.workers {
        overrides.push(format!("run.workers={w}"));
    }
    if let Some(o) = &cli.out {
        overrides.push(format!("output.directory={}", toml::Value::String(o.display().to_string())));
    }
    if cli.exhaustive {
        overrides.push("run.mode=\"exhaustive\"".into());
    }
    ExperimentConfig::from_toml_with_overrides(&text, &overrides)
}

/// Reruns the run recorded at `manifest_path` and compares every result file
/// byte for byte against both the files on disk and the recorded hashes.
pub fn replay(manifest_path: &Path, workers: Option<usize>) -> Result<Manifest> {
    let path = if manifest_path.is_dir() {
        manifest_path.join(MANIFEST_FILE)
    } else {
        manifest_path.to_path_buf()
    };
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let recorded = Manifest::read(&path)?;
    let cmd = Command::from_name(&recorded.command)
        .ok_or_else(|| Error::ReplayMismatch(format!("unknown recorded command `{}`", recorded.command)))?;
    let text = fs::read_to_string(dir.join(&recorded.config_file))?;
    let mut overrides = Vec::new();
    if let Some(w) = workers {
        overrides.push(format!("run.workers={w}"));
    }
    let cfg = ExperimentConfig::from_toml_with_overrides(&text, &overrides)?;
    if cfg.hash() != recorded.config_hash {
        return Err(Error::ReplayMismatch("config hash differs from the manifest".into()));
    }
    let scratch = std::env::temp_dir().join(format!(
        "anderson2p-replay-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    ));
    let outcome = run_recorded(&cmd, &cfg, &scratch);
    let check = (|| {
        let outcome = outcome?;
        let mut problems = Vec::new();
        let fresh: Vec<&str> = outcome.manifest.files.iter().map(|f| f.path.as_str()).collect();
        let old: Vec<&str> = recorded.files.iter().map(|f| f.path.as_str()).collect();
        if fresh != old {
            problems.push(format!("file list {fresh:?} differs from recorded {old:?}"));
        }
        for f in &recorded.files {
            let on_disk = dir.join(&f.path);
            let disk = fs::read(&on_disk).map_err(|e| Error::ReplayMismatch(format!("{}: {e}", f.path)))?;
            if sha256_file(&on_disk)? != f.sha256 {
                problems.push(format!("{} no longer matches its recorded hash", f.path));
            }
            match fs::read(scratch.join(&f.path)) {
                Ok(new) if new == disk => {}
                Ok(_) => problems.push(format!("{} differs from the rerun", f.path)),
                Err(_) => problems.push(format!("{} was not produced by the rerun", f.path)),
            }
        }
        if problems.is_empty() {
            Ok(outcome.manifest)
        } else {
            Err(Error::ReplayMismatch(problems.join("; ")))
        }
    })();
    let _ = fs::remove_dir_all(&scratch);
    check
}

// Stdout may be a closed pipe; results are already on disk.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// Parses `args` (program name first), runs, prints, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Command::Replay { manifest } = &cli.command {
        return match replay(manifest, cli.workers) {
            Ok(m) => {
                say!("replay of `{}` matches: {} files", m.command, m.files.len());
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        };
    }
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let dir = PathBuf::from(&cfg.output.directory);
    match run_recorded(&cli.command, &cfg, &dir) {
        Ok(outcome) => {
            for l in &outcome.lines {
                say!("{l}");
            }
            match outcome.error {
                None => {
                    say!("results in {}", dir.display());
                    EXIT_OK
                }
                Some(e) => {
                    eprintln!("error: {e} (partial results in {})", dir.display());
                    exit_code(&e)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
