//! Command-line front end: config parsing, experiment dispatch, tabular
//! output.
//!
//! Subcommands:
//!
//! * `run <config-file>` — run the experiment described by a flat
//!   `key=value` file (UTF-8, `#` comments, dotted keys such as
//!   `drive.omega_d`; the file must set `experiment=<name>`).
//! * `run <experiment> --set key=value ...` — run a named experiment with
//!   inline overrides.
//! * `list` — print the experiment catalog with default parameters.
//! * `validate <config-file>` — check every invariant without computing.
//!
//! Outputs land in `<outdir>/<experiment>.csv` (or `.jsonl`) plus
//! `<outdir>/<experiment>.summary.json`.  The CSV leads with one metadata
//! comment line `# experiment=<name> version=<semver>` and then a header
//! row.  Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! or I/O error.  Worker parallelism is capped by `--threads` (fallback:
//! the `SQBATH_THREADS` environment variable); any thread count produces
//! identical output bytes.

use crate::error::{config_err, Error, Result};
use crate::experiments::{catalog, run as run_experiment, validate as validate_spec};
use crate::experiments::{ExperimentKind, ExperimentOutput, ExperimentSpec};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Tabular output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl OutputFormat {
    fn from_name(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" => Ok(OutputFormat::JsonLines),
            other => config_err(format!(
                "format must be 'csv' or 'json-lines', got '{other}'"
            )),
        }
    }
}

/// A fully described run: experiment, overrides, and output disposition.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: String,
    pub overrides: BTreeMap<String, String>,
    pub outdir: PathBuf,
    pub format: OutputFormat,
    pub seed: Option<u64>,
}

impl RunConfig {
    fn new(experiment: String) -> Self {
        Self {
            experiment,
            overrides: BTreeMap::new(),
            outdir: PathBuf::from("."),
            format: OutputFormat::Csv,
            seed: None,
        }
    }

    /// The experiment spec this run resolves to; an explicit seed is routed
    /// to the experiment's own `seed` parameter (experiments without one
    /// reject it by name).
    fn to_spec(&self) -> Result<ExperimentSpec> {
        let kind = ExperimentKind::from_name(&self.experiment)?;
        let mut spec = ExperimentSpec::new(kind);
        spec.overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            spec.overrides.insert("seed".to_string(), seed.to_string());
        }
        Ok(spec)
    }
}

/// Parse a flat `key=value` config file with `#` comments.
pub fn parse_config_file(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let mut pairs: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(()).or_else(|_| {
            config_err(format!(
                "line {}: expected key=value, got '{line}'",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return config_err(format!("line {}: empty key", lineno + 1));
        }
        if pairs.insert(key.clone(), value).is_some() {
            return config_err(format!("line {}: duplicate key '{key}'", lineno + 1));
        }
    }

    let experiment = pairs.remove("experiment").ok_or(()).or_else(|_| {
        config_err("config file must set experiment=<name>".to_string())
    })?;
    let mut cfg = RunConfig::new(experiment);
    if let Some(dir) = pairs.remove("outdir") {
        cfg.outdir = PathBuf::from(dir);
    }
    if let Some(fmt) = pairs.remove("format") {
        cfg.format = OutputFormat::from_name(&fmt)?;
    }
    if let Some(seed) = pairs.remove("seed") {
        cfg.seed = Some(seed.parse().map_err(|_| {
            Error::Config(format!("seed must be a 64-bit integer, got '{seed}'"))
        })?);
    }
    cfg.overrides = pairs;
    Ok(cfg)
}

/// Pick the worker cap: flag beats the `SQBATH_THREADS` environment
/// variable; the default is single-threaded.
pub(crate) fn resolve_threads(flag: Option<usize>, env_value: Option<&str>) -> Result<usize> {
    if let Some(n) = flag {
        if n < 1 {
            return config_err(format!("--threads must be at least 1, got {n}"));
        }
        return Ok(n);
    }
    if let Some(raw) = env_value {
        let n: usize = raw.parse().map_err(|_| {
            Error::Config(format!(
                "SQBATH_THREADS must be a positive integer, got '{raw}'"
            ))
        })?;
        if n < 1 {
            return config_err(format!(
                "SQBATH_THREADS must be at least 1, got {n}"
            ));
        }
        return Ok(n);
    }
    Ok(1)
}

#[derive(Debug, Parser)]
#[command(
    name = "sqbath",
    version,
    about = "Driven atoms in squeezed and ordinary vacuum: spectra, linewidths, trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment from a config file or by name
    Run(RunArgs),
    /// List experiments and their default parameters
    List,
    /// Check a config file against every invariant, without computing
    Validate {
        /// path to a key=value config file
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// experiment name, or path to a key=value config file
    target: String,
    /// parameter override, repeatable: --set key=value
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// output directory (default ".")
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// output format: csv or json-lines
    #[arg(long)]
    format: Option<String>,
    /// seed for trajectory experiments
    #[arg(long)]
    seed: Option<u64>,
    /// worker thread cap (fallback: SQBATH_THREADS, default 1)
    #[arg(long)]
    threads: Option<usize>,
}

fn run_config_from_args(args: &RunArgs) -> Result<RunConfig> {
    let target_path = Path::new(&args.target);
    let mut cfg = if target_path.is_file() {
        parse_config_file(target_path)?
    } else {
        RunConfig::new(args.target.clone())
    };
    for pair in &args.set {
        let (key, value) = pair.split_once('=').ok_or(()).or_else(|_| {
            config_err(format!("--set expects key=value, got '{pair}'"))
        })?;
        cfg.overrides
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    if let Some(dir) = &args.outdir {
        cfg.outdir = dir.clone();
    }
    if let Some(fmt) = &args.format {
        cfg.format = OutputFormat::from_name(fmt)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

fn write_csv(path: &Path, name: &str, output: &ExperimentOutput) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    writeln!(
        file,
        "# experiment={name} version={}",
        env!("CARGO_PKG_VERSION")
    )?;
    let csv_err = |e: csv::Error| Error::Numerical(format!("cannot write {}: {e}", path.display()));
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(&output.header).map_err(csv_err)?;
    for row in &output.rows {
        writer
            .write_record(row.iter().map(|v| format!("{v}")))
            .map_err(csv_err)?;
    }
    writer
        .flush()
        .map_err(|e| Error::Numerical(format!("cannot flush {}: {e}", path.display())))?;
    Ok(())
}

fn write_json_lines(path: &Path, name: &str, output: &ExperimentOutput) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    let meta = serde_json::json!({
        "experiment": name,
        "version": env!("CARGO_PKG_VERSION"),
        "columns": output.header,
    });
    writeln!(file, "{meta}")?;
    for row in &output.rows {
        writeln!(file, "{}", serde_json::Value::from(row.clone()))?;
    }
    Ok(())
}

/// Run and write `<outdir>/<experiment>.{csv|jsonl}` plus
/// `<outdir>/<experiment>.summary.json`; returns the table path.
pub fn execute_run(cfg: &RunConfig, threads: usize) -> Result<PathBuf> {
    let spec = cfg.to_spec()?;
    let output = run_experiment(&spec, threads)?;
    std::fs::create_dir_all(&cfg.outdir)?;
    let name = &cfg.experiment;
    let table_path = match cfg.format {
        OutputFormat::Csv => {
            let path = cfg.outdir.join(format!("{name}.csv"));
            write_csv(&path, name, &output)?;
            path
        }
        OutputFormat::JsonLines => {
            let path = cfg.outdir.join(format!("{name}.jsonl"));
            write_json_lines(&path, name, &output)?;
            path
        }
    };
    let summary_path = cfg.outdir.join(format!("{name}.summary.json"));
    let text = serde_json::to_string_pretty(&output.summary)
        .map_err(|e| Error::Numerical(format!("cannot serialize summary: {e}")))?;
    let mut file = std::fs::File::create(&summary_path)?;
    writeln!(file, "{text}")?;
    Ok(table_path)
}

/// Print to stdout, treating a closed pipe (e.g. `sqbath list | head`) as
/// a clean stop rather than an error.
fn emit(text: &str) -> Result<()> {
    use std::io::ErrorKind;
    match writeln!(std::io::stdout(), "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(e.into()),
    }
}

fn command_list() -> Result<()> {
    let mut text = String::new();
    for info in catalog() {
        text.push_str(&format!("{} — {}\n", info.name, info.description));
        for (key, value) in info.defaults {
            text.push_str(&format!("  {key} = {value}\n"));
        }
        text.push('\n');
    }
    emit(text.trim_end())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::List => command_list(),
        Command::Validate { config } => {
            let cfg = parse_config_file(&config)?;
            let spec = cfg.to_spec()?;
            validate_spec(&spec)?;
            emit(&format!(
                "ok: configuration for '{}' is valid",
                cfg.experiment
            ))
        }
        Command::Run(args) => {
            let threads = resolve_threads(
                args.threads,
                std::env::var("SQBATH_THREADS").ok().as_deref(),
            )?;
            let cfg = run_config_from_args(&args)?;
            let table = execute_run(&cfg, threads)?;
            emit(&format!("wrote {}", table.display()))?;
            emit(&format!(
                "wrote {}",
                cfg.outdir
                    .join(format!("{}.summary.json", cfg.experiment))
                    .display()
            ))
        }
    }
}

/// Entry point shared by the binary: parse, dispatch, map errors to exit
/// codes (0 success, 2 config, 3 numerical/I/O).
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
