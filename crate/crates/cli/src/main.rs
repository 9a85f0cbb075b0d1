mod checks;
mod config;
mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use goldstone_core::{ModelParams, ModelTag};
use sha2::{Digest, Sha256};

use crate::checks::{Context, REGISTRY};
use crate::config::{invalid, ConfigError, ScenarioConfig};
use crate::table::{Metadata, ResultTable};

const OUT_ENV: &str = "GOLDSTONE_OUT";
const DEFAULT_OUT: &str = "goldstone-out";

#[derive(Parser, Debug)]
#[command(name = "goldstone", version, about = "Fluctuation and Goldstone-mode checks for condensed Bose gases")]
struct Cli {
    /// Output directory (default: config `output.dir`, then $GOLDSTONE_OUT, then ./goldstone-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; never changes emitted values.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the checks selected by a scenario file.
    Run { config: PathBuf },
    /// Print the check registry as CSV.
    ListChecks,
    /// Print the dispersion table on log-spaced momenta.
    Spectrum {
        #[arg(long)]
        model: String,
        #[arg(long)]
        qmin: f64,
        #[arg(long)]
        qmax: f64,
        #[arg(long)]
        points: usize,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("goldstone: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("goldstone: {msg}");
            ExitCode::from(2)
        }
    }
}

fn usage(e: ConfigError) -> Failure {
    Failure::Usage(e.to_string())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::ListChecks => {
            print!("{}", registry_table().to_csv());
            Ok(())
        }
        Command::Spectrum { model, qmin, qmax, points } => {
            print!("{}", spectrum_table(model, *qmin, *qmax, *points).map_err(usage)?.to_csv());
            Ok(())
        }
        Command::Run { config } => run(cli, config),
    }
}

fn registry_table() -> ResultTable {
    let mut t = ResultTable::new(&[("name", "-"), ("module", "-"), ("anchor", "-")]);
    for c in REGISTRY {
        t.push(vec![c.name.into(), c.module.into(), c.anchor.into()]);
    }
    t
}

fn spectrum_table(model: &str, qmin: f64, qmax: f64, points: usize) -> Result<ResultTable, ConfigError> {
    let tag: ModelTag = model.parse().map_err(|e: goldstone_core::Error| invalid("model", e.to_string()))?;
    if !(qmin > 0.0 && qmax >= qmin && qmax.is_finite()) {
        return Err(invalid("qmin/qmax", "need 0 < qmin <= qmax"));
    }
    if points == 0 || (points == 1 && qmax != qmin) {
        return Err(invalid("points", "need at least two points for a range, one for a single momentum"));
    }
    let p = ModelParams::default();
    let mut t = ResultTable::new(checks::SPECTRUM_COLUMNS);
    for i in 0..points {
        let s = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
        let q = qmin * (qmax / qmin).powf(s);
        t.push(checks::spectrum_row(tag, q, &p).map_err(|e| invalid("spectrum", e.to_string()))?);
    }
    Ok(t)
}

fn parse_tolerances(overrides: &BTreeMap<String, f64>, cli: &[String]) -> Result<BTreeMap<String, f64>, ConfigError> {
    let mut tol = checks::default_tolerances();
    let from_cli = cli.iter().map(|s| {
        let (name, value) = s.split_once('=').ok_or_else(|| invalid("--tol", format!("`{s}` is not NAME=VALUE")))?;
        let v: f64 = value.trim().parse().map_err(|_| invalid(name, format!("`{value}` is not a number")))?;
        Ok((name.trim().to_string(), v))
    });
    let from_config = overrides.iter().map(|(k, v)| Ok((k.clone(), *v)));
    for item in from_config.chain(from_cli) {
        let (name, v): (String, f64) = item?;
        if !tol.contains_key(&name) {
            return Err(ConfigError::UnknownTolerance(name));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, "tolerances must be positive"));
        }
        tol.insert(name, v);
    }
    Ok(tol)
}

fn out_dir(cli: &Cli, config: &ScenarioConfig, config_path: &Path) -> PathBuf {
    if let Some(dir) = &cli.out {
        return dir.clone();
    }
    if let Some(dir) = &config.output.dir {
        // Relative to the scenario file, so a config is portable with its outputs.
        return if dir.is_absolute() { dir.clone() } else { config_path.parent().unwrap_or(Path::new(".")).join(dir) };
    }
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn run(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| usage(ConfigError::Read { path: path.to_path_buf(), source }))?;
    let config = ScenarioConfig::parse(&text, path).map_err(usage)?;
    config.validate().map_err(usage)?;
    let selected = config
        .checks
        .iter()
        .map(|n| checks::find(n).ok_or_else(|| ConfigError::UnknownCheck(n.clone())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    if selected.is_empty() {
        return Err(Failure::Usage("the scenario selects no checks".into()));
    }
    let tolerances = parse_tolerances(&config.tolerances, &cli.tol).map_err(usage)?;
    let workers =
        cli.workers.or(config.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    let ctx = Context {
        config: &config,
        model: config.model_tag().map_err(usage)?,
        params: config.model_params().map_err(usage)?,
        tolerances,
    };
    let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    let dir = out_dir(cli, &config, path);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {workers} workers: {e}")))?;

    // Checks run concurrently; results are gathered by registry position in the scenario.
    let results: Vec<_> = pool.install(|| {
        use rayon::prelude::*;
        selected
            .par_iter()
            .map(|check| {
                let start = Instant::now();
                let out = (check.run)(&ctx);
                (check, out, start.elapsed().as_secs_f64())
            })
            .collect()
    });

    let mut failures = Vec::new();
    for (check, out, secs) in results {
        match out {
            Ok(o) => {
                let status = if o.pass { "pass" } else { "fail" };
                let meta = Metadata {
                    check: check.name,
                    status,
                    config_sha256: &hash,
                    version: env!("CARGO_PKG_VERSION"),
                    wall_time_s: secs,
                    note: &o.note,
                };
                table::write(&dir, &o.table, &meta)
                    .map_err(|e| Failure::Usage(format!("cannot write to {}: {e}", dir.display())))?;
                println!("{} {}: {}", status.to_uppercase(), check.name, o.note);
                if !o.pass {
                    failures.push(format!("{} outside tolerance", check.name));
                }
            }
            Err(e) => {
                println!("ERROR {}: {e}", check.name);
                failures.push(format!("{} failed: {e}", check.name));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
