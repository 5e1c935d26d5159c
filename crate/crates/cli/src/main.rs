use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use xcser_core::env::EnvData;
use xcser_core::harness::{
    experiment_curve, load_summary, run_experiment, write_curves, write_experiment, CurveMetric,
    ExperimentConfig, PRESETS,
};
use xcser_core::stats::{compare, format_table, write_csv};
use xcser_core::Mode;

/// Environment variable naming the directory relative data paths resolve against.
const DATA_DIR_VAR: &str = "XCSER_DATA_DIR";

#[derive(Parser)]
#[command(name = "xcser", version, about = "Run and compare XCS / XCS-ER experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every repetition of an experiment and write its logs.
    Run(RunArgs),
    /// Compare two finished experiments metric by metric.
    Compare(CompareArgs),
    /// Aggregate learning curves of one or more experiments into one CSV.
    Curves(CurvesArgs),
    /// List the bundled presets.
    Presets,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Config file, or the name of a bundled preset.
    config: String,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Learning steps per repetition.
    #[arg(long)]
    steps: Option<u64>,
    /// Base seed; repetition i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: runs/<env>-<mode>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Start every episode from a uniformly random state.
    #[arg(long)]
    teletransport: bool,
    /// Extra `key=value` overrides, applied before the flags above.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Do not print the resolved config.
    #[arg(long)]
    quiet: bool,
}

#[derive(clap::Args)]
struct CompareArgs {
    baseline: PathBuf,
    treatment: PathBuf,
    /// Metrics to compare (default: every metric both experiments report).
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    /// Also write the rows as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CurvesArgs {
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// reward, sys_err, macro, num_sum, generality or otm.
    #[arg(long, default_value = "reward")]
    metric: CurveMetric,
    #[arg(long)]
    out: PathBuf,
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// A file path, the same path with `.cfg` appended, or a preset name.
fn load_config(spec: &str) -> Result<ExperimentConfig> {
    let path = Path::new(spec);
    let with_ext = PathBuf::from(format!("{spec}.cfg"));
    for p in [path, with_ext.as_path()] {
        if p.is_file() {
            return Ok(ExperimentConfig::load(p)?);
        }
    }
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().trim_end_matches(".cfg").to_string())
        .unwrap_or_default();
    if PRESETS.iter().any(|(n, _)| *n == name) {
        return Ok(ExperimentConfig::preset(&name)?);
    }
    bail!("no config file or preset named `{spec}`")
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let mut cfg = load_config(&args.config)?;
    for pair in &args.set {
        cfg.set_pair(pair)?;
    }
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(r) = args.repetitions {
        cfg.repetitions = r;
    }
    if let Some(s) = args.steps {
        cfg.hp.max_learning_steps = s;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if args.teletransport {
        cfg.env.teletransport = true;
    }
    cfg.resolve_paths(&data_dir());
    cfg.validate()?;
    let data = EnvData::load(&cfg.env)?;
    if !args.quiet {
        print!("{}", cfg.to_text());
    }
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-{}", cfg.env.kind, cfg.mode)));
    let logs = run_experiment(&cfg, &data, args.jobs.max(1))?;
    let summary = write_experiment(&out, &cfg, &logs)?;
    for r in summary.runs.iter().filter(|r| r.corrupt.is_some()) {
        eprintln!("repetition {} (seed {}): {}", r.rep, r.seed, r.corrupt.as_deref().unwrap_or(""));
    }
    let mut line = format!("{} repetitions -> {}", summary.runs.len(), out.display());
    for m in ["reward", "sys_err", "macro", "otm"] {
        if let Some(a) = summary.aggregate.get(m) {
            line.push_str(&format!("  {m} {:.2}±{:.2}", a.mean, a.sd));
        }
    }
    if let Some(d) = summary.divergences {
        line.push_str(&format!("  diverged {d}"));
    }
    eprintln!("{line}");
    Ok(summary.corrupt_runs == 0)
}

fn label(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

fn cmd_compare(args: CompareArgs) -> Result<bool> {
    let base = load_summary(&args.baseline)?;
    let treat = load_summary(&args.treatment)?;
    if base.runs.len() != treat.runs.len() {
        bail!(
            "repetition counts differ: {} in {} vs {} in {}",
            base.runs.len(),
            args.baseline.display(),
            treat.runs.len(),
            args.treatment.display()
        );
    }
    let metrics: Vec<String> = if args.metrics.is_empty() {
        base.aggregate
            .keys()
            .filter(|m| treat.aggregate.contains_key(*m))
            .cloned()
            .collect()
    } else {
        args.metrics.clone()
    };
    let rows = metrics
        .iter()
        .map(|m| {
            let x = base.values(m)?;
            let y = treat.values(m)?;
            compare(&x, &y, m).with_context(|| format!("comparing `{m}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    print!("{}", format_table(&rows, &label(&args.baseline), &label(&args.treatment)));
    if let Some(out) = &args.out {
        write_csv(out, &rows)?;
    }
    Ok(true)
}

fn cmd_curves(args: CurvesArgs) -> Result<bool> {
    let series = args
        .dirs
        .iter()
        .map(|d| experiment_curve(d, args.metric).with_context(|| format!("loading {}", d.display())))
        .collect::<Result<Vec<_>>>()?;
    write_curves(&args.out, &series)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Presets => {
            for (name, _) in PRESETS {
                println!("{name}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
