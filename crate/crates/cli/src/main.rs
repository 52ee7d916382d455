use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polyrl_core::experiment::{
    render_generalization_row, render_run_report, render_runs_csv, render_summary_csv, run_batch, run_experiment,
    summarize, BatchSummary, RunRecord, GENERALIZATION_CSV_HEADER,
};
use polyrl_core::{generalization_test, ActionNetwork, ExperimentConfig, Profile};

#[derive(Parser)]
#[command(name = "polyrl", version, about = "Train cart-pole neurocontrollers with the polytope method")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one training and save its report and best weights.
    Train(CommonArgs),
    /// Run a batch of independent trainings and summarize them.
    Experiment {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of experiments (overrides config and profile).
        #[arg(long)]
        experiments: Option<usize>,
    },
    /// Measure how often a saved network balances from random starts.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Weight file produced by `train` or `experiment`.
        #[arg(long)]
        weights: PathBuf,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Step cap and batch size preset.
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Desk,
    Paper,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Paper => Profile::Paper,
        }
    }
}

impl CommonArgs {
    fn load_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                ExperimentConfig::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(profile) = self.profile {
            cfg.apply_profile(profile.into());
        }
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn create_out_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating output directory {}", self.out.display()))
    }
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_run(dir: &Path, stem: &str, cfg: &ExperimentConfig, record: &RunRecord) -> Result<()> {
    let report = render_run_report(cfg, record, Some(now_secs()))?;
    write_file(&dir.join(format!("{stem}.report.toml")), &report)?;
    write_file(&dir.join(format!("{stem}.weights")), &record.network(cfg)?.to_weight_file())
}

fn print_summary(summary: &BatchSummary) {
    println!(
        "{:<16} {:>5} {:>9} {:>10} {:>10} {:>10} {:>10}",
        "table", "runs", "succeeded", "best", "worst", "mean", "sd"
    );
    let rows = [("training cycles", &summary.training_cycles), ("generalization %", &summary.generalization)];
    for (name, stats) in rows {
        if let Some(s) = stats {
            println!(
                "{:<16} {:>5} {:>9} {:>10.1} {:>10.1} {:>10.1} {:>10.1}",
                name, summary.runs, summary.successes, s.best, s.worst, s.mean, s.sd
            );
        }
    }
}

fn cmd_train(args: &CommonArgs) -> Result<ExitCode> {
    let cfg = args.load_config()?;
    args.create_out_dir()?;
    let record = run_experiment(&cfg, 0)?;
    write_run(&args.out, "train", &cfg, &record)?;
    let r = &record.report;
    println!(
        "succeeded={} total_evaluations={} restarts_used={} best_cycle_steps={}",
        r.succeeded, r.total_evaluations, r.restarts_used, r.best_cycle_steps
    );
    if let Some(g) = record.generalization {
        println!("generalization: {}/{} ({:.2}%)", g.successes, g.tests_run, g.success_percentage);
    }
    println!("wrote {}", args.out.display());
    Ok(if r.succeeded { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_experiment(args: &CommonArgs, experiments: Option<usize>) -> Result<ExitCode> {
    let mut cfg = args.load_config()?;
    if let Some(n) = experiments {
        cfg.n_experiments = n;
    }
    cfg.validate()?;
    args.create_out_dir()?;
    let records = run_batch(&cfg)?;
    for record in &records {
        write_run(&args.out, &format!("run_{:03}", record.experiment), &cfg, record)?;
    }
    let summary = summarize(&records);
    write_file(&args.out.join("runs.csv"), &render_runs_csv(&records))?;
    write_file(&args.out.join("summary.csv"), &render_summary_csv(&summary))?;
    print_summary(&summary);
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(args: &CommonArgs, weights: &Path) -> Result<ExitCode> {
    let cfg = args.load_config()?;
    let text = fs::read_to_string(weights).with_context(|| format!("reading weights {}", weights.display()))?;
    let net = ActionNetwork::from_weight_file(&text).with_context(|| format!("loading weights {}", weights.display()))?;
    if net.topology() != &cfg.topology {
        bail!("weight file topology {:?} does not match configured {:?}", net.topology(), cfg.topology);
    }
    let result = generalization_test(
        net.topology(),
        net.params(),
        cfg.master_seed,
        &cfg.env,
        cfg.generalization_tests,
        cfg.generalization_threshold,
    )?;
    println!(
        "tests_run={} successes={} success_percentage={:.2}",
        result.tests_run, result.successes, result.success_percentage
    );

    args.create_out_dir()?;
    let table = args.out.join("generalization.csv");
    let fresh = !table.exists();
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&table)
        .with_context(|| format!("opening {}", table.display()))?;
    let mut rows = String::new();
    if fresh {
        rows.push_str(GENERALIZATION_CSV_HEADER);
        rows.push('\n');
    }
    rows.push_str(&render_generalization_row(
        &weights.display().to_string(),
        cfg.master_seed,
        cfg.generalization_threshold,
        &result,
    ));
    file.write_all(rows.as_bytes()).with_context(|| format!("writing {}", table.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Experiment { common, experiments } => cmd_experiment(common, *experiments),
        Command::Evaluate { common, weights } => cmd_evaluate(common, weights),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
