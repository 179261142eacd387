//! The `puzzletree` command line.

pub mod eval;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use puzzletree_core::corpus::{bundled_all, parse_instances};
use puzzletree_core::judge::{build_report, histogram_csv, judge_task, JudgedResult, Report};
use puzzletree_core::taskgen::rl::{export_rl, read_math_file, RlConfig};
use puzzletree_core::taskgen::{dataset_stats, generate_dataset, read_jsonl, stats_table, write_jsonl, EvalTask, Manifest};
use puzzletree_core::{Instance, PuzzleKind, SampleTargets, SamplerConfig};

use crate::eval::{run_eval, EvalRecord, ModelConfig};

#[derive(Debug, Parser)]
#[command(name = "puzzletree", version, about = "Puzzle state-space benchmark toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample states and write checking and transition tasks.
    Gen(GenArgs),
    /// Per-puzzle question and state counts of a task file.
    Stats(StatsArgs),
    /// Query a model for every task.
    Eval(EvalArgs),
    /// Score stored responses.
    Judge(JudgeArgs),
    /// Metrics tables and difficulty histograms from judged results.
    Report(ReportArgs),
    /// Training samples mixing puzzle tasks with a math file.
    ExportRl(ExportRlArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// A puzzle family, or `all`.
    #[arg(long, default_value = "all")]
    pub puzzle: String,
    /// Sampled states per puzzle family (each yields two tasks).
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Share of unsolvable states. Defaults to the published split
    /// (one half, or 406 of 500 for grid puzzles).
    #[arg(long)]
    pub unsolvable_ratio: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instance JSONL file; the bundled question banks otherwise.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub violation_mix: f64,
    #[arg(long, default_value_t = 8)]
    pub walks: usize,
    /// Keep a solvable shortfall instead of topping up unsolvable states.
    #[arg(long)]
    pub no_rebalance: bool,
    /// Output directory for tasks.jsonl, instances.jsonl and manifest.json.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Task JSONL file, or a directory written by `gen`.
    pub tasks: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// TOML or JSON model configuration; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    #[arg(long)]
    pub timeout_secs: Option<u64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long)]
    pub api_key_env: Option<String>,
    #[arg(long)]
    pub backoff_ms: Option<u64>,
    #[arg(long, default_value_t = 4)]
    pub parallelism: usize,
    #[arg(long, default_value = ".puzzletree-cache")]
    pub cache_dir: PathBuf,
    /// Only the first N tasks.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Responses JSONL to write.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct JudgeArgs {
    /// Task JSONL file, or a directory written by `gen`.
    #[arg(long)]
    pub tasks: PathBuf,
    /// Instance JSONL; defaults to instances.jsonl next to the tasks.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    #[arg(long)]
    pub responses: PathBuf,
    /// Judged results JSONL to write.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub results: PathBuf,
    /// Directory for report.json and histogram.csv.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportRlArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    #[arg(long)]
    pub instances: Option<PathBuf>,
    /// Share of puzzle samples built on unsolvable states.
    #[arg(long, default_value_t = 0.5)]
    pub r_u: f64,
    /// Share of all samples drawn from the math file.
    #[arg(long, default_value_t = 0.0)]
    pub r_m: f64,
    #[arg(long)]
    pub math_file: Option<PathBuf>,
    /// Total samples; defaults to the number of tasks.
    #[arg(long)]
    pub total: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

/// Published per-class split for `n` states.
pub fn targets_for(kind: PuzzleKind, n: usize, ratio: Option<f64>) -> Result<SampleTargets> {
    let ratio = ratio.unwrap_or(match kind {
        PuzzleKind::Grid => 406.0 / 500.0,
        _ => 0.5,
    });
    if !(0.0..=1.0).contains(&ratio) {
        bail!("unsolvable ratio {ratio} is outside [0, 1]");
    }
    let unsolvable = (n as f64 * ratio).round() as usize;
    Ok(SampleTargets {
        solvable: n - unsolvable,
        unsolvable,
    })
}

fn tasks_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("tasks.jsonl")
    } else {
        p.to_path_buf()
    }
}

fn instances_path(tasks: &Path, explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let t = tasks_path(tasks);
            t.parent().unwrap_or(Path::new(".")).join("instances.jsonl")
        }
    }
}

fn load_instances(path: &Path) -> Result<Vec<Instance>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instances(&text)?)
}

fn load_tasks(path: &Path) -> Result<Vec<EvalTask>> {
    let path = tasks_path(path);
    read_jsonl(&path).with_context(|| format!("reading {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_gen(a: &GenArgs) -> Result<Manifest> {
    let kinds: Vec<PuzzleKind> = if a.puzzle == "all" {
        PuzzleKind::ALL.to_vec()
    } else {
        a.puzzle.split(',').map(|k| k.parse()).collect::<Result<_, _>>()?
    };
    let instances = match &a.instances {
        Some(p) => load_instances(p)?,
        None => bundled_all(),
    };
    let mut plan = Vec::new();
    for &kind in &kinds {
        let mut cfg = SamplerConfig::new(targets_for(kind, a.n, a.unsolvable_ratio)?, a.seed);
        cfg.violation_mix = a.violation_mix;
        cfg.walks_per_instance = a.walks;
        cfg.rebalance = !a.no_rebalance;
        plan.push((kind, cfg));
    }
    let (tasks, manifest) = generate_dataset(&instances, &plan, a.seed)?;
    fs::create_dir_all(&a.out)?;
    write_jsonl(&a.out.join("tasks.jsonl"), &tasks)?;
    let used: Vec<&Instance> = instances.iter().filter(|i| kinds.contains(&i.kind())).collect();
    write_jsonl(&a.out.join("instances.jsonl"), &used)?;
    write_json(&a.out.join("manifest.json"), &manifest)?;
    for p in &manifest.puzzles {
        println!(
            "{}: {} solvable / {} unsolvable states from {} instances",
            p.puzzle, p.solvable, p.unsolvable, p.instances
        );
    }
    println!("wrote {} tasks to {}", tasks.len(), a.out.display());
    Ok(manifest)
}

pub fn cmd_stats(a: &StatsArgs) -> Result<()> {
    let rows = dataset_stats(&load_tasks(&a.tasks)?);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        print!("{}", stats_table(&rows));
    }
    Ok(())
}

pub async fn cmd_eval(a: &EvalArgs) -> Result<Vec<EvalRecord>> {
    let mut cfg = match (&a.config, &a.model) {
        (Some(p), _) => ModelConfig::load(p)?,
        (None, Some(m)) => ModelConfig::new(m.clone()),
        (None, None) => bail!("either --config or --model is required"),
    };
    if let Some(m) = &a.model {
        cfg.model = m.clone();
    }
    if let Some(v) = &a.endpoint {
        cfg.endpoint = v.clone();
    }
    if let Some(v) = a.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = a.max_tokens {
        cfg.max_tokens = Some(v);
    }
    if let Some(v) = a.timeout_secs {
        cfg.timeout_secs = v;
    }
    if let Some(v) = a.max_retries {
        cfg.max_retries = v;
    }
    if let Some(v) = &a.api_key_env {
        cfg.api_key_env = v.clone();
    }
    if let Some(v) = a.backoff_ms {
        cfg.backoff_ms = v;
    }
    let mut tasks = load_tasks(&a.tasks)?;
    if let Some(n) = a.limit {
        tasks.truncate(n);
    }
    let records = run_eval(cfg, tasks, a.parallelism, &a.cache_dir).await?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_jsonl(&a.out, &records)?;
    let failed = records.iter().filter(|r| r.failed).count();
    let cached = records.iter().filter(|r| r.cached).count();
    println!("{} responses ({cached} cached, {failed} failed) -> {}", records.len(), a.out.display());
    Ok(records)
}

pub fn cmd_judge(a: &JudgeArgs) -> Result<Vec<JudgedResult>> {
    let tasks = load_tasks(&a.tasks)?;
    let instances = load_instances(&instances_path(&a.tasks, a.instances.as_deref()))?;
    let index: BTreeMap<(PuzzleKind, &str), &Instance> = instances.iter().map(|i| ((i.kind(), i.id()), i)).collect();
    let records: Vec<EvalRecord> = read_jsonl(&a.responses)?;
    let by_task: BTreeMap<&str, &EvalRecord> = records.iter().map(|r| (r.task_id.as_str(), r)).collect();
    let mut results = Vec::with_capacity(tasks.len());
    for t in &tasks {
        let inst = index
            .get(&(t.puzzle, t.instance_id.as_str()))
            .with_context(|| format!("{}: instance {} not found", t.id, t.instance_id))?;
        let response = by_task.get(t.id.as_str()).and_then(|r| r.response.as_deref());
        results.push(judge_task(t, inst, response)?);
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_jsonl(&a.out, &results)?;
    let correct = results.iter().filter(|r| r.correct).count();
    println!("judged {} responses, {correct} correct -> {}", results.len(), a.out.display());
    Ok(results)
}

fn pct(v: Option<f64>) -> String {
    v.map(|v| format!("{:.1}", v * 100.0)).unwrap_or_else(|| "-".into())
}

pub fn report_table(r: &Report) -> String {
    let mut s = format!(
        "{:<16}{:>8}{:>8}{:>8}{:>8}{:>10}{:>10}{:>10}\n",
        "Task", "SC acc", "P", "R", "F1", "ST acc", "ST solv", "ST unsolv"
    );
    for p in &r.puzzles {
        let c = p.checking.as_ref();
        s.push_str(&format!(
            "{:<16}{:>8}{:>8}{:>8}{:>8}{:>10}{:>10}{:>10}\n",
            p.puzzle.title(),
            pct(c.map(|c| c.accuracy)),
            pct(c.map(|c| c.precision)),
            pct(c.map(|c| c.recall)),
            pct(c.map(|c| c.f1)),
            pct(p.transition_accuracy),
            pct(p.breakdown.solvable.as_ref().map(|b| b.accuracy)),
            pct(p.breakdown.unsolvable.as_ref().map(|b| b.accuracy)),
        ));
    }
    s
}

pub fn cmd_report(a: &ReportArgs) -> Result<Report> {
    let results: Vec<JudgedResult> = read_jsonl(&a.results)?;
    let report = build_report(&results);
    fs::create_dir_all(&a.out)?;
    write_json(&a.out.join("report.json"), &report)?;
    fs::write(a.out.join("histogram.csv"), histogram_csv(&results))?;
    print!("{}", report_table(&report));
    Ok(report)
}

pub fn cmd_export_rl(a: &ExportRlArgs) -> Result<usize> {
    let tasks = load_tasks(&a.tasks)?;
    let instances = load_instances(&instances_path(&a.tasks, a.instances.as_deref()))?;
    let math = match &a.math_file {
        Some(p) => Some(read_math_file(p)?),
        None => None,
    };
    let cfg = RlConfig {
        total: a.total.unwrap_or(tasks.len()),
        r_u: a.r_u,
        r_m: a.r_m,
        seed: a.seed,
    };
    let samples = export_rl(&tasks, &instances, math.as_deref(), &cfg)?;
    write_jsonl(&a.out, &samples)?;
    let c = cfg.counts()?;
    println!(
        "{} samples: {} puzzle ({} unsolvable), {} math -> {}",
        samples.len(),
        c.puzzle,
        c.unsolvable,
        c.math,
        a.out.display()
    );
    Ok(samples.len())
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(drop),
        Command::Stats(a) => cmd_stats(a),
        Command::Eval(a) => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(cmd_eval(a)).map(drop)
        }
        Command::Judge(a) => cmd_judge(a).map(drop),
        Command::Report(a) => cmd_report(a).map(drop),
        Command::ExportRl(a) => cmd_export_rl(a).map(drop),
    }
}
