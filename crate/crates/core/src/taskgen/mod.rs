//! Evaluation tasks: generation from sampled states, the JSONL task file
//! format, and dataset statistics.
//!
//! Task lines look like
//!
//! ```text
//! {"schema":"puzzletree.task.v1","id":"sudoku-0007-st","state_id":"sudoku-0007",
//!  "puzzle":"sudoku","kind":"state_transition","instance_id":"sudoku-012",
//!  "prompt":"...","gold":{"states":["[[...]]"]},"difficulty":31,
//!  "metadata":{"depth":18,"sample":"walk","seed":7,"current":"...",
//!              "current_label":"Solvable","parent":"...","explored":"..."}}
//! ```
//!
//! Checking tasks carry `"gold":{"label":"Unsolvable"}` instead.

pub mod prompts;
pub mod rl;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coloring::GraphColoring;
use crate::domain::{StateLabel, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::game24::Game24;
use crate::grid::GridPuzzle;
use crate::kind::{typed_domains, FromDomain, Instance, PuzzleKind};
use crate::sampler::{
    build_transition_context, sample_balanced, SampleKind, SampleTargets, SamplerConfig, Shortage,
};
use crate::sudoku::Sudoku;

pub use prompts::Render;

pub const TASK_SCHEMA: &str = "puzzletree.task.v1";
pub const MANIFEST_SCHEMA: &str = "puzzletree.manifest.v1";
pub const GENERATOR_VERSION: &str = concat!("puzzletree ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    StateChecking,
    StateTransition,
}

impl TaskKind {
    fn suffix(self) -> &'static str {
        match self {
            TaskKind::StateChecking => "sc",
            TaskKind::StateTransition => "st",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gold {
    /// Checking: the label of the current state.
    Label(StateLabel),
    /// Transition: canonical texts of every acceptable next state.
    States(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskMeta {
    pub depth: usize,
    pub sample: SampleKind,
    pub seed: u64,
    pub current: String,
    pub current_label: StateLabel,
    pub parent: Option<String>,
    pub explored: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalTask {
    pub schema: String,
    pub id: String,
    /// Shared by the checking and transition task of one sampled state.
    pub state_id: String,
    pub puzzle: PuzzleKind,
    pub kind: TaskKind,
    pub instance_id: String,
    pub prompt: String,
    pub gold: Gold,
    /// Empty slots in the current state.
    pub difficulty: usize,
    pub metadata: TaskMeta,
}

impl EvalTask {
    pub fn current_label(&self) -> StateLabel {
        self.metadata.current_label
    }
}

/// Letter a correct checking answer picks.
pub fn checking_letter(label: StateLabel) -> char {
    if label.is_solvable() {
        'A'
    } else {
        'B'
    }
}

/// Per-puzzle sampling summary written to the dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleManifest {
    pub puzzle: PuzzleKind,
    pub instances: usize,
    pub targets: SampleTargets,
    pub solvable: usize,
    pub unsolvable: usize,
    pub shortage: Shortage,
    /// `"<label>/<decile>"` to count.
    pub buckets: BTreeMap<String, usize>,
    pub sample_kinds: BTreeMap<String, usize>,
    pub violation_mix: f64,
    pub walks_per_instance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub generator: String,
    pub seed: u64,
    pub oracle_budget: u64,
    pub tasks: usize,
    pub puzzles: Vec<PuzzleManifest>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub tasks: Vec<EvalTask>,
    pub manifest: PuzzleManifest,
}

fn make_tasks<D: Render>(
    d: &D,
    kind: PuzzleKind,
    state_id: &str,
    sample: &crate::sampler::LabeledState<D::State, D::Move>,
    seed: u64,
) -> Result<Vec<EvalTask>> {
    let ctx = build_transition_context(d, sample)?;
    let meta = TaskMeta {
        depth: sample.depth,
        sample: sample.kind,
        seed,
        current: d.canonical_text(&sample.state),
        current_label: sample.label,
        parent: ctx.parent.as_ref().map(|p| d.canonical_text(p)),
        explored: ctx.explored_child.as_ref().map(|(_, s)| d.canonical_text(s)),
    };
    let task = |k: TaskKind, prompt: String, gold: Gold| EvalTask {
        schema: TASK_SCHEMA.to_string(),
        id: format!("{state_id}-{}", k.suffix()),
        state_id: state_id.to_string(),
        puzzle: kind,
        kind: k,
        instance_id: sample.instance_id.clone(),
        prompt,
        gold,
        difficulty: d.difficulty(&sample.state),
        metadata: meta.clone(),
    };
    let gold_states = ctx.gold.iter().map(|s| d.canonical_text(s)).collect();
    Ok(vec![
        task(TaskKind::StateChecking, d.checking_prompt(&ctx)?, Gold::Label(sample.label)),
        task(TaskKind::StateTransition, d.transition_prompt(&ctx)?, Gold::States(gold_states)),
    ])
}

/// Sample states for one puzzle family and turn each into a checking and
/// a transition task.
pub fn generate_typed<D: Render + FromDomain>(instances: &[Instance], cfg: &SamplerConfig) -> Result<Generated> {
    let kind = D::KIND;
    let domains = typed_domains::<D>(instances)?;
    if domains.is_empty() {
        return Err(Error::InvalidArgument(format!("no {kind} instances")));
    }
    let set = sample_balanced(&domains, cfg)?;
    let index: BTreeMap<&str, &D> = domains.iter().map(|(id, d)| (id.as_str(), d)).collect();
    let tasks: Vec<Vec<EvalTask>> = set
        .states
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let d = index[s.instance_id.as_str()];
            make_tasks(d, kind, &format!("{kind}-{:04}", i + 1), s, cfg.seed)
        })
        .collect::<Result<_>>()?;

    let mut sample_kinds = BTreeMap::new();
    for s in &set.states {
        let name = serde_json::to_value(s.kind)?.as_str().unwrap_or_default().to_string();
        *sample_kinds.entry(name).or_insert(0) += 1;
    }
    let solvable = set.states.iter().filter(|s| s.label.is_solvable()).count();
    let manifest = PuzzleManifest {
        puzzle: kind,
        instances: domains.len(),
        targets: cfg.targets,
        solvable,
        unsolvable: set.states.len() - solvable,
        shortage: set.shortage.clone(),
        buckets: set
            .buckets
            .iter()
            .map(|((label, b), n)| (format!("{label:?}/{b}"), *n))
            .collect(),
        sample_kinds,
        violation_mix: cfg.violation_mix,
        walks_per_instance: cfg.walks_per_instance,
    };
    Ok(Generated {
        tasks: tasks.into_iter().flatten().collect(),
        manifest,
    })
}

pub fn generate(kind: PuzzleKind, instances: &[Instance], cfg: &SamplerConfig) -> Result<Generated> {
    match kind {
        PuzzleKind::Sudoku => generate_typed::<Sudoku>(instances, cfg),
        PuzzleKind::Coloring => generate_typed::<GraphColoring>(instances, cfg),
        PuzzleKind::Game24 => generate_typed::<Game24>(instances, cfg),
        PuzzleKind::Grid => generate_typed::<GridPuzzle>(instances, cfg),
    }
}

/// Per-class state counts of the published split.
pub fn standard_targets(kind: PuzzleKind) -> SampleTargets {
    match kind {
        PuzzleKind::Grid => SampleTargets {
            solvable: 94,
            unsolvable: 406,
        },
        _ => SampleTargets::balanced(250),
    }
}

/// Generate several puzzle families and assemble the manifest.
pub fn generate_dataset(
    instances: &[Instance],
    plan: &[(PuzzleKind, SamplerConfig)],
    seed: u64,
) -> Result<(Vec<EvalTask>, Manifest)> {
    let mut tasks = Vec::new();
    let mut puzzles = Vec::new();
    for (kind, cfg) in plan {
        let g = generate(*kind, instances, cfg)?;
        tasks.extend(g.tasks);
        puzzles.push(g.manifest);
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.to_string(),
        generator: GENERATOR_VERSION.to_string(),
        seed,
        oracle_budget: DEFAULT_NODE_BUDGET,
        tasks: tasks.len(),
        puzzles,
    };
    Ok((tasks, manifest))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<usize> {
    let mut out = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(items.len())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), n + 1)))?,
        );
    }
    Ok(out)
}

pub fn export_jsonl(tasks: &[EvalTask], path: &Path) -> Result<usize> {
    write_jsonl(path, tasks)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRow {
    pub puzzle: String,
    pub questions: usize,
    pub solvable: usize,
    pub unsolvable: usize,
}

/// Questions (distinct instances) and sampled states per class, one row
/// per puzzle family in the fixed family order.
pub fn dataset_stats(tasks: &[EvalTask]) -> Vec<StatsRow> {
    PuzzleKind::ALL
        .iter()
        .map(|&kind| {
            let mine: Vec<&EvalTask> = tasks.iter().filter(|t| t.puzzle == kind).collect();
            let questions: BTreeSet<&str> = mine.iter().map(|t| t.instance_id.as_str()).collect();
            let mut states: BTreeMap<&str, StateLabel> = BTreeMap::new();
            for t in &mine {
                states.insert(t.state_id.as_str(), t.current_label());
            }
            let solvable = states.values().filter(|l| l.is_solvable()).count();
            StatsRow {
                puzzle: kind.title().to_string(),
                questions: questions.len(),
                solvable,
                unsolvable: states.len() - solvable,
            }
        })
        .collect()
}

pub fn stats_table(rows: &[StatsRow]) -> String {
    let mut s = format!("{:<16}{:>10}{:>18}{:>20}\n", "Task", "Questions", "Solvable States", "Unsolvable States");
    for r in rows {
        s.push_str(&format!("{:<16}{:>10}{:>18}{:>20}\n", r.puzzle, r.questions, r.solvable, r.unsolvable));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn games() -> Vec<Instance> {
        [[5, 9, 12, 12], [1, 2, 3, 4], [4, 4, 10, 10]]
            .into_iter()
            .enumerate()
            .map(|(i, numbers)| Instance::Game24 {
                id: format!("game24-{i:03}"),
                numbers,
            })
            .collect()
    }

    #[test]
    fn tasks_come_in_pairs() {
        let cfg = SamplerConfig::new(SampleTargets::balanced(4), 1);
        let g = generate(PuzzleKind::Game24, &games(), &cfg).unwrap();
        assert_eq!(g.tasks.len(), 16);
        let stats = dataset_stats(&g.tasks);
        assert_eq!(stats[2].solvable, 4);
        assert_eq!(stats[2].unsolvable, 4);
        for pair in g.tasks.chunks(2) {
            assert_eq!(pair[0].state_id, pair[1].state_id);
            assert!(pair[0].prompt.contains("Do not solve using programming."));
            assert!(matches!(pair[1].gold, Gold::States(ref v) if !v.is_empty()));
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let cfg = SamplerConfig::new(SampleTargets::balanced(2), 5);
        let g = generate(PuzzleKind::Game24, &games(), &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        assert_eq!(export_jsonl(&g.tasks, &path).unwrap(), g.tasks.len());
        let back: Vec<EvalTask> = read_jsonl(&path).unwrap();
        assert_eq!(back, g.tasks);
        assert_eq!(export_jsonl(&[], &path).unwrap(), 0);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
    }

    #[test]
    fn empty_stats_are_zero() {
        let rows = dataset_stats(&[]);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.questions == 0 && r.solvable == 0 && r.unsolvable == 0));
    }
}
