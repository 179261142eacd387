//! Dataset-level checks shared by the integration tests and the acceptance
//! runner.

use std::collections::BTreeMap;

use puzzletree_core::corpus::bundled_all;
use puzzletree_core::judge::{judge_task, Verdict};
use puzzletree_core::taskgen::rl::{export_rl, RL_SCHEMA, reward, MathRecord, RewardKind, RlConfig, RlGold, RlSample, Source};
use puzzletree_core::taskgen::{checking_letter, generate, Gold};
use puzzletree_core::{EvalTask, Instance, PuzzleDomain, PuzzleKind, SampleTargets, SamplerConfig};

use super::taxonomy;

pub type Outcome = Result<String, String>;

/// `states` states from every family, so `8 * states` tasks.
pub fn sample_tasks(states: usize, seed: u64) -> (Vec<EvalTask>, Vec<Instance>) {
    let instances = bundled_all();
    let targets = SampleTargets {
        solvable: states.div_ceil(2),
        unsolvable: states / 2,
    };
    let mut tasks = Vec::new();
    for kind in PuzzleKind::ALL {
        tasks.extend(generate(kind, &instances, &SamplerConfig::new(targets, seed)).unwrap().tasks);
    }
    (tasks, instances)
}

fn gold_response(gold: &Gold) -> Vec<String> {
    match gold {
        Gold::Label(l) => vec![format!("The state can still be completed.\nAnswer: ({})", checking_letter(*l))],
        Gold::States(s) => s.iter().map(|g| format!("Next state: {g}")).collect(),
    }
}

/// Every gold answer judges Correct; every explored dead child shown with
/// a solvable current judges UnsolvableChild.
pub fn closure(states: usize, seed: u64) -> Outcome {
    let (tasks, instances) = sample_tasks(states, seed);
    let index: BTreeMap<(PuzzleKind, &str), &Instance> = instances.iter().map(|i| ((i.kind(), i.id()), i)).collect();
    let (mut golds, mut explored) = (0, 0);
    for t in &tasks {
        let inst = index[&(t.puzzle, t.instance_id.as_str())];
        for response in gold_response(&t.gold) {
            let r = judge_task(t, inst, Some(&response)).map_err(|e| e.to_string())?;
            if !r.correct {
                return Err(format!("{}: gold answer judged {:?}", t.id, r.verdict));
            }
            golds += 1;
        }
        if let (Gold::States(_), Some(child)) = (&t.gold, &t.metadata.explored) {
            if t.current_label().is_solvable() {
                let r = judge_task(t, inst, Some(&format!("Next state: {child}"))).map_err(|e| e.to_string())?;
                if r.verdict != Some(Verdict::UnsolvableChild) {
                    return Err(format!("{}: explored child judged {:?}", t.id, r.verdict));
                }
                explored += 1;
            }
        }
    }
    Ok(format!(
        "{} tasks: {golds}/{golds} gold answers Correct, {explored}/{explored} explored children UnsolvableChild",
        tasks.len()
    ))
}

pub fn math_records(n: usize) -> Vec<MathRecord> {
    (1..=n)
        .map(|i| MathRecord {
            prompt: format!("What is {i} times {}?", i + 2),
            answer: format!("{i} times {} is {}.\nThe answer is: {}", i + 2, i * (i + 2), i * (i + 2)),
        })
        .collect()
}

fn sample_gold_response(s: &RlSample) -> String {
    match (&s.source, &s.gold) {
        (Source::ExternalMath, RlGold::Text(a)) => a.clone(),
        (_, RlGold::Text(letter)) => format!("Answer: ({letter})"),
        (_, RlGold::States(g)) => format!("Next state: {}", g[0]),
    }
}

/// Exact source and class partitions for each unsolvable share at an 80%
/// math mix, gold responses rewarded 1 and the error-taxonomy answers 0.
pub fn rl_partitions(tasks: &[EvalTask], instances: &[Instance]) -> Outcome {
    let math = math_records(40);
    let mut notes = Vec::new();
    for r_u in [0.2, 0.5, 0.8] {
        let cfg = RlConfig {
            total: 10_000,
            r_u,
            r_m: 0.8,
            seed: 9,
        };
        let samples = export_rl(tasks, instances, Some(&math), &cfg).map_err(|e| e.to_string())?;
        let n_math = samples.iter().filter(|s| s.source == Source::ExternalMath).count();
        let n_unsolvable = samples.iter().filter(|s| s.unsolvable == Some(true)).count();
        let n_solvable = samples.iter().filter(|s| s.unsolvable == Some(false)).count();
        let want_unsolvable = (2000.0 * r_u).round() as usize;
        if (samples.len(), n_math, n_unsolvable, n_solvable) != (10_000, 8000, want_unsolvable, 2000 - want_unsolvable) {
            return Err(format!(
                "r_u={r_u}: {} samples, {n_math} math, {n_unsolvable} unsolvable, {n_solvable} solvable",
                samples.len()
            ));
        }
        for s in &samples {
            if reward(s, &sample_gold_response(s)) != 1 {
                return Err(format!("r_u={r_u}: gold response for {:?} not rewarded", s.task_id));
            }
        }
        notes.push(format!("r_u={r_u}: 8000/{n_unsolvable}/{n_solvable}"));
    }

    for t in taxonomy() {
        let gold: Vec<String> = t.case.gold.iter().map(|s| t.domain.canonical_text(s)).collect();
        let sample = RlSample {
            schema: RL_SCHEMA.into(),
            prompt: String::new(),
            gold: RlGold::States(gold),
            source: Source::Puzzle,
            reward_kind: RewardKind::Binary,
            task_id: None,
            task_kind: None,
            unsolvable: Some(!t.case.current_label.is_solvable()),
            instance: Some(Instance::Sudoku {
                id: format!("taxonomy-{}", t.index),
                grid: t.domain.initial().to_kaggle(),
            }),
        };
        if reward(&sample, &t.response) != 0 {
            return Err(format!("case {} response ({}) rewarded", t.index, t.expected));
        }
        if reward(&sample, &sample_gold_response(&sample)) != 1 {
            return Err(format!("case {} gold not rewarded", t.index));
        }
    }
    notes.push("5/5 error responses rewarded 0".into());
    Ok(notes.join(", "))
}
