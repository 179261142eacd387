//! Training data with a verifiable reward: puzzle tasks mixed with an
//! external math file at fixed ratios.
//!
//! Output lines look like `{"prompt":"...","gold":["[...]"],"source":"puzzle",...}`.
//! Math records keep their prompt and answer untouched.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{checking_letter, read_jsonl, EvalTask, Gold, TaskKind};
use crate::domain::PuzzleDomain;
use crate::error::{Error, Result};
use crate::judge::{parse_checking, parse_transition};
use crate::kind::{Instance, PuzzleKind};
use crate::with_domain;

pub const RL_SCHEMA: &str = "puzzletree.rl.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Puzzle,
    ExternalMath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RlGold {
    /// A checking letter or a math answer.
    Text(String),
    /// Acceptable next states of a transition task.
    States(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlSample {
    #[serde(default = "rl_schema")]
    pub schema: String,
    pub prompt: String,
    pub gold: RlGold,
    pub source: Source,
    pub reward_kind: RewardKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_kind: Option<TaskKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unsolvable: Option<bool>,
    /// Needed to parse transition answers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
}

fn rl_schema() -> String {
    RL_SCHEMA.into()
}

/// One line of the math file. `query`/`response` are accepted as aliases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MathRecord {
    #[serde(alias = "query")]
    pub prompt: String,
    #[serde(alias = "response")]
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlConfig {
    /// Total samples, math included.
    pub total: usize,
    /// Fraction of puzzle samples built on unsolvable states.
    pub r_u: f64,
    /// Fraction of all samples taken from the math file.
    pub r_m: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RlCounts {
    pub math: usize,
    pub puzzle: usize,
    pub unsolvable: usize,
    pub solvable: usize,
}

impl RlConfig {
    /// Exact partition of `total` by the two ratios.
    pub fn counts(&self) -> Result<RlCounts> {
        for (name, r) in [("r_u", self.r_u), ("r_m", self.r_m)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidArgument(format!("{name} = {r} is outside [0, 1]")));
            }
        }
        let math = (self.total as f64 * self.r_m).round() as usize;
        let puzzle = self.total - math;
        let unsolvable = (puzzle as f64 * self.r_u).round() as usize;
        Ok(RlCounts {
            math,
            puzzle,
            unsolvable,
            solvable: puzzle - unsolvable,
        })
    }
}

pub fn read_math_file(path: &Path) -> Result<Vec<MathRecord>> {
    if !path.exists() {
        return Err(Error::InvalidArgument(format!("math file {} not found", path.display())));
    }
    read_jsonl(path)
}

fn puzzle_sample(task: &EvalTask, instance: &Instance) -> RlSample {
    let gold = match &task.gold {
        Gold::Label(l) => RlGold::Text(checking_letter(*l).to_string()),
        Gold::States(s) => RlGold::States(s.clone()),
    };
    RlSample {
        schema: RL_SCHEMA.into(),
        prompt: task.prompt.clone(),
        gold,
        source: Source::Puzzle,
        reward_kind: RewardKind::Binary,
        task_id: Some(task.id.clone()),
        task_kind: Some(task.kind),
        unsolvable: Some(!task.current_label().is_solvable()),
        instance: matches!(task.kind, TaskKind::StateTransition).then(|| instance.clone()),
    }
}

/// Take `n` items, reshuffling the pool each time it runs dry.
fn cycle<T: Clone>(pool: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    while out.len() < n {
        order.shuffle(rng);
        out.extend(order.iter().take(n - out.len()).map(|&i| pool[i].clone()));
    }
    out
}

/// Mix puzzle tasks and math records into a shuffled training stream.
pub fn export_rl(
    tasks: &[EvalTask],
    instances: &[Instance],
    math: Option<&[MathRecord]>,
    cfg: &RlConfig,
) -> Result<Vec<RlSample>> {
    let counts = cfg.counts()?;
    let by_id: BTreeMap<(PuzzleKind, &str), &Instance> =
        instances.iter().map(|i| ((i.kind(), i.id()), i)).collect();
    let mut solvable = Vec::new();
    let mut unsolvable = Vec::new();
    for t in tasks {
        let inst = by_id
            .get(&(t.puzzle, t.instance_id.as_str()))
            .ok_or_else(|| Error::InvalidArgument(format!("{}: unknown instance {}", t.id, t.instance_id)))?;
        let s = puzzle_sample(t, inst);
        if t.current_label().is_solvable() {
            solvable.push(s);
        } else {
            unsolvable.push(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.total);
    for (pool, n, what) in [
        (&solvable, counts.solvable, "solvable"),
        (&unsolvable, counts.unsolvable, "unsolvable"),
    ] {
        if n > 0 && pool.is_empty() {
            return Err(Error::InvalidArgument(format!("{n} {what} samples requested but no {what} tasks given")));
        }
        out.extend(cycle(pool, n, &mut rng));
    }
    if counts.math > 0 {
        let records = match math {
            Some(m) if !m.is_empty() => m,
            Some(_) => return Err(Error::InvalidArgument("math file is empty".into())),
            None => return Err(Error::InvalidArgument("r_m > 0 needs a math file".into())),
        };
        out.extend(cycle(records, counts.math, &mut rng).into_iter().map(|r| RlSample {
            schema: RL_SCHEMA.into(),
            prompt: r.prompt,
            gold: RlGold::Text(r.answer),
            source: Source::ExternalMath,
            reward_kind: RewardKind::Binary,
            task_id: None,
            task_kind: None,
            unsolvable: None,
            instance: None,
        }));
    }
    out.shuffle(&mut rng);
    Ok(out)
}

/// Final answer of a math solution: `The answer is: x`, `\boxed{x}`, or
/// `Answer: x`, whichever comes last; otherwise the whole text.
pub fn math_final_answer(text: &str) -> String {
    let mut best: Option<(usize, String)> = None;
    let mut consider = |at: usize, s: &str| {
        if best.as_ref().is_none_or(|(b, _)| at >= *b) {
            best = Some((at, s.to_string()));
        }
    };
    for marker in ["The answer is:", "The answer is", "Answer:"] {
        if let Some(at) = text.rfind(marker) {
            let rest = text[at + marker.len()..].lines().next().unwrap_or("").trim_start_matches(':');
            consider(at, rest);
        }
    }
    if let Some(at) = text.rfind("\\boxed{") {
        let rest = &text[at + 7..];
        let mut depth = 1;
        let end = rest
            .char_indices()
            .find(|&(_, c)| {
                match c {
                    '{' => depth += 1,
                    '}' => depth -= 1,
                    _ => {}
                }
                depth == 0
            })
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        consider(at, &rest[..end]);
    }
    normalize_math(&best.map(|(_, s)| s).unwrap_or_else(|| text.to_string()))
}

fn normalize_math(s: &str) -> String {
    let s: String = s.chars().filter(|c| !c.is_whitespace() && !matches!(c, '$' | ',')).collect();
    let s = s.trim_end_matches('.');
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => format!("{v}"),
        _ => s.to_string(),
    }
}

/// 1 when the response is verifiably correct, else 0.
pub fn reward(sample: &RlSample, response: &str) -> u8 {
    let ok = match (&sample.source, &sample.gold) {
        (Source::ExternalMath, RlGold::Text(answer)) => {
            let got = math_final_answer(response);
            !got.is_empty() && got == math_final_answer(answer)
        }
        (Source::Puzzle, RlGold::Text(letter)) => {
            parse_checking(response).is_some_and(|c| letter.starts_with(c))
        }
        (Source::Puzzle, RlGold::States(gold)) => transition_reward(sample, gold, response).unwrap_or(false),
        _ => false,
    };
    u8::from(ok)
}

fn transition_reward(sample: &RlSample, gold: &[String], response: &str) -> Option<bool> {
    let domain = sample.instance.as_ref()?.domain().ok()?;
    with_domain!(&domain, d => {
        let p = parse_transition(response, d)?;
        let key = d.state_key(&p);
        let mut hit = false;
        for g in gold {
            hit |= d.state_key(&d.parse_state(g).ok()?) == key;
        }
        Some(hit)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_are_exact() {
        let cfg = RlConfig {
            total: 10_000,
            r_u: 0.5,
            r_m: 0.8,
            seed: 0,
        };
        let c = cfg.counts().unwrap();
        assert_eq!((c.math, c.puzzle, c.unsolvable), (8000, 2000, 1000));
        let bad = RlConfig { r_u: 1.5, ..cfg };
        assert!(bad.counts().is_err());
    }

    #[test]
    fn math_answers_normalize() {
        assert_eq!(math_final_answer("so 2+2=4.\nThe answer is: 4"), "4");
        assert_eq!(math_final_answer("thus \\boxed{1,000}"), "1000");
        assert_eq!(math_final_answer("The answer is: 4.0"), "4");
        assert_ne!(math_final_answer("The answer is: 5"), "4");
    }

    #[test]
    fn math_needs_file() {
        let cfg = RlConfig {
            total: 10,
            r_u: 0.5,
            r_m: 1.0,
            seed: 0,
        };
        assert!(export_rl(&[], &[], None, &cfg).is_err());
        let recs = vec![MathRecord {
            prompt: "1+1?".into(),
            answer: "The answer is: 2".into(),
        }];
        let out = export_rl(&[], &[], Some(&recs), &cfg).unwrap();
        assert_eq!(out.len(), 10);
        assert!(out.iter().all(|s| s.source == Source::ExternalMath));
        assert_eq!(reward(&out[0], "The answer is: 2"), 1);
        assert_eq!(reward(&out[0], ""), 0);
    }

    #[test]
    fn alias_fields_parse() {
        let r: MathRecord = serde_json::from_str(r#"{"query":"q","response":"a"}"#).unwrap();
        assert_eq!(r.prompt, "q");
    }
}
