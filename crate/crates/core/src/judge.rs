//! Answer parsing, transition verdicts and checking metrics.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::domain::{PuzzleDomain, StateLabel};
use crate::error::{Error, Result};
use crate::kind::{Instance, PuzzleKind};
use crate::pylit;
use crate::sampler::TransitionContext;
use crate::taskgen::{checking_letter, EvalTask, Gold, TaskKind};
use crate::with_domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Correct,
    MultipleMoves,
    InvalidMove,
    UnsolvableChild,
    BacktrackingFailure,
    Sibling,
    Unparseable,
}

impl Verdict {
    pub const ALL: [Verdict; 7] = [
        Verdict::Correct,
        Verdict::MultipleMoves,
        Verdict::InvalidMove,
        Verdict::UnsolvableChild,
        Verdict::BacktrackingFailure,
        Verdict::Sibling,
        Verdict::Unparseable,
    ];
}

fn answer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"Answer:\s*\(([AB])\)").unwrap())
}

/// Letter of the last `Answer: (A)` / `Answer: (B)` in `text`.
pub fn parse_checking(text: &str) -> Option<char> {
    answer_re()
        .captures_iter(text)
        .last()
        .and_then(|c| c[1].chars().next())
}

/// The list literal after the last `Next state:` marker, as raw text.
pub fn extract_next_state(text: &str) -> Option<&str> {
    let at = text.rfind("Next state:")?;
    let tail = &text[at + "Next state:".len()..];
    let start = tail.find('[')?;
    let (_, end) = pylit::parse_prefix(tail).ok()?;
    Some(&tail[start..end])
}

pub fn parse_transition<D: PuzzleDomain>(text: &str, domain: &D) -> Option<D::State> {
    domain.parse_state(extract_next_state(text)?).ok()
}

/// Everything the transition verdict depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeCase<S> {
    pub current: S,
    pub current_label: StateLabel,
    pub parent: Option<S>,
    pub explored: Option<S>,
    pub gold: Vec<S>,
}

impl<S: Clone> JudgeCase<S> {
    pub fn from_context<M>(ctx: &TransitionContext<S, M>) -> Self {
        Self {
            current: ctx.current().clone(),
            current_label: ctx.current_label,
            parent: ctx.parent.clone(),
            explored: ctx.explored_child.as_ref().map(|(_, s)| s.clone()),
            gold: ctx.gold.clone(),
        }
    }
}

impl<S> JudgeCase<S> {
    /// Rebuild a case from the texts stored in a transition task.
    pub fn from_task<D: PuzzleDomain<State = S>>(task: &EvalTask, domain: &D) -> Result<Self> {
        let Gold::States(gold) = &task.gold else {
            return Err(Error::InvalidArgument(format!("{} is not a transition task", task.id)));
        };
        let meta = &task.metadata;
        let opt = |t: &Option<String>| t.as_deref().map(|t| domain.parse_state(t)).transpose();
        Ok(Self {
            current: domain.parse_state(&meta.current)?,
            current_label: meta.current_label,
            parent: opt(&meta.parent)?,
            explored: opt(&meta.explored)?,
            gold: gold.iter().map(|g| domain.parse_state(g)).collect::<Result<_>>()?,
        })
    }
}

type Check<'a> = Box<dyn Fn() -> Result<bool> + 'a>;

/// Verdict tiers in precedence order; the first tier with a passing check
/// wins, and checks inside a tier all lead to the same verdict.
fn tiers<'a, D: PuzzleDomain>(
    d: &'a D,
    p: &'a D::State,
    case: &'a JudgeCase<D::State>,
) -> Vec<(Verdict, Vec<Check<'a>>)> {
    let key = d.state_key(p);
    let is = move |s: &Option<D::State>, key: &str| s.as_ref().is_some_and(|s| d.state_key(s) == key);
    if !case.current_label.is_solvable() {
        let k1 = key.clone();
        return vec![
            (Verdict::Correct, vec![Box::new(move || Ok(is(&case.parent, &k1)))]),
            (
                Verdict::Sibling,
                vec![Box::new(move || {
                    Ok(case
                        .parent
                        .as_ref()
                        .is_some_and(|par| d.is_forward_step(par, p) && d.state_key(&case.current) != key))
                })],
            ),
            (Verdict::BacktrackingFailure, vec![Box::new(|| Ok(true))]),
        ];
    }
    let forward = d.is_forward_step(&case.current, p);
    let (k1, k2, k3) = (key.clone(), key.clone(), key);
    vec![
        (
            Verdict::Correct,
            vec![Box::new(move || Ok(case.gold.iter().any(|g| d.state_key(g) == k1)))],
        ),
        (
            Verdict::UnsolvableChild,
            vec![
                Box::new(move || Ok(is(&case.explored, &k2))),
                Box::new(move || Ok(forward && d.rule_valid(p) && !d.is_solvable(p)?)),
            ],
        ),
        (
            Verdict::InvalidMove,
            vec![Box::new(move || Ok(forward && !d.rule_valid(p)))],
        ),
        (
            Verdict::MultipleMoves,
            vec![Box::new(move || {
                let changed = d.diff(&case.current, p).map(|c| c.len()).unwrap_or(usize::MAX);
                let via_parent = case.parent.as_ref().is_some_and(|par| d.is_forward_step(par, p));
                Ok(changed >= 2 && !is(&case.parent, &k3) && !via_parent)
            })],
        ),
        (Verdict::InvalidMove, vec![Box::new(|| Ok(true))]),
    ]
}

fn run_tiers(tiers: Vec<(Verdict, Vec<Check<'_>>)>) -> Result<Verdict> {
    for (verdict, checks) in tiers {
        for check in checks {
            if check()? {
                return Ok(verdict);
            }
        }
    }
    unreachable!("the last tier always matches")
}

/// Classify a parsed proposal against the task context.
pub fn classify_transition<D: PuzzleDomain>(
    proposed: &D::State,
    case: &JudgeCase<D::State>,
    domain: &D,
) -> Result<Verdict> {
    run_tiers(tiers(domain, proposed, case))
}

/// Same as [`classify_transition`] with the checks inside each tier run
/// in a shuffled order.
pub fn classify_transition_shuffled<D: PuzzleDomain, R: rand::Rng>(
    proposed: &D::State,
    case: &JudgeCase<D::State>,
    domain: &D,
    rng: &mut R,
) -> Result<Verdict> {
    use rand::seq::SliceRandom;
    let mut t = tiers(domain, proposed, case);
    for (_, checks) in &mut t {
        checks.shuffle(rng);
    }
    run_tiers(t)
}

/// Parse and classify a raw response.
pub fn judge_response<D: PuzzleDomain>(text: &str, case: &JudgeCase<D::State>, domain: &D) -> Result<Verdict> {
    match parse_transition(text, domain) {
        Some(p) => classify_transition(&p, case, domain),
        None => Ok(Verdict::Unparseable),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckingMetrics {
    pub n: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Accuracy and unsolvable-positive precision/recall/F1. A missing
/// prediction is wrong and counts as a negative.
pub fn score_checking(preds: &[Option<char>], golds: &[StateLabel]) -> Result<CheckingMetrics> {
    if preds.len() != golds.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions for {} gold labels",
            preds.len(),
            golds.len()
        )));
    }
    let mut m = CheckingMetrics {
        n: preds.len(),
        ..Default::default()
    };
    let mut correct = 0;
    for (p, g) in preds.iter().zip(golds) {
        let predicted_pos = *p == Some('B');
        let actual_pos = !g.is_solvable();
        if *p == Some(checking_letter(*g)) {
            correct += 1;
        }
        match (predicted_pos, actual_pos) {
            (true, true) => m.tp += 1,
            (true, false) => m.fp += 1,
            (false, true) => m.fn_ += 1,
            (false, false) => m.tn += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    m.accuracy = ratio(correct, m.n);
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn_);
    m.f1 = f1_score(m.precision, m.recall);
    Ok(m)
}

/// Difficulty (empty slots) to (correct, incorrect) counts.
pub fn difficulty_histogram<'a>(results: impl IntoIterator<Item = &'a JudgedResult>) -> BTreeMap<usize, (usize, usize)> {
    let mut h = BTreeMap::new();
    for r in results {
        let e = h.entry(r.difficulty).or_insert((0, 0));
        if r.correct {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    h
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub n: usize,
    pub accuracy: f64,
    pub verdicts: BTreeMap<Verdict, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassBreakdown {
    /// Absent when no task had a solvable current state.
    pub solvable: Option<ClassStats>,
    pub unsolvable: Option<ClassStats>,
}

pub fn breakdown_by_class<'a>(results: impl IntoIterator<Item = &'a JudgedResult>) -> ClassBreakdown {
    let mut solvable = ClassStats::default();
    let mut unsolvable = ClassStats::default();
    let mut hits = [0usize; 2];
    for r in results.into_iter().filter(|r| r.kind == TaskKind::StateTransition) {
        let (stats, idx) = if r.current_label.is_solvable() {
            (&mut solvable, 0)
        } else {
            (&mut unsolvable, 1)
        };
        stats.n += 1;
        hits[idx] += usize::from(r.correct);
        if let Some(v) = r.verdict {
            *stats.verdicts.entry(v).or_insert(0) += 1;
        }
    }
    let finish = |mut s: ClassStats, hit: usize| {
        (s.n > 0).then(|| {
            s.accuracy = hit as f64 / s.n as f64;
            s
        })
    };
    ClassBreakdown {
        solvable: finish(solvable, hits[0]),
        unsolvable: finish(unsolvable, hits[1]),
    }
}

/// One judged response, as written to results files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgedResult {
    pub task_id: String,
    pub puzzle: PuzzleKind,
    pub kind: TaskKind,
    pub current_label: StateLabel,
    pub difficulty: usize,
    pub raw_response: Option<String>,
    /// The extracted answer letter or next-state text.
    pub parsed: Option<String>,
    pub verdict: Option<Verdict>,
    pub correct: bool,
    /// The model call failed; scored as wrong.
    pub failed: bool,
}

/// Judge one task. `response` is `None` when the model call failed.
pub fn judge_task(task: &EvalTask, instance: &Instance, response: Option<&str>) -> Result<JudgedResult> {
    let mut out = JudgedResult {
        task_id: task.id.clone(),
        puzzle: task.puzzle,
        kind: task.kind,
        current_label: task.current_label(),
        difficulty: task.difficulty,
        raw_response: response.map(str::to_string),
        parsed: None,
        verdict: None,
        correct: false,
        failed: response.is_none(),
    };
    let text = response.unwrap_or("");
    match (&task.gold, task.kind) {
        (Gold::Label(label), TaskKind::StateChecking) => {
            let letter = parse_checking(text);
            out.parsed = letter.map(String::from);
            out.correct = letter == Some(checking_letter(*label));
        }
        (Gold::States(_), TaskKind::StateTransition) => {
            let domain = instance.domain()?;
            let verdict = with_domain!(&domain, d => {
                let case = JudgeCase::from_task(task, d)?;
                out.parsed = extract_next_state(text).map(str::to_string);
                judge_response(text, &case, d)?
            });
            out.verdict = Some(verdict);
            out.correct = verdict == Verdict::Correct;
        }
        _ => return Err(Error::InvalidArgument(format!("{}: gold does not match task kind", task.id))),
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleReport {
    pub puzzle: PuzzleKind,
    pub checking: Option<CheckingMetrics>,
    pub transition_accuracy: Option<f64>,
    pub transition_n: usize,
    pub breakdown: ClassBreakdown,
    pub failed_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub results: usize,
    pub puzzles: Vec<PuzzleReport>,
}

pub const REPORT_SCHEMA: &str = "puzzletree.report.v1";

/// Metrics per puzzle family; a pure function of the judged results.
pub fn build_report(results: &[JudgedResult]) -> Report {
    let mut puzzles = Vec::new();
    for kind in PuzzleKind::ALL {
        let mine: Vec<&JudgedResult> = results.iter().filter(|r| r.puzzle == kind).collect();
        if mine.is_empty() {
            continue;
        }
        let checking: Vec<&&JudgedResult> = mine.iter().filter(|r| r.kind == TaskKind::StateChecking).collect();
        let checking_metrics = (!checking.is_empty()).then(|| {
            let preds: Vec<Option<char>> = checking
                .iter()
                .map(|r| r.parsed.as_deref().and_then(|p| p.chars().next()))
                .collect();
            let golds: Vec<StateLabel> = checking.iter().map(|r| r.current_label).collect();
            score_checking(&preds, &golds).expect("equal lengths")
        });
        let transition: Vec<&&JudgedResult> = mine.iter().filter(|r| r.kind == TaskKind::StateTransition).collect();
        let transition_accuracy = (!transition.is_empty())
            .then(|| transition.iter().filter(|r| r.correct).count() as f64 / transition.len() as f64);
        puzzles.push(PuzzleReport {
            puzzle: kind,
            checking: checking_metrics,
            transition_accuracy,
            transition_n: transition.len(),
            breakdown: breakdown_by_class(mine.iter().copied()),
            failed_calls: mine.iter().filter(|r| r.failed).count(),
        });
    }
    Report {
        schema: REPORT_SCHEMA.to_string(),
        results: results.len(),
        puzzles,
    }
}

/// `puzzle,kind,difficulty,correct,incorrect` rows.
pub fn histogram_csv(results: &[JudgedResult]) -> String {
    let mut s = String::from("puzzle,kind,difficulty,correct,incorrect\n");
    for kind in PuzzleKind::ALL {
        for task_kind in [TaskKind::StateChecking, TaskKind::StateTransition] {
            let h = difficulty_histogram(results.iter().filter(|r| r.puzzle == kind && r.kind == task_kind));
            let tk = match task_kind {
                TaskKind::StateChecking => "state_checking",
                TaskKind::StateTransition => "state_transition",
            };
            for (d, (c, w)) in h {
                s.push_str(&format!("{kind},{tk},{d},{c},{w}\n"));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game24::Game24;

    #[test]
    fn last_answer_wins() {
        assert_eq!(parse_checking("reasoning... Answer: (B)"), Some('B'));
        assert_eq!(parse_checking("Answer: (A) hmm, no. Answer: (B)"), Some('B'));
        assert_eq!(parse_checking("I think it is solvable"), None);
        assert_eq!(parse_checking("Answer: (C)"), None);
    }

    #[test]
    fn truncated_state_is_unparseable() {
        let g = Game24::new([5, 9, 12, 12]);
        assert!(parse_transition("Next state: [[1,2", &g).is_none());
        let s = parse_transition("blah\nNext state: ['(5 + 9)', '12', '12'] done", &g).unwrap();
        assert_eq!(s.to_string(), "['(5 + 9)', '12', '12']");
    }

    #[test]
    fn direct_confusion_counts() {
        use StateLabel::*;
        // TP=3, FP=1, FN=1, TN=5
        let mut preds = vec![Some('B'); 3];
        let mut golds = vec![Unsolvable; 3];
        preds.push(Some('B'));
        golds.push(Solvable);
        preds.push(Some('A'));
        golds.push(Unsolvable);
        preds.extend([Some('A'); 5]);
        golds.extend([Solvable; 5]);
        let m = score_checking(&preds, &golds).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (3, 1, 1, 5));
        assert!((m.precision - 0.75).abs() < 1e-12);
        assert!((m.recall - 0.75).abs() < 1e-12);
        assert!((m.accuracy - 0.8).abs() < 1e-12);
    }

    #[test]
    fn unparseable_is_wrong_and_negative() {
        let m = score_checking(&[None, None], &[StateLabel::Unsolvable, StateLabel::Solvable]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (0, 0, 1, 1));
        assert_eq!(m.accuracy, 0.0);
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn f1_matches_table_row() {
        let f1 = f1_score(0.867, 0.732);
        assert!((f1 * 100.0 - 79.4).abs() < 0.05, "{f1}");
    }
}
