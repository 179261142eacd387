mod common;

use common::*;
use proptest::prelude::*;
use puzzletree_core::judge::*;
use puzzletree_core::taskgen::TaskKind;
use puzzletree_core::{PuzzleDomain, PuzzleKind, StateLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdict_name(v: Verdict) -> String {
    format!("{v:?}")
}

#[test]
fn published_error_cases_classify() {
    for t in taxonomy() {
        let got = judge_response(&t.response, &t.case, &t.domain).unwrap();
        assert_eq!(verdict_name(got), t.expected, "case {}", t.index);
    }
}

#[test]
fn check_order_within_a_tier_is_irrelevant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in taxonomy() {
        let p = parse_transition(&t.response, &t.domain).unwrap();
        let base = classify_transition(&p, &t.case, &t.domain).unwrap();
        for _ in 0..20 {
            assert_eq!(classify_transition_shuffled(&p, &t.case, &t.domain, &mut rng).unwrap(), base);
        }
    }
}

#[test]
fn multiple_moves_response_fills_row_seven() {
    let t = &taxonomy()[0];
    let p = parse_transition(&t.response, &t.domain).unwrap();
    let changes = t.domain.diff(&t.case.current, &p).unwrap();
    assert_eq!(changes.len(), 2);
    let row: Vec<u8> = p.cells[6].to_vec();
    assert_eq!(row, vec![9, 2, 0, 6, 7, 3, 0, 4, 5]);
}

#[test]
fn gold_and_parent_answers_are_correct() {
    for t in taxonomy() {
        let answers = if t.case.current_label.is_solvable() {
            t.case.gold.clone()
        } else {
            vec![t.case.parent.clone().unwrap()]
        };
        assert!(!answers.is_empty(), "case {}", t.index);
        for a in answers {
            let text = format!("...\nNext state: {}", t.domain.canonical_text(&a));
            assert_eq!(judge_response(&text, &t.case, &t.domain).unwrap(), Verdict::Correct);
        }
    }
}

#[test]
fn unchanged_and_garbage_answers() {
    for t in taxonomy() {
        let same = format!("Next state: {}", t.domain.canonical_text(&t.case.current));
        let want = if t.case.current_label.is_solvable() {
            Verdict::InvalidMove
        } else {
            Verdict::BacktrackingFailure
        };
        assert_eq!(judge_response(&same, &t.case, &t.domain).unwrap(), want);
        assert_eq!(judge_response("no idea", &t.case, &t.domain).unwrap(), Verdict::Unparseable);
    }
}

#[test]
fn worked_example_labels() {
    use std::time::{Duration, Instant};
    let timed = |f: &dyn Fn() -> StateLabel| {
        let t = Instant::now();
        let l = f();
        assert!(t.elapsed() < Duration::from_secs(10));
        l
    };
    let (d, ctx) = sudoku_context();
    assert_eq!(timed(&|| d.label(ctx.current()).unwrap()), StateLabel::Solvable);
    assert_eq!(timed(&|| d.label(&ctx.explored_child.as_ref().unwrap().1).unwrap()), StateLabel::Unsolvable);

    let (d, ctx) = coloring_context();
    assert_eq!(timed(&|| d.label(ctx.current()).unwrap()), StateLabel::Solvable);
    assert_eq!(timed(&|| d.label(&ctx.explored_child.as_ref().unwrap().1).unwrap()), StateLabel::Unsolvable);

    let (d, ctx) = game24_context();
    assert_eq!(timed(&|| d.label(ctx.current()).unwrap()), StateLabel::Solvable);
    assert_eq!(timed(&|| d.label(&ctx.explored_child.as_ref().unwrap().1).unwrap()), StateLabel::Unsolvable);

    let (d, ctx) = grid_context();
    assert_eq!(timed(&|| d.label(ctx.current()).unwrap()), StateLabel::Solvable);
    assert_eq!(timed(&|| d.label(&ctx.explored_child.as_ref().unwrap().1).unwrap()), StateLabel::Unsolvable);
}

fn result(label: StateLabel, difficulty: usize, verdict: Verdict) -> JudgedResult {
    JudgedResult {
        task_id: format!("t{difficulty}"),
        puzzle: PuzzleKind::Sudoku,
        kind: TaskKind::StateTransition,
        current_label: label,
        difficulty,
        raw_response: None,
        parsed: None,
        verdict: Some(verdict),
        correct: verdict == Verdict::Correct,
        failed: false,
    }
}

#[test]
fn class_breakdown_matches_hand_tally() {
    // Hand tally of the five published cases: three solvable currents
    // (one each of MultipleMoves, InvalidMove, UnsolvableChild) and two
    // unsolvable ones (BacktrackingFailure, Sibling), none correct.
    let results: Vec<JudgedResult> = taxonomy()
        .iter()
        .map(|t| {
            let v = judge_response(&t.response, &t.case, &t.domain).unwrap();
            result(t.case.current_label, 40, v)
        })
        .collect();
    let b = breakdown_by_class(&results);
    let s = b.solvable.unwrap();
    let u = b.unsolvable.unwrap();
    assert_eq!((s.n, u.n), (3, 2));
    assert_eq!((s.accuracy, u.accuracy), (0.0, 0.0));
    assert_eq!(s.verdicts[&Verdict::MultipleMoves], 1);
    assert_eq!(s.verdicts[&Verdict::InvalidMove], 1);
    assert_eq!(s.verdicts[&Verdict::UnsolvableChild], 1);
    assert_eq!(u.verdicts[&Verdict::BacktrackingFailure], 1);
    assert_eq!(u.verdicts[&Verdict::Sibling], 1);
}

#[test]
fn empty_class_is_absent() {
    let results = vec![result(StateLabel::Solvable, 3, Verdict::Correct)];
    let b = breakdown_by_class(&results);
    assert_eq!(b.solvable.unwrap().accuracy, 1.0);
    assert!(b.unsolvable.is_none());
    assert_eq!(difficulty_histogram(&results), [(3, (1, 0))].into_iter().collect());
}

#[test]
fn f1_grid_sweep() {
    for i in 0..=20 {
        for j in 0..=20 {
            let (p, r) = (i as f64 * 0.05, j as f64 * 0.05);
            let want = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            assert!((f1_score(p, r) - want).abs() < 1e-12);
        }
    }
}

fn arb_results() -> impl Strategy<Value = Vec<JudgedResult>> {
    prop::collection::vec((any::<bool>(), 0usize..60, any::<bool>()), 0..40).prop_map(|v| {
        v.into_iter()
            .map(|(solvable, d, ok)| {
                let verdict = if ok { Verdict::Correct } else { Verdict::InvalidMove };
                result(StateLabel::from_bool(solvable), d, verdict)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn histogram_is_additive(a in arb_results(), b in arb_results()) {
        let mut merged = difficulty_histogram(&a);
        for (k, (c, w)) in difficulty_histogram(&b) {
            let e = merged.entry(k).or_insert((0, 0));
            e.0 += c;
            e.1 += w;
        }
        let all: Vec<JudgedResult> = a.iter().chain(&b).cloned().collect();
        let h = difficulty_histogram(&all);
        prop_assert_eq!(&h, &merged);
        prop_assert_eq!(h.values().map(|(c, w)| c + w).sum::<usize>(), all.len());
    }

    #[test]
    fn checking_metrics_match_direct_counts(
        pairs in prop::collection::vec((prop::option::of(prop::sample::select(vec!['A', 'B'])), any::<bool>()), 1..60)
    ) {
        let preds: Vec<Option<char>> = pairs.iter().map(|p| p.0).collect();
        let golds: Vec<StateLabel> = pairs.iter().map(|p| StateLabel::from_bool(p.1)).collect();
        let m = score_checking(&preds, &golds).unwrap();
        let tp = pairs.iter().filter(|(p, s)| *p == Some('B') && !s).count();
        let fp = pairs.iter().filter(|(p, s)| *p == Some('B') && *s).count();
        let fn_ = pairs.iter().filter(|(p, s)| *p != Some('B') && !s).count();
        let hits = pairs.iter().filter(|(p, s)| *p == Some(if *s { 'A' } else { 'B' })).count();
        prop_assert_eq!((m.tp, m.fp, m.fn_), (tp, fp, fn_));
        prop_assert!((m.accuracy - hits as f64 / pairs.len() as f64).abs() < 1e-12);
        let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        prop_assert!((m.f1 - f).abs() < 1e-12);
    }
}
