use super::*;

pub(crate) fn appointments() -> GridInstance {
    let cat = |name: &str, vals: &[&str]| Category {
        name: name.into(),
        values: vals.iter().map(|v| Value::Str(v.to_string())).collect(),
    };
    let times = Category {
        name: "times".into(),
        values: [9, 10, 11, 12].into_iter().map(Value::Int).collect(),
    };
    GridInstance {
        id: "appointments".into(),
        question: "Match the times to the options from names, ailments, and insurers.".into(),
        categories: vec![
            times,
            cat("names", &["Billy", "Guy", "Paul", "Terry"]),
            cat("ailments", &["back pain", "hip pain", "shingles", "vertigo"]),
            cat("insurers", &["Ambercare", "HealthCo", "Lifealign", "Triflex"]),
        ],
        clues_text: (1..=8).map(|i| format!("clue {i}")).collect(),
        clues_dsl: vec![
            "T(r('Lifealign'), c('times')) < T(r('shingles'), c('times'))".into(),
            "either_or(r(12) == r('Terry'), r(12) == r('Ambercare'))".into(),
            "T(r('back pain'), c('times')) + 2 == T(r('Guy'), c('times'))".into(),
            "T(r('Ambercare'), c('times')) > T(r('vertigo'), c('times'))".into(),
            "r('Billy') != r('Lifealign') and r('shingles') != r('Lifealign') and r('Billy') != r('shingles')".into(),
            "either_or(r(9) == r('Paul'), r(9) == r('back pain'))".into(),
            "r(10) == r('Triflex')".into(),
            "one_other(('vertigo', 'Ambercare'), (11, 'Billy'))".into(),
        ],
        solution: vec![
            vec![Value::Int(9), Value::Str("Terry".into()), Value::Str("back pain".into()), Value::Str("Lifealign".into())],
            vec![Value::Int(10), Value::Str("Paul".into()), Value::Str("shingles".into()), Value::Str("Triflex".into())],
            vec![Value::Int(11), Value::Str("Guy".into()), Value::Str("vertigo".into()), Value::Str("HealthCo".into())],
            vec![Value::Int(12), Value::Str("Billy".into()), Value::Str("hip pain".into()), Value::Str("Ambercare".into())],
        ],
    }
}

const S0: &str = "[['times', 'names', 'ailments', 'insurers'], [9, '', '', ''], [10, '', '', ''], [11, '', '', ''], [12, '', '', '']]";
const S1: &str = "[['times', 'names', 'ailments', 'insurers'], [9, '', '', ''], [10, '', '', ''], [11, '', 'vertigo', ''], [12, 'Billy', '', 'Ambercare']]";
const S2: &str = "[['times', 'names', 'ailments', 'insurers'], [9, '', '', ''], [10, 'Terry', '', ''], [11, '', 'vertigo', ''], [12, 'Billy', '', 'Ambercare']]";

fn puzzle() -> GridPuzzle {
    GridPuzzle::new(appointments()).unwrap()
}

#[test]
fn initial_state_text() {
    let p = puzzle();
    assert_eq!(p.canonical_text(&p.initial()), S0);
}

#[test]
fn solution_is_unique_and_consistent() {
    let p = puzzle();
    let empty = p.empty_cells();
    assert_eq!(p.count_solutions(&empty, 5).unwrap(), 1);
    let sol = p.state(p.solution_cells().unwrap());
    assert!(p.is_solution(&sol));
}

#[test]
fn clue_eight_on_empty_table() {
    let p = puzzle();
    let s0 = p.initial();
    let moves = p.clue_instantiations(7, &s0);
    let texts: Vec<String> = moves
        .iter()
        .map(|m| p.canonical_text(&p.apply(&s0, m).unwrap()))
        .collect();
    assert!(texts.contains(&S1.to_string()), "{texts:?}");
    let s1 = p.parse_state(S1).unwrap();
    assert!(p.is_solvable(&s1).unwrap());
    assert!(p.is_forward_step(&s0, &s1));
}

#[test]
fn clue_two_after_clue_eight() {
    let p = puzzle();
    let s1 = p.parse_state(S1).unwrap();
    let moves = p.clue_instantiations(1, &s1);
    let texts: Vec<String> = moves
        .iter()
        .map(|m| p.canonical_text(&p.apply(&s1, m).unwrap()))
        .collect();
    assert!(texts.contains(&S2.to_string()), "{texts:?}");
    let s2 = p.parse_state(S2).unwrap();
    assert!(p.rule_valid(&s2));
    assert!(!p.is_solvable(&s2).unwrap());
    assert!(p.is_forward_step(&s1, &s2));
    assert!(!p.is_forward_step(&s2, &s1));
}

#[test]
fn conflicts_are_reported() {
    let p = puzzle();
    let s1 = p.parse_state(S1).unwrap();
    let mv = GridMove {
        clue: 2,
        placements: vec![Placement { row: 3, col: 1, value: 3 }],
    };
    assert!(matches!(p.apply(&s1, &mv), Err(Error::Conflict { row: 3, col: 1, .. })));
    let dup = GridMove {
        clue: 2,
        placements: vec![Placement { row: 0, col: 1, value: 0 }],
    };
    assert!(matches!(p.apply(&s1, &dup), Err(Error::Conflict { .. })));
}

#[test]
fn revert_restores_previous_table() {
    let p = puzzle();
    let s0 = p.initial();
    let mv = p.clue_instantiations(7, &s0).remove(0);
    let s1 = p.apply(&s0, &mv).unwrap();
    assert_eq!(p.revert(&s1, &mv).unwrap(), s0);
    assert!(matches!(p.revert_last(&s0), Err(Error::EmptyHistory)));
}

#[test]
fn parse_rejects_bad_tables() {
    let p = puzzle();
    assert!(p.parse_state("[['times', 'names', 'ailments', 'insurers']]").is_err());
    assert!(p.parse_state(&S1.replace("'Billy'", "'Bob'")).is_err());
    assert!(p.parse_state(&S1.replace("[12,", "[13,")).is_err());
}

#[test]
fn json_round_trip_keeps_category_order() {
    let inst = appointments();
    let text = serde_json::to_string(&inst).unwrap();
    assert!(text.find("\"times\"").unwrap() < text.find("\"insurers\"").unwrap());
    let back: GridInstance = serde_json::from_str(&text).unwrap();
    assert_eq!(back, inst);
}

#[test]
fn violating_moves_break_another_clue() {
    let p = puzzle();
    let s1 = p.parse_state(S1).unwrap();
    for m in p.violating_moves(&s1) {
        let next = p.apply(&s1, &m).unwrap();
        assert!(!p.rule_valid(&next));
        assert_eq!(p.eval_clue(m.clue - 1, &next.cells), TruthValue3::Satisfied);
    }
}
