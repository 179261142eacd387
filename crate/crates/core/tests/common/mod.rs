#![allow(dead_code)]

use puzzletree_core::coloring::{Graph, GraphColoring};
use puzzletree_core::game24::Game24;
use puzzletree_core::grid::GridPuzzle;
use puzzletree_core::judge::JudgeCase;
use puzzletree_core::kind::Instance;
use puzzletree_core::sudoku::{grid_from_value, Sudoku};
use puzzletree_core::{pylit, PathTrace, PuzzleDomain, StateLabel, TransitionContext};
use serde_json::Value;

pub type Ctx<D> = TransitionContext<<D as PuzzleDomain>::State, <D as PuzzleDomain>::Move>;

pub mod checks;
pub mod oracle;

// Embedded so that other crates can mount this module by path.
pub fn fixture(name: &str) -> Value {
    let text = match name {
        "worked_examples" => include_str!("../fixtures/worked_examples.json"),
        "error_taxonomy" => include_str!("../fixtures/error_taxonomy.json"),
        other => panic!("no fixture {other}"),
    };
    serde_json::from_str(text).unwrap()
}

pub fn golden(name: &str) -> &'static str {
    match name {
        "sudoku_checking" => include_str!("../golden/sudoku_checking.txt"),
        "sudoku_transition" => include_str!("../golden/sudoku_transition.txt"),
        "coloring_checking" => include_str!("../golden/coloring_checking.txt"),
        "coloring_transition" => include_str!("../golden/coloring_transition.txt"),
        "game24_checking" => include_str!("../golden/game24_checking.txt"),
        "game24_transition" => include_str!("../golden/game24_transition.txt"),
        "grid_checking" => include_str!("../golden/grid_checking.txt"),
        "grid_transition" => include_str!("../golden/grid_transition.txt"),
        other => panic!("no golden prompt {other}"),
    }
}

pub fn worked() -> Value {
    fixture("worked_examples")
}

fn text(v: &Value) -> &str {
    v.as_str().unwrap()
}

pub fn sudoku_domain(s0: &str) -> Sudoku {
    Sudoku::new(grid_from_value(&pylit::parse(s0).unwrap()).unwrap())
}

/// A context for `states` (oldest first) with `explored` as the dead child.
/// Non-grid prompts never print moves, so any move of the right type will do.
fn context<D: PuzzleDomain>(
    d: &D,
    states: Vec<D::State>,
    labels: Vec<StateLabel>,
    moves: Vec<D::Move>,
    explored: (D::Move, D::State),
) -> Ctx<D> {
    let mut trace = PathTrace::new("worked");
    for (s, l) in states.into_iter().zip(labels) {
        trace.push(s, l);
    }
    let current = trace.last().unwrap().clone();
    let current_label = *trace.labels.last().unwrap();
    let parent = (trace.len() > 1).then(|| trace.states[trace.len() - 2].clone());
    let gold = if current_label.is_solvable() {
        d.solvable_children(&current)
            .unwrap()
            .into_iter()
            .map(|(_, s)| s)
            .filter(|s| *s != explored.1)
            .collect()
    } else {
        parent.iter().cloned().collect()
    };
    TransitionContext {
        trace,
        moves,
        current_label,
        explored_child: Some(explored),
        parent,
        gold,
    }
}

fn filler<D: PuzzleDomain>(d: &D, from: &D::State, n: usize) -> Vec<D::Move> {
    let mv = d.forward_moves(from).into_iter().next().expect("a forward move");
    vec![mv; n]
}

pub fn sudoku_context() -> (Sudoku, Ctx<Sudoku>) {
    let w = &worked()["sudoku"];
    let d = sudoku_domain(text(&w["s0"]));
    let p = |k: &str| d.parse_state(text(&w[k])).unwrap();
    let states = vec![p("s0"), p("s_im2"), p("s_im1"), p("s_i")];
    let moves = filler(&d, &states[0], 4);
    let explored = (moves[0], p("explored"));
    let ctx = context(&d, states, vec![StateLabel::Solvable; 4], moves[..3].to_vec(), explored);
    (d, ctx)
}

pub fn coloring_domain() -> GraphColoring {
    let w = &worked()["coloring"];
    let adjacency: Vec<Vec<usize>> = serde_json::from_value(w["adjacency"].clone()).unwrap();
    GraphColoring::new(Graph::new(adjacency).unwrap(), w["k"].as_u64().unwrap() as u8)
}

pub fn coloring_context() -> (GraphColoring, Ctx<GraphColoring>) {
    let w = &worked()["coloring"];
    let d = coloring_domain();
    let p = |k: &str| d.parse_state(text(&w[k])).unwrap();
    let states = vec![p("s_im2"), p("s_im1"), p("s_i")];
    let moves = filler(&d, &states[0], 3);
    let explored = (moves[0], p("explored"));
    let ctx = context(&d, states, vec![StateLabel::Solvable; 3], moves[..2].to_vec(), explored);
    (d, ctx)
}

pub fn game24_context() -> (Game24, Ctx<Game24>) {
    let w = &worked()["game24"];
    let numbers: [i64; 4] = serde_json::from_value(w["numbers"].clone()).unwrap();
    let d = Game24::new(numbers);
    let states = vec![d.initial(), d.parse_state(text(&w["s_i"])).unwrap()];
    let moves = filler(&d, &states[0], 2);
    let explored = (moves[0], d.parse_state(text(&w["explored"])).unwrap());
    let ctx = context(&d, states, vec![StateLabel::Solvable; 2], moves[..1].to_vec(), explored);
    (d, ctx)
}

pub fn grid_instance() -> Instance {
    serde_json::from_value(worked()["grid"]["instance"].clone()).unwrap()
}

pub fn grid_domain() -> GridPuzzle {
    match grid_instance() {
        Instance::Grid(g) => GridPuzzle::new(g).unwrap(),
        other => panic!("expected a grid instance, got {other:?}"),
    }
}

/// Apply clue `clue` (1-based) to `s`, picking the move that lands on `want`.
pub fn grid_step(d: &GridPuzzle, s: &<GridPuzzle as PuzzleDomain>::State, clue: usize, want: &str) -> (<GridPuzzle as PuzzleDomain>::Move, <GridPuzzle as PuzzleDomain>::State) {
    let want = d.parse_state(want).unwrap();
    d.forward_moves(s)
        .into_iter()
        .filter(|m| m.clue == clue)
        .map(|m| {
            let next = d.apply(s, &m).unwrap();
            (m, next)
        })
        .find(|(_, next)| *next == want)
        .expect("clue reaches the published state")
}

pub fn grid_context() -> (GridPuzzle, Ctx<GridPuzzle>) {
    let w = &worked()["grid"];
    let d = grid_domain();
    let s0 = d.initial();
    let clue = |k: &str| w[k].as_u64().unwrap() as usize;
    let (m1, s1) = grid_step(&d, &s0, clue("clue_s1"), text(&w["s1"]));
    let explored = grid_step(&d, &s1, clue("clue_s2"), text(&w["s2"]));
    let ctx = context(&d, vec![s0, s1], vec![StateLabel::Solvable; 2], vec![m1], explored);
    (d, ctx)
}

/// One error-taxonomy fixture as a domain and judge case.
pub struct TaxonomyCase {
    pub index: u64,
    pub expected: String,
    pub response: String,
    pub domain: Sudoku,
    pub case: JudgeCase<<Sudoku as PuzzleDomain>::State>,
}

pub fn taxonomy() -> Vec<TaxonomyCase> {
    fixture("error_taxonomy")
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let d = sudoku_domain(text(&e["s0"]));
            let label: StateLabel = serde_json::from_value(e["current_label"].clone()).unwrap();
            let p = |k: &str| d.parse_state(text(&e[k])).unwrap();
            let states = vec![p("s0"), p("s_im2"), p("s_im1"), p("s_i")];
            let mut labels = vec![StateLabel::Solvable; 3];
            labels.push(label);
            let moves = filler(&d, &states[0], 4);
            let ctx = context(&d, states, labels, moves[..3].to_vec(), (moves[0], p("explored")));
            TaxonomyCase {
                index: e["index"].as_u64().unwrap(),
                expected: text(&e["expected"]).to_string(),
                response: text(&e["response"]).to_string(),
                case: JudgeCase::from_context(&ctx),
                domain: d,
            }
        })
        .collect()
}
