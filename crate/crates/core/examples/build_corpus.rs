//! Regenerate the bundled question banks under `crates/core/data/`.
//!
//! ```text
//! cargo run --release -p puzzletree-core --example build_corpus
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use puzzletree_core::coloring::{chromatic_number, random_graph, Graph};
use puzzletree_core::game24::{is_solvable_24, ExprState};
use puzzletree_core::grid::eval::TruthValue3;
use puzzletree_core::grid::{Category, GridInstance, GridPuzzle, Value};
use puzzletree_core::kind::Instance;
use puzzletree_core::sudoku::{grid_from_value, SudokuGrid};
use puzzletree_core::pylit;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20250217;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn fixture(name: &str) -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write(name: &str, items: &[Instance]) {
    let mut out = String::new();
    for i in items {
        out.push_str(&serde_json::to_string(i).unwrap());
        out.push('\n');
    }
    fs::write(data_dir().join(name), out).unwrap();
    eprintln!("{name}: {} instances", items.len());
}

fn full_sudoku(rng: &mut ChaCha8Rng) -> SudokuGrid {
    fn fill(g: &mut SudokuGrid, pos: usize, rng: &mut ChaCha8Rng) -> bool {
        if pos == 81 {
            return true;
        }
        let (r, c) = (pos / 9, pos % 9);
        let mut digits: Vec<u8> = (1..=9).collect();
        digits.shuffle(rng);
        for d in digits {
            g.cells[r][c] = d;
            if g.is_rule_valid() && fill(g, pos + 1, rng) {
                return true;
            }
        }
        g.cells[r][c] = 0;
        false
    }
    let mut g = SudokuGrid::empty();
    assert!(fill(&mut g, 0, rng));
    g
}

fn sudoku(rng: &mut ChaCha8Rng) -> Vec<Instance> {
    let mut grids: Vec<SudokuGrid> = Vec::new();
    let mut seen = BTreeSet::new();
    let taxonomy = fixture("error_taxonomy.json");
    let published = [fixture("worked_examples.json")["sudoku"]["s0"].clone()]
        .into_iter()
        .chain(taxonomy.as_array().unwrap().iter().map(|e| e["s0"].clone()));
    for s0 in published {
        let g = grid_from_value(&pylit::parse(s0.as_str().unwrap()).unwrap()).unwrap();
        if g.count_solutions(2) == 1 && seen.insert(g.to_kaggle()) {
            grids.push(g);
        }
    }
    while grids.len() < 51 {
        let mut g = full_sudoku(rng);
        let target = rng.random_range(30..=36);
        let mut cells: Vec<(usize, usize)> = (0..81).map(|p| (p / 9, p % 9)).collect();
        cells.shuffle(rng);
        for (r, c) in cells {
            if 81 - g.empties() <= target {
                break;
            }
            let keep = g.cells[r][c];
            g.cells[r][c] = 0;
            if g.count_solutions(2) != 1 {
                g.cells[r][c] = keep;
            }
        }
        if seen.insert(g.to_kaggle()) {
            grids.push(g);
        }
    }
    grids
        .into_iter()
        .enumerate()
        .map(|(i, g)| Instance::Sudoku {
            id: format!("sudoku-{:03}", i + 1),
            grid: g.to_kaggle(),
        })
        .collect()
}

fn coloring(rng: &mut ChaCha8Rng) -> Vec<Instance> {
    let w = fixture("worked_examples.json");
    let adjacency: Vec<Vec<usize>> = serde_json::from_value(w["coloring"]["adjacency"].clone()).unwrap();
    let mut out = vec![Instance::Coloring {
        id: "coloring-001".into(),
        adjacency,
        k: w["coloring"]["k"].as_u64().unwrap() as u8,
    }];
    while out.len() < 51 {
        let n = rng.random_range(16..=28);
        let g: Graph = random_graph(n, 0.5, rng.random());
        let k = chromatic_number(&g);
        out.push(Instance::Coloring {
            id: format!("coloring-{:03}", out.len() + 1),
            adjacency: g.adjacency.clone(),
            k,
        });
    }
    out
}

fn game24(rng: &mut ChaCha8Rng) -> Vec<Instance> {
    let mut solvable = Vec::new();
    for a in 1..=13 {
        for b in a..=13 {
            for c in b..=13 {
                for d in c..=13 {
                    if is_solvable_24(&ExprState::initial(&[a, b, c, d])) {
                        solvable.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    eprintln!("game24: {} solvable multisets", solvable.len());
    let published = [5, 9, 12, 12];
    solvable.retain(|q| *q != published);
    solvable.shuffle(rng);
    let mut picked: Vec<[i64; 4]> = solvable.into_iter().take(97).collect();
    picked.sort();
    picked.insert(0, published);
    picked
        .into_iter()
        .enumerate()
        .map(|(i, numbers)| Instance::Game24 {
            id: format!("game24-{:03}", i + 1),
            numbers,
        })
        .collect()
}

fn strs(v: &[&str]) -> Vec<Value> {
    v.iter().map(|s| Value::Str(s.to_string())).collect()
}

fn ints(v: &[i64]) -> Vec<Value> {
    v.iter().map(|&i| Value::Int(i)).collect()
}

fn published_grids() -> Vec<GridInstance> {
    let appointments = match serde_json::from_value(fixture("worked_examples.json")["grid"]["instance"].clone()).unwrap() {
        Instance::Grid(g) => g,
        _ => unreachable!(),
    };
    let earnings = GridInstance {
        id: String::new(),
        question: "Using only the clues below, match the earnings to the options from movies and directors. Remember, as with all grid-based logic puzzles, no option in any category will ever be used more than once.".into(),
        categories: vec![
            Category { name: "earnings".into(), values: ints(&[2, 5, 8, 11]) },
            Category { name: "movies".into(), values: strs(&["Amerigo", "Easy to Love", "Tippecanoe", "Zephyr Breeze"]) },
            Category { name: "directors".into(), values: strs(&["Hick Harmon", "Micah Moreno", "Nan Norman", "Odette Olson"]) },
        ],
        clues_text: vec![
            "Amerigo made 6 million less than the movie directed by Hick Harmon.".into(),
            "Zephyr Breeze made 6 million more than Amerigo.".into(),
            "The movie directed by Micah Moreno made somewhat more than Tippecanoe.".into(),
            "Of the movie directed by Nan Norman and Easy to Love, one made $11 million and the other made $2 million.".into(),
        ],
        clues_dsl: vec![
            "T(r('Amerigo'), c('earnings')) + 6 == T(r('Hick Harmon'), c('earnings'))".into(),
            "T(r('Amerigo'), c('earnings')) + 6 == T(r('Zephyr Breeze'), c('earnings'))".into(),
            "T(r('Micah Moreno'), c('earnings')) > T(r('Tippecanoe'), c('earnings'))".into(),
            "one_other(('Nan Norman', 'Easy to Love'), (11, 2))".into(),
        ],
        solution: vec![],
    };
    vec![appointments, with_solution(earnings)]
}

/// Fill in the unique solution by search.
fn with_solution(mut inst: GridInstance) -> GridInstance {
    let p = GridPuzzle::new(inst.clone()).unwrap();
    let sols = solutions(&p, 2);
    assert_eq!(sols.len(), 1, "{} has {} solutions", inst.question, sols.len());
    inst.solution = sols[0]
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, v)| inst.categories[c].values[v.unwrap() as usize].clone())
                .collect()
        })
        .collect();
    inst
}

/// Complete assignments satisfying every clue, by column permutations.
fn solutions(p: &GridPuzzle, cap: usize) -> Vec<Vec<Vec<Option<u8>>>> {
    fn perms(n: usize) -> Vec<Vec<u8>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in perms(n - 1) {
            for pos in 0..=rest.len() {
                let mut v = rest.clone();
                v.insert(pos, (n - 1) as u8);
                out.push(v);
            }
        }
        out
    }
    fn go(p: &GridPuzzle, col: usize, cells: &mut Vec<Vec<Option<u8>>>, ps: &[Vec<u8>], out: &mut Vec<Vec<Vec<Option<u8>>>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if (0..p.clues.len()).any(|i| p.eval_clue(i, cells) == TruthValue3::Violated) {
            return;
        }
        if col == p.cols() {
            out.push(cells.clone());
            return;
        }
        for perm in ps {
            for (r, v) in perm.iter().enumerate() {
                cells[r][col] = Some(*v);
            }
            go(p, col + 1, cells, ps, out, cap);
        }
        for row in cells.iter_mut() {
            row[col] = None;
        }
    }
    let ps = perms(p.rows());
    let mut cells = p.empty_cells();
    let mut out = Vec::new();
    go(p, 1, &mut cells, &ps, &mut out, cap);
    out
}

const ANCHORS: &[(&str, [i64; 4])] = &[
    ("times", [9, 10, 11, 12]),
    ("orders", [1, 2, 3, 4]),
    ("earnings", [2, 5, 8, 11]),
    ("years", [2001, 2002, 2003, 2004]),
    ("prices", [10, 20, 30, 40]),
    ("ages", [21, 22, 23, 24]),
];

const POOLS: &[(&str, &[&str])] = &[
    ("names", &["Abby", "Bruno", "Celia", "Dmitri", "Elsa", "Farid", "Greta", "Hector", "Ines", "Jonah"]),
    ("pets", &["beagle", "canary", "ferret", "gecko", "hamster", "iguana", "parrot", "tabby"]),
    ("colors", &["amber", "cobalt", "crimson", "ivory", "jade", "lilac", "olive", "teal"]),
    ("towns", &["Ashford", "Brixton", "Corvale", "Dunmore", "Elkton", "Fairlie", "Glenrock", "Harrow"]),
    ("dishes", &["chowder", "falafel", "gnocchi", "paella", "ramen", "risotto", "tacos", "tagine"]),
    ("sports", &["archery", "cricket", "fencing", "hockey", "polo", "rowing", "rugby", "squash"]),
];

/// A clue true of `sol`, as (dsl, text).
fn random_clue(rng: &mut ChaCha8Rng, cats: &[Category], sol: &[Vec<usize>]) -> (String, String) {
    let rows = sol.len();
    let lit = |r: usize, c: usize| match &cats[c].values[sol[r][c]] {
        Value::Int(v) => v.to_string(),
        Value::Str(s) => format!("'{s}'"),
    };
    let say = |r: usize, c: usize| match &cats[c].values[sol[r][c]] {
        Value::Int(v) => format!("the one with {} {v}", cats[c].name),
        Value::Str(s) => format!("the one with {s}"),
    };
    let cap = |s: String| {
        let mut ch = s.chars();
        ch.next().map(|f| f.to_uppercase().chain(ch).collect::<String>()).unwrap_or_default()
    };
    let anchor = &cats[0].name;
    let cols = cats.len();
    let two_rows = |rng: &mut ChaCha8Rng| {
        let mut r: Vec<usize> = (0..rows).collect();
        r.shuffle(rng);
        (r[0], r[1])
    };
    let two_cols = |rng: &mut ChaCha8Rng, from: usize| {
        let mut c: Vec<usize> = (from..cols).collect();
        c.shuffle(rng);
        (c[0], c[1])
    };
    match rng.random_range(0..6) {
        0 => {
            let r = rng.random_range(0..rows);
            let (a, b) = two_cols(rng, 0);
            (
                format!("r({}) == r({})", lit(r, a), lit(r, b)),
                format!("{} is {}.", cap(say(r, a)), say(r, b)),
            )
        }
        1 => {
            let (i, j) = two_rows(rng);
            let (a, b) = two_cols(rng, 0);
            (
                format!("r({}) != r({})", lit(i, a), lit(j, b)),
                format!("{} is not {}.", cap(say(i, a)), say(j, b)),
            )
        }
        2 | 3 => {
            let (mut i, mut j) = two_rows(rng);
            if sol[i][0] > sol[j][0] {
                std::mem::swap(&mut i, &mut j);
            }
            let a = rng.random_range(1..cols);
            let b = rng.random_range(1..cols);
            let value = |r: usize| cats[0].values[sol[r][0]].as_int().unwrap();
            let gap = value(j) - value(i);
            if rng.random_bool(0.5) {
                (
                    format!("T(r({}), c('{anchor}')) + {gap} == T(r({}), c('{anchor}'))", lit(i, a), lit(j, b)),
                    format!("{} has {anchor} {gap} less than {}.", cap(say(i, a)), say(j, b)),
                )
            } else {
                (
                    format!("T(r({}), c('{anchor}')) < T(r({}), c('{anchor}'))", lit(i, a), lit(j, b)),
                    format!("{} has somewhat less {anchor} than {}.", cap(say(i, a)), say(j, b)),
                )
            }
        }
        4 => {
            let (i, j) = two_rows(rng);
            let (a, b) = two_cols(rng, 0);
            let c = (0..cols).filter(|&c| c != a).collect::<Vec<_>>();
            let c = *c.choose(rng).unwrap();
            let (yes, no) = ((i, b), (j, c));
            let (first, second) = if rng.random_bool(0.5) { (yes, no) } else { (no, yes) };
            (
                format!(
                    "either_or(r({x}) == r({}), r({x}) == r({}))",
                    lit(first.0, first.1),
                    lit(second.0, second.1),
                    x = lit(i, a)
                ),
                format!("{} is either {} or {}.", cap(say(i, a)), say(first.0, first.1), say(second.0, second.1)),
            )
        }
        _ => {
            let (i, j) = two_rows(rng);
            let x = rng.random_range(0..cols);
            let y = rng.random_range(0..cols);
            let p = *(0..cols).filter(|&c| c != x).collect::<Vec<_>>().choose(rng).unwrap();
            let q = *(0..cols).filter(|&c| c != y).collect::<Vec<_>>().choose(rng).unwrap();
            let ((pr, pc), (qr, qc)) = if rng.random_bool(0.5) { ((i, p), (j, q)) } else { ((j, q), (i, p)) };
            (
                format!("one_other(({}, {}), ({}, {}))", lit(i, x), lit(j, y), lit(pr, pc), lit(qr, qc)),
                format!(
                    "Of {} and {}, one is {} and the other is {}.",
                    say(i, x),
                    say(j, y),
                    say(pr, pc),
                    say(qr, qc)
                ),
            )
        }
    }
}

fn generated_grid(rng: &mut ChaCha8Rng) -> Option<GridInstance> {
    let (anchor, values) = ANCHORS.choose(rng).unwrap();
    let ncols = rng.random_range(3..=4);
    let mut pools: Vec<&(&str, &[&str])> = POOLS.iter().collect();
    pools.shuffle(rng);
    let mut categories = vec![Category {
        name: anchor.to_string(),
        values: ints(values),
    }];
    for (name, pool) in pools.into_iter().take(ncols - 1) {
        let mut v: Vec<&str> = pool.choose_multiple(rng, 4).copied().collect();
        v.sort();
        categories.push(Category {
            name: name.to_string(),
            values: strs(&v),
        });
    }
    let sol: Vec<Vec<usize>> = {
        let mut cols: Vec<Vec<usize>> = vec![(0..4).collect()];
        for _ in 1..ncols {
            let mut p: Vec<usize> = (0..4).collect();
            p.shuffle(rng);
            cols.push(p);
        }
        (0..4).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
    };
    let others: Vec<&str> = categories[1..].iter().map(|c| c.name.as_str()).collect();
    let list = match others.as_slice() {
        [a, b] => format!("{a} and {b}"),
        [a, b, c] => format!("{a}, {b}, and {c}"),
        _ => unreachable!(),
    };
    let mut inst = GridInstance {
        id: String::new(),
        question: format!(
            "Using only the clues below, match the {anchor} to the options from {list}. Remember, as with all grid-based logic puzzles, no option in any category will ever be used more than once."
        ),
        categories,
        clues_text: vec![],
        clues_dsl: vec![],
        solution: vec![],
    };
    for _ in 0..40 {
        let (dsl, text) = random_clue(rng, &inst.categories, &sol);
        if inst.clues_dsl.contains(&dsl) {
            continue;
        }
        inst.clues_dsl.push(dsl);
        inst.clues_text.push(text);
        if solutions(&GridPuzzle::new(inst.clone()).unwrap(), 2).len() == 1 {
            break;
        }
    }
    if solutions(&GridPuzzle::new(inst.clone()).unwrap(), 2).len() != 1 {
        return None;
    }
    let mut i = 0;
    while i < inst.clues_dsl.len() {
        let mut trial = inst.clone();
        trial.clues_dsl.remove(i);
        trial.clues_text.remove(i);
        if solutions(&GridPuzzle::new(trial.clone()).unwrap(), 2).len() == 1 {
            inst = trial;
        } else {
            i += 1;
        }
    }
    (inst.clues_dsl.len() >= 3).then(|| with_solution(inst))
}

fn grid(rng: &mut ChaCha8Rng) -> Vec<Instance> {
    let mut out = published_grids();
    while out.len() < 50 {
        if let Some(g) = generated_grid(rng) {
            out.push(g);
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, mut g)| {
            g.id = format!("grid-{:03}", i + 1);
            Instance::Grid(g)
        })
        .collect()
}

fn main() {
    let only: Option<String> = std::env::args().nth(1);
    let want = |k: &str| only.as_deref().is_none_or(|o| o == k);
    fs::create_dir_all(data_dir()).unwrap();
    if want("sudoku") {
        write("sudoku.jsonl", &sudoku(&mut ChaCha8Rng::seed_from_u64(SEED)));
    }
    if want("coloring") {
        write("coloring.jsonl", &coloring(&mut ChaCha8Rng::seed_from_u64(SEED + 1)));
    }
    if want("game24") {
        write("game24.jsonl", &game24(&mut ChaCha8Rng::seed_from_u64(SEED + 2)));
    }
    if want("grid") {
        write("grid.jsonl", &grid(&mut ChaCha8Rng::seed_from_u64(SEED + 3)));
    }
}
