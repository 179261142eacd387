//! Slow, unpruned reference searches for each solvability oracle.
//! Every check returns a one-line summary or the first disagreement.

use puzzletree_core::coloring::{chromatic_number, is_colorable, random_graph, Coloring, Graph};
use puzzletree_core::corpus::bundled;
use puzzletree_core::game24::{is_solvable_24, ExprState};
use puzzletree_core::grid::{GridPuzzle, TruthValue3};
use puzzletree_core::kind::{Domain, Instance};
use puzzletree_core::sudoku::SudokuGrid;
use puzzletree_core::PuzzleKind;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Outcome = Result<String, String>;

// ---- sudoku

fn sudoku_ok(g: &[[u8; 9]; 9], r: usize, c: usize) -> bool {
    let v = g[r][c];
    for i in 0..9 {
        if (i != c && g[r][i] == v) || (i != r && g[i][c] == v) {
            return false;
        }
    }
    let (br, bc) = (r / 3 * 3, c / 3 * 3);
    for rr in br..br + 3 {
        for cc in bc..bc + 3 {
            if (rr, cc) != (r, c) && g[rr][cc] == v {
                return false;
            }
        }
    }
    true
}

/// Row-major assignment of every empty cell, digits 1..9 in order.
fn sudoku_brute(g: &mut [[u8; 9]; 9], empties: &[(usize, usize)]) -> bool {
    let Some((&(r, c), rest)) = empties.split_first() else {
        return (0..81).all(|p| sudoku_ok(g, p / 9, p % 9));
    };
    for d in 1..=9 {
        g[r][c] = d;
        if sudoku_ok(g, r, c) && sudoku_brute(g, rest) {
            g[r][c] = 0;
            return true;
        }
    }
    g[r][c] = 0;
    false
}

/// 100 grids with at most 8 empties; every other grid has a corrupted given.
pub fn sudoku_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let solved: Vec<SudokuGrid> = bundled(PuzzleKind::Sudoku)
        .iter()
        .map(|i| match i {
            Instance::Sudoku { grid, .. } => SudokuGrid::from_kaggle(grid).unwrap().solve().unwrap(),
            _ => unreachable!(),
        })
        .collect();
    let (mut yes, mut no) = (0, 0);
    for n in 0..100 {
        let mut g = solved[n % solved.len()];
        let mut cells: Vec<(usize, usize)> = (0..81).map(|p| (p / 9, p % 9)).collect();
        cells.shuffle(&mut rng);
        let k = rng.random_range(1..=8);
        for &(r, c) in &cells[..k] {
            g.cells[r][c] = 0;
        }
        if n % 2 == 1 {
            let (r, c) = cells[k];
            g.cells[r][c] = g.cells[r][c] % 9 + 1;
        }
        let mut empties: Vec<(usize, usize)> = cells[..k].to_vec();
        empties.sort();
        let filled_ok = (0..81).all(|p| g.cells[p / 9][p % 9] == 0 || sudoku_ok(&g.cells, p / 9, p % 9));
        let brute = filled_ok && sudoku_brute(&mut g.cells.clone(), &empties);
        let oracle = g.is_rule_valid() && g.is_solvable().map_err(|e| e.to_string())?;
        if oracle != brute {
            return Err(format!("grid {n} {}: oracle {oracle}, brute force {brute}", g.to_kaggle()));
        }
        if brute {
            yes += 1;
        } else {
            no += 1;
        }
    }
    if yes == 0 || no == 0 {
        return Err(format!("one-sided sample: {yes} solvable, {no} unsolvable"));
    }
    Ok(format!("100 grids ({yes} solvable, {no} unsolvable), 0 disagreements"))
}

// ---- coloring

fn proper(g: &Graph, colors: &[u8]) -> bool {
    (0..g.len()).all(|v| g.adjacency[v].iter().all(|&u| colors[u] == 0 || colors[v] == 0 || colors[u] != colors[v]))
}

/// Every completion of `colors` over `k` colors, by counting in base k.
fn extendable(g: &Graph, colors: &[u8], k: u8) -> bool {
    let free: Vec<usize> = (0..g.len()).filter(|&v| colors[v] == 0).collect();
    let total = (k as u64).pow(free.len() as u32);
    let mut c = colors.to_vec();
    (0..total).any(|mut code| {
        for &v in &free {
            c[v] = (code % k as u64) as u8 + 1;
            code /= k as u64;
        }
        proper(g, &c)
    })
}

/// 50 random graphs with n <= 8, plus one random partial coloring each.
pub fn chromatic_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..50 {
        let n = rng.random_range(1..=8);
        let g = random_graph(n, rng.random_range(0.1..0.9), 1000 + i);
        let brute = (1..=n as u8).find(|&k| extendable(&g, &vec![0; n], k)).unwrap();
        let got = chromatic_number(&g);
        if got != brute {
            return Err(format!("graph {i} {:?}: chromatic {got}, brute force {brute}", g.adjacency));
        }

        let mut colors = vec![0u8; n];
        for c in colors.iter_mut() {
            if rng.random_bool(0.4) {
                *c = rng.random_range(1..=brute);
            }
        }
        let want = proper(&g, &colors) && extendable(&g, &colors, brute);
        // improper partial colorings are rejected outright
        let got = is_colorable(&g, &Coloring { colors: colors.clone() }, brute).unwrap_or(false);
        if got != want {
            return Err(format!("graph {i}, partial {colors:?}: oracle {got}, brute force {want}"));
        }
    }
    Ok("50 graphs and 50 partial colorings, 0 disagreements".into())
}

// ---- game of 24

#[derive(Clone, Copy)]
struct Frac(i64, i64);

impl Frac {
    fn norm(self) -> Frac {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        let g = gcd(self.0, self.1).max(1);
        let s = if self.1 < 0 { -1 } else { 1 };
        Frac(s * self.0 / g, s * self.1 / g)
    }
}

/// All ordered pairs, all four operations, no pruning or deduplication.
fn reaches_24(vals: &[Frac]) -> bool {
    if vals.len() == 1 {
        let v = vals[0].norm();
        return v.0 == 24 && v.1 == 1;
    }
    for i in 0..vals.len() {
        for j in 0..vals.len() {
            if i == j {
                continue;
            }
            let (a, b) = (vals[i], vals[j]);
            let rest: Vec<Frac> = (0..vals.len()).filter(|&k| k != i && k != j).map(|k| vals[k]).collect();
            let mut results = vec![
                Frac(a.0 * b.1 + b.0 * a.1, a.1 * b.1),
                Frac(a.0 * b.1 - b.0 * a.1, a.1 * b.1),
                Frac(a.0 * b.0, a.1 * b.1),
            ];
            if b.0 != 0 {
                results.push(Frac(a.0 * b.1, a.1 * b.0));
            }
            for r in results {
                let mut next = rest.clone();
                next.push(r.norm());
                if reaches_24(&next) {
                    return true;
                }
            }
        }
    }
    false
}

/// Every multiset of four numbers from 1..=13, then the bundled questions.
pub fn game24_agreement() -> Outcome {
    let mut solvable = 0;
    let mut total = 0;
    for a in 1..=13 {
        for b in a..=13 {
            for c in b..=13 {
                for d in c..=13 {
                    let q = [a, b, c, d];
                    let want = reaches_24(&q.map(|v| Frac(v, 1)));
                    if is_solvable_24(&ExprState::initial(&q)) != want {
                        return Err(format!("{q:?}: oracle disagrees, enumeration says {want}"));
                    }
                    solvable += usize::from(want);
                    total += 1;
                }
            }
        }
    }
    if solvable != 1362 {
        return Err(format!("{solvable} solvable multisets, expected 1362"));
    }
    for inst in bundled(PuzzleKind::Game24) {
        let Instance::Game24 { numbers, .. } = inst else { unreachable!() };
        if !reaches_24(&numbers.map(|v| Frac(v, 1))) {
            return Err(format!("bundled {numbers:?} has no solution"));
        }
    }
    Ok(format!("{total} multisets ({solvable} solvable), 0 disagreements"))
}

// ---- grid puzzles

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut items: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::new();
    fn heap(k: usize, items: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            let j = if k % 2 == 0 { i } else { 0 };
            items.swap(j, k - 1);
        }
    }
    heap(n, &mut items, &mut out);
    out
}

/// Try every full assignment of permutations to the non-anchor columns.
fn grid_brute(p: &GridPuzzle, partial: &[Vec<Option<u8>>]) -> bool {
    let perms = permutations(p.rows());
    let cols = p.cols();
    let mut idx = vec![0usize; cols];
    let mut cells = partial.to_vec();
    loop {
        for c in 1..cols {
            for r in 0..p.rows() {
                cells[r][c] = Some(perms[idx[c]][r]);
            }
        }
        let agrees = (0..p.rows()).all(|r| (1..cols).all(|c| partial[r][c].is_none() || partial[r][c] == cells[r][c]));
        if agrees && (0..p.clues.len()).all(|i| p.eval_clue(i, &cells) == TruthValue3::Satisfied) {
            return true;
        }
        let mut c = 1;
        loop {
            if c == cols {
                return false;
            }
            idx[c] += 1;
            if idx[c] < perms.len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// Every bundled instance up to 4x4: the empty grid and four partial fills.
pub fn grid_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut checked, mut puzzles) = (0, 0);
    for inst in bundled(PuzzleKind::Grid) {
        let Ok(Domain::Grid(p)) = inst.domain() else { unreachable!() };
        if p.rows() > 4 || p.cols() > 4 {
            continue;
        }
        puzzles += 1;
        let solution = p.solution_cells().unwrap();
        let mut states = vec![p.empty_cells()];
        for _ in 0..4 {
            let mut cells = p.empty_cells();
            for row in cells.iter_mut().zip(&solution) {
                for c in 1..p.cols() {
                    if rng.random_bool(0.3) {
                        row.0[c] = row.1[c];
                    }
                }
            }
            if rng.random_bool(0.5) {
                // one placement that may disagree with the solution
                let r = rng.random_range(0..p.rows());
                let c = rng.random_range(1..p.cols());
                cells[r][c] = Some(rng.random_range(0..p.rows() as u8));
            }
            states.push(cells);
        }
        for cells in states {
            let want = p.columns_unique(&cells) && grid_brute(&p, &cells);
            let got = p.is_grid_solvable(&cells).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("{}: {cells:?}: oracle {got}, permutation search {want}", inst.id()));
            }
            checked += 1;
        }
    }
    if checked < 200 {
        return Err(format!("only {checked} states checked"));
    }
    Ok(format!("{puzzles} instances, {checked} states, 0 disagreements"))
}
