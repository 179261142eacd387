//! 9x9 Sudoku: rule checks, a bitmask backtracking oracle and the move set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{PuzzleDomain, SlotChange, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::pylit::{self, PyValue};

const ALL: u16 = 0b11_1111_1110;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SudokuGrid {
    pub cells: [[u8; 9]; 9],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SudokuMove {
    pub row: usize,
    pub col: usize,
    pub digit: u8,
}

fn box_of(r: usize, c: usize) -> usize {
    (r / 3) * 3 + c / 3
}

impl SudokuGrid {
    pub fn empty() -> Self {
        Self { cells: [[0; 9]; 9] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        if rows.len() != 9 || rows.iter().any(|r| r.len() != 9) {
            return Err(Error::Shape("sudoku grid must be 9x9".into()));
        }
        let mut g = Self::empty();
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !(0..=9).contains(&v) {
                    return Err(Error::Parse(format!("cell ({r},{c}) holds {v}")));
                }
                g.cells[r][c] = v as u8;
            }
        }
        Ok(g)
    }

    /// Read the 81-character string form used by Kaggle question banks
    /// (`0` or `.` for empty cells).
    pub fn from_kaggle(line: &str) -> Result<Self> {
        let line = line.trim();
        if line.chars().count() != 81 {
            return Err(Error::Shape(format!(
                "expected 81 characters, found {}",
                line.chars().count()
            )));
        }
        let mut g = Self::empty();
        for (i, ch) in line.chars().enumerate() {
            let v = match ch {
                '.' => 0,
                '0'..='9' => ch as u8 - b'0',
                _ => return Err(Error::Parse(format!("bad character {ch:?} at {i}"))),
            };
            g.cells[i / 9][i % 9] = v;
        }
        Ok(g)
    }

    pub fn to_kaggle(&self) -> String {
        self.cells
            .iter()
            .flatten()
            .map(|&d| char::from(b'0' + d))
            .collect()
    }

    pub fn empties(&self) -> usize {
        self.cells.iter().flatten().filter(|&&d| d == 0).count()
    }

    pub fn first_empty(&self) -> Option<(usize, usize)> {
        (0..81)
            .map(|i| (i / 9, i % 9))
            .find(|&(r, c)| self.cells[r][c] == 0)
    }

    pub fn is_rule_valid(&self) -> bool {
        let mut rows = [0u16; 9];
        let mut cols = [0u16; 9];
        let mut boxes = [0u16; 9];
        for r in 0..9 {
            for c in 0..9 {
                let d = self.cells[r][c];
                if d == 0 {
                    continue;
                }
                let bit = 1 << d;
                let b = box_of(r, c);
                if rows[r] & bit != 0 || cols[c] & bit != 0 || boxes[b] & bit != 0 {
                    return false;
                }
                rows[r] |= bit;
                cols[c] |= bit;
                boxes[b] |= bit;
            }
        }
        true
    }

    pub fn is_solved(&self) -> bool {
        self.empties() == 0 && self.is_rule_valid()
    }

    /// Digits not yet used in the row, column or box of `(r, c)`, ignoring
    /// the cell itself.
    pub fn candidates(&self, r: usize, c: usize) -> u16 {
        let mut used = 0u16;
        for i in 0..9 {
            if i != c {
                used |= 1 << self.cells[r][i];
            }
            if i != r {
                used |= 1 << self.cells[i][c];
            }
        }
        let (br, bc) = (r / 3 * 3, c / 3 * 3);
        for rr in br..br + 3 {
            for cc in bc..bc + 3 {
                if (rr, cc) != (r, c) {
                    used |= 1 << self.cells[rr][cc];
                }
            }
        }
        ALL & !used
    }

    /// All locally legal placements, row-major then digit ascending.
    pub fn forward_moves(&self) -> Vec<SudokuMove> {
        let mut out = Vec::new();
        for r in 0..9 {
            for c in 0..9 {
                if self.cells[r][c] == 0 {
                    push_digits(&mut out, r, c, self.candidates(r, c));
                }
            }
        }
        out
    }

    pub fn count_solutions(&self, cap: usize) -> usize {
        if cap == 0 || !self.is_rule_valid() {
            return 0;
        }
        let mut s = Solver::new(self, u64::MAX);
        s.search(cap).unwrap_or(0)
    }

    pub fn is_solvable(&self) -> Result<bool> {
        self.is_solvable_with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn is_solvable_with_budget(&self, budget: u64) -> Result<bool> {
        if !self.is_rule_valid() {
            return Err(Error::RuleViolation("duplicate digit in a unit".into()));
        }
        let mut s = Solver::new(self, budget);
        Ok(s.search(1)? > 0)
    }

    /// First completion found, if any.
    pub fn solve(&self) -> Option<SudokuGrid> {
        if !self.is_rule_valid() {
            return None;
        }
        let mut s = Solver::new(self, u64::MAX);
        s.keep_first = true;
        s.search(1).ok()?;
        s.first
    }
}

fn push_digits(out: &mut Vec<SudokuMove>, row: usize, col: usize, mask: u16) {
    for d in 1..=9u8 {
        if mask & (1 << d) != 0 {
            out.push(SudokuMove { row, col, digit: d });
        }
    }
}

impl fmt::Display for SudokuGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.cells.iter().enumerate() {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (c, d) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{d}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

struct Solver {
    cells: [u8; 81],
    rows: [u16; 9],
    cols: [u16; 9],
    boxes: [u16; 9],
    nodes: u64,
    budget: u64,
    found: usize,
    keep_first: bool,
    first: Option<SudokuGrid>,
}

impl Solver {
    fn new(g: &SudokuGrid, budget: u64) -> Self {
        let mut s = Solver {
            cells: [0; 81],
            rows: [0; 9],
            cols: [0; 9],
            boxes: [0; 9],
            nodes: 0,
            budget,
            found: 0,
            keep_first: false,
            first: None,
        };
        for r in 0..9 {
            for c in 0..9 {
                let d = g.cells[r][c];
                s.cells[r * 9 + c] = d;
                if d != 0 {
                    s.rows[r] |= 1 << d;
                    s.cols[c] |= 1 << d;
                    s.boxes[box_of(r, c)] |= 1 << d;
                }
            }
        }
        s
    }

    fn search(&mut self, cap: usize) -> Result<usize> {
        self.rec(cap)?;
        Ok(self.found)
    }

    fn rec(&mut self, cap: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        // most constrained empty cell
        let mut best: Option<(usize, u16)> = None;
        for i in 0..81 {
            if self.cells[i] != 0 {
                continue;
            }
            let (r, c) = (i / 9, i % 9);
            let mask = ALL & !(self.rows[r] | self.cols[c] | self.boxes[box_of(r, c)]);
            let n = mask.count_ones();
            if n == 0 {
                return Ok(());
            }
            if best.is_none_or(|(_, m)| n < m.count_ones()) {
                best = Some((i, mask));
                if n == 1 {
                    break;
                }
            }
        }
        let Some((i, mask)) = best else {
            self.found += 1;
            if self.keep_first && self.first.is_none() {
                let mut g = SudokuGrid::empty();
                for (j, &d) in self.cells.iter().enumerate() {
                    g.cells[j / 9][j % 9] = d;
                }
                self.first = Some(g);
            }
            return Ok(());
        };
        let (r, c) = (i / 9, i % 9);
        let b = box_of(r, c);
        for d in 1..=9u8 {
            let bit = 1 << d;
            if mask & bit == 0 {
                continue;
            }
            self.cells[i] = d;
            self.rows[r] |= bit;
            self.cols[c] |= bit;
            self.boxes[b] |= bit;
            let res = self.rec(cap);
            self.cells[i] = 0;
            self.rows[r] &= !bit;
            self.cols[c] &= !bit;
            self.boxes[b] &= !bit;
            res?;
            if self.found >= cap {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// One Sudoku question as a puzzle domain.
#[derive(Debug, Clone)]
pub struct Sudoku {
    pub puzzle: SudokuGrid,
    pub budget: u64,
}

impl Sudoku {
    pub fn new(puzzle: SudokuGrid) -> Self {
        Self {
            puzzle,
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl PuzzleDomain for Sudoku {
    type State = SudokuGrid;
    type Move = SudokuMove;

    fn initial(&self) -> SudokuGrid {
        self.puzzle
    }

    fn rule_valid(&self, s: &SudokuGrid) -> bool {
        s.is_rule_valid()
    }

    fn forward_moves(&self, s: &SudokuGrid) -> Vec<SudokuMove> {
        if !s.is_rule_valid() {
            return Vec::new();
        }
        s.forward_moves()
    }

    fn branch_moves(&self, s: &SudokuGrid) -> Vec<SudokuMove> {
        let mut out = Vec::new();
        if let Some((r, c)) = s.first_empty() {
            push_digits(&mut out, r, c, s.candidates(r, c));
        }
        out
    }

    fn violating_moves(&self, s: &SudokuGrid) -> Vec<SudokuMove> {
        let mut out = Vec::new();
        if let Some((r, c)) = s.first_empty() {
            push_digits(&mut out, r, c, ALL & !s.candidates(r, c));
        }
        out
    }

    fn apply(&self, s: &SudokuGrid, m: &SudokuMove) -> Result<SudokuGrid> {
        if m.row >= 9 || m.col >= 9 || !(1..=9).contains(&m.digit) {
            return Err(Error::InvalidArgument(format!("bad move {m:?}")));
        }
        if s.cells[m.row][m.col] != 0 {
            return Err(Error::InvalidArgument(format!(
                "cell ({}, {}) is already filled",
                m.row, m.col
            )));
        }
        let mut out = *s;
        out.cells[m.row][m.col] = m.digit;
        Ok(out)
    }

    fn revert(&self, s: &SudokuGrid, m: &SudokuMove) -> Result<SudokuGrid> {
        if m.row >= 9 || m.col >= 9 || s.cells[m.row][m.col] != m.digit {
            return Err(Error::InvalidArgument(format!("move {m:?} is not on the grid")));
        }
        let mut out = *s;
        out.cells[m.row][m.col] = 0;
        Ok(out)
    }

    fn is_solution(&self, s: &SudokuGrid) -> bool {
        s.is_solved()
    }

    fn is_solvable(&self, s: &SudokuGrid) -> Result<bool> {
        if !s.is_rule_valid() {
            return Ok(false);
        }
        s.is_solvable_with_budget(self.budget)
    }

    fn solvable_children(&self, s: &SudokuGrid) -> Result<Vec<(SudokuMove, SudokuGrid)>> {
        if !s.is_rule_valid() {
            return Ok(Vec::new());
        }
        // With a unique completion, a child is solvable iff it agrees with it.
        if s.count_solutions(2) == 1 {
            let sol = s.solve().expect("one solution was counted");
            return s
                .forward_moves()
                .into_iter()
                .filter(|m| sol.cells[m.row][m.col] == m.digit)
                .map(|m| Ok((m, self.apply(s, &m)?)))
                .collect();
        }
        let mut out = Vec::new();
        for m in s.forward_moves() {
            let child = self.apply(s, &m)?;
            if self.is_solvable(&child)? {
                out.push((m, child));
            }
        }
        Ok(out)
    }

    fn canonical_text(&self, s: &SudokuGrid) -> String {
        s.to_string()
    }

    fn parse_state(&self, text: &str) -> Result<SudokuGrid> {
        grid_from_value(&pylit::parse(text)?)
    }

    fn difficulty(&self, s: &SudokuGrid) -> usize {
        s.empties()
    }

    fn max_depth(&self) -> usize {
        self.puzzle.empties()
    }

    fn diff(&self, a: &SudokuGrid, b: &SudokuGrid) -> Result<Vec<SlotChange>> {
        let mut out = Vec::new();
        for r in 0..9 {
            for c in 0..9 {
                if a.cells[r][c] != b.cells[r][c] {
                    out.push(SlotChange {
                        slot: vec![r, c],
                        before: a.cells[r][c].to_string(),
                        after: b.cells[r][c].to_string(),
                    });
                }
            }
        }
        Ok(out)
    }

    fn is_forward_step(&self, from: &SudokuGrid, to: &SudokuGrid) -> bool {
        let mut changed = 0;
        for r in 0..9 {
            for c in 0..9 {
                let (a, b) = (from.cells[r][c], to.cells[r][c]);
                if a != b {
                    if a != 0 || b == 0 {
                        return false;
                    }
                    changed += 1;
                }
            }
        }
        changed == 1
    }
}

/// Turn a parsed literal into a grid, for callers that already hold a value.
pub fn grid_from_value(v: &PyValue) -> Result<SudokuGrid> {
    let rows = v
        .as_list()
        .ok_or_else(|| Error::Parse("expected a list of rows".into()))?
        .iter()
        .map(|row| {
            row.as_list()
                .ok_or_else(|| Error::Parse("expected a row list".into()))?
                .iter()
                .map(|x| x.as_int().ok_or_else(|| Error::Parse("expected an integer".into())))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SudokuGrid::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVED: &str =
        "534678912672195348198342567859761423426853791713924856961537284287419635345286179";

    #[test]
    fn kaggle_round_trip() {
        let g = SudokuGrid::from_kaggle(SOLVED).unwrap();
        assert_eq!(g.to_kaggle(), SOLVED);
        assert!(g.is_solved());
        assert!(SudokuGrid::from_kaggle("123").is_err());
    }

    #[test]
    fn solved_grid_counts_once() {
        let g = SudokuGrid::from_kaggle(SOLVED).unwrap();
        assert_eq!(g.count_solutions(2), 1);
        assert!(g.forward_moves().is_empty());
    }

    #[test]
    fn one_hole_has_one_move() {
        let mut g = SudokuGrid::from_kaggle(SOLVED).unwrap();
        let d = g.cells[4][4];
        g.cells[4][4] = 0;
        assert_eq!(
            g.forward_moves(),
            vec![SudokuMove { row: 4, col: 4, digit: d }]
        );
    }

    #[test]
    fn invalid_grid_has_no_solutions() {
        let mut g = SudokuGrid::empty();
        g.cells[0][0] = 5;
        g.cells[0][8] = 5;
        assert!(!g.is_rule_valid());
        assert_eq!(g.count_solutions(2), 0);
        assert!(matches!(g.is_solvable(), Err(Error::RuleViolation(_))));
        assert_eq!(Sudoku::new(g).label(&g).unwrap(), crate::StateLabel::Unsolvable);
    }

    #[test]
    fn budget_is_enforced() {
        let g = SudokuGrid::empty();
        assert!(matches!(
            g.is_solvable_with_budget(5),
            Err(Error::BudgetExhausted(5))
        ));
    }

    #[test]
    fn branch_moves_use_first_empty_cell() {
        let mut g = SudokuGrid::from_kaggle(SOLVED).unwrap();
        g.cells[2][3] = 0;
        g.cells[5][5] = 0;
        let dom = Sudoku::new(g);
        let b = dom.branch_moves(&g);
        assert!(b.iter().all(|m| (m.row, m.col) == (2, 3)));
        let v = dom.violating_moves(&g);
        assert_eq!(v.len() + b.len(), 9);
    }
}
