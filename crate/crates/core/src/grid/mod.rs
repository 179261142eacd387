//! Logic grid puzzles: a table with one row per value of the anchor
//! category, filled by applying clues written in a small constraint
//! language (see [`clue`]).

pub mod clue;
pub mod eval;

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use clue::{parse_clue, ClueExpr};
pub use eval::{resolve, AttrRef, ResolvedClue, TruthValue3};

use crate::domain::{PuzzleDomain, SlotChange, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::pylit::{self, PyValue};

/// Table body: `cells[row][col]` is an index into `categories[col].values`.
/// Column 0 is the anchor category and is always filled with the row index.
pub type Cells = Vec<Vec<Option<u8>>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Str(_) => None,
        }
    }

    pub fn to_py(&self) -> PyValue {
        match self {
            Value::Int(v) => PyValue::Int(*v),
            Value::Str(s) => PyValue::Str(s.clone()),
        }
    }

    fn matches(&self, v: &PyValue) -> bool {
        match (self, v) {
            (Value::Int(a), PyValue::Int(b)) => a == b,
            (Value::Str(a), PyValue::Str(b)) => a == b,
            (Value::Int(a), PyValue::Str(b)) => b.trim().parse::<i64>().ok() == Some(*a),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub values: Vec<Value>,
}

impl Category {
    pub fn is_ordinal(&self) -> bool {
        self.values.iter().all(|v| v.as_int().is_some())
    }

    /// `times : 9, 10, 11, 12.`
    pub fn line(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(Value::to_string).collect();
        format!("{} : {}.", self.name, vals.join(", "))
    }
}

fn ser_categories<S: Serializer>(cats: &[Category], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(cats.len()))?;
    for c in cats {
        m.serialize_entry(&c.name, &c.values)?;
    }
    m.end()
}

fn de_categories<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Category>, D::Error> {
    struct V;
    impl<'de> Visitor<'de> for V {
        type Value = Vec<Category>;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a map from category name to values")
        }
        fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
            let mut out = Vec::new();
            while let Some((name, values)) = map.next_entry::<String, Vec<Value>>()? {
                out.push(Category { name, values });
            }
            Ok(out)
        }
    }
    d.deserialize_map(V)
}

/// A grid puzzle as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridInstance {
    pub id: String,
    pub question: String,
    #[serde(serialize_with = "ser_categories", deserialize_with = "de_categories")]
    pub categories: Vec<Category>,
    pub clues_text: Vec<String>,
    pub clues_dsl: Vec<String>,
    /// Full rows, anchor value first.
    pub solution: Vec<Vec<Value>>,
}

/// Cells written by one clue application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Placement {
    pub row: usize,
    pub col: usize,
    pub value: u8,
}

/// Apply clue number `clue` (1-based, as printed) by writing `placements`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridMove {
    pub clue: usize,
    pub placements: Vec<Placement>,
}

/// Table contents plus the stack of applied clues. Equality ignores the
/// stack: two states are the same when their tables print the same.
#[derive(Debug, Clone)]
pub struct GridState {
    pub cells: Cells,
    pub applied: Vec<GridMove>,
}

impl PartialEq for GridState {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for GridState {}

impl Hash for GridState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.cells.hash(state);
    }
}

impl GridState {
    pub fn empties(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_none()).count()
    }
}

/// One grid puzzle with its clues resolved.
#[derive(Debug, Clone)]
pub struct GridPuzzle {
    pub instance: GridInstance,
    pub clues: Vec<ResolvedClue>,
    pub budget: u64,
}

impl GridPuzzle {
    pub fn new(instance: GridInstance) -> Result<Self> {
        let cats = &instance.categories;
        if cats.len() < 2 {
            return Err(Error::Shape("a grid needs at least two categories".into()));
        }
        let rows = cats[0].values.len();
        if rows == 0 || rows > 250 || cats.iter().any(|c| c.values.len() != rows) {
            return Err(Error::Shape("every category needs the same number of values".into()));
        }
        if !cats[0].is_ordinal() || cats[0].values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "the first category must be numeric and strictly increasing".into(),
            ));
        }
        for c in cats {
            let distinct: HashSet<&Value> = c.values.iter().collect();
            if distinct.len() != c.values.len() {
                return Err(Error::InvalidArgument(format!("category {} repeats a value", c.name)));
            }
        }
        let clues = instance
            .clues_dsl
            .iter()
            .map(|src| resolve(&parse_clue(src)?, cats))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            instance,
            clues,
            budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn categories(&self) -> &[Category] {
        &self.instance.categories
    }

    pub fn rows(&self) -> usize {
        self.instance.categories[0].values.len()
    }

    pub fn cols(&self) -> usize {
        self.instance.categories.len()
    }

    pub fn empty_cells(&self) -> Cells {
        (0..self.rows())
            .map(|r| {
                let mut row = vec![None; self.cols()];
                row[0] = Some(r as u8);
                row
            })
            .collect()
    }

    /// The stored solution as table cells.
    pub fn solution_cells(&self) -> Result<Cells> {
        let sol = &self.instance.solution;
        if sol.len() != self.rows() {
            return Err(Error::Shape("solution has the wrong number of rows".into()));
        }
        let mut cells = Vec::new();
        for row in sol {
            if row.len() != self.cols() {
                return Err(Error::Shape("solution row has the wrong width".into()));
            }
            let mut out = Vec::new();
            for (c, v) in row.iter().enumerate() {
                let idx = self.categories()[c]
                    .values
                    .iter()
                    .position(|x| x == v)
                    .ok_or_else(|| Error::Parse(format!("{v} is not a value of column {c}")))?;
                out.push(Some(idx as u8));
            }
            cells.push(out);
        }
        Ok(cells)
    }

    pub fn state(&self, cells: Cells) -> GridState {
        GridState {
            cells,
            applied: Vec::new(),
        }
    }

    pub fn eval_clue(&self, clue: usize, cells: &Cells) -> TruthValue3 {
        self.clues[clue].eval(self.categories(), cells)
    }

    pub fn columns_unique(&self, cells: &Cells) -> bool {
        (1..self.cols()).all(|c| {
            let mut seen = HashSet::new();
            cells.iter().filter_map(|r| r[c]).all(|v| seen.insert(v))
        })
    }

    fn violated(&self, cells: &Cells) -> Vec<bool> {
        (0..self.clues.len())
            .map(|i| self.eval_clue(i, cells) == TruthValue3::Violated)
            .collect()
    }

    fn write(cells: &Cells, placements: &[Placement]) -> Cells {
        let mut out = cells.clone();
        for p in placements {
            out[p.row][p.col] = Some(p.value);
        }
        out
    }

    /// Every way of writing the clue's unplaced attributes into empty cells
    /// (rows ascending, attributes in order of mention), paired with the
    /// resulting table.
    fn placements(&self, clue: usize, cells: &Cells) -> Vec<Vec<Placement>> {
        let todo = self.clues[clue].unplaced(cells);
        if todo.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            todo: &[AttrRef],
            cells: &Cells,
            cur: &mut Vec<Placement>,
            out: &mut Vec<Vec<Placement>>,
        ) {
            let Some(&(col, value)) = todo.get(cur.len()) else {
                out.push(cur.clone());
                return;
            };
            for row in 0..cells.len() {
                if cells[row][col].is_some() || cur.iter().any(|p| p.row == row && p.col == col) {
                    continue;
                }
                cur.push(Placement { row, col, value });
                rec(todo, cells, cur, out);
                cur.pop();
            }
        }
        rec(&todo, cells, &mut cur, &mut out);
        out
    }

    /// Applications of clue `clue` (0-based) that make it hold outright
    /// without newly contradicting any other clue.
    pub fn clue_instantiations(&self, clue: usize, state: &GridState) -> Vec<GridMove> {
        self.classified_placements(clue, state, false)
    }

    fn classified_placements(&self, clue: usize, state: &GridState, violating: bool) -> Vec<GridMove> {
        if self.eval_clue(clue, &state.cells) == TruthValue3::Violated {
            return Vec::new();
        }
        let before = self.violated(&state.cells);
        self.placements(clue, &state.cells)
            .into_iter()
            .filter(|ps| {
                let next = Self::write(&state.cells, ps);
                if self.eval_clue(clue, &next) != TruthValue3::Satisfied {
                    return false;
                }
                let breaks = (0..self.clues.len()).any(|j| {
                    j != clue && !before[j] && self.eval_clue(j, &next) == TruthValue3::Violated
                });
                breaks == violating
            })
            .map(|placements| GridMove {
                clue: clue + 1,
                placements,
            })
            .collect()
    }

    pub fn apply_clue(&self, state: &GridState, mv: &GridMove) -> Result<GridState> {
        if mv.clue == 0 || mv.clue > self.clues.len() {
            return Err(Error::InvalidArgument(format!("no clue {}", mv.clue)));
        }
        let mut cells = state.cells.clone();
        for p in &mv.placements {
            if p.row >= self.rows() || p.col == 0 || p.col >= self.cols() {
                return Err(Error::Conflict {
                    row: p.row,
                    col: p.col,
                    message: "cell is outside the table".into(),
                });
            }
            if p.value as usize >= self.categories()[p.col].values.len() {
                return Err(Error::InvalidArgument(format!("bad value index {}", p.value)));
            }
            if let Some(old) = cells[p.row][p.col] {
                return Err(Error::Conflict {
                    row: p.row,
                    col: p.col,
                    message: format!(
                        "cell already holds {}",
                        self.categories()[p.col].values[old as usize]
                    ),
                });
            }
            if cells.iter().any(|r| r[p.col] == Some(p.value)) {
                return Err(Error::Conflict {
                    row: p.row,
                    col: p.col,
                    message: format!(
                        "{} is already placed in this column",
                        self.categories()[p.col].values[p.value as usize]
                    ),
                });
            }
            cells[p.row][p.col] = Some(p.value);
        }
        let mut applied = state.applied.clone();
        applied.push(mv.clone());
        Ok(GridState { cells, applied })
    }

    pub fn revert_last(&self, state: &GridState) -> Result<GridState> {
        let mut applied = state.applied.clone();
        let last = applied.pop().ok_or(Error::EmptyHistory)?;
        let mut cells = state.cells.clone();
        for p in &last.placements {
            cells[p.row][p.col] = None;
        }
        Ok(GridState { cells, applied })
    }

    /// Number of full tables extending `cells` that satisfy every clue,
    /// counting stops at `cap`.
    pub fn count_solutions(&self, cells: &Cells, cap: usize) -> Result<usize> {
        if !self.columns_unique(cells) {
            return Ok(0);
        }
        let mut work = cells.clone();
        let mut found = 0;
        let mut nodes = 0;
        self.search(&mut work, cap, &mut nodes, &mut found)?;
        Ok(found)
    }

    pub fn is_grid_solvable(&self, cells: &Cells) -> Result<bool> {
        Ok(self.count_solutions(cells, 1)? > 0)
    }

    fn search(&self, cells: &mut Cells, cap: usize, nodes: &mut u64, found: &mut usize) -> Result<()> {
        *nodes += 1;
        if *nodes > self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        if (0..self.clues.len()).any(|i| self.eval_clue(i, cells) == TruthValue3::Violated) {
            return Ok(());
        }
        // column with the fewest empty cells, then its first empty row
        let pick = (1..self.cols())
            .filter_map(|c| {
                let empty = cells.iter().filter(|r| r[c].is_none()).count();
                (empty > 0).then_some((empty, c))
            })
            .min();
        let Some((_, col)) = pick else {
            *found += 1;
            return Ok(());
        };
        let row = cells.iter().position(|r| r[col].is_none()).unwrap();
        let n = self.categories()[col].values.len() as u8;
        for v in 0..n {
            if cells.iter().any(|r| r[col] == Some(v)) {
                continue;
            }
            cells[row][col] = Some(v);
            let res = self.search(cells, cap, nodes, found);
            cells[row][col] = None;
            res?;
            if *found >= cap {
                break;
            }
        }
        Ok(())
    }

    fn header_py(&self) -> PyValue {
        PyValue::List(
            self.categories()
                .iter()
                .map(|c| PyValue::Str(c.name.clone()))
                .collect(),
        )
    }

    pub fn cells_text(&self, cells: &Cells) -> String {
        let mut rows = vec![self.header_py()];
        for row in cells {
            rows.push(PyValue::List(
                row.iter()
                    .enumerate()
                    .map(|(c, v)| match v {
                        Some(i) => self.categories()[c].values[*i as usize].to_py(),
                        None => PyValue::Str(String::new()),
                    })
                    .collect(),
            ));
        }
        PyValue::List(rows).to_string()
    }

    pub fn parse_cells(&self, text: &str) -> Result<Cells> {
        let v = pylit::parse(text)?;
        let rows = v
            .as_list()
            .ok_or_else(|| Error::Parse("expected a list of rows".into()))?;
        if rows.len() != self.rows() + 1 {
            return Err(Error::Shape(format!(
                "expected {} rows including the header, found {}",
                self.rows() + 1,
                rows.len()
            )));
        }
        if rows[0] != self.header_py() {
            return Err(Error::Parse(format!("unexpected header {}", rows[0])));
        }
        let mut cells = Vec::new();
        for (r, row) in rows[1..].iter().enumerate() {
            let items = row
                .as_list()
                .ok_or_else(|| Error::Parse("expected a row list".into()))?;
            if items.len() != self.cols() {
                return Err(Error::Shape(format!("row {} has {} cells", r + 1, items.len())));
            }
            let mut out = Vec::new();
            for (c, item) in items.iter().enumerate() {
                if item.as_str() == Some("") {
                    out.push(None);
                    continue;
                }
                let idx = self.categories()[c]
                    .values
                    .iter()
                    .position(|v| v.matches(item))
                    .ok_or_else(|| Error::Parse(format!("{item} is not a value of column {c}")))?;
                out.push(Some(idx as u8));
            }
            if out[0] != Some(r as u8) {
                return Err(Error::Parse(format!("row {} has the wrong anchor value", r + 1)));
            }
            cells.push(out);
        }
        Ok(cells)
    }
}

impl PuzzleDomain for GridPuzzle {
    type State = GridState;
    type Move = GridMove;

    fn initial(&self) -> GridState {
        self.state(self.empty_cells())
    }

    fn rule_valid(&self, s: &GridState) -> bool {
        self.columns_unique(&s.cells) && !self.violated(&s.cells).into_iter().any(|v| v)
    }

    fn forward_moves(&self, s: &GridState) -> Vec<GridMove> {
        (0..self.clues.len())
            .flat_map(|i| self.clue_instantiations(i, s))
            .collect()
    }

    fn violating_moves(&self, s: &GridState) -> Vec<GridMove> {
        (0..self.clues.len())
            .flat_map(|i| self.classified_placements(i, s, true))
            .collect()
    }

    fn apply(&self, s: &GridState, m: &GridMove) -> Result<GridState> {
        self.apply_clue(s, m)
    }

    fn revert(&self, s: &GridState, m: &GridMove) -> Result<GridState> {
        if s.applied.last().is_some_and(|last| last != m) {
            return Err(Error::InvalidArgument("only the last clue can be reverted".into()));
        }
        if s.applied.is_empty() {
            let mut cells = s.cells.clone();
            for p in &m.placements {
                if cells.get(p.row).and_then(|r| r.get(p.col)).copied().flatten() != Some(p.value) {
                    return Err(Error::EmptyHistory);
                }
                cells[p.row][p.col] = None;
            }
            return Ok(self.state(cells));
        }
        self.revert_last(s)
    }

    fn is_solution(&self, s: &GridState) -> bool {
        s.empties() == 0 && self.rule_valid(s)
    }

    fn is_solvable(&self, s: &GridState) -> Result<bool> {
        if !self.rule_valid(s) {
            return Ok(false);
        }
        self.is_grid_solvable(&s.cells)
    }

    fn canonical_text(&self, s: &GridState) -> String {
        self.cells_text(&s.cells)
    }

    fn parse_state(&self, text: &str) -> Result<GridState> {
        Ok(self.state(self.parse_cells(text)?))
    }

    fn difficulty(&self, s: &GridState) -> usize {
        s.empties()
    }

    fn max_depth(&self) -> usize {
        self.clues.len()
    }

    fn diff(&self, a: &GridState, b: &GridState) -> Result<Vec<SlotChange>> {
        if a.cells.len() != b.cells.len() || a.cells.iter().zip(&b.cells).any(|(x, y)| x.len() != y.len()) {
            return Err(Error::Shape("tables of different sizes".into()));
        }
        let show = |c: usize, v: Option<u8>| match v {
            Some(i) => self.categories()[c].values[i as usize].to_string(),
            None => String::new(),
        };
        let mut out = Vec::new();
        for (r, (x, y)) in a.cells.iter().zip(&b.cells).enumerate() {
            for c in 0..x.len() {
                if x[c] != y[c] {
                    out.push(SlotChange {
                        slot: vec![r + 1, c],
                        before: show(c, x[c]),
                        after: show(c, y[c]),
                    });
                }
            }
        }
        Ok(out)
    }

    /// `to` must only add values to `from`, and the added values must be
    /// exactly the unplaced attributes of a single clue.
    fn is_forward_step(&self, from: &GridState, to: &GridState) -> bool {
        let Ok(changes) = self.diff(from, to) else {
            return false;
        };
        let mut added = Vec::new();
        for ch in &changes {
            let (r, c) = (ch.slot[0] - 1, ch.slot[1]);
            match (from.cells[r][c], to.cells[r][c]) {
                (None, Some(v)) => added.push((c, v)),
                _ => return false,
            }
        }
        if added.is_empty() {
            return false;
        }
        added.sort_unstable();
        self.clues.iter().any(|clue| {
            let mut want = clue.unplaced(&from.cells);
            want.sort_unstable();
            want == added
        })
    }
}

#[cfg(test)]
mod tests;
