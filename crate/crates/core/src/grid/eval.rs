//! Resolving clue syntax against a puzzle's categories, and three-valued
//! evaluation on partially filled tables.

use super::clue::{ArithOp, ClueExpr, CmpOp, Lit};
use super::{Category, Cells, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthValue3 {
    Satisfied,
    Violated,
    Unknown,
}

/// An attribute referenced by a clue: column and index into that
/// category's value list.
pub type AttrRef = (usize, u8);

#[derive(Debug, Clone, PartialEq)]
enum NExpr {
    Const(i64),
    /// 1-based row of the clue's i-th attribute literal.
    RowOf(usize),
    /// Numeric content of an ordinal column at a 1-based row.
    Cell(Box<NExpr>, usize),
    Arith(ArithOp, Box<NExpr>, Box<NExpr>),
}

#[derive(Debug, Clone, PartialEq)]
enum AExpr {
    Const(AttrRef),
    Cell(NExpr, usize),
}

#[derive(Debug, Clone, PartialEq)]
enum BExpr {
    Num(CmpOp, NExpr, NExpr),
    Attr(bool, AExpr, AExpr),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
    Xor(Box<BExpr>, Box<BExpr>),
}

enum Typed {
    Num(NExpr),
    Attr(AExpr),
    Bool(BExpr),
}

/// A clue bound to one puzzle's categories.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedClue {
    /// Non-anchor attributes whose rows the clue talks about, in order of
    /// first mention. These are what applying the clue places.
    pub literals: Vec<AttrRef>,
    body: BExpr,
}

fn normalize(name: &str) -> String {
    let lower = name.trim().to_lowercase();
    lower.strip_suffix('s').map(str::to_string).unwrap_or(lower)
}

struct Resolver<'a> {
    cats: &'a [Category],
    literals: Vec<AttrRef>,
}

impl Resolver<'_> {
    fn find_value(&self, lit: &Lit) -> Result<AttrRef> {
        let scan = |pred: &dyn Fn(&Value) -> bool| -> Vec<AttrRef> {
            let mut hits = Vec::new();
            for (c, cat) in self.cats.iter().enumerate() {
                for (i, v) in cat.values.iter().enumerate() {
                    if pred(v) {
                        hits.push((c, i as u8));
                    }
                }
            }
            hits
        };
        let mut hits = match lit {
            Lit::Int(n) => scan(&|v| *v == Value::Int(*n)),
            Lit::Str(s) => scan(&|v| matches!(v, Value::Str(x) if x == s)),
        };
        if let (true, Lit::Str(s)) = (hits.is_empty(), lit) {
            let low = s.to_lowercase();
            hits = scan(&|v| matches!(v, Value::Str(x) if x.to_lowercase() == low));
            if hits.is_empty() {
                if let Ok(n) = s.trim().parse::<i64>() {
                    hits = scan(&|v| *v == Value::Int(n));
                }
            }
        }
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::Resolution(format!("unknown attribute {lit}"))),
            _ => Err(Error::Resolution(format!("attribute {lit} is ambiguous"))),
        }
    }

    fn literal(&mut self, r: AttrRef) -> usize {
        match self.literals.iter().position(|&x| x == r) {
            Some(p) => p,
            None => {
                self.literals.push(r);
                self.literals.len() - 1
            }
        }
    }

    fn row(&mut self, lit: &Lit) -> Result<NExpr> {
        let (col, idx) = self.find_value(lit)?;
        if col == 0 {
            Ok(NExpr::Const(idx as i64 + 1))
        } else {
            Ok(NExpr::RowOf(self.literal((col, idx))))
        }
    }

    fn column(&self, lit: &Lit) -> Result<usize> {
        if let Lit::Str(s) = lit {
            let want = normalize(s);
            if let Some(c) = self.cats.iter().position(|c| normalize(&c.name) == want) {
                return Ok(c);
            }
        }
        Ok(self.find_value(lit)?.0)
    }

    fn typed(&mut self, e: &ClueExpr) -> Result<Typed> {
        Ok(match e {
            ClueExpr::Lit(Lit::Int(v)) => Typed::Num(NExpr::Const(*v)),
            ClueExpr::Lit(l @ Lit::Str(_)) => Typed::Attr(AExpr::Const(self.find_value(l)?)),
            ClueExpr::Row(l) => Typed::Num(self.row(l)?),
            ClueExpr::Col(l) => Typed::Num(NExpr::Const(self.column(l)? as i64)),
            ClueExpr::Cell(r, c) => {
                let row = self.num(r)?;
                let col = match self.num(c)? {
                    NExpr::Const(v) if v >= 0 && (v as usize) < self.cats.len() => v as usize,
                    NExpr::Const(v) => {
                        return Err(Error::Resolution(format!("column {v} out of range")))
                    }
                    _ => return Err(Error::Resolution("column of T(..) must be fixed".into())),
                };
                if self.cats[col].is_ordinal() {
                    Typed::Num(NExpr::Cell(Box::new(row), col))
                } else {
                    Typed::Attr(AExpr::Cell(row, col))
                }
            }
            ClueExpr::Arith(op, a, b) => {
                let (a, b) = (self.num(a)?, self.num(b)?);
                Typed::Num(match (&a, &b) {
                    (NExpr::Const(x), NExpr::Const(y)) => NExpr::Const(match op {
                        ArithOp::Add => x + y,
                        ArithOp::Sub => x - y,
                    }),
                    _ => NExpr::Arith(*op, Box::new(a), Box::new(b)),
                })
            }
            ClueExpr::Cmp(op, a, b) => match (self.typed(a)?, self.typed(b)?) {
                (Typed::Num(x), Typed::Num(y)) => Typed::Bool(BExpr::Num(*op, x, y)),
                (Typed::Attr(x), Typed::Attr(y)) => match op {
                    CmpOp::Eq => Typed::Bool(BExpr::Attr(true, x, y)),
                    CmpOp::Ne => Typed::Bool(BExpr::Attr(false, x, y)),
                    _ => {
                        return Err(Error::Resolution(format!(
                            "only == and != apply to non-ordinal values in {e}"
                        )))
                    }
                },
                _ => return Err(Error::Resolution(format!("mismatched comparison in {e}"))),
            },
            ClueExpr::And(a, b) => Typed::Bool(BExpr::And(Box::new(self.boolean(a)?), Box::new(self.boolean(b)?))),
            ClueExpr::Or(a, b) => Typed::Bool(BExpr::Or(Box::new(self.boolean(a)?), Box::new(self.boolean(b)?))),
            ClueExpr::EitherOr(a, b) => {
                Typed::Bool(BExpr::Xor(Box::new(self.boolean(a)?), Box::new(self.boolean(b)?)))
            }
            ClueExpr::OneOther([x, y], [p, q]) => {
                let (x, y, p, q) = (self.row(x)?, self.row(y)?, self.row(p)?, self.row(q)?);
                let eq = |a: &NExpr, b: &NExpr| BExpr::Num(CmpOp::Eq, a.clone(), b.clone());
                let first = BExpr::And(Box::new(eq(&x, &p)), Box::new(eq(&y, &q)));
                let second = BExpr::And(Box::new(eq(&x, &q)), Box::new(eq(&y, &p)));
                Typed::Bool(BExpr::Xor(Box::new(first), Box::new(second)))
            }
        })
    }

    fn num(&mut self, e: &ClueExpr) -> Result<NExpr> {
        match self.typed(e)? {
            Typed::Num(n) => Ok(n),
            _ => Err(Error::Resolution(format!("{e} is not a number"))),
        }
    }

    fn boolean(&mut self, e: &ClueExpr) -> Result<BExpr> {
        match self.typed(e)? {
            Typed::Bool(b) => Ok(b),
            _ => Err(Error::Resolution(format!("{e} is not a condition"))),
        }
    }
}

/// Bind a parsed clue to the categories of a puzzle.
pub fn resolve(clue: &ClueExpr, categories: &[Category]) -> Result<ResolvedClue> {
    let mut r = Resolver {
        cats: categories,
        literals: Vec::new(),
    };
    let body = r.boolean(clue)?;
    Ok(ResolvedClue {
        literals: r.literals,
        body,
    })
}

struct Env<'a> {
    cats: &'a [Category],
    cells: &'a Cells,
    literals: &'a [AttrRef],
    rows: &'a [usize],
}

impl Env<'_> {
    fn lookup(&self, row: usize, col: usize) -> Vec<u8> {
        if let Some(v) = self.cells[row][col] {
            return vec![v];
        }
        for (k, &(c, idx)) in self.literals.iter().enumerate() {
            if c == col && self.rows[k] == row {
                return vec![idx];
            }
        }
        (0..self.cats[col].values.len() as u8)
            .filter(|&v| {
                !self.cells.iter().any(|r| r[col] == Some(v))
                    && !self.literals.iter().any(|&(c, idx)| c == col && idx == v)
            })
            .collect()
    }

    fn row_index(&self, v: Option<i64>) -> Option<usize> {
        let v = v?;
        (1..=self.cells.len() as i64)
            .contains(&v)
            .then(|| (v - 1) as usize)
    }

    fn num(&self, e: &NExpr) -> Vec<Option<i64>> {
        let mut out = match e {
            NExpr::Const(v) => vec![Some(*v)],
            NExpr::RowOf(k) => vec![Some(self.rows[*k] as i64 + 1)],
            NExpr::Cell(r, col) => {
                let mut out = Vec::new();
                for rv in self.num(r) {
                    match self.row_index(rv) {
                        None => out.push(None),
                        Some(row) => out.extend(
                            self.lookup(row, *col)
                                .into_iter()
                                .map(|i| self.cats[*col].values[i as usize].as_int()),
                        ),
                    }
                }
                out
            }
            NExpr::Arith(op, a, b) => {
                let (xs, ys) = (self.num(a), self.num(b));
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in &xs {
                    for y in &ys {
                        out.push(match (x, y, op) {
                            (Some(x), Some(y), ArithOp::Add) => Some(x + y),
                            (Some(x), Some(y), ArithOp::Sub) => Some(x - y),
                            _ => None,
                        });
                    }
                }
                out
            }
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    fn attr(&self, e: &AExpr) -> Vec<Option<AttrRef>> {
        match e {
            AExpr::Const(r) => vec![Some(*r)],
            AExpr::Cell(r, col) => {
                let mut out = Vec::new();
                for rv in self.num(r) {
                    match self.row_index(rv) {
                        None => out.push(None),
                        Some(row) => out.extend(self.lookup(row, *col).into_iter().map(|i| Some((*col, i)))),
                    }
                }
                out
            }
        }
    }

    /// (can be true, can be false)
    fn truth(&self, e: &BExpr) -> (bool, bool) {
        match e {
            BExpr::Num(op, a, b) => {
                let (xs, ys) = (self.num(a), self.num(b));
                let (mut t, mut f) = (false, false);
                for x in &xs {
                    for y in &ys {
                        let holds = match (x, y) {
                            (Some(x), Some(y)) => match op {
                                CmpOp::Eq => x == y,
                                CmpOp::Ne => x != y,
                                CmpOp::Lt => x < y,
                                CmpOp::Gt => x > y,
                            },
                            _ => false,
                        };
                        t |= holds;
                        f |= !holds;
                    }
                }
                (t, f)
            }
            BExpr::Attr(eq, a, b) => {
                let (xs, ys) = (self.attr(a), self.attr(b));
                let (mut t, mut f) = (false, false);
                for x in &xs {
                    for y in &ys {
                        let same = x.is_some() && x == y;
                        let holds = same == *eq && x.is_some() && y.is_some();
                        t |= holds;
                        f |= !holds;
                    }
                }
                (t, f)
            }
            BExpr::And(a, b) => {
                let (at, af) = self.truth(a);
                let (bt, bf) = self.truth(b);
                (at && bt, af || bf)
            }
            BExpr::Or(a, b) => {
                let (at, af) = self.truth(a);
                let (bt, bf) = self.truth(b);
                (at || bt, af && bf)
            }
            BExpr::Xor(a, b) => {
                let (at, af) = self.truth(a);
                let (bt, bf) = self.truth(b);
                ((at && bf) || (af && bt), (at && bt) || (af && bf))
            }
        }
    }
}

/// Rows each literal may occupy: its current row if placed, otherwise every
/// row whose cell in its column is still empty.
fn literal_rows(cells: &Cells, lit: AttrRef) -> Vec<usize> {
    let (col, idx) = lit;
    if let Some(r) = cells.iter().position(|row| row[col] == Some(idx)) {
        return vec![r];
    }
    (0..cells.len()).filter(|&r| cells[r][col].is_none()).collect()
}

impl ResolvedClue {
    /// Three-valued truth on a partial table: `Violated` when no way of
    /// finishing the table can satisfy the clue, `Satisfied` when every way
    /// does, `Unknown` otherwise.
    pub fn eval(&self, cats: &[Category], cells: &Cells) -> TruthValue3 {
        let options: Vec<Vec<usize>> = self.literals.iter().map(|&l| literal_rows(cells, l)).collect();
        let mut rows = vec![0; self.literals.len()];
        let (mut t, mut f) = (false, false);
        self.search(cats, cells, &options, 0, &mut rows, &mut t, &mut f);
        match (t, f) {
            (true, false) => TruthValue3::Satisfied,
            (false, _) => TruthValue3::Violated,
            (true, true) => TruthValue3::Unknown,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        cats: &[Category],
        cells: &Cells,
        options: &[Vec<usize>],
        k: usize,
        rows: &mut Vec<usize>,
        t: &mut bool,
        f: &mut bool,
    ) {
        if *t && *f {
            return;
        }
        if k == options.len() {
            let env = Env {
                cats,
                cells,
                literals: &self.literals,
                rows,
            };
            let (ct, cf) = env.truth(&self.body);
            *t |= ct;
            *f |= cf;
            return;
        }
        for &r in &options[k] {
            let col = self.literals[k].0;
            let clash = (0..k).any(|j| self.literals[j].0 == col && rows[j] == r);
            if clash {
                continue;
            }
            rows[k] = r;
            self.search(cats, cells, options, k + 1, rows, t, f);
        }
    }

    /// Literals not yet present anywhere in the table.
    pub fn unplaced(&self, cells: &Cells) -> Vec<AttrRef> {
        self.literals
            .iter()
            .copied()
            .filter(|&(col, idx)| !cells.iter().any(|row| row[col] == Some(idx)))
            .collect()
    }
}
