//! Game of 24 with exact rational arithmetic. A state is the list of
//! expressions still to be combined, plus the stack of combinations made.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::domain::{PuzzleDomain, SlotChange};
use crate::error::{Error, Result};
use crate::pylit::{self, PyValue};

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ok(Self {
            num: s * num / g,
            den: s * den / g,
        })
    }

    pub fn int(v: i64) -> Self {
        Self {
            num: v as i128,
            den: 1,
        }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        Self::new(self.num * rhs.den, self.den * rhs.num)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den).unwrap()
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Self {
        Self {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.num, self.den * rhs.den).unwrap()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "/")]
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, Op::Add | Op::Mul)
    }

    pub fn eval(self, a: Rational, b: Rational) -> Result<Rational> {
        Ok(match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => a.checked_div(b)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Leaf(i64),
    Node(Op, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn value(&self) -> Result<Rational> {
        match self {
            Expr::Leaf(v) => Ok(Rational::int(*v)),
            Expr::Node(op, a, b) => op.eval(a.value()?, b.value()?),
        }
    }

    pub fn leaves(&self) -> Vec<i64> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<i64>) {
        match self {
            Expr::Leaf(v) => out.push(*v),
            Expr::Node(_, a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// Printed form with the operands of `+` and `*` put in a fixed order,
    /// so that `(9 + 5)` and `(5 + 9)` compare equal.
    pub fn key(&self) -> String {
        match self {
            Expr::Leaf(v) => v.to_string(),
            Expr::Node(op, a, b) => {
                let (mut ka, mut kb) = (a.key(), b.key());
                if op.is_commutative() && ka > kb {
                    std::mem::swap(&mut ka, &mut kb);
                }
                format!("({ka} {} {kb})", op.symbol())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Leaf(v) => write!(f, "{v}"),
            Expr::Node(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

/// Parse an infix expression. Accepts `x`/`×` and `÷` as operator aliases
/// and the usual precedence when parentheses are omitted.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = ExprParser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!(
            "unexpected {:?} in expression {text:?}",
            p.chars[p.pos]
        )));
    }
    Ok(e)
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn op(&mut self, allowed: &[Op]) -> Option<Op> {
        self.skip_ws();
        let op = match self.chars.get(self.pos)? {
            '+' => Op::Add,
            '-' | '−' => Op::Sub,
            '*' | 'x' | '×' => Op::Mul,
            '/' | '÷' => Op::Div,
            _ => return None,
        };
        if allowed.contains(&op) {
            self.pos += 1;
            Some(op)
        } else {
            None
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        while let Some(op) = self.op(&[Op::Add, Op::Sub]) {
            let rhs = self.product()?;
            e = Expr::Node(op, Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while let Some(op) = self.op(&[Op::Mul, Op::Div]) {
            let rhs = self.atom()?;
            e = Expr::Node(op, Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.skip_ws();
                if self.chars.get(self.pos) != Some(&')') {
                    return Err(Error::Parse("missing ')' in expression".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                s.parse()
                    .map(Expr::Leaf)
                    .map_err(|_| Error::Parse(format!("bad number {s}")))
            }
            _ => Err(Error::Parse("expected a number or '('".into())),
        }
    }
}

/// Positions `(i, j)` of the two operands of an applied combination, so
/// the combination can be split back in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applied {
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone)]
pub struct ExprState {
    pub exprs: Vec<Expr>,
    pub history: Vec<Applied>,
}

impl PartialEq for ExprState {
    fn eq(&self, other: &Self) -> bool {
        self.exprs == other.exprs
    }
}

impl Eq for ExprState {}

impl Hash for ExprState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exprs.hash(state);
    }
}

impl ExprState {
    pub fn initial(numbers: &[i64]) -> Self {
        Self {
            exprs: numbers.iter().map(|&v| Expr::Leaf(v)).collect(),
            history: Vec::new(),
        }
    }

    /// A state given only its expressions; the history is rebuilt by
    /// splitting composite expressions left to right.
    pub fn from_exprs(exprs: Vec<Expr>) -> Self {
        let mut work = exprs.clone();
        let mut undo = Vec::new();
        while let Some(p) = work.iter().position(|e| matches!(e, Expr::Node(..))) {
            let Expr::Node(_, a, b) = work.remove(p) else {
                unreachable!()
            };
            work.insert(p, *b);
            work.insert(p, *a);
            undo.push(Applied { i: p, j: p + 1 });
        }
        undo.reverse();
        Self {
            exprs,
            history: undo,
        }
    }

    pub fn values(&self) -> Result<Vec<Rational>> {
        self.exprs.iter().map(Expr::value).collect()
    }

    pub fn key(&self) -> String {
        let mut keys: Vec<String> = self.exprs.iter().map(Expr::key).collect();
        keys.sort();
        keys.join(" | ")
    }
}

impl fmt::Display for ExprState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .exprs
            .iter()
            .map(|e| pylit::quote(&e.to_string()))
            .collect();
        write!(f, "[{}]", items.join(", "))
    }
}

/// Combine `exprs[i] op exprs[j]`; the result takes position `min(i, j)`.
pub fn apply_op(s: &ExprState, i: usize, j: usize, op: Op) -> Result<ExprState> {
    let len = s.exprs.len();
    for idx in [i, j] {
        if idx >= len {
            return Err(Error::Index { index: idx, len });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument("an expression cannot be combined with itself".into()));
    }
    if op == Op::Div && s.exprs[j].value()?.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let node = combine(&s.exprs, i, j, op);
    let mut history = s.history.clone();
    history.push(Applied { i, j });
    Ok(ExprState {
        exprs: node,
        history,
    })
}

fn combine(exprs: &[Expr], i: usize, j: usize, op: Op) -> Vec<Expr> {
    let node = Expr::Node(op, Box::new(exprs[i].clone()), Box::new(exprs[j].clone()));
    let lo = i.min(j);
    let mut out = Vec::with_capacity(exprs.len() - 1);
    for (p, e) in exprs.iter().enumerate() {
        if p == lo {
            out.push(node.clone());
        } else if p != i && p != j {
            out.push(e.clone());
        }
    }
    out
}

/// Undo the most recent combination.
pub fn revert_last(s: &ExprState) -> Result<ExprState> {
    let mut history = s.history.clone();
    let Applied { i, j } = history.pop().ok_or(Error::EmptyHistory)?;
    let lo = i.min(j);
    let mut exprs = s.exprs.clone();
    if lo >= exprs.len() {
        return Err(Error::Index {
            index: lo,
            len: exprs.len(),
        });
    }
    let Expr::Node(_, a, b) = exprs.remove(lo) else {
        return Err(Error::InvalidArgument(format!("expression {lo} is not a combination")));
    };
    if i < j {
        exprs.insert(i, *a);
        exprs.insert(j, *b);
    } else {
        exprs.insert(j, *b);
        exprs.insert(i, *a);
    }
    Ok(ExprState { exprs, history })
}

pub fn value(e: &Expr) -> Result<Rational> {
    e.value()
}

/// Can these values be combined into exactly 24? Commutative duplicates
/// are skipped; division by zero prunes the branch.
pub fn solvable_values(values: &[Rational]) -> bool {
    let target = Rational::int(24);
    if values.len() == 1 {
        return values[0] == target;
    }
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let (a, b) = (values[i], values[j]);
            let rest: Vec<Rational> = values
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != i && p != j)
                .map(|(_, v)| *v)
                .collect();
            let mut results = vec![a + b, a - b, b - a, a * b];
            if !b.is_zero() {
                results.push(a.checked_div(b).unwrap());
            }
            if !a.is_zero() {
                results.push(b.checked_div(a).unwrap());
            }
            results.sort();
            results.dedup();
            for r in results {
                let mut next = rest.clone();
                next.push(r);
                if solvable_values(&next) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn is_solvable_24(s: &ExprState) -> bool {
    match s.values() {
        Ok(v) => solvable_values(&v),
        Err(_) => false,
    }
}

/// Read a problem line of four integers (whitespace or comma separated).
pub fn parse_problem_line(line: &str) -> Result<[i64; 4]> {
    let nums: Vec<i64> = line
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad number {t:?}")))
        })
        .collect::<Result<_>>()?;
    nums.try_into()
        .map_err(|v: Vec<i64>| Error::Shape(format!("expected 4 numbers, found {}", v.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Game24Move {
    pub i: usize,
    pub j: usize,
    pub op: Op,
}

/// One Game of 24 question.
#[derive(Debug, Clone)]
pub struct Game24 {
    pub numbers: [i64; 4],
}

impl Game24 {
    pub fn new(numbers: [i64; 4]) -> Self {
        Self { numbers }
    }

    fn all_moves(len: usize) -> Vec<Game24Move> {
        let mut out = Vec::new();
        for i in 0..len {
            for j in i + 1..len {
                for op in Op::ALL {
                    out.push(Game24Move { i, j, op });
                }
                out.push(Game24Move { i: j, j: i, op: Op::Sub });
                out.push(Game24Move { i: j, j: i, op: Op::Div });
            }
        }
        out
    }
}

impl PuzzleDomain for Game24 {
    type State = ExprState;
    type Move = Game24Move;

    fn initial(&self) -> ExprState {
        ExprState::initial(&self.numbers)
    }

    fn rule_valid(&self, s: &ExprState) -> bool {
        if s.exprs.is_empty() || s.exprs.len() > 4 {
            return false;
        }
        let mut leaves: Vec<i64> = s.exprs.iter().flat_map(Expr::leaves).collect();
        leaves.sort_unstable();
        let mut want = self.numbers.to_vec();
        want.sort_unstable();
        leaves == want && s.values().is_ok()
    }

    /// Every pair and operator; children that print the same up to operand
    /// order of `+`/`*` (or swapping equal numbers) are listed once.
    fn forward_moves(&self, s: &ExprState) -> Vec<Game24Move> {
        let mut seen = std::collections::HashSet::new();
        Self::all_moves(s.exprs.len())
            .into_iter()
            .filter(|m| match apply_op(s, m.i, m.j, m.op) {
                Ok(child) => seen.insert(child.key()),
                Err(_) => false,
            })
            .collect()
    }

    fn apply(&self, s: &ExprState, m: &Game24Move) -> Result<ExprState> {
        apply_op(s, m.i, m.j, m.op)
    }

    fn revert(&self, s: &ExprState, _m: &Game24Move) -> Result<ExprState> {
        revert_last(s)
    }

    fn is_solution(&self, s: &ExprState) -> bool {
        s.exprs.len() == 1 && self.rule_valid(s) && s.values().ok() == Some(vec![Rational::int(24)])
    }

    fn is_solvable(&self, s: &ExprState) -> Result<bool> {
        Ok(self.rule_valid(s) && is_solvable_24(s))
    }

    fn canonical_text(&self, s: &ExprState) -> String {
        s.to_string()
    }

    fn parse_state(&self, text: &str) -> Result<ExprState> {
        let v = pylit::parse(text)?;
        let items = v
            .as_list()
            .ok_or_else(|| Error::Parse("expected a list of expressions".into()))?;
        if items.is_empty() || items.len() > 4 {
            return Err(Error::Shape(format!("{} expressions", items.len())));
        }
        let exprs = items
            .iter()
            .map(|item| match item {
                PyValue::Str(s) => parse_expr(s),
                PyValue::Int(v) => Ok(Expr::Leaf(*v)),
                PyValue::List(_) => Err(Error::Parse("nested list in expression state".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExprState::from_exprs(exprs))
    }

    fn difficulty(&self, s: &ExprState) -> usize {
        s.exprs.len().saturating_sub(1)
    }

    fn max_depth(&self) -> usize {
        3
    }

    fn diff(&self, a: &ExprState, b: &ExprState) -> Result<Vec<SlotChange>> {
        let n = a.exprs.len().max(b.exprs.len());
        let text = |s: &ExprState, p: usize| s.exprs.get(p).map(|e| e.to_string()).unwrap_or_default();
        Ok((0..n)
            .filter_map(|p| {
                let (x, y) = (text(a, p), text(b, p));
                (x != y).then(|| SlotChange {
                    slot: vec![p],
                    before: x,
                    after: y,
                })
            })
            .collect())
    }

    fn is_forward_step(&self, from: &ExprState, to: &ExprState) -> bool {
        if to.exprs.len() + 1 != from.exprs.len() {
            return false;
        }
        let want = to.key();
        let n = from.exprs.len();
        (0..n).any(|i| {
            (0..n).any(|j| {
                i != j
                    && Op::ALL.iter().any(|&op| {
                        ExprState::from_exprs(combine(&from.exprs, i, j, op)).key() == want
                    })
            })
        })
    }

    fn state_key(&self, s: &ExprState) -> String {
        s.key()
    }
}
