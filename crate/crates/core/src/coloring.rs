//! Graph coloring: validity, k-colorability by DSATUR-ordered backtracking,
//! exact chromatic numbers and seeded Erdős–Rényi graphs.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{PuzzleDomain, SlotChange, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::pylit;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build from an adjacency list, checking symmetry, range and self-loops.
    pub fn new(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        for (v, nbrs) in adjacency.iter().enumerate() {
            for &u in nbrs {
                if u >= n {
                    return Err(Error::Shape(format!("vertex {v} lists neighbour {u} of {n}")));
                }
                if u == v {
                    return Err(Error::InvalidArgument(format!("self-loop on vertex {v}")));
                }
                if !adjacency[u].contains(&v) {
                    return Err(Error::InvalidArgument(format!("edge {v}-{u} is not symmetric")));
                }
            }
        }
        Ok(Self { adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Shape(format!("edge ({a}, {b}) out of range for {n}")));
            }
            if a != b && !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self::new(adjacency)
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect();
        Self { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn adjacency_text(&self) -> String {
        let rows: Vec<String> = self
            .adjacency
            .iter()
            .map(|nbrs| {
                let items: Vec<String> = nbrs.iter().map(|u| u.to_string()).collect();
                format!("[{}]", items.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// Colors per vertex; 0 means uncolored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    pub colors: Vec<u8>,
}

impl Coloring {
    pub fn uncolored(n: usize) -> Self {
        Self { colors: vec![0; n] }
    }

    pub fn uncolored_count(&self) -> usize {
        self.colors.iter().filter(|&&c| c == 0).count()
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.colors.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorMove {
    pub vertex: usize,
    pub color: u8,
}

pub fn is_rule_valid(g: &Graph, c: &Coloring) -> bool {
    if c.colors.len() != g.len() {
        return false;
    }
    g.adjacency.iter().enumerate().all(|(v, nbrs)| {
        c.colors[v] == 0 || nbrs.iter().all(|&u| c.colors[u] != c.colors[v])
    })
}

fn neighbour_mask(g: &Graph, colors: &[u8], v: usize) -> u64 {
    g.adjacency[v]
        .iter()
        .fold(0u64, |m, &u| m | (1u64 << colors[u]))
        & !1
}

/// Can the uncolored vertices be given colors `1..=k` without conflicts?
pub fn is_colorable(g: &Graph, c: &Coloring, k: u8) -> Result<bool> {
    is_colorable_with_budget(g, c, k, DEFAULT_NODE_BUDGET)
}

pub fn is_colorable_with_budget(g: &Graph, c: &Coloring, k: u8, budget: u64) -> Result<bool> {
    if c.colors.len() != g.len() {
        return Err(Error::Shape(format!(
            "{} colors for {} vertices",
            c.colors.len(),
            g.len()
        )));
    }
    if k > 63 {
        return Err(Error::InvalidArgument("at most 63 colors are supported".into()));
    }
    if !is_rule_valid(g, c) || c.colors.iter().any(|&x| x > k) {
        return Err(Error::RuleViolation("adjacent vertices share a color".into()));
    }
    let mut s = Dsatur {
        g,
        k,
        colors: c.colors.clone(),
        nodes: 0,
        budget,
    };
    s.rec()
}

struct Dsatur<'a> {
    g: &'a Graph,
    k: u8,
    colors: Vec<u8>,
    nodes: u64,
    budget: u64,
}

impl Dsatur<'_> {
    fn rec(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        // highest saturation, then most uncolored neighbours, then lowest index
        let mut pick: Option<(usize, u64, u32, usize)> = None;
        for v in 0..self.g.len() {
            if self.colors[v] != 0 {
                continue;
            }
            let mask = neighbour_mask(self.g, &self.colors, v);
            let sat = mask.count_ones();
            if sat >= self.k as u32 {
                return Ok(false);
            }
            let free = self.g.adjacency[v]
                .iter()
                .filter(|&&u| self.colors[u] == 0)
                .count();
            let better = match pick {
                None => true,
                Some((_, _, s, f)) => sat > s || (sat == s && free > f),
            };
            if better {
                pick = Some((v, mask, sat, free));
            }
        }
        let Some((v, mask, _, _)) = pick else {
            return Ok(true);
        };
        let used = self.colors.iter().fold(0u64, |m, &x| m | (1u64 << x));
        let mut tried_fresh = false;
        for color in 1..=self.k {
            let bit = 1u64 << color;
            if mask & bit != 0 {
                continue;
            }
            // colors used nowhere yet are interchangeable; try one of them
            if used & bit == 0 {
                if tried_fresh {
                    continue;
                }
                tried_fresh = true;
            }
            self.colors[v] = color;
            let ok = self.rec();
            self.colors[v] = 0;
            if ok? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Smallest k admitting a proper coloring (ascending search).
pub fn chromatic_number(g: &Graph) -> u8 {
    let empty = Coloring::uncolored(g.len());
    (1..=63u8)
        .find(|&k| is_colorable_with_budget(g, &empty, k, u64::MAX).unwrap_or(false))
        .unwrap_or(63)
        .max(1)
}

/// Erdős–Rényi G(n, p): each of the C(n, 2) pairs `(i, j)`, `i < j`, taken
/// in lexicographic order, becomes an edge when a uniform draw from a
/// `ChaCha8Rng` seeded with `seed` falls below `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Graph { adjacency }
}

/// One coloring question: a graph and a color budget.
#[derive(Debug, Clone)]
pub struct GraphColoring {
    pub graph: Graph,
    pub k: u8,
    pub budget: u64,
}

impl GraphColoring {
    pub fn new(graph: Graph, k: u8) -> Self {
        Self {
            graph,
            k,
            budget: DEFAULT_NODE_BUDGET,
        }
    }

    fn first_uncolored(&self, s: &Coloring) -> Option<usize> {
        s.colors.iter().position(|&c| c == 0)
    }

    fn moves_at(&self, s: &Coloring, v: usize, legal: bool) -> Vec<ColorMove> {
        let mask = neighbour_mask(&self.graph, &s.colors, v);
        (1..=self.k)
            .filter(|&c| (mask & (1u64 << c) == 0) == legal)
            .map(|color| ColorMove { vertex: v, color })
            .collect()
    }
}

impl PuzzleDomain for GraphColoring {
    type State = Coloring;
    type Move = ColorMove;

    fn initial(&self) -> Coloring {
        Coloring::uncolored(self.graph.len())
    }

    fn rule_valid(&self, s: &Coloring) -> bool {
        is_rule_valid(&self.graph, s) && s.colors.iter().all(|&c| c <= self.k)
    }

    fn forward_moves(&self, s: &Coloring) -> Vec<ColorMove> {
        if !self.rule_valid(s) {
            return Vec::new();
        }
        (0..self.graph.len())
            .filter(|&v| s.colors[v] == 0)
            .flat_map(|v| self.moves_at(s, v, true))
            .collect()
    }

    fn branch_moves(&self, s: &Coloring) -> Vec<ColorMove> {
        match self.first_uncolored(s) {
            Some(v) => self.moves_at(s, v, true),
            None => Vec::new(),
        }
    }

    fn violating_moves(&self, s: &Coloring) -> Vec<ColorMove> {
        match self.first_uncolored(s) {
            Some(v) => self.moves_at(s, v, false),
            None => Vec::new(),
        }
    }

    fn apply(&self, s: &Coloring, m: &ColorMove) -> Result<Coloring> {
        if m.vertex >= s.colors.len() || m.color == 0 || m.color > self.k {
            return Err(Error::InvalidArgument(format!("bad move {m:?}")));
        }
        if s.colors[m.vertex] != 0 {
            return Err(Error::InvalidArgument(format!(
                "vertex {} is already colored",
                m.vertex
            )));
        }
        let mut out = s.clone();
        out.colors[m.vertex] = m.color;
        Ok(out)
    }

    fn revert(&self, s: &Coloring, m: &ColorMove) -> Result<Coloring> {
        if s.colors.get(m.vertex) != Some(&m.color) {
            return Err(Error::InvalidArgument(format!("move {m:?} is not in the coloring")));
        }
        let mut out = s.clone();
        out.colors[m.vertex] = 0;
        Ok(out)
    }

    fn is_solution(&self, s: &Coloring) -> bool {
        s.uncolored_count() == 0 && self.rule_valid(s)
    }

    fn is_solvable(&self, s: &Coloring) -> Result<bool> {
        if !self.rule_valid(s) {
            return Ok(false);
        }
        is_colorable_with_budget(&self.graph, s, self.k, self.budget)
    }

    fn canonical_text(&self, s: &Coloring) -> String {
        s.to_string()
    }

    fn parse_state(&self, text: &str) -> Result<Coloring> {
        let v = pylit::parse(text)?;
        let items = v
            .as_list()
            .ok_or_else(|| Error::Parse("expected a list of colors".into()))?;
        if items.len() != self.graph.len() {
            return Err(Error::Shape(format!(
                "{} colors for {} vertices",
                items.len(),
                self.graph.len()
            )));
        }
        let colors = items
            .iter()
            .map(|x| match x.as_int() {
                Some(c) if (0..=255).contains(&c) => Ok(c as u8),
                _ => Err(Error::Parse(format!("bad color {x}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Coloring { colors })
    }

    fn difficulty(&self, s: &Coloring) -> usize {
        s.uncolored_count()
    }

    fn max_depth(&self) -> usize {
        self.graph.len()
    }

    fn diff(&self, a: &Coloring, b: &Coloring) -> Result<Vec<SlotChange>> {
        if a.colors.len() != b.colors.len() {
            return Err(Error::Shape(format!(
                "colorings of {} and {} vertices",
                a.colors.len(),
                b.colors.len()
            )));
        }
        Ok(a
            .colors
            .iter()
            .zip(&b.colors)
            .enumerate()
            .filter(|(_, (x, y))| x != y)
            .map(|(v, (x, y))| SlotChange {
                slot: vec![v],
                before: x.to_string(),
                after: y.to_string(),
            })
            .collect())
    }

    fn is_forward_step(&self, from: &Coloring, to: &Coloring) -> bool {
        if from.colors.len() != to.colors.len() {
            return false;
        }
        let mut changed = 0;
        for (&a, &b) in from.colors.iter().zip(&to.colors) {
            if a != b {
                if a != 0 || b == 0 {
                    return false;
                }
                changed += 1;
            }
        }
        changed == 1
    }
}
