//! Puzzle families as data: a tagged instance record per puzzle and a
//! dispatch enum over the four domain implementations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coloring::{Graph, GraphColoring};
use crate::error::{Error, Result};
use crate::game24::Game24;
use crate::grid::{GridInstance, GridPuzzle};
use crate::sudoku::{Sudoku, SudokuGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PuzzleKind {
    Sudoku,
    Coloring,
    Game24,
    Grid,
}

impl PuzzleKind {
    pub const ALL: [PuzzleKind; 4] = [
        PuzzleKind::Sudoku,
        PuzzleKind::Coloring,
        PuzzleKind::Game24,
        PuzzleKind::Grid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PuzzleKind::Sudoku => "sudoku",
            PuzzleKind::Coloring => "coloring",
            PuzzleKind::Game24 => "game24",
            PuzzleKind::Grid => "grid",
        }
    }

    /// Row title in statistics tables.
    pub fn title(self) -> &'static str {
        match self {
            PuzzleKind::Sudoku => "Sudoku",
            PuzzleKind::Coloring => "Graph Coloring",
            PuzzleKind::Game24 => "Game 24",
            PuzzleKind::Grid => "Grid Puzzles",
        }
    }
}

impl fmt::Display for PuzzleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PuzzleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sudoku" => Ok(PuzzleKind::Sudoku),
            "coloring" | "graph-coloring" | "graph_coloring" => Ok(PuzzleKind::Coloring),
            "game24" | "game-24" | "24" => Ok(PuzzleKind::Game24),
            "grid" | "grid-puzzle" | "grid_puzzle" => Ok(PuzzleKind::Grid),
            other => Err(Error::InvalidArgument(format!("unknown puzzle kind {other:?}"))),
        }
    }
}

/// One puzzle as stored in corpus and dataset files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "puzzle", rename_all = "snake_case")]
pub enum Instance {
    Sudoku {
        id: String,
        /// 81 characters, row-major, `0` or `.` for empty.
        grid: String,
    },
    Coloring {
        id: String,
        adjacency: Vec<Vec<usize>>,
        k: u8,
    },
    Game24 {
        id: String,
        numbers: [i64; 4],
    },
    Grid(GridInstance),
}

impl Instance {
    pub fn id(&self) -> &str {
        match self {
            Instance::Sudoku { id, .. } | Instance::Coloring { id, .. } | Instance::Game24 { id, .. } => id,
            Instance::Grid(g) => &g.id,
        }
    }

    pub fn kind(&self) -> PuzzleKind {
        match self {
            Instance::Sudoku { .. } => PuzzleKind::Sudoku,
            Instance::Coloring { .. } => PuzzleKind::Coloring,
            Instance::Game24 { .. } => PuzzleKind::Game24,
            Instance::Grid(_) => PuzzleKind::Grid,
        }
    }

    pub fn domain(&self) -> Result<Domain> {
        Ok(match self {
            Instance::Sudoku { grid, .. } => Domain::Sudoku(Sudoku::new(SudokuGrid::from_kaggle(grid)?)),
            Instance::Coloring { adjacency, k, .. } => {
                Domain::Coloring(GraphColoring::new(Graph::new(adjacency.clone())?, *k))
            }
            Instance::Game24 { numbers, .. } => Domain::Game24(Game24::new(*numbers)),
            Instance::Grid(g) => Domain::Grid(GridPuzzle::new(g.clone())?),
        })
    }
}

/// A ready-to-use domain of any family.
#[derive(Debug, Clone)]
pub enum Domain {
    Sudoku(Sudoku),
    Coloring(GraphColoring),
    Game24(Game24),
    Grid(GridPuzzle),
}

/// Run `$body` with `$d` bound to the concrete domain inside `$dom`.
#[macro_export]
macro_rules! with_domain {
    ($dom:expr, $d:ident => $body:expr) => {
        match $dom {
            $crate::kind::Domain::Sudoku($d) => $body,
            $crate::kind::Domain::Coloring($d) => $body,
            $crate::kind::Domain::Game24($d) => $body,
            $crate::kind::Domain::Grid($d) => $body,
        }
    };
}

/// Recover a concrete domain type from [`Domain`].
pub trait FromDomain: Sized {
    const KIND: PuzzleKind;
    fn from_domain(d: Domain) -> Option<Self>;
}

macro_rules! from_domain {
    ($ty:ty, $variant:ident) => {
        impl FromDomain for $ty {
            const KIND: PuzzleKind = PuzzleKind::$variant;
            fn from_domain(d: Domain) -> Option<Self> {
                match d {
                    Domain::$variant(x) => Some(x),
                    _ => None,
                }
            }
        }
    };
}

from_domain!(Sudoku, Sudoku);
from_domain!(GraphColoring, Coloring);
from_domain!(Game24, Game24);
from_domain!(GridPuzzle, Grid);

/// Build the domains of every instance of `D`'s family, keyed by id.
pub fn typed_domains<D: FromDomain>(instances: &[Instance]) -> Result<Vec<(String, D)>> {
    instances
        .iter()
        .filter(|i| i.kind() == D::KIND)
        .map(|i| {
            let d = D::from_domain(i.domain()?).expect("kind checked above");
            Ok((i.id().to_string(), d))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse_and_print() {
        for k in PuzzleKind::ALL {
            assert_eq!(k.name().parse::<PuzzleKind>().unwrap(), k);
        }
        assert!("chess".parse::<PuzzleKind>().is_err());
    }

    #[test]
    fn instance_json_is_tagged() {
        let inst = Instance::Game24 {
            id: "g1".into(),
            numbers: [5, 9, 12, 12],
        };
        let text = serde_json::to_string(&inst).unwrap();
        assert_eq!(text, r#"{"puzzle":"game24","id":"g1","numbers":[5,9,12,12]}"#);
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
        assert!(matches!(back.domain().unwrap(), Domain::Game24(_)));
    }
}
