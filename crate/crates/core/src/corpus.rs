//! Question banks shipped with the crate, one JSONL file per family.
//! `examples/build_corpus.rs` regenerates them.

use crate::error::{Error, Result};
use crate::kind::{Instance, PuzzleKind};

const SUDOKU: &str = include_str!("../data/sudoku.jsonl");
const COLORING: &str = include_str!("../data/coloring.jsonl");
const GAME24: &str = include_str!("../data/game24.jsonl");
const GRID: &str = include_str!("../data/grid.jsonl");

pub fn parse_instances(text: &str) -> Result<Vec<Instance>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1))))
        .collect()
}

pub fn bundled(kind: PuzzleKind) -> Vec<Instance> {
    let text = match kind {
        PuzzleKind::Sudoku => SUDOKU,
        PuzzleKind::Coloring => COLORING,
        PuzzleKind::Game24 => GAME24,
        PuzzleKind::Grid => GRID,
    };
    parse_instances(text).expect("bundled corpus is valid")
}

pub fn bundled_all() -> Vec<Instance> {
    PuzzleKind::ALL.into_iter().flat_map(bundled).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn question_counts() {
        let counts: Vec<usize> = PuzzleKind::ALL.iter().map(|&k| bundled(k).len()).collect();
        assert_eq!(counts, vec![51, 51, 98, 50]);
    }

    #[test]
    fn every_instance_builds_and_starts_solvable() {
        for inst in bundled_all() {
            let d = inst.domain().unwrap();
            let solvable = crate::with_domain!(&d, d => {
                use crate::PuzzleDomain;
                d.is_solvable(&d.initial()).unwrap()
            });
            assert!(solvable, "{}", inst.id());
        }
    }
}
