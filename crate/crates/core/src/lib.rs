//! Puzzle state spaces for Sudoku, graph coloring, Game of 24 and logic
//! grid puzzles, with solvability oracles, state sampling, prompt
//! rendering and answer judging.

pub mod coloring;
pub mod corpus;
pub mod domain;
pub mod error;
pub mod game24;
pub mod grid;
pub mod judge;
pub mod kind;
pub mod pylit;
pub mod sampler;
pub mod sudoku;
pub mod taskgen;

pub use domain::{validate_trace, PathTrace, PuzzleDomain, SlotChange, StateLabel};
pub use error::{Error, Result};
pub use judge::{JudgeCase, JudgedResult, Verdict};
pub use kind::{Domain, Instance, PuzzleKind};
pub use sampler::{SampleTargets, SamplerConfig, TransitionContext};
pub use taskgen::{EvalTask, Gold, TaskKind};
