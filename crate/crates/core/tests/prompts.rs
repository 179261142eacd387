//! Worked examples rendered from structured inputs must match the
//! transcribed golden prompts byte for byte.

mod common;

use common::*;
use puzzletree_core::taskgen::Render;

fn assert_same(name: &str, got: &str) {
    let want = golden(name);
    if got != want {
        let line = got
            .lines()
            .zip(want.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| got.lines().count().min(want.lines().count()));
        panic!(
            "{name}: first difference at line {}\n got: {:?}\nwant: {:?}",
            line + 1,
            got.lines().nth(line),
            want.lines().nth(line)
        );
    }
}

#[test]
fn sudoku_prompts() {
    let (d, ctx) = sudoku_context();
    assert_same("sudoku_checking", &d.checking_prompt(&ctx).unwrap());
    assert_same("sudoku_transition", &d.transition_prompt(&ctx).unwrap());
}

#[test]
fn coloring_prompts() {
    let (d, ctx) = coloring_context();
    assert_same("coloring_checking", &d.checking_prompt(&ctx).unwrap());
    assert_same("coloring_transition", &d.transition_prompt(&ctx).unwrap());
}

#[test]
fn game24_prompts() {
    let (d, ctx) = game24_context();
    assert_same("game24_checking", &d.checking_prompt(&ctx).unwrap());
    assert_same("game24_transition", &d.transition_prompt(&ctx).unwrap());
}

#[test]
fn grid_prompts() {
    let (d, ctx) = grid_context();
    assert_same("grid_checking", &d.checking_prompt(&ctx).unwrap());
    assert_same("grid_transition", &d.transition_prompt(&ctx).unwrap());
}

#[test]
fn every_checking_prompt_forbids_programming() {
    let prompts = [
        { let (d, c) = sudoku_context(); d.checking_prompt(&c).unwrap() },
        { let (d, c) = coloring_context(); d.checking_prompt(&c).unwrap() },
        { let (d, c) = game24_context(); d.checking_prompt(&c).unwrap() },
        { let (d, c) = grid_context(); d.checking_prompt(&c).unwrap() },
    ];
    for p in prompts {
        assert!(p.contains("Do not solve using programming."));
        assert!(p.ends_with("End your answer with \"Answer: (A)\" or \"Answer: (B)\"."));
    }
}

#[test]
fn missing_explored_child_is_an_error() {
    let (d, mut ctx) = game24_context();
    ctx.explored_child = None;
    assert!(d.checking_prompt(&ctx).is_err());
    assert!(d.transition_prompt(&ctx).is_err());
}
