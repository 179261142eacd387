//! Prompt templates for the two tasks of every puzzle family.

use crate::coloring::GraphColoring;
use crate::domain::{PuzzleDomain, StateLabel};
use crate::error::{Error, Result};
use crate::game24::Game24;
use crate::grid::GridPuzzle;
use crate::sampler::TransitionContext;
use crate::sudoku::Sudoku;

pub type Context<D> = TransitionContext<<D as PuzzleDomain>::State, <D as PuzzleDomain>::Move>;

/// Renders state-checking and state-transition prompts from a context.
pub trait Render: PuzzleDomain + Sized {
    fn checking_prompt(&self, ctx: &Context<Self>) -> Result<String>;
    fn transition_prompt(&self, ctx: &Context<Self>) -> Result<String>;
}

const CHECK_TAIL: &str = "Let's think step by step, considering the failed state to avoid unnecessary exploration. Do not solve using programming.\n";

const AVOID: &str = "Additionally, you are provided with a previously explored next state that has been proven to be unsolvable. Use this information to avoid revisiting this failed path";

fn choose(pos: &str, neg: &str) -> String {
    format!("Choose from (A) {pos} (B) {neg}. End your answer with \"Answer: (A)\" or \"Answer: (B)\".")
}

fn transition_tail(placeholder: &str) -> String {
    format!(
        "Let's think step by step. Analyze the progress made so far and determine the immediate next move. \
         End your answer with \"Next state: {{{placeholder}}}\", where {{{placeholder}}} is in the same python list format as the previous states."
    )
}

fn word<'a>(label: StateLabel, pos: &'a str, neg: &'a str) -> &'a str {
    if label.is_solvable() {
        pos
    } else {
        neg
    }
}

fn explored<D: PuzzleDomain>(ctx: &Context<D>) -> Result<&D::State> {
    ctx.explored_child
        .as_ref()
        .map(|(_, s)| s)
        .ok_or_else(|| Error::InvalidArgument("the prompt needs an explored child".into()))
}

/// "Two moves ago" / "One move ago" blocks for trace positions `from..depth`.
fn ancestors<D: PuzzleDomain>(d: &D, ctx: &Context<D>, from: usize, out: &mut String, pos: &str, neg: &str) {
    let depth = ctx.depth();
    let start = from.max(depth.saturating_sub(2));
    for idx in start..depth {
        let back = depth - idx;
        let (title, tag) = if back == 2 {
            ("Two moves ago", "i-2")
        } else {
            ("One move ago", "i-1")
        };
        out.push_str(&format!(
            "{title}:\nS({tag}) = {}\nL({tag}) = {}\n",
            d.canonical_text(&ctx.trace.states[idx]),
            word(ctx.trace.labels[idx], pos, neg)
        ));
    }
}

impl Render for Sudoku {
    fn checking_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let mut s = String::from(
            "You are given a partially filled 9x9 Sudoku grid represented as a list of lists, where empty cells are represented as 0.\n\
             Your task is to determine if this current state can lead to a solvable solution. Specifically, use lookahead techniques to determine if it's possible to fill the remaining cells according to standard Sudoku rules, ensuring that each row, column, and 3x3 subgrid contains unique numbers from 1 to 9.\n",
        );
        s.push_str(AVOID);
        s.push_str(" and leverage it to make a more informed decision about the current state.\n\n");
        s.push_str(&format!(
            "Current state:\n{}\nExplored next state that leads to an unsolvable path:\n{}\n",
            self.canonical_text(ctx.current()),
            self.canonical_text(explored::<Self>(ctx)?)
        ));
        s.push_str(CHECK_TAIL);
        s.push_str(&choose("Solvable", "Unsolvable"));
        Ok(s)
    }

    fn transition_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let mut s = String::from(
            "You are given an initial Sudoku puzzle S(0), followed by a sequence of progressive states leading to the current state S(i). Alongside each state, its solvability status L(*) is given.\n\
             Your task is to determine the next state by making exactly one move, ensuring progress toward a valid solution. A valid Sudoku solution requires that each row, column, and 3x3 subgrid contains the numbers 1 to 9 without repetition.\n",
        );
        s.push_str(AVOID);
        s.push_str(
            ".\nA move is defined as either:\n\
             1. Filling: Replacing a 0 in exactly one empty cell with a value from 1 to 9.\n\
             2. Removing: Replacing a value in exactly one filled cell with 0.\n\n",
        );
        s.push_str(&format!(
            "Initial puzzle:\nS(0) = {}\nL(0) = {}\n",
            self.canonical_text(&ctx.trace.states[0]),
            word(ctx.trace.labels[0], "Solvable", "Unsolvable")
        ));
        ancestors(self, ctx, 1, &mut s, "Solvable", "Unsolvable");
        s.push_str(&format!(
            "Current state:\nS(i) = {}\nL(i) = {}\nExplored next state:\nS(i+1) = {}\nL(i+1) = Unsolvable\n",
            self.canonical_text(ctx.current()),
            word(ctx.current_label, "Solvable", "Unsolvable"),
            self.canonical_text(explored::<Self>(ctx)?)
        ));
        s.push_str(&transition_tail("grid"));
        Ok(s)
    }
}

const GRAPH_INTRO: &str = "You are given a graph represented as an adjacency list, where each index corresponds to a vertex, and the list at that index represents its adjacent vertices.";

impl Render for GraphColoring {
    fn checking_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let mut s = format!(
            "{GRAPH_INTRO} You are also given the current coloring state of the graph in a list, where each index represents the corresponding vertex, and the number at that index represents its color (0 indicates an uncolored vertex).\n\
             Your task is to determine if this current state can lead to a valid coloring. Specifically, use lookahead techniques to determine if it's possible to color the remaining vertices such that no two adjacent vertices share the same color, using no more than {} colors in total.\n",
            self.k
        );
        s.push_str(&AVOID.replace("unsolvable", "uncolorable"));
        s.push_str(" and leverage it to make a more informed decision about the current state.\n\n");
        s.push_str(&format!(
            "Graph adjacency list:\n{}\nCurrent coloring state:\n{}\nExplored next state that leads to an uncolorable path:\n{}\n",
            self.graph.adjacency_text(),
            self.canonical_text(ctx.current()),
            self.canonical_text(explored::<Self>(ctx)?)
        ));
        s.push_str(CHECK_TAIL);
        s.push_str(&choose("Colorable", "Uncolorable"));
        Ok(s)
    }

    fn transition_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let mut s = format!(
            "{GRAPH_INTRO} You are also given a sequence of partial coloring states leading to the current coloring state S(i). The coloring state is a list, where each index represents the corresponding vertex in the graph, and the number at that index represents its color (0 indicates an uncolored vertex). Alongside each state, its colorability status L(*) is given.\n\
             Your task is to determine the next state by making exactly one move, ensuring progress toward a valid coloring with no more than {k} colors. A valid coloring requires that no two adjacent vertices share the same color.\n",
            k = self.k
        );
        s.push_str(&AVOID.replace("unsolvable", "uncolorable"));
        s.push_str(&format!(
            ".\nA move is defined as either:\n\
             1. Coloring: Replacing a 0 in exactly one uncolored vertex with a value from 1 to {}.\n\
             2. Removing a color: Replacing a value in exactly one colored vertex with 0.\n\n",
            self.k
        ));
        s.push_str(&format!("Graph adjacency list:\n{}\n", self.graph.adjacency_text()));
        ancestors(self, ctx, 0, &mut s, "Colorable", "Uncolorable");
        s.push_str(&format!(
            "Current coloring state:\nS(i) = {}\nL(i) = {}\nExplored next state:\nS(i+1) = {}\nL(i+1) = Uncolorable\n",
            self.canonical_text(ctx.current()),
            word(ctx.current_label, "Colorable", "Uncolorable"),
            self.canonical_text(explored::<Self>(ctx)?)
        ));
        s.push_str(&transition_tail("coloring"));
        Ok(s)
    }
}

impl Render for Game24 {
    fn checking_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let mut s = String::from(
            "You are given four numbers and the current calculation state for the Game of 24.\n\
             Your task is to determine if this current state can lead to a solvable solution. Specifically, use lookahead techniques to determine if the remaining numbers can be combined using basic arithmetic operations (+ - * /) to reach exactly 24. You must use each number exactly once.\n",
        );
        s.push_str(AVOID);
        s.push_str(" and leverage it to make a more informed decision about the current state.\n\n");
        s.push_str(&format!(
            "Numbers:\n{}\nCurrent calculation state:\n{}\nExplored next state that leads to an unsolvable path:\n{}\n",
            self.canonical_text(&ctx.trace.states[0]),
            self.canonical_text(ctx.current()),
            self.canonical_text(explored::<Self>(ctx)?)
        ));
        s.push_str(CHECK_TAIL);
        s.push_str(&choose("Solvable", "Unsolvable"));
        Ok(s)
    }

    fn transition_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let mut s = String::from(
            "You are given an initial Game of 24 configuration S(0), followed by a sequence of progressive states leading to the current state S(i). Alongside each state, its solvability status L(*) is given.\n\
             Your task is to determine the next state by making exactly one move, ensuring progress toward a valid solution. A valid solution requires using each of the four initial numbers exactly once, using only basic arithmetic operations (+ - * /), and ultimately evaluating to 24.\n",
        );
        s.push_str(AVOID);
        s.push_str(
            ".\nA move is defined as either:\n\
             1. Applying an operation: Combining two expressions using a basic arithmetic operation (+ - * /), reducing the number of expressions by 1.\n\
             2. Reverting an operation: Removing the last operation applied to the expressions, increasing the number of expressions by 1.\n\n",
        );
        s.push_str(&format!(
            "Initial configuration:\nS(0) = {}\nL(0) = {}\nCurrent state:\nS(i) = {}\nL(i) = {}\nExplored next state:\nS(i+1) = {}\nL(i+1) = Unsolvable\n",
            self.canonical_text(&ctx.trace.states[0]),
            word(ctx.trace.labels[0], "Solvable", "Unsolvable"),
            self.canonical_text(ctx.current()),
            word(ctx.current_label, "Solvable", "Unsolvable"),
            self.canonical_text(explored::<Self>(ctx)?)
        ));
        s.push_str(&transition_tail("expressions"));
        Ok(s)
    }
}

impl GridPuzzle {
    fn question_block(&self) -> String {
        let inst = &self.instance;
        let mut s = format!("Question:\n{}\nCategories:\n", inst.question);
        for c in &inst.categories {
            s.push_str(&c.line());
            s.push('\n');
        }
        s.push_str("Clues:\n");
        for (i, text) in inst.clues_text.iter().enumerate() {
            s.push_str(&format!("{}. {}\n", i + 1, text));
        }
        s
    }

    /// The path from S(0) to the current state, with labels when asked.
    fn trace_block(&self, ctx: &Context<Self>, labels: bool) -> String {
        let depth = ctx.depth();
        let mut s = String::new();
        for (k, state) in ctx.trace.states.iter().enumerate() {
            let current = if k == depth { " (Current state)" } else { "" };
            if k == 0 {
                s.push_str(&format!("Initial state{current}:\n"));
            } else {
                s.push_str(&format!("State {k}{current}:\nClue applied: {}\n", ctx.moves[k - 1].clue));
            }
            s.push_str(&format!("S({k}) = {}\n", self.canonical_text(state)));
            if labels {
                s.push_str(&format!(
                    "L({k}) = {}\n",
                    word(ctx.trace.labels[k], "Solvable", "Unsolvable")
                ));
            }
        }
        s
    }
}

const GRID_TABLE: &str = "represented as a table, where each column corresponds to a specific category, and each row represents attributes of a distinct entry. Empty cells are represented as the empty string ('').";

impl Render for GridPuzzle {
    fn checking_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let (mv, child) = ctx
            .explored_child
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("the prompt needs an explored child".into()))?;
        let mut s = format!(
            "You are given a partially filled logic grid puzzle {GRID_TABLE}\n\
             Your task is to determine if this current state can lead to a solvable solution. Specifically, use lookahead techniques to determine if the current configuration can lead to a valid solution under standard logic puzzle constraints (each option in every category must only appear once and adhere to the given clues).\n"
        );
        s.push_str(AVOID);
        s.push_str(" and leverage it to make a more informed decision about the current state.\n\n");
        s.push_str(&self.question_block());
        s.push_str(&self.trace_block(ctx, false));
        s.push_str(&format!(
            "Explored next state that leads to an unsolvable path:\nClue applied: {}\nS({}) = {}\n",
            mv.clue,
            ctx.depth() + 1,
            self.canonical_text(child)
        ));
        s.push_str(CHECK_TAIL);
        s.push_str(&choose("Solvable", "Unsolvable"));
        Ok(s)
    }

    fn transition_prompt(&self, ctx: &Context<Self>) -> Result<String> {
        let (mv, child) = ctx
            .explored_child
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("the prompt needs an explored child".into()))?;
        let mut s = format!(
            "You are given a logic grid puzzle {GRID_TABLE} You are also given a sequence of progressive states from the initial state S(0) to the current state S(n). Alongside each state, its solvability status L(*) is provided.\n\
             Your task is to determine the next state by making exactly one move, ensuring progress toward a valid solution. A valid solution requires that each option in every category appears only once, strictly following the given clues.\n"
        );
        s.push_str(AVOID);
        s.push_str(
            ".\nA move is defined as either:\n\
             1. Applying a clue: Filling the table with the values indicated by that clue, as long as it does not conflict with any existing clues or placed options.\n\
             2. Reverting a clue: Removing the last operation applied to the table.\n\n",
        );
        s.push_str(&self.question_block());
        s.push_str(&self.trace_block(ctx, true));
        let n = ctx.depth() + 1;
        s.push_str(&format!(
            "Explored next state:\nClue applied: {}\nS({n}) = {}\nL({n}) = Unsolvable\n",
            mv.clue,
            self.canonical_text(child)
        ));
        s.push_str(&transition_tail("table"));
        Ok(s)
    }
}
