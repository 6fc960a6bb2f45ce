//! Cheaper evaluation of sparse multivariate polynomials.
//!
//! The pipeline is: parse a [`Polynomial`], pick a variable order, apply the
//! multivariate Horner transform ([`horner`]), then remove common
//! subexpressions ([`cse`]) to get straight-line code whose length is the
//! evaluation cost. [`search`] finds good orders with Monte Carlo tree search
//! and several baselines; [`gen`] produces benchmark inputs and [`emit`]
//! renders the results.

pub mod cse;
pub mod emit;
pub mod error;
pub mod expr;
pub mod gen;
pub mod horner;
pub mod search;

pub use cse::{cse, instruction_count, replay, Instruction, InstructionSeq, OpKind, Operand};
pub use emit::{emit_c_like, emit_stats, emit_sweep_csv, emit_tac, parse_tac, StatsReport};
pub use error::{Error, Result};
pub use expr::{
    naive_op_count, occurrence_counts, parse_polynomial, Monomial, OpCount, Point, Polynomial, Term, Variable,
    Workspace,
};
pub use horner::{horner_transform, tree_op_count, DagBuilder, ExprDag, Node, NodeId, VariableOrder};
pub use search::{
    evaluate_order, exhaustive_search, mcts_optimize, occurrence_order, random_order_search, sweep, Direction,
    MctsConfig, SearchResult, SweepGrid, SweepRow,
};
