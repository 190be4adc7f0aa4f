//! Symbolic execution bug finder for IMP, a small imperative language with
//! integer arithmetic, loops, conditionals and a `fail` statement.
//!
//! The pipeline: [`syntax`] parses programs, [`symbolic`] computes symbolic
//! successors, [`engine`] enumerates them as a lazy stream and flags stuck
//! states, and [`solver`] decides whether a flagged path is feasible.
//! [`concrete`] is the reference interpreter every result is checked against.

pub mod cli;
pub mod concrete;
pub mod corpus;
pub mod engine;
pub mod ltl;
pub mod solver;
pub mod symbolic;
pub mod syntax;
