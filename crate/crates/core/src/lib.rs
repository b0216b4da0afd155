//! Logically decorated graph rewriting.
//!
//! Graphs whose nodes carry concept labels and whose edges carry roles are
//! transformed by rules made of elementary actions and driven by strategies.
//! Hoare-style specifications over such systems are checked by computing
//! weakest preconditions, eliminating the substitutions they contain, and
//! evaluating the resulting formulas over finite graphs.

pub mod bisim;
pub mod fixtures;
pub mod graph;
pub mod logic;
pub mod random;
pub mod subst;
pub mod rewrite;
pub mod strategy;
pub mod syntax;
pub mod verifier;
