//! Elimination of pending substitutions `φ[a]`.
//!
//! Each elementary action changes the extension of a few atoms (concept
//! names, `Active`, role pairs). Elimination pushes the action down to
//! those atoms and replaces each by a substitution-free formula that has,
//! before the action, the value the atom has after it. Substitutions are
//! eliminated innermost first, leftmost first.

mod dl;
mod fol;
mod relation;
pub mod suite;

use std::fmt;

use thiserror::Error;

pub use dl::{eliminate_dl, eliminate_dl_traced};
pub use fol::{eliminate_fol, eliminate_fol_traced};

use crate::graph::{apply_elementary, ElementaryAction, GraphError, LDGraph};
use crate::logic::{self, Concept, Fol, LogicError};
pub use crate::logic::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("action `{0}` cannot be eliminated: edges are identified by extremities in formulas")]
    NotSubstitutable(String),
    #[error("malformed substitution: {0}")]
    Malformed(String),
}

/// One rule application: the pending substitution before and its
/// replacement after.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep<F> {
    pub rule: String,
    pub before: F,
    pub after: F,
    /// `true` for the step that removes a whole `Subst` node; the other
    /// steps are the rule applications performed inside it.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace<F> {
    pub steps: Vec<TraceStep<F>>,
}

impl<F> Default for EliminationTrace<F> {
    fn default() -> Self {
        EliminationTrace { steps: Vec::new() }
    }
}

impl<F: fmt::Display> fmt::Display for EliminationTrace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let mark = if s.complete { "*" } else { " " };
            writeln!(f, "{mark} {:<22} {}  ~>  {}", s.rule, s.before, s.after)?;
        }
        Ok(())
    }
}

impl EliminationTrace<Concept> {
    /// Rebuilds the eliminated concept from `input` using only the complete
    /// steps, in order.
    pub fn replay(&self, input: &Concept) -> Option<Concept> {
        let mut steps = self.steps.iter().filter(|s| s.complete);
        let out = replay_concept(input, &mut steps)?;
        steps.next().is_none().then_some(out)
    }
}

fn replay_concept<'a>(
    c: &Concept,
    steps: &mut impl Iterator<Item = &'a TraceStep<Concept>>,
) -> Option<Concept> {
    use Concept::*;
    Some(match c {
        Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => c.clone(),
        Not(d) => Concept::not(replay_concept(d, steps)?),
        Or(a, b) => {
            let a = replay_concept(a, steps)?;
            Concept::or(a, replay_concept(b, steps)?)
        }
        Exists(r, d) => Concept::exists(r.clone(), replay_concept(d, steps)?),
        Lt(n, r, d) => Concept::lt(*n, r.clone(), replay_concept(d, steps)?),
        Subst(d, a) => {
            let body = replay_concept(d, steps)?;
            let step = steps.next()?;
            if step.before != Concept::subst(body, a.clone()) {
                return None;
            }
            step.after.clone()
        }
    })
}

impl EliminationTrace<Fol> {
    pub fn replay(&self, input: &Fol) -> Option<Fol> {
        let mut steps = self.steps.iter().filter(|s| s.complete);
        let out = replay_fol(input, &mut steps)?;
        steps.next().is_none().then_some(out)
    }
}

fn replay_fol<'a>(f: &Fol, steps: &mut impl Iterator<Item = &'a TraceStep<Fol>>) -> Option<Fol> {
    use Fol::*;
    Some(match f {
        Top | Concept(..) | Role(..) | Active(_) | Eq(..) => f.clone(),
        Not(g) => Fol::not(replay_fol(g, steps)?),
        Or(a, b) => {
            let a = replay_fol(a, steps)?;
            Fol::or(a, replay_fol(b, steps)?)
        }
        Exists(x, g) => Fol::exists(x, replay_fol(g, steps)?),
        Subst(g, a) => {
            let body = replay_fol(g, steps)?;
            let step = steps.next()?;
            if step.before != Fol::subst(body, a.clone()) {
                return None;
            }
            step.after.clone()
        }
    })
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Subst(#[from] SubstError),
}

/// Compares `eliminate(φ[a])` on `g` with `φ` on `g[a]`.
///
/// Concepts are compared pointwise over the universe (which no action
/// changes); sentences by truth value.
pub fn check_biconditional(
    g: &LDGraph,
    phi: &Formula,
    a: &ElementaryAction,
) -> Result<bool, CheckError> {
    let after = apply_elementary(g, a)?;
    match phi {
        Formula::Dl(c) => {
            let pre = eliminate_dl(&Concept::subst(c.clone(), a.clone()))?;
            Ok(logic::eval_concept(g, &pre)? == logic::eval_concept(&after, c)?)
        }
        Formula::Fol(f) => {
            let pre = eliminate_fol(&Fol::subst(f.clone(), a.clone()))?;
            let env = Default::default();
            Ok(logic::eval_fol(g, &pre, &env)? == logic::eval_fol(&after, f, &env)?)
        }
    }
}

/// [`check_biconditional`] where `phi` and `a` may mention parameter
/// nominals, bound to nodes of `g` by `val` (possibly several to one node).
pub fn check_biconditional_with(
    g: &LDGraph,
    phi: &Formula,
    a: &ElementaryAction,
    val: &logic::Valuation,
) -> Result<bool, CheckError> {
    let concrete = a.map_nodes(&|n| val.get(n).cloned().unwrap_or_else(|| n.clone()));
    let after = apply_elementary(g, &concrete)?;
    match phi {
        Formula::Dl(c) => {
            let pre = eliminate_dl(&Concept::subst(c.clone(), a.clone()))?;
            Ok(logic::eval_concept_with(g, &pre, val)? == logic::eval_concept_with(&after, c, val)?)
        }
        Formula::Fol(f) => {
            let pre = eliminate_fol(&Fol::subst(f.clone(), a.clone()))?;
            let env = Default::default();
            Ok(logic::eval_fol_with(g, &pre, &env, val)? == logic::eval_fol_with(&after, f, &env, val)?)
        }
    }
}

pub(crate) fn check_action(a: &ElementaryAction) -> Result<(), SubstError> {
    match a {
        ElementaryAction::DelEdgeId(e) => Err(SubstError::NotSubstitutable(format!("del_E({e})"))),
        ElementaryAction::Clone(i, j, _) if i == j => {
            Err(SubstError::Malformed(format!("cl({i},{j},...) clones a node onto itself")))
        }
        _ => Ok(()),
    }
}

/// Two-node actions whose arguments are different names that a valuation
/// might still bind to the same node.
pub(crate) fn may_alias(a: &ElementaryAction, dl: bool) -> Option<(&crate::graph::NodeId, &crate::graph::NodeId)> {
    use ElementaryAction::*;
    let (i, j) = match a {
        Merge(i, j) => (i, j),
        AddEdge { src, tgt, .. } | DelEdge { src, tgt, .. } if dl => (src, tgt),
        Redirect(i, j) if dl => (i, j),
        _ => return None,
    };
    (i != j && (i.is_param() || j.is_param())).then_some((i, j))
}

#[cfg(test)]
mod tests;
