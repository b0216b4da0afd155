//! Formula languages: description-logic concepts and first-order formulas,
//! with their evaluation over graphs.

pub mod concept;
pub mod eval;
pub mod fol;

pub use concept::{Concept, Role};
pub use eval::{
    eval_concept, eval_concept_with, eval_fol, eval_fol_with, graph_satisfies,
    graph_satisfies_with, holds_at, Interp, LogicError, Valuation,
};
pub use fol::{Fol, Term};

/// Either kind of formula, for APIs shared by both logics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Dl(Concept),
    Fol(Fol),
}

/// Which formula language a specification or command works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicKind {
    Dl,
    Fol,
}

impl Formula {
    pub fn kind(&self) -> LogicKind {
        match self {
            Formula::Dl(_) => LogicKind::Dl,
            Formula::Fol(_) => LogicKind::Fol,
        }
    }
}
