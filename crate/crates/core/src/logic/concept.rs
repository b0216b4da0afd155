//! Description-logic concepts and roles.
//!
//! Only the primitive constructors are stored; children are shared, so
//! rewriting may produce a DAG. Conjunction, bottom, value
//! restriction and at-least counting are built from them by the helper
//! functions below and recognized again by the printer.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::graph::{ElementaryAction, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Basic(String),
    Inverse(String),
    Universal,
}

impl Role {
    pub fn basic(r: &str) -> Role {
        Role::Basic(r.to_string())
    }

    pub fn inverse(r: &str) -> Role {
        Role::Inverse(r.to_string())
    }

    /// Name of the underlying basic role, if any.
    pub fn base(&self) -> Option<&str> {
        match self {
            Role::Basic(r) | Role::Inverse(r) => Some(r),
            Role::Universal => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Atomic(String),
    Nominal(NodeId),
    /// Holds exactly at the active nodes.
    Active,
    Not(Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    Exists(Role, Arc<Concept>),
    ExistsSelf(Role),
    /// `(< n R C)`: fewer than `n` distinct `R`-neighbours satisfy `C`.
    Lt(u32, Role, Arc<Concept>),
    /// Pending substitution `C[a]`.
    Subst(Arc<Concept>, ElementaryAction),
}

use Concept::*;

impl Concept {
    pub fn atomic(a: &str) -> Concept {
        Atomic(a.to_string())
    }

    pub fn nominal(n: impl Into<NodeId>) -> Concept {
        Nominal(n.into())
    }

    pub fn bot() -> Concept {
        Not(Arc::new(Top))
    }

    pub fn not(c: Concept) -> Concept {
        Not(Arc::new(c))
    }

    pub fn or(a: Concept, b: Concept) -> Concept {
        Or(Arc::new(a), Arc::new(b))
    }

    pub fn and(a: Concept, b: Concept) -> Concept {
        Concept::not(Concept::or(Concept::not(a), Concept::not(b)))
    }

    pub fn implies(a: Concept, b: Concept) -> Concept {
        Concept::or(Concept::not(a), b)
    }

    pub fn exists(r: Role, c: Concept) -> Concept {
        Exists(r, Arc::new(c))
    }

    pub fn forall(r: Role, c: Concept) -> Concept {
        Concept::not(Concept::exists(r, Concept::not(c)))
    }

    pub fn lt(n: u32, r: Role, c: Concept) -> Concept {
        Lt(n, r, Arc::new(c))
    }

    pub fn ge(n: u32, r: Role, c: Concept) -> Concept {
        Concept::not(Concept::lt(n, r, c))
    }

    pub fn subst(c: Concept, a: ElementaryAction) -> Concept {
        Subst(Arc::new(c), a)
    }

    /// `∀U.(¬Active ∨ c)`: holds everywhere iff `c` holds at every active node.
    pub fn globalize(c: Concept) -> Concept {
        Concept::forall(Role::Universal, Concept::implies(Active, c))
    }

    pub fn has_subst(&self) -> bool {
        match self {
            Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => false,
            Not(c) | Exists(_, c) | Lt(_, _, c) => c.has_subst(),
            Or(a, b) => a.has_subst() || b.has_subst(),
            Subst(..) => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => 1,
            Not(c) | Exists(_, c) | Lt(_, _, c) | Subst(c, _) => 1 + c.size(),
            Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => 0,
            Not(c) | Subst(c, _) => c.depth(),
            Exists(_, c) | Lt(_, _, c) => 1 + c.depth(),
            Or(a, b) => a.depth().max(b.depth()),
        }
    }

    /// Nominals occurring in the concept, including action arguments.
    pub fn nominals(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        self.collect_nominals(&mut out);
        out
    }

    fn collect_nominals(&self, out: &mut BTreeSet<NodeId>) {
        match self {
            Nominal(n) => {
                out.insert(n.clone());
            }
            Top | Atomic(_) | Active | ExistsSelf(_) => {}
            Not(c) | Exists(_, c) | Lt(_, _, c) => c.collect_nominals(out),
            Or(a, b) => {
                a.collect_nominals(out);
                b.collect_nominals(out);
            }
            Subst(c, a) => {
                c.collect_nominals(out);
                out.extend(a.nodes().into_iter().cloned());
            }
        }
    }

    /// Renames nominals (and action arguments) through `f`.
    pub fn map_nominals(&self, f: &impl Fn(&NodeId) -> NodeId) -> Concept {
        match self {
            Nominal(n) => Nominal(f(n)),
            Top | Atomic(_) | Active | ExistsSelf(_) => self.clone(),
            Not(c) => Concept::not(c.map_nominals(f)),
            Or(a, b) => Concept::or(a.map_nominals(f), b.map_nominals(f)),
            Exists(r, c) => Concept::exists(r.clone(), c.map_nominals(f)),
            Lt(n, r, c) => Concept::lt(*n, r.clone(), c.map_nominals(f)),
            Subst(c, a) => Concept::subst(c.map_nominals(f), a.map_nodes(f)),
        }
    }

    /// Restricts universal-role quantification to active nodes, so that
    /// reserved nodes do not influence the value at active nodes.
    pub fn relativize(&self) -> Concept {
        match self {
            Top | Atomic(_) | Nominal(_) | Active => self.clone(),
            ExistsSelf(Role::Universal) => Active,
            ExistsSelf(_) => self.clone(),
            Not(c) => Concept::not(c.relativize()),
            Or(a, b) => Concept::or(a.relativize(), b.relativize()),
            Exists(Role::Universal, c) => {
                Concept::exists(Role::Universal, Concept::and(Active, c.relativize()))
            }
            Exists(r, c) => Concept::exists(r.clone(), c.relativize()),
            Lt(n, Role::Universal, c) => {
                Concept::lt(*n, Role::Universal, Concept::and(Active, c.relativize()))
            }
            Lt(n, r, c) => Concept::lt(*n, r.clone(), c.relativize()),
            Subst(c, a) => Concept::subst(c.relativize(), a.clone()),
        }
    }

    /// Atomic concept names used.
    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            if let Atomic(a) = c {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Basic role names used.
    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| match c {
            Exists(r, _) | ExistsSelf(r) | Lt(_, r, _) => {
                if let Some(b) = r.base() {
                    out.insert(b.to_string());
                }
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&Concept)) {
        f(self);
        match self {
            Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => {}
            Not(c) | Exists(_, c) | Lt(_, _, c) | Subst(c, _) => c.walk(f),
            Or(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn uses_counting(&self) -> bool {
        let mut found = false;
        self.walk(&mut |c| found |= matches!(c, Lt(..)));
        found
    }

    pub fn uses_self(&self) -> bool {
        let mut found = false;
        self.walk(&mut |c| found |= matches!(c, ExistsSelf(_)));
        found
    }

    pub fn uses_inverse(&self) -> bool {
        let mut found = false;
        self.walk(&mut |c| {
            found |= matches!(
                c,
                Exists(Role::Inverse(_), _) | ExistsSelf(Role::Inverse(_)) | Lt(_, Role::Inverse(_), _)
            )
        });
        found
    }

    /// Constant folding: `⊥ ∨ C → C`, `⊤ ∨ C → ⊤`, `¬¬C → C`, and the
    /// trivial quantifier cases.
    pub fn simplify(&self) -> Concept {
        match self {
            Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => self.clone(),
            Not(c) => fold_not(c.simplify()),
            Or(a, b) => fold_or(a.simplify(), b.simplify()),
            Exists(r, c) => fold_exists(r.clone(), c.simplify()),
            Lt(n, r, c) => fold_lt(*n, r.clone(), c.simplify()),
            Subst(c, a) => Concept::subst(c.simplify(), a.clone()),
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Not(c) if **c == Top)
    }
}

pub fn fold_not(c: Concept) -> Concept {
    match c {
        Not(inner) => Arc::unwrap_or_clone(inner),
        c => Concept::not(c),
    }
}

pub fn fold_or(a: Concept, b: Concept) -> Concept {
    if a == Top || b == Top {
        Top
    } else if a.is_bot() {
        b
    } else if b.is_bot() || a == b {
        a
    } else {
        Concept::or(a, b)
    }
}

/// Keeps the conjunction shape `¬(¬a ∨ ¬b)` so that it prints back as
/// `a and b`.
pub fn fold_and(a: Concept, b: Concept) -> Concept {
    if a.is_bot() || b.is_bot() {
        Concept::bot()
    } else if a == Top {
        b
    } else if b == Top || a == b {
        a
    } else {
        Concept::and(a, b)
    }
}

pub fn fold_implies(a: Concept, b: Concept) -> Concept {
    fold_or(fold_not(a), b)
}

pub fn fold_exists(r: Role, c: Concept) -> Concept {
    if c.is_bot() {
        Concept::bot()
    } else {
        Concept::exists(r, c)
    }
}

pub fn fold_lt(n: u32, r: Role, c: Concept) -> Concept {
    if n == 0 {
        Concept::bot()
    } else if c.is_bot() {
        Top
    } else {
        Concept::lt(n, r, c)
    }
}

pub fn fold_or_all(items: impl IntoIterator<Item = Concept>) -> Concept {
    items.into_iter().fold(Concept::bot(), fold_or)
}

pub fn fold_and_all(items: impl IntoIterator<Item = Concept>) -> Concept {
    items.into_iter().fold(Top, fold_and)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_rules() {
        let a = Concept::atomic("A");
        assert_eq!(fold_or(Concept::bot(), a.clone()), a);
        assert_eq!(fold_not(fold_not(a.clone())), a);
        assert_eq!(fold_and(Top, a.clone()), a);
        assert_eq!(fold_and(Concept::bot(), a.clone()), Concept::bot());
        assert_eq!(fold_lt(0, Role::basic("r"), a.clone()), Concept::bot());
    }

    #[test]
    fn relativize_guards_universal_role() {
        let c = Concept::exists(Role::Universal, Concept::atomic("A"));
        assert_eq!(
            c.relativize(),
            Concept::exists(Role::Universal, Concept::and(Active, Concept::atomic("A")))
        );
        let d = Concept::exists(Role::basic("r"), Concept::atomic("A"));
        assert_eq!(d.relativize(), d);
    }
}
