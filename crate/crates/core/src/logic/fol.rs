//! First-order formulas over unary concept predicates, binary role
//! predicates, equality and the `Active` predicate.

use std::collections::BTreeSet;

use crate::graph::{ElementaryAction, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(NodeId),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn cst(n: impl Into<NodeId>) -> Term {
        Term::Const(n.into())
    }

    fn map_const(&self, f: &impl Fn(&NodeId) -> NodeId) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Const(n) => Term::Const(f(n)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fol {
    Top,
    Concept(String, Term),
    Role(String, Term, Term),
    Active(Term),
    Eq(Term, Term),
    Not(Box<Fol>),
    Or(Box<Fol>, Box<Fol>),
    Exists(String, Box<Fol>),
    Subst(Box<Fol>, ElementaryAction),
}

use Fol::*;

impl Fol {
    pub fn concept(c: &str, t: Term) -> Fol {
        Concept(c.to_string(), t)
    }

    pub fn role(r: &str, s: Term, t: Term) -> Fol {
        Role(r.to_string(), s, t)
    }

    pub fn bot() -> Fol {
        Not(Box::new(Top))
    }

    pub fn not(f: Fol) -> Fol {
        Not(Box::new(f))
    }

    pub fn or(a: Fol, b: Fol) -> Fol {
        Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Fol, b: Fol) -> Fol {
        Fol::not(Fol::or(Fol::not(a), Fol::not(b)))
    }

    pub fn implies(a: Fol, b: Fol) -> Fol {
        Fol::or(Fol::not(a), b)
    }

    pub fn exists(x: &str, f: Fol) -> Fol {
        Exists(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: Fol) -> Fol {
        Fol::not(Fol::exists(x, Fol::not(f)))
    }

    pub fn eq(a: Term, b: Term) -> Fol {
        Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Fol {
        Fol::not(Eq(a, b))
    }

    pub fn subst(f: Fol, a: ElementaryAction) -> Fol {
        Subst(Box::new(f), a)
    }

    pub fn and_all(items: impl IntoIterator<Item = Fol>) -> Fol {
        let mut it = items.into_iter();
        match it.next() {
            None => Top,
            Some(first) => it.fold(first, Fol::and),
        }
    }

    pub fn has_subst(&self) -> bool {
        match self {
            Top | Concept(..) | Role(..) | Active(_) | Eq(..) => false,
            Not(f) | Exists(_, f) => f.has_subst(),
            Or(a, b) => a.has_subst() || b.has_subst(),
            Subst(..) => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Top | Concept(..) | Role(..) | Active(_) | Eq(..) => 1,
            Not(f) | Exists(_, f) | Subst(f, _) => 1 + f.size(),
            Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn term(t: &Term, bound: &[String], out: &mut BTreeSet<String>) {
            if let Term::Var(x) = t {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
        }
        fn go(f: &Fol, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Top => {}
                Concept(_, t) | Active(t) => term(t, bound, out),
                Role(_, s, t) | Eq(s, t) => {
                    term(s, bound, out);
                    term(t, bound, out);
                }
                Not(g) | Subst(g, _) => go(g, bound, out),
                Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Exists(x, g) => {
                    bound.push(x.clone());
                    go(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn constants(&self) -> BTreeSet<NodeId> {
        fn term(t: &Term, out: &mut BTreeSet<NodeId>) {
            if let Term::Const(n) = t {
                out.insert(n.clone());
            }
        }
        fn go(f: &Fol, out: &mut BTreeSet<NodeId>) {
            match f {
                Top => {}
                Concept(_, t) | Active(t) => term(t, out),
                Role(_, s, t) | Eq(s, t) => {
                    term(s, out);
                    term(t, out);
                }
                Not(g) | Exists(_, g) => go(g, out),
                Subst(g, a) => {
                    go(g, out);
                    out.extend(a.nodes().into_iter().cloned());
                }
                Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Unary predicate names used.
    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Concept(c, _) = f {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Binary predicate names used.
    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Role(r, ..) = f {
                out.insert(r.clone());
            }
        });
        out
    }

    pub fn walk(&self, f: &mut impl FnMut(&Fol)) {
        f(self);
        match self {
            Top | Concept(..) | Role(..) | Active(_) | Eq(..) => {}
            Not(g) | Exists(_, g) | Subst(g, _) => g.walk(f),
            Or(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn map_constants(&self, f: &impl Fn(&NodeId) -> NodeId) -> Fol {
        match self {
            Top => Top,
            Concept(c, t) => Concept(c.clone(), t.map_const(f)),
            Role(r, s, t) => Role(r.clone(), s.map_const(f), t.map_const(f)),
            Active(t) => Active(t.map_const(f)),
            Eq(s, t) => Eq(s.map_const(f), t.map_const(f)),
            Not(g) => Fol::not(g.map_constants(f)),
            Or(a, b) => Fol::or(a.map_constants(f), b.map_constants(f)),
            Exists(x, g) => Fol::exists(x, g.map_constants(f)),
            Subst(g, a) => Fol::subst(g.map_constants(f), a.map_nodes(f)),
        }
    }

    /// Guards every quantifier with `Active`, so that quantification ranges
    /// over the nodes of the graph rather than the whole universe.
    pub fn relativize_active(&self) -> Fol {
        match self {
            Top | Concept(..) | Role(..) | Active(_) | Eq(..) => self.clone(),
            Not(g) => Fol::not(g.relativize_active()),
            Or(a, b) => Fol::or(a.relativize_active(), b.relativize_active()),
            Exists(x, g) => Fol::exists(x, Fol::and(Active(Term::var(x)), g.relativize_active())),
            Subst(g, a) => Fol::subst(g.relativize_active(), a.clone()),
        }
    }

    pub fn simplify(&self) -> Fol {
        match self {
            Top | Concept(..) | Role(..) | Active(_) => self.clone(),
            Eq(s, t) if s == t => Top,
            Eq(..) => self.clone(),
            Not(g) => fold_not(g.simplify()),
            Or(a, b) => fold_or(a.simplify(), b.simplify()),
            Exists(x, g) => {
                let g = g.simplify();
                if g == Top || g.is_bot() || !g.free_vars().contains(x) {
                    g
                } else {
                    Fol::exists(x, g)
                }
            }
            Subst(g, a) => Fol::subst(g.simplify(), a.clone()),
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Not(f) if **f == Top)
    }
}

pub fn fold_not(f: Fol) -> Fol {
    match f {
        Not(inner) => *inner,
        f => Fol::not(f),
    }
}

pub fn fold_or(a: Fol, b: Fol) -> Fol {
    if a == Top || b == Top {
        Top
    } else if a.is_bot() {
        b
    } else if b.is_bot() || a == b {
        a
    } else {
        Fol::or(a, b)
    }
}

/// Keeps the conjunction shape `¬(¬a ∨ ¬b)` so that it prints back as
/// `a and b`.
pub fn fold_and(a: Fol, b: Fol) -> Fol {
    if a.is_bot() || b.is_bot() {
        Fol::bot()
    } else if a == Top {
        b
    } else if b == Top || a == b {
        a
    } else {
        Fol::and(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relativize_nested() {
        let f = Fol::exists("x", Fol::exists("y", Fol::role("r", Term::var("x"), Term::var("y"))));
        let expected = Fol::exists(
            "x",
            Fol::and(
                Active(Term::var("x")),
                Fol::exists("y", Fol::and(Active(Term::var("y")), Fol::role("r", Term::var("x"), Term::var("y")))),
            ),
        );
        assert_eq!(f.relativize_active(), expected);
        let q = Fol::concept("C", Term::cst("n0"));
        assert_eq!(q.relativize_active(), q);
    }

    #[test]
    fn free_vars_respect_binding() {
        let f = Fol::exists("x", Fol::role("r", Term::var("x"), Term::var("y")));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
    }
}
