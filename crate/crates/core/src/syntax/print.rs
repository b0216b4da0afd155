//! Surface syntax printers. Derived connectives (`and`, `forall`, `bot`,
//! `>=`, `!=`) are recognized and printed as such. The default printers use
//! as few parentheses as the grammar allows; the `full` variants wrap every
//! compound subformula.

use std::fmt::{self, Write};

use crate::graph::{CloneParams, ElementaryAction};
use crate::logic::{Concept, Fol, Formula, Role, Term};
use crate::rewrite::Rule;
use crate::strategy::Strategy;

// Binding strength: 1 or, 2 and, 3 prefix operators, 4 infix atoms
// (`x = y`), 5 closed atoms.
const OR: u8 = 1;
const AND: u8 = 2;
const PREFIX: u8 = 3;
const INFIX_ATOM: u8 = 4;
const ATOM: u8 = 5;

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Basic(r) => f.write_str(r),
            Role::Inverse(r) => write!(f, "inv {r}"),
            Role::Universal => f.write_str("U"),
        }
    }
}

fn set(f: &mut impl Write, s: &std::collections::BTreeSet<String>) -> fmt::Result {
    f.write_char('{')?;
    for (k, r) in s.iter().enumerate() {
        if k > 0 {
            f.write_char(',')?;
        }
        f.write_str(r)?;
    }
    f.write_char('}')
}

fn clone_params(f: &mut impl Write, p: &CloneParams) -> fmt::Result {
    for (k, s) in p.sets().into_iter().enumerate() {
        if k > 0 {
            f.write_char(',')?;
        }
        set(f, s)?;
    }
    Ok(())
}

impl fmt::Display for ElementaryAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ElementaryAction::*;
        match self {
            AddNode(i) => write!(f, "add_N({i})"),
            DelNode(i) => write!(f, "del_N({i})"),
            AddConcept(i, c) => write!(f, "add_C({i},{c})"),
            DelConcept(i, c) => write!(f, "del_C({i},{c})"),
            AddEdge { id: Some(e), src, tgt, role } => write!(f, "add_E({e},{src},{tgt},{role})"),
            AddEdge { id: None, src, tgt, role } => write!(f, "add_E({src},{tgt},{role})"),
            DelEdgeId(e) => write!(f, "del_E({e})"),
            DelEdge { src, tgt, role } => write!(f, "del_E({src},{tgt},{role})"),
            Redirect(i, j) => write!(f, "{i} >> {j}"),
            Merge(i, j) => write!(f, "mrg({i},{j})"),
            Clone(i, j, p) => {
                write!(f, "cl({i},{j},")?;
                clone_params(f, p)?;
                f.write_char(')')
            }
        }
    }
}

pub fn actions_to_string(alpha: &[ElementaryAction]) -> String {
    alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("; ")
}

/// Views a stored concept through the derived connectives.
enum CView<'a> {
    Bot,
    And(&'a Concept, &'a Concept),
    Forall(&'a Role, &'a Concept),
    Ge(u32, &'a Role, &'a Concept),
    Plain(&'a Concept),
}

fn cview(c: &Concept) -> CView<'_> {
    use Concept::*;
    if let Not(inner) = c {
        match inner.as_ref() {
            Top => return CView::Bot,
            Or(a, b) => {
                if let (Not(a), Not(b)) = (a.as_ref(), b.as_ref()) {
                    return CView::And(a, b);
                }
            }
            Exists(r, body) => {
                if let Not(body) = body.as_ref() {
                    return CView::Forall(r, body);
                }
            }
            Lt(n, r, body) => return CView::Ge(*n, r, body),
            _ => {}
        }
    }
    CView::Plain(c)
}

fn concept_level(c: &Concept) -> u8 {
    use Concept::*;
    match cview(c) {
        CView::Bot | CView::Ge(..) => ATOM,
        CView::And(..) => AND,
        CView::Forall(..) => PREFIX,
        CView::Plain(c) => match c {
            Top | Atomic(_) | Nominal(_) | Active | Lt(..) | Subst(..) => ATOM,
            Or(..) => OR,
            Not(_) | Exists(..) | ExistsSelf(_) => PREFIX,
        },
    }
}

pub(crate) fn write_concept(out: &mut impl Write, c: &Concept, prec: u8, full: bool) -> fmt::Result {
    let level = concept_level(c);
    let wrap = if full { prec > 0 && level < ATOM } else { level < prec };
    if wrap {
        out.write_char('(')?;
    }
    let inner = |out: &mut _, c, p| write_concept(out, c, p, full);
    match cview(c) {
        CView::Bot => out.write_str("bot")?,
        CView::And(a, b) => {
            inner(out, a, AND)?;
            out.write_str(" and ")?;
            inner(out, b, PREFIX)?;
        }
        CView::Forall(r, b) => {
            write!(out, "forall {r} . ")?;
            inner(out, b, PREFIX)?;
        }
        CView::Ge(n, r, b) => {
            write!(out, "(>= {n} {r} ")?;
            inner(out, b, 0)?;
            out.write_char(')')?;
        }
        CView::Plain(c) => match c {
            Concept::Top => out.write_str("top")?,
            Concept::Atomic(a) => out.write_str(a)?,
            Concept::Nominal(n) => write!(out, "{{{n}}}")?,
            Concept::Active => out.write_str("Active")?,
            Concept::Not(d) => {
                out.write_str("not ")?;
                inner(out, d, PREFIX)?;
            }
            Concept::Or(a, b) => {
                inner(out, a, OR)?;
                out.write_str(" or ")?;
                inner(out, b, AND)?;
            }
            Concept::Exists(r, d) => {
                write!(out, "exists {r} . ")?;
                inner(out, d, PREFIX)?;
            }
            Concept::ExistsSelf(r) => write!(out, "exists {r} . Self")?,
            Concept::Lt(n, r, d) => {
                write!(out, "(< {n} {r} ")?;
                inner(out, d, 0)?;
                out.write_char(')')?;
            }
            Concept::Subst(d, a) => {
                inner(out, d, ATOM)?;
                write!(out, "[{a}]")?;
            }
        },
    }
    if wrap {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_concept(f, self, 0, false)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Const(n) => write!(f, "{n}"),
        }
    }
}

enum FView<'a> {
    Bot,
    And(&'a Fol, &'a Fol),
    Forall(&'a str, &'a Fol),
    Neq(&'a Term, &'a Term),
    Plain(&'a Fol),
}

fn fview(f: &Fol) -> FView<'_> {
    use Fol::*;
    if let Not(inner) = f {
        match inner.as_ref() {
            Top => return FView::Bot,
            Or(a, b) => {
                if let (Not(a), Not(b)) = (a.as_ref(), b.as_ref()) {
                    return FView::And(a, b);
                }
            }
            Exists(x, body) => {
                if let Not(body) = body.as_ref() {
                    return FView::Forall(x, body);
                }
            }
            Eq(a, b) => return FView::Neq(a, b),
            _ => {}
        }
    }
    FView::Plain(f)
}

fn fol_level(f: &Fol) -> u8 {
    use Fol::*;
    match fview(f) {
        FView::Bot => ATOM,
        FView::And(..) => AND,
        FView::Forall(..) => PREFIX,
        FView::Neq(..) => INFIX_ATOM,
        FView::Plain(f) => match f {
            Top | Concept(..) | Role(..) | Active(_) | Subst(..) => ATOM,
            Eq(..) => INFIX_ATOM,
            Or(..) => OR,
            Not(_) | Exists(..) => PREFIX,
        },
    }
}

pub(crate) fn write_fol(out: &mut impl Write, f: &Fol, prec: u8, full: bool) -> fmt::Result {
    let level = fol_level(f);
    let wrap = if full { prec > 0 && level < ATOM } else { level < prec };
    if wrap {
        out.write_char('(')?;
    }
    let inner = |out: &mut _, f, p| write_fol(out, f, p, full);
    match fview(f) {
        FView::Bot => out.write_str("bot")?,
        FView::And(a, b) => {
            inner(out, a, AND)?;
            out.write_str(" and ")?;
            inner(out, b, PREFIX)?;
        }
        FView::Forall(x, b) => {
            write!(out, "forall {x} . ")?;
            inner(out, b, PREFIX)?;
        }
        FView::Neq(a, b) => write!(out, "{a} != {b}")?,
        FView::Plain(f) => match f {
            Fol::Top => out.write_str("top")?,
            Fol::Concept(c, t) => write!(out, "{c}({t})")?,
            Fol::Role(r, s, t) => write!(out, "{r}({s},{t})")?,
            Fol::Active(t) => write!(out, "Active({t})")?,
            Fol::Eq(a, b) => write!(out, "{a} = {b}")?,
            Fol::Not(g) => {
                out.write_str("not ")?;
                inner(out, g, PREFIX)?;
            }
            Fol::Or(a, b) => {
                inner(out, a, OR)?;
                out.write_str(" or ")?;
                inner(out, b, AND)?;
            }
            Fol::Exists(x, g) => {
                // Consecutive existentials share one binder list.
                write!(out, "exists {x}")?;
                let mut body = g.as_ref();
                while let Fol::Exists(y, next) = body {
                    if full {
                        break;
                    }
                    write!(out, ", {y}")?;
                    body = next;
                }
                out.write_str(" . ")?;
                inner(out, body, PREFIX)?;
            }
            Fol::Subst(g, a) => {
                inner(out, g, ATOM)?;
                write!(out, "[{a}]")?;
            }
        },
    }
    if wrap {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Fol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_fol(f, self, 0, false)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Dl(c) => c.fmt(f),
            Formula::Fol(g) => g.fmt(f),
        }
    }
}

/// Prints with every compound subformula parenthesized.
pub fn concept_full(c: &Concept) -> String {
    let mut s = String::new();
    write_concept(&mut s, c, 0, true).expect("writing to a string");
    s
}

pub fn fol_full(f: &Fol) -> String {
    let mut s = String::new();
    write_fol(&mut s, f, 0, true).expect("writing to a string");
    s
}

pub fn formula_full(f: &Formula) -> String {
    match f {
        Formula::Dl(c) => concept_full(c),
        Formula::Fol(g) => fol_full(g),
    }
}

fn strategy_level(s: &Strategy) -> u8 {
    match s {
        Strategy::Choice(..) => 0,
        Strategy::Seq(..) => 1,
        Strategy::Closure(..) => 2,
        _ => 3,
    }
}

fn write_strategy(out: &mut fmt::Formatter<'_>, s: &Strategy, prec: u8) -> fmt::Result {
    let wrap = strategy_level(s) < prec;
    if wrap {
        out.write_char('(')?;
    }
    match s {
        Strategy::Empty => out.write_str("eps")?,
        Strategy::Rule(r) => out.write_str(r)?,
        Strategy::Try(r) => write!(out, "{r}?")?,
        Strategy::Must(r) => write!(out, "{r}!")?,
        Strategy::Seq(a, b) => {
            write_strategy(out, a, 2)?;
            out.write_str(" ; ")?;
            write_strategy(out, b, 1)?;
        }
        Strategy::Choice(a, b) => {
            write_strategy(out, a, 1)?;
            out.write_str(" + ")?;
            write_strategy(out, b, 0)?;
        }
        Strategy::Closure(body, inv) => {
            write_strategy(out, body, 3)?;
            out.write_char('*')?;
            if let Some(inv) = inv {
                write!(out, " {{inv: {inv}}}")?;
            }
        }
    }
    if wrap {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_strategy(f, self, 0)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule {} {{", self.name)?;
        f.write_str("  lhs {")?;
        if !self.nodes.is_empty() {
            f.write_str(" nodes: ")?;
            for (k, n) in self.nodes.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", n.id)?;
                if !n.labels.is_empty() {
                    f.write_str(" [")?;
                    for (m, l) in n.labels.iter().enumerate() {
                        if m > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{l}")?;
                    }
                    f.write_char(']')?;
                }
            }
            f.write_char(';')?;
        }
        if !self.edges.is_empty() {
            f.write_str(" edges: ")?;
            for (k, e) in self.edges.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{} -{}-> {}", e.src, e.role, e.tgt)?;
            }
            f.write_char(';')?;
        }
        f.write_str(" }\n")?;
        writeln!(f, "  rhs {{ {} }}", actions_to_string(&self.rhs))?;
        f.write_str("}\n")
    }
}
