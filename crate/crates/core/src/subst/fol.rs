//! Substitution elimination for first-order formulas.

use super::{check_action, may_alias, EliminationTrace, SubstError, TraceStep};
use crate::graph::{ElementaryAction, NodeId};
use crate::logic::fol::{fold_and, fold_not, fold_or};
use crate::logic::{Fol, Term};

/// Eliminates every pending substitution of `f`.
pub fn eliminate_fol(f: &Fol) -> Result<Fol, SubstError> {
    Eliminator { trace: None }.elim(f)
}

pub fn eliminate_fol_traced(f: &Fol) -> Result<(Fol, EliminationTrace<Fol>), SubstError> {
    let mut e = Eliminator { trace: Some(Vec::new()) };
    let out = e.elim(f)?;
    Ok((out, EliminationTrace { steps: e.trace.unwrap_or_default() }))
}

struct Eliminator {
    trace: Option<Vec<TraceStep<Fol>>>,
}

fn c(n: &NodeId) -> Term {
    Term::Const(n.clone())
}

fn eq(a: &Term, b: &Term) -> Fol {
    if a == b {
        Fol::Top
    } else {
        Fol::eq(a.clone(), b.clone())
    }
}

fn ne(a: &Term, b: &Term) -> Fol {
    fold_not(eq(a, b))
}

fn and_all(items: impl IntoIterator<Item = Fol>) -> Fol {
    items.into_iter().fold(Fol::Top, fold_and)
}

fn or_all(items: impl IntoIterator<Item = Fol>) -> Fol {
    items.into_iter().fold(Fol::bot(), fold_or)
}

impl Eliminator {
    fn note(&mut self, rule: &str, body: &Fol, a: &ElementaryAction, out: &Fol, complete: bool) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceStep {
                rule: rule.to_string(),
                before: Fol::subst(body.clone(), a.clone()),
                after: out.clone(),
                complete,
            });
        }
    }

    fn elim(&mut self, f: &Fol) -> Result<Fol, SubstError> {
        use Fol::*;
        Ok(match f {
            Top | Concept(..) | Role(..) | Active(_) | Eq(..) => f.clone(),
            Not(g) => Fol::not(self.elim(g)?),
            Or(a, b) => {
                let a = self.elim(a)?;
                Fol::or(a, self.elim(b)?)
            }
            Exists(x, g) => Fol::exists(x, self.elim(g)?),
            Subst(g, a) => {
                check_action(a)?;
                let body = self.elim(g)?;
                let out = match may_alias(a, false) {
                    // Only merge needs the split: with equal arguments it is
                    // the identity, which the distinct-node rules do not cover.
                    Some((i, j)) => {
                        let same = Fol::eq(c(i), c(j));
                        let distinct = self.push(&body, a)?;
                        fold_or(fold_and(same.clone(), body.clone()), fold_and(fold_not(same), distinct))
                    }
                    None => self.push(&body, a)?,
                };
                self.note("eliminate", &body, a, &out, true);
                out
            }
        })
    }

    fn push(&mut self, f: &Fol, a: &ElementaryAction) -> Result<Fol, SubstError> {
        use ElementaryAction as A;
        use Fol::*;
        let (rule, out) = match f {
            Top => ("top", Top),
            Eq(..) => ("eq", f.clone()),
            Not(g) => ("not", fold_not(self.push(g, a)?)),
            Or(x, y) => {
                let x = self.push(x, a)?;
                ("or", fold_or(x, self.push(y, a)?))
            }
            Exists(x, g) => ("exists", Fol::exists(x, self.push(g, a)?)),
            Active(t) => {
                let out = match a {
                    A::AddNode(i) => fold_or(f.clone(), eq(&c(i), t)),
                    A::DelNode(i) => fold_and(f.clone(), ne(&c(i), t)),
                    A::Clone(_, j, _) => fold_or(f.clone(), eq(t, &c(j))),
                    A::Merge(i, j) if i != j => fold_and(f.clone(), ne(t, &c(j))),
                    _ => f.clone(),
                };
                ("active", out)
            }
            Concept(name, t) => {
                let out = match a {
                    A::AddConcept(i, d) if d == name => fold_or(f.clone(), eq(&c(i), t)),
                    A::DelConcept(i, d) if d == name => fold_and(f.clone(), ne(&c(i), t)),
                    A::DelNode(i) => fold_and(f.clone(), ne(&c(i), t)),
                    A::Clone(i, j, _) => fold_or(
                        f.clone(),
                        fold_and(eq(t, &c(j)), Fol::concept(name, c(i))),
                    ),
                    A::Merge(i, j) if i != j => fold_and(
                        ne(t, &c(j)),
                        fold_or(f.clone(), fold_and(eq(t, &c(i)), Fol::concept(name, c(j)))),
                    ),
                    _ => f.clone(),
                };
                ("concept", out)
            }
            Role(r, x, y) => ("role", role_rule(r, x, y, a)),
            Subst(..) => {
                return Err(SubstError::Malformed("nested substitution reached a rule".into()))
            }
        };
        if self.trace.is_some() {
            self.note(&format!("{rule}/{}", a.kind()), f, a, &out, false);
        }
        Ok(out)
    }
}

fn role_rule(r: &str, x: &Term, y: &Term, a: &ElementaryAction) -> Fol {
    use ElementaryAction as A;
    let atom = |s: &Term, t: &Term| Fol::role(r, s.clone(), t.clone());
    let here = atom(x, y);
    match a {
        A::DelNode(i) => and_all([here, ne(&c(i), x), ne(&c(i), y)]),
        A::AddEdge { src, tgt, role, .. } if role == r => {
            fold_or(here, fold_and(eq(&c(src), x), eq(&c(tgt), y)))
        }
        A::DelEdge { src, tgt, role } if role == r => {
            fold_and(here, fold_or(ne(&c(src), x), ne(&c(tgt), y)))
        }
        A::Redirect(i, j) => fold_or(
            fold_and(here, ne(&c(i), y)),
            fold_and(atom(x, &c(i)), eq(&c(j), y)),
        ),
        A::Merge(i, j) if i != j => {
            let (i, j) = (c(i), c(j));
            and_all([
                ne(x, &j),
                ne(y, &j),
                or_all([
                    here,
                    fold_and(atom(x, &j), eq(y, &i)),
                    fold_and(atom(&j, y), eq(x, &i)),
                    and_all([eq(x, &i), eq(y, &i), atom(&j, &j)]),
                ]),
            ])
        }
        A::Clone(i, j, p) => {
            let (ci, cj) = (c(i), c(j));
            let has = |set: &std::collections::BTreeSet<String>| set.contains(r);
            let mut parts = vec![here];
            if has(&p.r_in) {
                parts.push(and_all([atom(x, &ci), eq(y, &cj), ne(x, &ci)]));
            }
            if has(&p.r_out) {
                parts.push(and_all([atom(&ci, y), eq(x, &cj), ne(y, &ci)]));
            }
            if has(&p.r_l_in) {
                parts.push(and_all([atom(&ci, &ci), eq(x, &ci), eq(y, &cj)]));
            }
            if has(&p.r_l_out) {
                parts.push(and_all([atom(&ci, &ci), eq(x, &cj), eq(y, &ci)]));
            }
            if has(&p.r_l_l) {
                parts.push(and_all([atom(&ci, &ci), eq(x, &cj), eq(y, &cj)]));
            }
            or_all(parts)
        }
        _ => here,
    }
}
