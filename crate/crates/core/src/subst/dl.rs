//! Substitution elimination for concepts.
//!
//! Role constructors are handled uniformly from the post-action relation
//! (see [`super::relation`]): the current point and its neighbour are split
//! on their identity with the action arguments, the pinned cases become
//! nominal tests, and the remaining neighbours are counted through
//! existential or counting restrictions over the pre-action roles. Merge
//! of `i` into itself is resolved by an explicit case split whenever the
//! two arguments are different parameters that may denote the same node.

use std::collections::HashMap;

use super::relation::{contradictory, decide, pivots, post_relation, Lit, PairTerm, Pos};
use super::{check_action, may_alias, EliminationTrace, SubstError, TraceStep};
use crate::graph::{ElementaryAction, NodeId};
use crate::logic::concept::{
    fold_and, fold_and_all, fold_exists, fold_lt, fold_not, fold_or, fold_or_all,
};
use crate::logic::{Concept, Role};

/// Eliminates every pending substitution of `c`.
pub fn eliminate_dl(c: &Concept) -> Result<Concept, SubstError> {
    Eliminator { trace: None, memo: HashMap::new() }.elim(c)
}

/// As [`eliminate_dl`], also returning the rule applications performed.
pub fn eliminate_dl_traced(c: &Concept) -> Result<(Concept, EliminationTrace<Concept>), SubstError> {
    let mut e = Eliminator { trace: Some(Vec::new()), memo: HashMap::new() };
    let out = e.elim(c)?;
    Ok((out, EliminationTrace { steps: e.trace.unwrap_or_default() }))
}

struct Eliminator {
    trace: Option<Vec<TraceStep<Concept>>>,
    /// Results of pushing the current action into shared subconcepts,
    /// keyed by address; cleared before each action.
    memo: HashMap<*const Concept, Concept>,
}

fn nom(n: &NodeId) -> Concept {
    Concept::Nominal(n.clone())
}

fn some_u(c: Concept) -> Concept {
    fold_exists(Role::Universal, c)
}

fn lits_concept(lits: &[Lit]) -> Concept {
    fold_and_all(lits.iter().map(|l| if l.eq { nom(&l.node) } else { fold_not(nom(&l.node)) }))
}

fn first_eq(lits: &[Lit]) -> Option<NodeId> {
    lits.iter().find(|l| l.eq).map(|l| l.node.clone())
}

/// Position relative to the point where the concept is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Loc {
    Cur,
    Oth,
    Node(NodeId),
}

/// Term seen from the current point: literals on the current point, on the
/// neighbour, and the atom over [`Loc`]s.
struct Oriented {
    here: Vec<Lit>,
    there: Vec<Lit>,
    atom: Option<(Loc, Loc)>,
}

fn orient(t: &PairTerm, cur_is_src: bool) -> Oriented {
    let map = |p: &Pos| match (p, cur_is_src) {
        (Pos::Src, true) | (Pos::Tgt, false) => Loc::Cur,
        (Pos::Src, false) | (Pos::Tgt, true) => Loc::Oth,
        (Pos::Node(n), _) => Loc::Node(n.clone()),
    };
    let (here, there) = if cur_is_src { (&t.src, &t.tgt) } else { (&t.tgt, &t.src) };
    Oriented {
        here: here.clone(),
        there: there.clone(),
        atom: t.atom.as_ref().map(|(p, q)| (map(p), map(q))),
    }
}

/// Role atom `r(p,q)` over the current point and named nodes only.
fn ground(r: &str, p: &Loc, q: &Loc, pin: Option<&NodeId>) -> Concept {
    let fwd = Role::basic(r);
    match (p, q) {
        (Loc::Cur, Loc::Cur) => Concept::ExistsSelf(fwd),
        (Loc::Cur, Loc::Node(m)) => Concept::exists(fwd, nom(m)),
        (Loc::Node(n), Loc::Cur) => match pin {
            Some(c) => some_u(fold_and(nom(n), Concept::exists(fwd, nom(c)))),
            None => Concept::exists(Role::inverse(r), nom(n)),
        },
        (Loc::Node(n), Loc::Node(m)) if n == m => {
            some_u(fold_and(nom(n), Concept::ExistsSelf(fwd)))
        }
        (Loc::Node(n), Loc::Node(m)) => some_u(fold_and(nom(n), Concept::exists(fwd, nom(m)))),
        _ => unreachable!("ground atom mentions the neighbour"),
    }
}

fn subst_loc(l: &Loc, from: &Loc, to: &Loc) -> Loc {
    if l == from {
        to.clone()
    } else {
        l.clone()
    }
}

/// Sets of neighbours not pinned to an action argument.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Region {
    FwdCur,
    BwdCur,
    Fwd(NodeId),
    Bwd(NodeId),
    Loops,
    All,
}

enum Item {
    Ind(Concept),
    Set(Region, Concept),
}

struct Counter<'a> {
    role: &'a str,
    pin: Option<&'a NodeId>,
}

impl Counter<'_> {
    fn at(&self, n: &NodeId, c: Concept) -> Concept {
        if self.pin == Some(n) {
            c
        } else {
            some_u(fold_and(nom(n), c))
        }
    }

    /// `|region ∩ ψ| < k` at the current point.
    fn lt(&self, s: &Region, k: i64, psi: &Concept) -> Concept {
        if k <= 0 {
            return Concept::bot();
        }
        let k = k as u32;
        let (fwd, bwd) = (Role::basic(self.role), Role::inverse(self.role));
        match s {
            Region::FwdCur => fold_lt(k, fwd, psi.clone()),
            Region::BwdCur => fold_lt(k, bwd, psi.clone()),
            Region::Fwd(n) => self.at(n, fold_lt(k, fwd, psi.clone())),
            Region::Bwd(n) => self.at(n, fold_lt(k, bwd, psi.clone())),
            Region::All => fold_lt(k, Role::Universal, psi.clone()),
            Region::Loops => fold_lt(
                k,
                Role::Universal,
                fold_and(psi.clone(), Concept::ExistsSelf(fwd)),
            ),
        }
    }

    /// Concept true at a neighbour outside `s`.
    fn outside(&self, s: &Region) -> Result<Concept, SubstError> {
        let (fwd, bwd) = (Role::basic(self.role), Role::inverse(self.role));
        let anchor = |n: Option<&NodeId>| {
            n.cloned().ok_or_else(|| {
                SubstError::Malformed("neighbour set of an unpinned point cannot be excluded".into())
            })
        };
        Ok(match s {
            Region::FwdCur => fold_not(Concept::exists(bwd, nom(&anchor(self.pin)?))),
            Region::BwdCur => fold_not(Concept::exists(fwd, nom(&anchor(self.pin)?))),
            Region::Fwd(n) => fold_not(Concept::exists(bwd, nom(n))),
            Region::Bwd(n) => fold_not(Concept::exists(fwd, nom(n))),
            Region::Loops => fold_not(Concept::ExistsSelf(fwd)),
            Region::All => Concept::bot(),
        })
    }

    /// `Σ items < n`.
    fn less(&self, items: &[Item], n: i64) -> Concept {
        if n <= 0 {
            return Concept::bot();
        }
        match items.split_first() {
            None => Concept::Top,
            Some((Item::Ind(b), rest)) => fold_or(
                fold_and(b.clone(), self.less(rest, n - 1)),
                fold_and(fold_not(b.clone()), self.less(rest, n)),
            ),
            Some((Item::Set(s, psi), [])) => self.lt(s, n, psi),
            Some((Item::Set(s, psi), rest)) => fold_or_all(
                (1..=n).map(|k| fold_and(self.lt(s, k, psi), self.less(rest, n - k + 1))),
            ),
        }
    }
}

impl Eliminator {
    fn note(&mut self, rule: &str, body: &Concept, a: &ElementaryAction, out: &Concept, complete: bool) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceStep {
                rule: rule.to_string(),
                before: Concept::subst(body.clone(), a.clone()),
                after: out.clone(),
                complete,
            });
        }
    }

    fn elim(&mut self, c: &Concept) -> Result<Concept, SubstError> {
        use Concept::*;
        Ok(match c {
            Top | Atomic(_) | Nominal(_) | Active | ExistsSelf(_) => c.clone(),
            Not(d) => Concept::not(self.elim(d)?),
            Or(a, b) => {
                let a = self.elim(a)?;
                Concept::or(a, self.elim(b)?)
            }
            Exists(r, d) => Concept::exists(r.clone(), self.elim(d)?),
            Lt(n, r, d) => Concept::lt(*n, r.clone(), self.elim(d)?),
            Subst(d, a) => {
                check_action(a)?;
                let body = self.elim(d)?;
                let out = match may_alias(a, true) {
                    Some((i, j)) => {
                        let same = some_u(fold_and(nom(i), nom(j)));
                        let collapsed =
                            a.map_nodes(&|n: &NodeId| if n == j { i.clone() } else { n.clone() });
                        let when_same = self.push_action(&body, &collapsed)?;
                        let when_distinct = self.push_action(&body, a)?;
                        fold_or(
                            fold_and(same.clone(), when_same),
                            fold_and(fold_not(same), when_distinct),
                        )
                    }
                    None => self.push_action(&body, a)?,
                };
                self.note("eliminate", &body, a, &out, true);
                out
            }
        })
    }

    fn push_action(&mut self, c: &Concept, a: &ElementaryAction) -> Result<Concept, SubstError> {
        self.memo.clear();
        let out = self.push(c, a);
        self.memo.clear();
        out
    }

    /// `c[a]` for substitution-free `c`.
    fn push(&mut self, c: &Concept, a: &ElementaryAction) -> Result<Concept, SubstError> {
        let key = c as *const Concept;
        if let Some(out) = self.memo.get(&key) {
            return Ok(out.clone());
        }
        let out = self.push_step(c, a)?;
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn push_step(&mut self, c: &Concept, a: &ElementaryAction) -> Result<Concept, SubstError> {
        use Concept::*;
        use ElementaryAction as A;
        let (rule, out) = match c {
            Top => ("top", Top),
            Nominal(_) => ("nominal", c.clone()),
            Atomic(x) => {
                let out = match a {
                    A::AddConcept(i, y) if y == x => fold_or(c.clone(), nom(i)),
                    A::DelConcept(i, y) if y == x => fold_and(c.clone(), fold_not(nom(i))),
                    A::DelNode(i) => fold_and(c.clone(), fold_not(nom(i))),
                    A::Merge(i, j) if i != j => fold_and(
                        fold_not(nom(j)),
                        fold_or(c.clone(), fold_and(nom(i), some_u(fold_and(nom(j), c.clone())))),
                    ),
                    A::Clone(i, j, _) => {
                        fold_or(c.clone(), fold_and(nom(j), some_u(fold_and(nom(i), c.clone()))))
                    }
                    _ => c.clone(),
                };
                ("atomic", out)
            }
            Active => {
                let out = match a {
                    A::AddNode(i) => fold_or(Active, nom(i)),
                    A::DelNode(i) => fold_and(Active, fold_not(nom(i))),
                    A::Merge(i, j) if i != j => fold_and(Active, fold_not(nom(j))),
                    A::Clone(_, j, _) => fold_or(Active, nom(j)),
                    _ => Active,
                };
                ("active", out)
            }
            Not(d) => ("not", fold_not(self.push(d, a)?)),
            Or(x, y) => {
                let x = self.push(x, a)?;
                ("or", fold_or(x, self.push(y, a)?))
            }
            Exists(Role::Universal, d) => ("exists-U", fold_exists(Role::Universal, self.push(d, a)?)),
            Lt(n, Role::Universal, d) => ("count-U", fold_lt(*n, Role::Universal, self.push(d, a)?)),
            ExistsSelf(Role::Universal) => ("self-U", c.clone()),
            ExistsSelf(r) => {
                let base = r.base().expect("non-universal role");
                let out = match post_relation(base, a) {
                    None => c.clone(),
                    Some(terms) => self_terms(base, &terms),
                };
                ("self", out)
            }
            Exists(r, d) => {
                let inner = self.push(d, a)?;
                let base = r.base().expect("non-universal role");
                let out = match post_relation(base, a) {
                    None => fold_exists(r.clone(), inner),
                    Some(terms) => exists_terms(base, matches!(r, Role::Basic(_)), &terms, &inner),
                };
                ("exists", out)
            }
            Lt(n, r, d) => {
                let inner = self.push(d, a)?;
                let base = r.base().expect("non-universal role");
                let out = match post_relation(base, a) {
                    None => fold_lt(*n, r.clone(), inner),
                    Some(terms) => lt_terms(
                        *n,
                        base,
                        matches!(r, Role::Basic(_)),
                        &terms,
                        &inner,
                        &pivots(a),
                    )?,
                };
                ("count", out)
            }
            Subst(..) => {
                return Err(SubstError::Malformed("nested substitution reached a rule".into()))
            }
        };
        if self.trace.is_some() {
            self.note(&format!("{rule}/{}", a.kind()), c, a, &out, false);
        }
        Ok(out)
    }
}

/// `∃R.inner` after the action, where the post-action `R` is given by `terms`.
fn exists_terms(r: &str, cur_is_src: bool, terms: &[PairTerm], inner: &Concept) -> Concept {
    let mut disjuncts = Vec::new();
    for t in terms {
        let o = orient(t, cur_is_src);
        if contradictory(&o.here) || contradictory(&o.there) {
            continue;
        }
        let here = lits_concept(&o.here);
        let psi = fold_and(lits_concept(&o.there), inner.clone());
        let pin = first_eq(&o.here);
        let body = match &o.atom {
            None => some_u(psi),
            Some((Loc::Cur, Loc::Oth)) => fold_exists(Role::basic(r), psi),
            Some((Loc::Oth, Loc::Cur)) => fold_exists(Role::inverse(r), psi),
            Some((Loc::Oth, Loc::Oth)) => some_u(fold_and(psi, Concept::ExistsSelf(Role::basic(r)))),
            Some((Loc::Oth, Loc::Node(n))) => {
                some_u(fold_and(psi, Concept::exists(Role::basic(r), nom(n))))
            }
            Some((Loc::Node(n), Loc::Oth)) => {
                some_u(fold_and(nom(n), fold_exists(Role::basic(r), psi)))
            }
            Some((p, q)) => fold_and(ground(r, p, q, pin.as_ref()), some_u(psi)),
        };
        disjuncts.push(fold_and(here, body));
    }
    fold_or_all(disjuncts)
}

/// `∃R.Self` after the action.
fn self_terms(r: &str, terms: &[PairTerm]) -> Concept {
    let mut disjuncts = Vec::new();
    for t in terms {
        let lits: Vec<Lit> = t.src.iter().chain(t.tgt.iter()).cloned().collect();
        if contradictory(&lits) {
            continue;
        }
        let pin = first_eq(&lits);
        let cur = |p: &Pos| match p {
            Pos::Node(n) => Loc::Node(n.clone()),
            _ => Loc::Cur,
        };
        let atom = match &t.atom {
            None => Concept::Top,
            Some((p, q)) => ground(r, &cur(p), &cur(q), pin.as_ref()),
        };
        disjuncts.push(fold_and(lits_concept(&lits), atom));
    }
    fold_or_all(disjuncts)
}

/// `(< n R inner)` after the action.
fn lt_terms(
    n: u32,
    r: &str,
    cur_is_src: bool,
    terms: &[PairTerm],
    inner: &Concept,
    pivots: &[NodeId],
) -> Result<Concept, SubstError> {
    let oriented: Vec<Oriented> = terms
        .iter()
        .map(|t| orient(t, cur_is_src))
        .filter(|o| !contradictory(&o.here) && !contradictory(&o.there))
        .collect();
    let outside_pivots =
        fold_and_all(pivots.iter().map(|k| fold_not(nom(k))));
    let mut cases = Vec::new();
    let pins: Vec<Option<&NodeId>> = pivots.iter().map(Some).chain([None]).collect();
    for pin in pins {
        let guard = match pin {
            Some(c) => nom(c),
            None => outside_pivots.clone(),
        };
        let kept: Vec<&Oriented> =
            oriented.iter().filter(|o| decide(&o.here, pin).is_some()).collect();
        let counter = Counter { role: r, pin };
        let mut items = Vec::new();
        for d in pivots {
            let member = fold_or_all(kept.iter().filter(|o| decide(&o.there, Some(d)).is_some()).map(
                |o| match &o.atom {
                    None => Concept::Top,
                    Some((p, q)) => {
                        let to = Loc::Node(d.clone());
                        ground(r, &subst_loc(p, &Loc::Oth, &to), &subst_loc(q, &Loc::Oth, &to), pin)
                    }
                },
            ));
            if !member.is_bot() {
                items.push(Item::Ind(fold_and(member, some_u(fold_and(nom(d), inner.clone())))));
            }
        }
        let mut regions: Vec<(Option<Concept>, Region)> = Vec::new();
        for o in kept.iter().filter(|o| decide(&o.there, None).is_some()) {
            let entry = match &o.atom {
                None => (None, Region::All),
                Some((Loc::Cur, Loc::Oth)) => (None, Region::FwdCur),
                Some((Loc::Oth, Loc::Cur)) => (None, Region::BwdCur),
                Some((Loc::Node(m), Loc::Oth)) => (None, Region::Fwd(m.clone())),
                Some((Loc::Oth, Loc::Node(m))) => (None, Region::Bwd(m.clone())),
                Some((Loc::Oth, Loc::Oth)) => (None, Region::Loops),
                Some((p, q)) => (Some(ground(r, p, q, pin)), Region::All),
            };
            if !regions.contains(&entry) {
                regions.push(entry);
            }
        }
        let base = fold_and(inner.clone(), outside_pivots.clone());
        let count = count_with_gates(&counter, items, &regions, &base, n as i64)?;
        cases.push(fold_and(guard, count));
    }
    Ok(fold_or_all(cases))
}

/// Splits on the gate of the first gated region, then counts.
fn count_with_gates(
    counter: &Counter,
    items: Vec<Item>,
    regions: &[(Option<Concept>, Region)],
    base: &Concept,
    n: i64,
) -> Result<Concept, SubstError> {
    if let Some(k) = regions.iter().position(|(g, _)| g.is_some()) {
        let gate = regions[k].0.clone().expect("gated");
        let mut with: Vec<(Option<Concept>, Region)> = regions.to_vec();
        with[k].0 = None;
        let mut without = regions.to_vec();
        without.remove(k);
        let items_again: Vec<Item> = items
            .iter()
            .map(|i| match i {
                Item::Ind(c) => Item::Ind(c.clone()),
                Item::Set(s, p) => Item::Set(s.clone(), p.clone()),
            })
            .collect();
        return Ok(fold_or(
            fold_and(gate.clone(), count_with_gates(counter, items, &with, base, n)?),
            fold_and(fold_not(gate), count_with_gates(counter, items_again, &without, base, n)?),
        ));
    }
    let mut items = items;
    let mut excluded = base.clone();
    for (k, (_, s)) in regions.iter().enumerate() {
        items.push(Item::Set(s.clone(), excluded.clone()));
        if k + 1 < regions.len() {
            excluded = fold_and(excluded, counter.outside(s)?);
        }
    }
    Ok(counter.less(&items, n))
}
