//! Weakest preconditions, verification conditions and correctness formulas
//! of specifications `{Pre} (R, s) {Post}`, with two ways of looking for
//! counterexamples: a bounded search over all small graphs, and execution
//! of the strategy on sampled graphs.
//!
//! User formulas (`Pre`, `Post`, invariants) read the universal role as
//! ranging over the graph's nodes. Before entering the calculus they are
//! closed: relativized to `Active` and, for concepts, globalized, so that
//! they denote the same truth value at every node of the universe. Rule
//! matches enter through parameter nominals `?{name}_{k}`, one family per
//! rule occurrence in the strategy, read universally.

pub mod enumerate;
mod specfile;
pub mod symbolic;

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::graph::{Alphabet, ElementaryAction, LDGraph, NodeId};
use crate::logic::{
    concept::fold_and,
    eval_concept_with, eval_fol_with, Concept, Fol, Formula, LogicError, LogicKind, Valuation,
};
use crate::rewrite::{
    app_formula_alcu, app_formula_fol, instantiate, match_condition_dl, match_condition_fol, ParamNames, Rule,
    RuleError,
};
use crate::strategy::{derivations, Limits, Outcome, RuleSet, Strategy, StrategyError};
use crate::subst::{eliminate_dl, eliminate_fol, SubstError};
use symbolic::{Bit, Encoder};

pub use specfile::{parse_spec, SpecFileError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("closure `{0}` has no invariant")]
    MissingInvariant(String),
    #[error("applicability of rule `{rule}` is not expressible here: {reason}")]
    InexpressibleApp { rule: String, reason: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("formula is not a {0:?} formula")]
    KindMismatch(LogicKind),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("enumeration budget of {0} graphs exceeded")]
    BudgetExceeded(u64),
}

/// `{pre} (rules, strategy) {post}`.
#[derive(Clone, Debug)]
pub struct Spec {
    pub pre: Formula,
    pub post: Formula,
    pub rules: RuleSet,
    pub strategy: Strategy,
    pub logic: LogicKind,
    /// Names for bounded search; defaults to those the spec mentions.
    pub alphabet: Option<Alphabet>,
    pub bound_nodes: usize,
}

impl Spec {
    /// Concept and role names of the formulas and rules.
    pub fn mentioned_alphabet(&self) -> Alphabet {
        let mut concepts = BTreeSet::new();
        let mut roles = BTreeSet::new();
        let mut add = |f: &Formula| match f {
            Formula::Dl(c) => {
                concepts.extend(c.concept_names());
                roles.extend(c.role_names());
            }
            Formula::Fol(g) => {
                concepts.extend(g.concept_names());
                roles.extend(g.role_names());
            }
        };
        add(&self.pre);
        add(&self.post);
        strategy_invariants(&self.strategy, &mut |f| add(f));
        for r in self.rules.values() {
            for n in &r.nodes {
                for l in &n.labels {
                    add(&Formula::Dl(l.clone()));
                }
            }
        }
        for r in self.rules.values() {
            roles.extend(r.edges.iter().map(|e| e.role.clone()));
            for a in &r.rhs {
                action_names(a, &mut concepts, &mut roles);
            }
        }
        Alphabet { concepts, roles }
    }

    pub fn alphabet(&self) -> Alphabet {
        let mut a = self.mentioned_alphabet();
        if let Some(given) = &self.alphabet {
            a.concepts.extend(given.concepts.iter().cloned());
            a.roles.extend(given.roles.iter().cloned());
        }
        a
    }

    /// Reserved nodes needed so that every rule occurrence in the strategy
    /// finds its fresh nodes.
    pub fn reserved_needed(&self) -> usize {
        fn count(s: &Strategy, rules: &RuleSet) -> usize {
            match s {
                Strategy::Empty => 0,
                Strategy::Rule(r) | Strategy::Try(r) | Strategy::Must(r) => {
                    rules.get(r).map_or(0, |r| r.fresh_names().len())
                }
                Strategy::Seq(a, b) | Strategy::Choice(a, b) => count(a, rules) + count(b, rules),
                Strategy::Closure(a, _) => count(a, rules),
            }
        }
        count(&self.strategy, &self.rules)
    }
}

fn action_names(a: &ElementaryAction, concepts: &mut BTreeSet<String>, roles: &mut BTreeSet<String>) {
    use ElementaryAction::*;
    match a {
        AddConcept(_, c) | DelConcept(_, c) => {
            concepts.insert(c.clone());
        }
        AddEdge { role, .. } | DelEdge { role, .. } => {
            roles.insert(role.clone());
        }
        Clone(_, _, p) => {
            for s in p.sets() {
                roles.extend(s.iter().cloned());
            }
        }
        _ => {}
    }
}

fn strategy_invariants(s: &Strategy, f: &mut impl FnMut(&Formula)) {
    match s {
        Strategy::Seq(a, b) | Strategy::Choice(a, b) => {
            strategy_invariants(a, f);
            strategy_invariants(b, f);
        }
        Strategy::Closure(a, inv) => {
            if let Some(i) = inv {
                f(i);
            }
            strategy_invariants(a, f);
        }
        _ => {}
    }
}

// ----- formula plumbing shared by both logics -----

fn same_kind(a: Formula, b: Formula, dl: impl Fn(Concept, Concept) -> Concept, fol: impl Fn(Fol, Fol) -> Fol) -> Formula {
    match (a, b) {
        (Formula::Dl(a), Formula::Dl(b)) => Formula::Dl(dl(a, b)),
        (Formula::Fol(a), Formula::Fol(b)) => Formula::Fol(fol(a, b)),
        (a, b) => panic!("mixed logics: {a:?} and {b:?}"),
    }
}

pub fn f_and(a: Formula, b: Formula) -> Formula {
    same_kind(a, b, Concept::and, Fol::and)
}

pub fn f_implies(a: Formula, b: Formula) -> Formula {
    same_kind(a, b, Concept::implies, Fol::implies)
}

pub fn f_or(a: Formula, b: Formula) -> Formula {
    same_kind(a, b, Concept::or, Fol::or)
}

pub fn f_not(a: Formula) -> Formula {
    match a {
        Formula::Dl(c) => Formula::Dl(Concept::not(c)),
        Formula::Fol(f) => Formula::Fol(Fol::not(f)),
    }
}

pub fn f_top(kind: LogicKind) -> Formula {
    match kind {
        LogicKind::Dl => Formula::Dl(Concept::Top),
        LogicKind::Fol => Formula::Fol(Fol::Top),
    }
}

pub fn f_subst(q: Formula, a: ElementaryAction) -> Formula {
    match q {
        Formula::Dl(c) => Formula::Dl(Concept::subst(c, a)),
        Formula::Fol(f) => Formula::Fol(Fol::subst(f, a)),
    }
}

pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Dl(c) => Formula::Dl(c.simplify()),
        Formula::Fol(g) => Formula::Fol(g.simplify()),
    }
}

pub fn eliminate(f: &Formula) -> Result<Formula, SubstError> {
    Ok(match f {
        Formula::Dl(c) => Formula::Dl(eliminate_dl(c)?),
        Formula::Fol(g) => Formula::Fol(eliminate_fol(g)?),
    })
}

/// Closed form of a user formula: a sentence over active nodes, for
/// concepts taking the same value at every node.
pub fn close(f: &Formula) -> Formula {
    match f {
        // `bot` stays false even on graphs without active nodes.
        Formula::Dl(c) if c.is_bot() => Formula::Dl(c.clone()),
        Formula::Dl(c) => Formula::Dl(Concept::globalize(c.relativize())),
        Formula::Fol(g) => Formula::Fol(g.relativize_active()),
    }
}

fn check_kind(f: &Formula, kind: LogicKind) -> Result<(), VerifyError> {
    if f.kind() == kind {
        Ok(())
    } else {
        Err(VerifyError::KindMismatch(kind))
    }
}

// ----- the calculus -----

/// `wp(a1;...;an, Q) = Q[an]...[a1]`; substitutions are left pending.
pub fn wp_action(alpha: &[ElementaryAction], q: &Formula) -> Formula {
    alpha.iter().rev().fold(q.clone(), |acc, a| f_subst(acc, a.clone()))
}

/// Rule occurrences of `s` (plain, tried and mandatory), left to right.
pub fn occurrences(s: &Strategy) -> usize {
    match s {
        Strategy::Empty => 0,
        Strategy::Rule(_) | Strategy::Try(_) | Strategy::Must(_) => 1,
        Strategy::Seq(a, b) | Strategy::Choice(a, b) => occurrences(a) + occurrences(b),
        Strategy::Closure(a, _) => occurrences(a),
    }
}

/// Weakest preconditions, verification conditions and applicability for
/// one rule set and logic.
pub struct Calculus<'a> {
    pub rules: &'a RuleSet,
    pub kind: LogicKind,
}

impl<'a> Calculus<'a> {
    pub fn new(rules: &'a RuleSet, kind: LogicKind) -> Self {
        Calculus { rules, kind }
    }

    fn rule(&self, name: &str) -> Result<&'a Rule, VerifyError> {
        self.rules.get(name).ok_or_else(|| VerifyError::UnknownRule(name.to_string()))
    }

    /// Closed applicability condition of a rule.
    pub fn app_rule(&self, name: &str) -> Result<Formula, VerifyError> {
        let rule = self.rule(name)?;
        let inexpressible = |e: RuleError| VerifyError::InexpressibleApp { rule: name.to_string(), reason: e.to_string() };
        Ok(match self.kind {
            LogicKind::Dl if rule.nodes.is_empty() => Formula::Dl(Concept::Top),
            LogicKind::Dl => Formula::Dl(app_formula_alcu(rule).map_err(inexpressible)?.relativize()),
            LogicKind::Fol => Formula::Fol(app_formula_fol(rule).map_err(inexpressible)?),
        })
    }

    /// `App(s)`.
    pub fn app(&self, s: &Strategy) -> Result<Formula, VerifyError> {
        Ok(match s {
            Strategy::Empty | Strategy::Try(_) | Strategy::Closure(..) => f_top(self.kind),
            Strategy::Rule(r) | Strategy::Must(r) => self.app_rule(r)?,
            Strategy::Seq(a, _) => self.app(a)?,
            Strategy::Choice(a, b) => f_or(self.app(a)?, self.app(b)?),
        })
    }

    /// `wp(α_ρ, Q)` for the occurrence numbered `occ`: the parameters
    /// describe a match (and fresh nodes) implies `Q` after the
    /// instantiated right-hand side.
    pub fn wp_rule_action(&self, name: &str, occ: usize, q: &Formula) -> Result<Formula, VerifyError> {
        let rule = self.rule(name)?;
        let names = ParamNames::for_rule(rule, occ);
        let bound = match self.kind {
            LogicKind::Dl => Formula::Dl(match_condition_dl(rule, &names)),
            LogicKind::Fol => Formula::Fol(match_condition_fol(rule, &names).map_err(|e| {
                VerifyError::InexpressibleApp { rule: name.to_string(), reason: e.to_string() }
            })?),
        };
        let alpha = instantiate(rule, &names.map);
        Ok(f_implies(bound, wp_action(&alpha, q)))
    }

    /// `wp(s, Q)` with the rule occurrences of `s` numbered from `first`.
    pub fn wp(&self, s: &Strategy, q: &Formula, first: usize) -> Result<Formula, VerifyError> {
        check_kind(q, self.kind)?;
        Ok(match s {
            Strategy::Empty => q.clone(),
            Strategy::Rule(r) => f_implies(self.app_rule(r)?, self.wp_rule_action(r, first, q)?),
            Strategy::Must(r) => f_and(self.app_rule(r)?, self.wp_rule_action(r, first, q)?),
            Strategy::Try(r) => {
                let app = self.app_rule(r)?;
                f_and(
                    f_implies(app.clone(), self.wp_rule_action(r, first, q)?),
                    f_implies(f_not(app), q.clone()),
                )
            }
            Strategy::Seq(a, b) => {
                let inner = self.wp(b, q, first + occurrences(a))?;
                self.wp(a, &inner, first)?
            }
            Strategy::Choice(a, b) => f_and(self.wp(a, q, first)?, self.wp(b, q, first + occurrences(a))?),
            Strategy::Closure(_, inv) => self.invariant(s, inv.as_ref())?,
        })
    }

    fn invariant(&self, s: &Strategy, inv: Option<&Formula>) -> Result<Formula, VerifyError> {
        let inv = inv.ok_or_else(|| VerifyError::MissingInvariant(s.to_string()))?;
        check_kind(inv, self.kind)?;
        Ok(close(inv))
    }

    /// `vc(s, Q)` with the rule occurrences of `s` numbered from `first`.
    pub fn vc(&self, s: &Strategy, q: &Formula, first: usize) -> Result<Formula, VerifyError> {
        check_kind(q, self.kind)?;
        Ok(match s {
            Strategy::Empty | Strategy::Rule(_) | Strategy::Must(_) | Strategy::Try(_) => f_top(self.kind),
            Strategy::Seq(a, b) => {
                let second = first + occurrences(a);
                let mid = self.wp(b, q, second)?;
                f_and(self.vc(a, &mid, first)?, self.vc(b, q, second)?)
            }
            Strategy::Choice(a, b) => f_and(self.vc(a, q, first)?, self.vc(b, q, first + occurrences(a))?),
            Strategy::Closure(body, inv) => {
                let inv = self.invariant(s, inv.as_ref())?;
                let app = self.app(body)?;
                f_and(
                    f_and(
                        self.vc(body, q, first)?,
                        f_implies(f_and(inv.clone(), app.clone()), self.wp(body, &inv, first)?),
                    ),
                    f_implies(f_and(inv, f_not(app)), q.clone()),
                )
            }
        })
    }
}

/// `wp(s, Q)` for a closed postcondition `q`.
pub fn wp_strategy(s: &Strategy, q: &Formula, rules: &RuleSet) -> Result<Formula, VerifyError> {
    Calculus::new(rules, q.kind()).wp(s, q, 0)
}

/// `vc(s, Q)` for a closed postcondition `q`.
pub fn vc_strategy(s: &Strategy, q: &Formula, rules: &RuleSet) -> Result<Formula, VerifyError> {
    Calculus::new(rules, q.kind()).vc(s, q, 0)
}

/// `Pre ⇒ wp(s, Post)` and `vc(s, Post)` over the closed pre- and
/// postconditions, substitutions pending.
pub fn correctness_parts(sp: &Spec) -> Result<(Formula, Formula), VerifyError> {
    check_kind(&sp.pre, sp.logic)?;
    check_kind(&sp.post, sp.logic)?;
    let calc = Calculus::new(&sp.rules, sp.logic);
    let post = close(&sp.post);
    let main = f_implies(close(&sp.pre), calc.wp(&sp.strategy, &post, 0)?);
    let vc = calc.vc(&sp.strategy, &post, 0)?;
    Ok((main, vc))
}

/// `(Pre ⇒ wp(s, Post)) ∧ vc(s, Post)` with the verification condition
/// constant-folded first, substitutions eliminated, and constants folded.
pub fn correctness_formula(sp: &Spec) -> Result<Formula, VerifyError> {
    let (main, vc) = correctness_parts(sp)?;
    let raw = match (main, simplify(&vc)) {
        (Formula::Dl(m), Formula::Dl(v)) => Formula::Dl(fold_and(m, v)),
        (Formula::Fol(m), Formula::Fol(v)) => Formula::Fol(crate::logic::fol::fold_and(m, v)),
        _ => return Err(VerifyError::KindMismatch(sp.logic)),
    };
    Ok(simplify(&eliminate(&raw)?))
}

// ----- checking -----

/// How a formula is read on a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    /// User level: quantifiers range over active nodes; a concept must hold
    /// at every active node.
    User,
    /// Closed formulas produced by the calculus: evaluated as they stand;
    /// a concept must hold at every node of the universe.
    Closed,
}

/// A graph and parameter binding on which a formula is false.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub graph: LDGraph,
    pub valuation: Valuation,
    pub formula_value: bool,
}

fn params_of(g: &LDGraph, f: &Formula) -> BTreeSet<NodeId> {
    let names = match f {
        Formula::Dl(c) => c.nominals(),
        Formula::Fol(h) => h.constants(),
    };
    names.into_iter().filter(|n| !g.contains(n)).collect()
}

fn prepared(f: &Formula, reading: Reading) -> Formula {
    match (reading, f) {
        (Reading::User, Formula::Dl(c)) => Formula::Dl(c.relativize()),
        (Reading::User, Formula::Fol(h)) => Formula::Fol(h.relativize_active()),
        (Reading::Closed, _) => f.clone(),
    }
}

/// Truth of a substitution-free formula on `g` under one binding.
pub fn holds_with(g: &LDGraph, f: &Formula, reading: Reading, val: &Valuation) -> Result<bool, LogicError> {
    Ok(match prepared(f, reading) {
        Formula::Dl(c) => {
            let ext = eval_concept_with(g, &c, val)?;
            match reading {
                Reading::User => g.active().iter().all(|n| ext.contains(n)),
                Reading::Closed => g.universe().iter().all(|n| ext.contains(n)),
            }
        }
        Formula::Fol(h) => eval_fol_with(g, &h, &Default::default(), val)?,
    })
}

/// Bit that is true when the prepared formula fails somewhere.
fn violation(enc: &mut Encoder, f: &Formula, reading: Reading) -> Result<Bit, LogicError> {
    Ok(match f {
        Formula::Dl(c) => {
            let bits = enc.concept(c)?;
            let mut acc = Bit::Const(false);
            for (x, b) in bits.into_iter().enumerate() {
                let scope = match reading {
                    Reading::User => enc.active()[x],
                    Reading::Closed => Bit::Const(true),
                };
                let nb = enc.not(b);
                let bad = enc.and(scope, nb);
                acc = enc.or(acc, bad);
            }
            acc
        }
        Formula::Fol(h) => {
            let b = enc.fol(h, &mut Vec::new())?;
            enc.not(b)
        }
    })
}

/// Binding of the formula's parameters under which it fails on `g`, if
/// any. Parameters are the names that are not nodes of `g`.
pub fn find_violation(g: &LDGraph, f: &Formula, reading: Reading) -> Result<Option<Valuation>, LogicError> {
    if params_of(g, f).is_empty() {
        return Ok((!holds_with(g, f, reading, &Valuation::new())?).then(Valuation::new));
    }
    let mut enc = Encoder::fixed(g);
    let bad = violation(&mut enc, &prepared(f, reading), reading)?;
    enc.assert(bad);
    Ok(enc.solve(&[]).map(|m| m.valuation))
}

/// `g ⊨ φ` for a user formula: for every binding of the parameters, every
/// active node satisfies the concept (resp. the sentence holds over active
/// nodes).
pub fn check_on_graph(g: &LDGraph, f: &Formula) -> Result<bool, LogicError> {
    Ok(find_violation(g, f, Reading::User)?.is_none())
}

/// `g ⊨ φ` for a closed formula such as a correctness formula.
pub fn check_closed(g: &LDGraph, f: &Formula) -> Result<bool, LogicError> {
    Ok(find_violation(g, f, Reading::Closed)?.is_none())
}

/// Size of the graph space searched by [`bounded_validity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_nodes: usize,
    /// Parallel edges with the same role are invisible to both logics, so
    /// only multiplicity one is searched; the value is recorded as given.
    pub max_parallel: usize,
    /// Reserved nodes available in every graph.
    pub reserved: usize,
}

impl Bounds {
    pub fn nodes(max_nodes: usize) -> Self {
        Bounds { max_nodes, max_parallel: 1, reserved: 0 }
    }
}

/// Looks for a graph with at most `max_nodes` active nodes over
/// `alphabet`, plus a parameter binding, on which `f` is false. The search
/// covers the whole space (it is a satisfiability query), so `None` means
/// no counterexample up to that size.
pub fn bounded_validity(
    f: &Formula,
    alphabet: &Alphabet,
    bounds: &Bounds,
    reading: Reading,
) -> Result<Option<Counterexample>, LogicError> {
    let mut enc = Encoder::free(alphabet, bounds.max_nodes, bounds.reserved);
    let bad = violation(&mut enc, &prepared(f, reading), reading)?;
    enc.assert(bad);
    Ok(enc.solve(&[]).map(|m| Counterexample { graph: m.graph, valuation: m.valuation, formula_value: false }))
}

/// Random graphs satisfying a closed formula, drawn from the same space.
///
/// The solver picks parameter values along with the graph, so with
/// parameters a candidate is kept only if the formula holds under every
/// binding; at most `20 * count` candidates are tried.
pub fn sample_models(
    f: &Formula,
    alphabet: &Alphabet,
    bounds: &Bounds,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<LDGraph>, LogicError> {
    let mut enc = Encoder::free(alphabet, bounds.max_nodes, bounds.reserved);
    let bad = violation(&mut enc, f, Reading::Closed)?;
    let good = enc.not(bad);
    enc.assert(good);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count.saturating_mul(20) {
        if out.len() == count {
            break;
        }
        let Some(m) = enc.solve_random(rng) else { break };
        if params_of(&m.graph, f).is_empty() || check_closed(&m.graph, f)? {
            out.push(m.graph);
        }
    }
    Ok(out)
}

/// Random graphs satisfying `Pre` and the correctness formula of `sp`,
/// with `bound_nodes` active nodes at most and enough reserved nodes for
/// the fresh names of one pass through the strategy.
pub fn sample_spec_graphs(sp: &Spec, count: usize, rng: &mut impl Rng) -> Result<Vec<LDGraph>, VerifyError> {
    let f = f_and(close(&sp.pre), correctness_formula(sp)?);
    let bounds = Bounds { max_nodes: sp.bound_nodes, max_parallel: 1, reserved: sp.reserved_needed() };
    Ok(sample_models(&f, &sp.alphabet(), &bounds, count, rng)?)
}

// ----- execution-based testing -----

#[derive(Clone, Debug)]
pub struct Violation {
    pub graph: LDGraph,
    pub outcome: LDGraph,
}

#[derive(Clone, Debug, Default)]
pub struct SoundnessReport {
    pub sampled: usize,
    /// Samples satisfying both `Pre` and the correctness formula.
    pub checked: usize,
    pub outcomes: usize,
    /// Samples whose derivations hit the step bound.
    pub unbounded: usize,
    pub violations: Vec<Violation>,
}

/// Runs every derivation of the strategy on sampled graphs that satisfy
/// `Pre` and the correctness formula, and reports outcome graphs that
/// violate `Post`. `AnyGraph` and `Failure` outcomes carry no obligation.
pub fn test_soundness<R: Rng>(
    sp: &Spec,
    sampler: &mut dyn FnMut(&mut R) -> Option<LDGraph>,
    rng: &mut R,
    trials: usize,
    step_bound: usize,
) -> Result<SoundnessReport, VerifyError> {
    let formula = correctness_formula(sp)?;
    let limits = Limits { max_steps: step_bound, ..Limits::default() };
    let mut report = SoundnessReport::default();
    for _ in 0..trials {
        let Some(g) = sampler(rng) else { break };
        report.sampled += 1;
        if !check_on_graph(&g, &sp.pre)? || !check_closed(&g, &formula)? {
            continue;
        }
        report.checked += 1;
        let outs = match derivations(&g, &sp.rules, &sp.strategy, &limits) {
            Ok(o) => o,
            Err(StrategyError::StepBoundExceeded(_)) => {
                report.unbounded += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for o in outs {
            if let Outcome::Graph(h) = o {
                report.outcomes += 1;
                if !check_on_graph(&h, &sp.post)? {
                    report.violations.push(Violation { graph: g.clone(), outcome: h });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
