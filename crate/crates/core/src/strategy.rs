//! Strategies over a rule set and their execution.
//!
//! A strategy either ends in a graph, in "any graph" (a rule that did not
//! match ends the run successfully) or in failure (a mandatory rule did not
//! match). The last two absorb whatever remains of the strategy.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::graph::LDGraph;
use crate::logic::{Formula, LogicError};
use crate::rewrite::{apply_rule, find_matches, ApplyError, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    Empty,
    Rule(String),
    /// `ρ?`: skip the rule when it does not match.
    Try(String),
    /// `ρ!`: fail when the rule does not match.
    Must(String),
    Seq(Box<Strategy>, Box<Strategy>),
    Choice(Box<Strategy>, Box<Strategy>),
    /// `s*`, with the invariant used by the verifier.
    Closure(Box<Strategy>, Option<Formula>),
}

impl Strategy {
    pub fn rule(name: &str) -> Strategy {
        Strategy::Rule(name.to_string())
    }

    pub fn seq(a: Strategy, b: Strategy) -> Strategy {
        Strategy::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Strategy, b: Strategy) -> Strategy {
        Strategy::Choice(Box::new(a), Box::new(b))
    }

    pub fn closure(s: Strategy, inv: Option<Formula>) -> Strategy {
        Strategy::Closure(Box::new(s), inv)
    }

    /// Names of the rules the strategy refers to.
    pub fn rule_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Strategy::Empty => {}
            Strategy::Rule(r) | Strategy::Try(r) | Strategy::Must(r) => {
                if !out.contains(&r.as_str()) {
                    out.push(r);
                }
            }
            Strategy::Seq(a, b) | Strategy::Choice(a, b) => {
                a.collect_rules(out);
                b.collect_rules(out);
            }
            Strategy::Closure(s, _) => s.collect_rules(out),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Strategy::Empty | Strategy::Rule(_) | Strategy::Try(_) | Strategy::Must(_) => 0,
            Strategy::Seq(a, b) | Strategy::Choice(a, b) => 1 + a.depth().max(b.depth()),
            Strategy::Closure(s, _) => 1 + s.depth(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Graph(LDGraph),
    AnyGraph,
    Failure,
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("step bound of {0} exceeded")]
    StepBoundExceeded(usize),
    #[error("exploration budget of {0} outcomes exceeded")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Apply(#[from] ApplyError),
}

#[derive(Clone, Debug)]
pub struct Limits {
    /// Rule applications plus closure iterations along one run.
    pub max_steps: usize,
    /// Derivation search: total number of intermediate outcomes.
    pub max_outcomes: usize,
    pub injective: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 10_000, max_outcomes: 1_000_000, injective: false }
    }
}

pub type RuleSet = BTreeMap<String, Rule>;

pub fn rule_set(rules: impl IntoIterator<Item = Rule>) -> RuleSet {
    rules.into_iter().map(|r| (r.name.clone(), r)).collect()
}

fn lookup<'a>(rules: &'a RuleSet, name: &str) -> Result<&'a Rule, StrategyError> {
    rules.get(name).ok_or_else(|| StrategyError::UnknownRule(name.to_string()))
}

/// Whether `s` can perform at least one step on `g`.
pub fn app(g: &LDGraph, rules: &RuleSet, s: &Strategy, limits: &Limits) -> Result<bool, StrategyError> {
    Ok(match s {
        Strategy::Empty | Strategy::Try(_) | Strategy::Closure(..) => {
            if let Strategy::Try(r) = s {
                lookup(rules, r)?;
            }
            true
        }
        Strategy::Rule(r) | Strategy::Must(r) => {
            !find_matches(g, lookup(rules, r)?, limits.injective)?.is_empty()
        }
        Strategy::Choice(a, b) => app(g, rules, a, limits)? || app(g, rules, b, limits)?,
        Strategy::Seq(a, _) => app(g, rules, a, limits)?,
    })
}

/// Runs `s` deterministically: the first match in match order, and in every
/// choice the left branch unless only the right one is applicable.
pub fn execute(g: &LDGraph, rules: &RuleSet, s: &Strategy, limits: &Limits) -> Result<Outcome, StrategyError> {
    let mut steps = 0;
    run(g.clone(), rules, s, limits, &mut steps)
}

fn tick(steps: &mut usize, limits: &Limits) -> Result<(), StrategyError> {
    *steps += 1;
    if *steps > limits.max_steps {
        return Err(StrategyError::StepBoundExceeded(limits.max_steps));
    }
    Ok(())
}

fn run(
    g: LDGraph,
    rules: &RuleSet,
    s: &Strategy,
    limits: &Limits,
    steps: &mut usize,
) -> Result<Outcome, StrategyError> {
    match s {
        Strategy::Empty => Ok(Outcome::Graph(g)),
        Strategy::Rule(r) | Strategy::Try(r) | Strategy::Must(r) => {
            let rule = lookup(rules, r)?;
            match find_matches(&g, rule, limits.injective)?.first() {
                Some(m) => {
                    tick(steps, limits)?;
                    Ok(Outcome::Graph(apply_rule(&g, rule, m)?))
                }
                None => Ok(match s {
                    Strategy::Rule(_) => Outcome::AnyGraph,
                    Strategy::Must(_) => Outcome::Failure,
                    _ => Outcome::Graph(g),
                }),
            }
        }
        Strategy::Seq(a, b) => match run(g, rules, a, limits, steps)? {
            Outcome::Graph(h) => run(h, rules, b, limits, steps),
            other => Ok(other),
        },
        Strategy::Choice(a, b) => {
            let pick = if !app(&g, rules, a, limits)? && app(&g, rules, b, limits)? { b } else { a };
            run(g, rules, pick, limits, steps)
        }
        Strategy::Closure(body, _) => {
            let mut cur = g;
            loop {
                if !app(&cur, rules, body, limits)? {
                    return Ok(Outcome::Graph(cur));
                }
                tick(steps, limits)?;
                match run(cur, rules, body, limits, steps)? {
                    Outcome::Graph(h) => cur = h,
                    other => return Ok(other),
                }
            }
        }
    }
}

/// Every outcome reachable by some choice of matches and branches, without
/// duplicates, in discovery order.
///
/// States reached by a closure are explored once; a derivation longer
/// than `max_steps` (in particular an endless one) is an error.
pub fn derivations(
    g: &LDGraph,
    rules: &RuleSet,
    s: &Strategy,
    limits: &Limits,
) -> Result<Vec<Outcome>, StrategyError> {
    let mut ctx = Explorer { rules, limits, budget: 0, memo: HashMap::new() };
    let found = ctx.explore(g, s, 0)?;
    Ok(found.into_iter().map(|(o, _)| o).collect())
}

/// Outcomes with the length of the longest derivation reaching each.
type Branches = Vec<(Outcome, usize)>;

fn push_unique(out: &mut Branches, o: Outcome, steps: usize) {
    if let Some(prev) = out.iter_mut().find(|(p, _)| *p == o) {
        prev.1 = prev.1.max(steps);
    } else {
        out.push((o, steps));
    }
}

struct Explorer<'a> {
    rules: &'a RuleSet,
    limits: &'a Limits,
    budget: usize,
    /// Closure results keyed by the closure node and the entry state; step
    /// counts are relative to entering the closure.
    memo: HashMap<(*const Strategy, LDGraph), (Branches, usize)>,
}

impl Explorer<'_> {
    fn bound(&self, steps: usize) -> Result<(), StrategyError> {
        if steps > self.limits.max_steps {
            return Err(StrategyError::StepBoundExceeded(self.limits.max_steps));
        }
        Ok(())
    }

    /// Outcomes of `s` from `g`, `depth` steps into the derivation. Step
    /// counts in the result are relative to `depth`.
    fn explore(&mut self, g: &LDGraph, s: &Strategy, depth: usize) -> Result<Branches, StrategyError> {
        self.budget += 1;
        if self.budget > self.limits.max_outcomes {
            return Err(StrategyError::BudgetExceeded(self.limits.max_outcomes));
        }
        let mut out = Branches::new();
        match s {
            Strategy::Empty => out.push((Outcome::Graph(g.clone()), 0)),
            Strategy::Rule(r) | Strategy::Try(r) | Strategy::Must(r) => {
                let rule = lookup(self.rules, r)?;
                let matches = find_matches(g, rule, self.limits.injective)?;
                if matches.is_empty() {
                    let o = match s {
                        Strategy::Rule(_) => Outcome::AnyGraph,
                        Strategy::Must(_) => Outcome::Failure,
                        _ => Outcome::Graph(g.clone()),
                    };
                    out.push((o, 0));
                } else {
                    self.bound(depth + 1)?;
                    for m in &matches {
                        push_unique(&mut out, Outcome::Graph(apply_rule(g, rule, m)?), 1);
                    }
                }
            }
            Strategy::Seq(a, b) => {
                for (o, k) in self.explore(g, a, depth)? {
                    match o {
                        Outcome::Graph(h) => {
                            for (o2, k2) in self.explore(&h, b, depth + k)? {
                                push_unique(&mut out, o2, k + k2);
                            }
                        }
                        other => push_unique(&mut out, other, k),
                    }
                }
            }
            Strategy::Choice(a, b) => {
                for (o, k) in self.explore(g, a, depth)? {
                    push_unique(&mut out, o, k);
                }
                for (o, k) in self.explore(g, b, depth)? {
                    push_unique(&mut out, o, k);
                }
            }
            Strategy::Closure(body, _) => {
                let key = (s as *const Strategy, g.clone());
                if let Some((res, longest)) = self.memo.get(&key) {
                    self.bound(depth + longest)?;
                    return Ok(res.clone());
                }
                if !app(g, self.rules, body, self.limits)? {
                    out.push((Outcome::Graph(g.clone()), 0));
                } else {
                    self.bound(depth + 1)?;
                    for (o, k) in self.explore(g, body, depth + 1)? {
                        match o {
                            Outcome::Graph(h) => {
                                for (o2, k2) in self.explore(&h, s, depth + 1 + k)? {
                                    push_unique(&mut out, o2, 1 + k + k2);
                                }
                            }
                            other => push_unique(&mut out, other, 1 + k),
                        }
                    }
                }
                let longest = out.iter().map(|(_, k)| *k).max().unwrap_or(0);
                self.memo.insert(key, (out.clone(), longest));
            }
        }
        Ok(out)
    }
}
