//! Finite-model evaluation of concepts and first-order formulas over the
//! interpretation induced by a graph.
//!
//! The domain is the whole universe of the graph, reserved nodes included.
//! Role extensions are sets of pairs, so parallel edges with the same role
//! count once.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::concept::{Concept, Role};
use super::fol::{Fol, Term};
use crate::graph::{LDGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("formula still contains a pending substitution")]
    PendingSubstitution,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// Binding of parameter nominals (names absent from the graph) to nodes.
pub type Valuation = BTreeMap<NodeId, NodeId>;

type Memo = HashMap<*const Concept, Vec<bool>>;

/// Interpretation induced by a graph, indexed for fast evaluation.
pub struct Interp<'a> {
    graph: &'a LDGraph,
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    active: Vec<bool>,
    labels: HashMap<&'a str, Vec<bool>>,
    succ: HashMap<&'a str, Vec<Vec<usize>>>,
    pred: HashMap<&'a str, Vec<Vec<usize>>>,
    nominals: HashMap<NodeId, usize>,
}

impl<'a> Interp<'a> {
    pub fn new(graph: &'a LDGraph) -> Self {
        Self::with_valuation(graph, &Valuation::new()).expect("empty valuation")
    }

    pub fn with_valuation(graph: &'a LDGraph, val: &Valuation) -> Result<Self, LogicError> {
        let nodes: Vec<NodeId> = graph.universe().iter().cloned().collect();
        let index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect();
        let size = nodes.len();
        let active = nodes.iter().map(|n| graph.is_active(n)).collect();
        let mut labels: HashMap<&str, Vec<bool>> = graph
            .alphabet()
            .concepts
            .iter()
            .map(|c| (c.as_str(), vec![false; size]))
            .collect();
        for n in graph.active() {
            for c in graph.labels(n) {
                if let Some(v) = labels.get_mut(c.as_str()) {
                    v[index[n]] = true;
                }
            }
        }
        let mut succ: HashMap<&str, Vec<Vec<usize>>> = HashMap::new();
        let mut pred: HashMap<&str, Vec<Vec<usize>>> = HashMap::new();
        for r in &graph.alphabet().roles {
            succ.insert(r.as_str(), vec![Vec::new(); size]);
            pred.insert(r.as_str(), vec![Vec::new(); size]);
        }
        for e in graph.edges().values() {
            let (s, t) = (index[&e.src], index[&e.tgt]);
            if let Some(v) = succ.get_mut(e.role.as_str()) {
                v[s].push(t);
            }
            if let Some(v) = pred.get_mut(e.role.as_str()) {
                v[t].push(s);
            }
        }
        for v in succ.values_mut().chain(pred.values_mut()) {
            for adj in v.iter_mut() {
                adj.sort_unstable();
                adj.dedup();
            }
        }
        let mut nominals = HashMap::new();
        for (p, n) in val {
            let k = *index.get(n).ok_or_else(|| LogicError::UnknownName(n.to_string()))?;
            nominals.insert(p.clone(), k);
        }
        Ok(Interp { graph, nodes, index, active, labels, succ, pred, nominals })
    }

    pub fn graph(&self) -> &LDGraph {
        self.graph
    }

    pub fn domain(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn index_of(&self, n: &NodeId) -> Option<usize> {
        self.index.get(n).copied()
    }

    fn nominal(&self, n: &NodeId) -> Result<usize, LogicError> {
        self.nominals
            .get(n)
            .or_else(|| self.index.get(n))
            .copied()
            .ok_or_else(|| LogicError::UnknownName(n.to_string()))
    }

    fn neighbours(&self, r: &Role, x: usize) -> Result<&[usize], LogicError> {
        let (table, name) = match r {
            Role::Basic(n) => (&self.succ, n),
            Role::Inverse(n) => (&self.pred, n),
            Role::Universal => unreachable!("universal role handled by callers"),
        };
        table
            .get(name.as_str())
            .map(|v| v[x].as_slice())
            .ok_or_else(|| LogicError::UnknownName(name.clone()))
    }

    fn check_role(&self, r: &Role) -> Result<(), LogicError> {
        match r.base() {
            Some(b) if !self.succ.contains_key(b) => Err(LogicError::UnknownName(b.to_string())),
            _ => Ok(()),
        }
    }

    /// Extension of `c` as a membership vector over the domain.
    pub fn concept(&self, c: &Concept) -> Result<Vec<bool>, LogicError> {
        self.concept_in(c, &mut HashMap::new())
    }

    /// Shared subconcepts are evaluated once, keyed by address; the memo
    /// lives only as long as the borrow of the root.
    fn concept_in(&self, c: &Concept, memo: &mut Memo) -> Result<Vec<bool>, LogicError> {
        let key = c as *const Concept;
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let v = self.concept_step(c, memo)?;
        if matches!(c, Concept::Not(_) | Concept::Or(..) | Concept::Exists(..) | Concept::Lt(..)) {
            memo.insert(key, v.clone());
        }
        Ok(v)
    }

    fn concept_step(&self, c: &Concept, memo: &mut Memo) -> Result<Vec<bool>, LogicError> {
        let size = self.nodes.len();
        Ok(match c {
            Concept::Top => vec![true; size],
            Concept::Atomic(a) => self
                .labels
                .get(a.as_str())
                .cloned()
                .ok_or_else(|| LogicError::UnknownName(a.clone()))?,
            Concept::Nominal(n) => {
                let k = self.nominal(n)?;
                (0..size).map(|x| x == k).collect()
            }
            Concept::Active => self.active.clone(),
            Concept::Not(d) => self.concept_in(d, memo)?.into_iter().map(|b| !b).collect(),
            Concept::Or(a, b) => {
                let (a, b) = (self.concept_in(a, memo)?, self.concept_in(b, memo)?);
                a.into_iter().zip(b).map(|(x, y)| x || y).collect()
            }
            Concept::Exists(Role::Universal, d) => {
                let any = self.concept_in(d, memo)?.into_iter().any(|b| b);
                vec![any; size]
            }
            Concept::Exists(r, d) => {
                self.check_role(r)?;
                let inner = self.concept_in(d, memo)?;
                let mut out = vec![false; size];
                for (x, slot) in out.iter_mut().enumerate() {
                    *slot = self.neighbours(r, x)?.iter().any(|&y| inner[y]);
                }
                out
            }
            Concept::ExistsSelf(Role::Universal) => vec![true; size],
            Concept::ExistsSelf(r) => {
                self.check_role(r)?;
                let mut out = vec![false; size];
                for (x, slot) in out.iter_mut().enumerate() {
                    *slot = self.neighbours(r, x)?.contains(&x);
                }
                out
            }
            Concept::Lt(n, Role::Universal, d) => {
                let count = self.concept_in(d, memo)?.into_iter().filter(|b| *b).count();
                vec![count < *n as usize; size]
            }
            Concept::Lt(n, r, d) => {
                self.check_role(r)?;
                let inner = self.concept_in(d, memo)?;
                let mut out = vec![false; size];
                for (x, slot) in out.iter_mut().enumerate() {
                    let count = self.neighbours(r, x)?.iter().filter(|&&y| inner[y]).count();
                    *slot = count < *n as usize;
                }
                out
            }
            Concept::Subst(..) => return Err(LogicError::PendingSubstitution),
        })
    }

    fn term(&self, t: &Term, env: &[(String, usize)]) -> Result<usize, LogicError> {
        match t {
            Term::Var(x) => env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, k)| *k)
                .ok_or_else(|| LogicError::UnboundVariable(x.clone())),
            Term::Const(n) => self.nominal(n),
        }
    }

    /// Truth value of `f` under the environment `env` (innermost binding last).
    pub fn fol(&self, f: &Fol, env: &mut Vec<(String, usize)>) -> Result<bool, LogicError> {
        Ok(match f {
            Fol::Top => true,
            Fol::Concept(c, t) => {
                let k = self.term(t, env)?;
                self.labels
                    .get(c.as_str())
                    .ok_or_else(|| LogicError::UnknownName(c.clone()))?[k]
            }
            Fol::Role(r, s, t) => {
                let (s, t) = (self.term(s, env)?, self.term(t, env)?);
                self.succ
                    .get(r.as_str())
                    .ok_or_else(|| LogicError::UnknownName(r.clone()))?[s]
                    .contains(&t)
            }
            Fol::Active(t) => self.active[self.term(t, env)?],
            Fol::Eq(s, t) => self.term(s, env)? == self.term(t, env)?,
            Fol::Not(g) => !self.fol(g, env)?,
            Fol::Or(a, b) => self.fol(a, env)? || self.fol(b, env)?,
            Fol::Exists(x, g) => {
                let mut found = false;
                for k in 0..self.nodes.len() {
                    env.push((x.clone(), k));
                    let r = self.fol(g, env);
                    env.pop();
                    if r? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Fol::Subst(..) => return Err(LogicError::PendingSubstitution),
        })
    }

    fn to_set(&self, v: &[bool]) -> BTreeSet<NodeId> {
        v.iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(k, _)| self.nodes[k].clone())
            .collect()
    }
}

/// Extension `c^G` over the universe of `g`.
pub fn eval_concept(g: &LDGraph, c: &Concept) -> Result<BTreeSet<NodeId>, LogicError> {
    let interp = Interp::new(g);
    Ok(interp.to_set(&interp.concept(c)?))
}

pub fn eval_concept_with(
    g: &LDGraph,
    c: &Concept,
    val: &Valuation,
) -> Result<BTreeSet<NodeId>, LogicError> {
    let interp = Interp::with_valuation(g, val)?;
    Ok(interp.to_set(&interp.concept(c)?))
}

pub fn holds_at(g: &LDGraph, n: &NodeId, c: &Concept) -> Result<bool, LogicError> {
    let interp = Interp::new(g);
    let k = interp.index_of(n).ok_or_else(|| LogicError::UnknownName(n.to_string()))?;
    Ok(interp.concept(c)?[k])
}

/// `G ⊨ c`: every active node belongs to `c^G`.
pub fn graph_satisfies(g: &LDGraph, c: &Concept) -> Result<bool, LogicError> {
    graph_satisfies_with(g, c, &Valuation::new())
}

pub fn graph_satisfies_with(g: &LDGraph, c: &Concept, val: &Valuation) -> Result<bool, LogicError> {
    let interp = Interp::with_valuation(g, val)?;
    let ext = interp.concept(c)?;
    Ok(interp.active.iter().zip(ext).all(|(a, e)| !*a || e))
}

pub fn eval_fol(
    g: &LDGraph,
    f: &Fol,
    env: &BTreeMap<String, NodeId>,
) -> Result<bool, LogicError> {
    eval_fol_with(g, f, env, &Valuation::new())
}

pub fn eval_fol_with(
    g: &LDGraph,
    f: &Fol,
    env: &BTreeMap<String, NodeId>,
    val: &Valuation,
) -> Result<bool, LogicError> {
    let interp = Interp::with_valuation(g, val)?;
    let mut stack = Vec::new();
    for (x, n) in env {
        let k = interp.index_of(n).ok_or_else(|| LogicError::UnknownName(n.to_string()))?;
        stack.push((x.clone(), k));
    }
    interp.fol(f, &mut stack)
}
