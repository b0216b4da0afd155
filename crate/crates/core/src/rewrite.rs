//! Rules, matches and rule application.
//!
//! A rule pairs a left-hand side (a small graph whose nodes carry arbitrary
//! concepts) with a sequence of elementary actions over the left-hand side
//! names and fresh names. A match is a homomorphism from the left-hand side
//! into the active part of a host graph; matches need not be injective.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{
    apply_sequence, reserve_fresh, ActionSeq, EdgeId, ElementaryAction, GraphError, LDGraph,
    NodeId,
};
use crate::logic::{Concept, Fol, Interp, LogicError, Role, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule `{rule}`: duplicate left-hand side node `{node}`")]
    DuplicateNode { rule: String, node: NodeId },
    #[error("rule `{rule}`: edge `{edge}` uses undeclared node `{node}`")]
    UnknownEdgeEnd { rule: String, edge: EdgeId, node: NodeId },
    #[error("rule `{rule}`: action uses `{node}`, which is neither a left-hand side node nor created by the rule")]
    UnknownRhsName { rule: String, node: NodeId },
    #[error("rule `{rule}`: fresh name `{node}` is also a left-hand side node")]
    FreshClash { rule: String, node: NodeId },
    #[error("rule `{rule}`: left-hand side is not a rooted tree")]
    NotATree { rule: String },
    #[error("rule `{rule}`: label `{label}` has no first-order translation")]
    InexpressibleLabel { rule: String, label: String },
}

#[derive(Debug, Error)]
pub enum ApplyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("match does not belong to rule `{0}`")]
    ForeignMatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LhsNode {
    pub id: NodeId,
    pub labels: Vec<Concept>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LhsEdge {
    pub id: EdgeId,
    pub src: NodeId,
    pub tgt: NodeId,
    pub role: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub nodes: Vec<LhsNode>,
    pub edges: Vec<LhsEdge>,
    pub rhs: ActionSeq,
}

impl Rule {
    /// Builds and validates a rule. Left-hand side nodes are kept sorted by
    /// id; edges without an explicit id get `l0`, `l1`, ... in order.
    pub fn new(
        name: impl Into<String>,
        nodes: Vec<LhsNode>,
        edges: Vec<LhsEdge>,
        rhs: ActionSeq,
    ) -> Result<Rule, RuleError> {
        let mut rule = Rule { name: name.into(), nodes, edges, rhs };
        rule.nodes.sort_by(|a, b| a.id.cmp(&b.id));
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let rule = self.name.clone();
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id.clone()) {
                return Err(RuleError::DuplicateNode { rule, node: n.id.clone() });
            }
        }
        for e in &self.edges {
            for end in [&e.src, &e.tgt] {
                if !seen.contains(end) {
                    return Err(RuleError::UnknownEdgeEnd {
                        rule,
                        edge: e.id.clone(),
                        node: end.clone(),
                    });
                }
            }
        }
        let fresh = self.fresh_names();
        for f in &fresh {
            if seen.contains(f) {
                return Err(RuleError::FreshClash { rule, node: f.clone() });
            }
        }
        for a in &self.rhs {
            for n in a.nodes() {
                if !seen.contains(n) && !fresh.contains(n) {
                    return Err(RuleError::UnknownRhsName { rule, node: n.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn lhs_names(&self) -> Vec<NodeId> {
        self.nodes.iter().map(|n| n.id.clone()).collect()
    }

    /// Names created by the right-hand side (targets of node additions and
    /// clones), in order of first appearance.
    pub fn fresh_names(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = Vec::new();
        for a in &self.rhs {
            let n = match a {
                ElementaryAction::AddNode(n) | ElementaryAction::Clone(_, n, _) => n,
                _ => continue,
            };
            if !out.contains(n) && !self.nodes.iter().any(|m| &m.id == n) {
                out.push(n.clone());
            }
        }
        out
    }

    fn node(&self, id: &NodeId) -> Option<&LhsNode> {
        self.nodes.iter().find(|n| &n.id == id)
    }
}

/// A homomorphism from a rule's left-hand side into a host graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Match {
    pub nodes: BTreeMap<NodeId, NodeId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
}

/// All matches of `rule` into the active part of `g`, ordered by the images
/// of the sorted left-hand side nodes, then of the sorted edges.
pub fn find_matches(g: &LDGraph, rule: &Rule, injective: bool) -> Result<Vec<Match>, LogicError> {
    let interp = Interp::new(g);
    let domain = interp.domain();
    let mut candidates: Vec<Vec<NodeId>> = Vec::with_capacity(rule.nodes.len());
    for n in &rule.nodes {
        let mut ok: Vec<bool> = domain.iter().map(|d| g.is_active(d)).collect();
        for label in &n.labels {
            let ext = interp.concept(&label.relativize())?;
            ok.iter_mut().zip(ext).for_each(|(o, e)| *o &= e);
        }
        candidates.push(domain.iter().zip(ok).filter(|(_, o)| *o).map(|(d, _)| d.clone()).collect());
    }
    let mut out = Vec::new();
    let mut chosen: Vec<NodeId> = Vec::new();
    search(g, rule, &candidates, injective, &mut chosen, &mut out);
    Ok(out)
}

fn search(
    g: &LDGraph,
    rule: &Rule,
    candidates: &[Vec<NodeId>],
    injective: bool,
    chosen: &mut Vec<NodeId>,
    out: &mut Vec<Match>,
) {
    let k = chosen.len();
    if k == rule.nodes.len() {
        let nodes: BTreeMap<NodeId, NodeId> =
            rule.nodes.iter().map(|n| n.id.clone()).zip(chosen.iter().cloned()).collect();
        edge_maps(g, rule, &nodes, out);
        return;
    }
    let position = |id: &NodeId| rule.nodes.iter().position(|n| &n.id == id).expect("validated");
    for c in &candidates[k] {
        if injective && chosen.contains(c) {
            continue;
        }
        chosen.push(c.clone());
        // Only edges whose endpoints are both assigned can be checked now.
        let consistent = rule.edges.iter().all(|e| {
            let (s, t) = (position(&e.src), position(&e.tgt));
            s.max(t) != k || g.has_edge(&chosen[s], &chosen[t], &e.role)
        });
        if consistent {
            search(g, rule, candidates, injective, chosen, out);
        }
        chosen.pop();
    }
}

fn edge_maps(g: &LDGraph, rule: &Rule, nodes: &BTreeMap<NodeId, NodeId>, out: &mut Vec<Match>) {
    let mut lhs_edges: Vec<&LhsEdge> = rule.edges.iter().collect();
    lhs_edges.sort_by(|a, b| a.id.cmp(&b.id));
    let options: Vec<Vec<EdgeId>> = lhs_edges
        .iter()
        .map(|e| {
            let (s, t) = (&nodes[&e.src], &nodes[&e.tgt]);
            g.edges()
                .iter()
                .filter(|(_, h)| &h.src == s && &h.tgt == t && h.role == e.role)
                .map(|(id, _)| id.clone())
                .collect()
        })
        .collect();
    let mut pick = vec![0usize; options.len()];
    if options.iter().any(|o| o.is_empty()) {
        return;
    }
    loop {
        let edges = lhs_edges
            .iter()
            .zip(&pick)
            .zip(&options)
            .map(|((e, &p), o)| (e.id.clone(), o[p].clone()))
            .collect();
        out.push(Match { nodes: nodes.clone(), edges });
        // Odometer over the edge choices, last edge fastest.
        let mut k = pick.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < options[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

pub fn applicable(g: &LDGraph, rule: &Rule) -> Result<bool, LogicError> {
    Ok(!find_matches(g, rule, false)?.is_empty())
}

/// Checks the homomorphism conditions of `m` against `g` directly.
pub fn is_match(g: &LDGraph, rule: &Rule, m: &Match) -> Result<bool, LogicError> {
    if m.nodes.len() != rule.nodes.len() || m.edges.len() != rule.edges.len() {
        return Ok(false);
    }
    for n in &rule.nodes {
        let Some(h) = m.nodes.get(&n.id) else { return Ok(false) };
        if !g.is_active(h) {
            return Ok(false);
        }
        for label in &n.labels {
            if !crate::logic::holds_at(g, h, &label.relativize())? {
                return Ok(false);
            }
        }
    }
    for e in &rule.edges {
        let Some(he) = m.edges.get(&e.id).and_then(|id| g.edge(id)) else { return Ok(false) };
        if he.role != e.role || he.src != m.nodes[&e.src] || he.tgt != m.nodes[&e.tgt] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The right-hand side instantiated by a node map.
pub fn instantiate(rule: &Rule, map: &BTreeMap<NodeId, NodeId>) -> ActionSeq {
    rule.rhs
        .iter()
        .map(|a| a.map_nodes(&|n: &NodeId| map.get(n).cloned().unwrap_or_else(|| n.clone())))
        .collect()
}

/// Applies `rule` at `m`: fresh names are bound to newly reserved nodes and
/// the instantiated right-hand side is executed.
pub fn apply_rule(g: &LDGraph, rule: &Rule, m: &Match) -> Result<LDGraph, ApplyError> {
    if rule.nodes.iter().any(|n| !m.nodes.contains_key(&n.id)) {
        return Err(ApplyError::ForeignMatch(rule.name.clone()));
    }
    let mut host = g.clone();
    let mut map = m.nodes.clone();
    // Fresh names take the smallest unused reserved nodes first, so that a
    // formula evaluated on `g` can already name them.
    let mut spare: Vec<NodeId> = g.reserved().cloned().collect();
    spare.reverse();
    for f in rule.fresh_names() {
        let id = match spare.pop() {
            Some(id) => id,
            None => {
                let (next, id) = reserve_fresh(&host);
                host = next;
                id
            }
        };
        map.insert(f, id);
    }
    Ok(apply_sequence(&host, &instantiate(rule, &map))?)
}

fn inexpressible(rule: &Rule, c: &Concept) -> RuleError {
    RuleError::InexpressibleLabel { rule: rule.name.clone(), label: format!("{c}") }
}

/// Translates a node label to a first-order formula about `t`. Universal
/// quantification is restricted to active nodes.
pub fn label_to_fol(rule: &Rule, c: &Concept, t: &Term, fresh: &mut usize) -> Result<Fol, RuleError> {
    use Concept as C;
    Ok(match c {
        C::Top => Fol::Top,
        C::Atomic(a) => Fol::concept(a, t.clone()),
        C::Nominal(n) => Fol::eq(t.clone(), Term::Const(n.clone())),
        C::Active => Fol::Active(t.clone()),
        C::Not(d) => Fol::not(label_to_fol(rule, d, t, fresh)?),
        C::Or(a, b) => Fol::or(label_to_fol(rule, a, t, fresh)?, label_to_fol(rule, b, t, fresh)?),
        C::Exists(r, d) => {
            *fresh += 1;
            let y = format!("y{fresh}");
            let yt = Term::var(&y);
            let link = match r {
                Role::Basic(r) => Fol::role(r, t.clone(), yt.clone()),
                Role::Inverse(r) => Fol::role(r, yt.clone(), t.clone()),
                Role::Universal => Fol::Active(yt.clone()),
            };
            Fol::exists(&y, Fol::and(link, label_to_fol(rule, d, &yt, fresh)?))
        }
        C::ExistsSelf(_) | C::Lt(..) | C::Subst(..) => return Err(inexpressible(rule, c)),
    })
}

/// First-order sentence that holds exactly on the graphs where `rule` has
/// a match. Left-hand side node names serve as the quantified variables.
pub fn app_formula_fol(rule: &Rule) -> Result<Fol, RuleError> {
    let mut fresh = 0;
    let mut parts = Vec::new();
    for n in &rule.nodes {
        let x = Term::var(n.id.as_str());
        for l in &n.labels {
            parts.push(label_to_fol(rule, l, &x, &mut fresh)?);
        }
    }
    for e in &rule.edges {
        parts.push(Fol::role(&e.role, Term::var(e.src.as_str()), Term::var(e.tgt.as_str())));
    }
    let mut body = Fol::and_all(parts);
    for n in rule.nodes.iter().rev() {
        body = Fol::exists(n.id.as_str(), body);
    }
    Ok(body.relativize_active())
}

/// The root of a left-hand side that forms a tree with edges pointing away
/// from the root.
pub fn tree_root(rule: &Rule) -> Option<NodeId> {
    if rule.nodes.is_empty() || rule.edges.len() + 1 != rule.nodes.len() {
        return None;
    }
    let mut indeg: BTreeMap<&NodeId, usize> = rule.nodes.iter().map(|n| (&n.id, 0)).collect();
    for e in &rule.edges {
        *indeg.get_mut(&e.tgt)? += 1;
    }
    let roots: Vec<&NodeId> = indeg.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    if roots.len() != 1 || indeg.values().any(|d| *d > 1) {
        return None;
    }
    let root = roots[0].clone();
    // Every node must be reached from the root.
    let mut seen = BTreeSet::from([root.clone()]);
    let mut stack = vec![root.clone()];
    while let Some(n) = stack.pop() {
        for e in rule.edges.iter().filter(|e| e.src == n) {
            if seen.insert(e.tgt.clone()) {
                stack.push(e.tgt.clone());
            }
        }
    }
    (seen.len() == rule.nodes.len()).then_some(root)
}

/// `∃U.ψ(root)` where `ψ(n)` conjoins the labels of `n` with `∃r.ψ(m)` for
/// every edge `n -r-> m`. The result uses the user-level reading of `U`
/// (active nodes only); [`Concept::relativize`] makes that explicit.
pub fn app_formula_alcu(rule: &Rule) -> Result<Concept, RuleError> {
    let root = tree_root(rule).ok_or_else(|| RuleError::NotATree { rule: rule.name.clone() })?;
    fn psi(rule: &Rule, n: &NodeId) -> Concept {
        let node = rule.node(n).expect("validated");
        let mut parts: Vec<Concept> = node.labels.clone();
        for e in rule.edges.iter().filter(|e| &e.src == n) {
            parts.push(Concept::exists(Role::basic(&e.role), psi(rule, &e.tgt)));
        }
        let mut it = parts.into_iter();
        let first = it.next().unwrap_or(Concept::Top);
        it.fold(first, Concept::and)
    }
    Ok(Concept::exists(Role::Universal, psi(rule, &root)))
}

/// Assignment of parameter nominals to the left-hand side and fresh names of
/// one rule occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamNames {
    pub map: BTreeMap<NodeId, NodeId>,
    pub fresh: Vec<NodeId>,
}

impl ParamNames {
    /// Parameters `?{name}_{occurrence}` for every name of the rule.
    pub fn for_rule(rule: &Rule, occurrence: usize) -> ParamNames {
        let mut map = BTreeMap::new();
        let mut fresh = Vec::new();
        let param = |n: &NodeId| NodeId(format!("?{}_{occurrence}", n.as_str().trim_start_matches('?')));
        for n in &rule.nodes {
            map.insert(n.id.clone(), param(&n.id));
        }
        for f in rule.fresh_names() {
            let p = param(&f);
            fresh.push(p.clone());
            map.insert(f, p);
        }
        ParamNames { map, fresh }
    }

    fn of(&self, n: &NodeId) -> &NodeId {
        &self.map[n]
    }
}

/// Concept that, given the parameter nominals, holds (everywhere) iff the
/// parameters describe a match of `rule` together with distinct reserved
/// nodes for its fresh names.
pub fn match_condition_dl(rule: &Rule, names: &ParamNames) -> Concept {
    let at = |n: &NodeId, c: Concept| {
        Concept::exists(Role::Universal, Concept::and(Concept::nominal(n.clone()), c))
    };
    let mut parts = Vec::new();
    for n in &rule.nodes {
        let labels = n.labels.iter().map(|l| l.relativize()).fold(Concept::Active, Concept::and);
        parts.push(at(names.of(&n.id), labels));
    }
    for e in &rule.edges {
        let tgt = Concept::nominal(names.of(&e.tgt).clone());
        parts.push(at(names.of(&e.src), Concept::exists(Role::basic(&e.role), tgt)));
    }
    for (k, f) in names.fresh.iter().enumerate() {
        parts.push(at(f, Concept::not(Concept::Active)));
        for g in &names.fresh[k + 1..] {
            parts.push(Concept::not(at(f, Concept::nominal(g.clone()))));
        }
    }
    let mut it = parts.into_iter();
    let first = it.next().unwrap_or(Concept::Top);
    it.fold(first, Concept::and)
}

/// First-order counterpart of [`match_condition_dl`], over constants.
pub fn match_condition_fol(rule: &Rule, names: &ParamNames) -> Result<Fol, RuleError> {
    let mut fresh = 0;
    let mut parts = Vec::new();
    for n in &rule.nodes {
        let t = Term::Const(names.of(&n.id).clone());
        parts.push(Fol::Active(t.clone()));
        for l in &n.labels {
            parts.push(label_to_fol(rule, l, &t, &mut fresh)?.relativize_active());
        }
    }
    for e in &rule.edges {
        let (s, t) = (names.of(&e.src).clone(), names.of(&e.tgt).clone());
        parts.push(Fol::role(&e.role, Term::Const(s), Term::Const(t)));
    }
    for (k, f) in names.fresh.iter().enumerate() {
        parts.push(Fol::not(Fol::Active(Term::Const(f.clone()))));
        for g in &names.fresh[k + 1..] {
            parts.push(Fol::neq(Term::Const(f.clone()), Term::Const(g.clone())));
        }
    }
    Ok(Fol::and_all(parts))
}
