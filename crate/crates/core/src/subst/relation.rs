//! How an elementary action rewrites the pair set of one basic role.
//!
//! The post-action relation is described as a union of [`PairTerm`]s over
//! the pre-action graph. Each term constrains the source and target by
//! (dis)equalities with action arguments and requires one pre-action role
//! atom whose positions are the source, the target, or an argument.

use crate::graph::{ElementaryAction, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pos {
    Src,
    Tgt,
    Node(NodeId),
}

/// `x = node` when `eq`, otherwise `x ≠ node`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lit {
    pub node: NodeId,
    pub eq: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTerm {
    pub src: Vec<Lit>,
    pub tgt: Vec<Lit>,
    /// Pre-action role atom; `None` means no atom is required.
    pub atom: Option<(Pos, Pos)>,
}

fn eq(n: &NodeId) -> Lit {
    Lit { node: n.clone(), eq: true }
}

fn ne(n: &NodeId) -> Lit {
    Lit { node: n.clone(), eq: false }
}

fn node(n: &NodeId) -> Pos {
    Pos::Node(n.clone())
}

fn base() -> PairTerm {
    PairTerm { src: vec![], tgt: vec![], atom: Some((Pos::Src, Pos::Tgt)) }
}

/// Terms of the post-action relation of `role`, or `None` when the action
/// leaves that relation unchanged. Two-node actions are assumed to name
/// distinct nodes when their arguments differ.
pub fn post_relation(role: &str, a: &ElementaryAction) -> Option<Vec<PairTerm>> {
    use ElementaryAction::*;
    match a {
        AddNode(_) | AddConcept(..) | DelConcept(..) | DelEdgeId(_) => None,
        DelNode(i) => Some(vec![PairTerm { src: vec![ne(i)], tgt: vec![ne(i)], atom: Some((Pos::Src, Pos::Tgt)) }]),
        AddEdge { src, tgt, role: r, .. } if r == role => Some(vec![
            base(),
            PairTerm { src: vec![eq(src)], tgt: vec![eq(tgt)], atom: None },
        ]),
        DelEdge { src, tgt, role: r } if r == role => Some(vec![
            PairTerm { src: vec![ne(src)], tgt: vec![], atom: Some((Pos::Src, Pos::Tgt)) },
            PairTerm { src: vec![eq(src)], tgt: vec![ne(tgt)], atom: Some((Pos::Src, Pos::Tgt)) },
        ]),
        AddEdge { .. } | DelEdge { .. } => None,
        Redirect(i, j) if i == j => None,
        Redirect(i, j) => Some(vec![
            PairTerm { src: vec![], tgt: vec![ne(i)], atom: Some((Pos::Src, Pos::Tgt)) },
            PairTerm { src: vec![], tgt: vec![eq(j)], atom: Some((Pos::Src, node(i))) },
        ]),
        Merge(i, j) if i == j => None,
        Merge(i, j) => Some(vec![
            PairTerm { src: vec![ne(j)], tgt: vec![ne(j)], atom: Some((Pos::Src, Pos::Tgt)) },
            PairTerm { src: vec![eq(i)], tgt: vec![ne(j)], atom: Some((node(j), Pos::Tgt)) },
            PairTerm { src: vec![ne(j)], tgt: vec![eq(i)], atom: Some((Pos::Src, node(j))) },
            PairTerm { src: vec![eq(i)], tgt: vec![eq(i)], atom: Some((node(j), node(j))) },
        ]),
        Clone(i, j, p) => {
            let mut terms = vec![base()];
            if p.r_in.contains(role) {
                terms.push(PairTerm { src: vec![ne(i)], tgt: vec![eq(j)], atom: Some((Pos::Src, node(i))) });
            }
            if p.r_out.contains(role) {
                terms.push(PairTerm { src: vec![eq(j)], tgt: vec![ne(i)], atom: Some((node(i), Pos::Tgt)) });
            }
            let lp = Some((node(i), node(i)));
            if p.r_l_in.contains(role) {
                terms.push(PairTerm { src: vec![eq(i)], tgt: vec![eq(j)], atom: lp.clone() });
            }
            if p.r_l_out.contains(role) {
                terms.push(PairTerm { src: vec![eq(j)], tgt: vec![eq(i)], atom: lp.clone() });
            }
            if p.r_l_l.contains(role) {
                terms.push(PairTerm { src: vec![eq(j)], tgt: vec![eq(j)], atom: lp });
            }
            (terms.len() > 1).then_some(terms)
        }
    }
}

/// Distinct node arguments of the action that may occur in literals.
pub fn pivots(a: &ElementaryAction) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = Vec::new();
    for n in a.nodes() {
        if !out.contains(n) {
            out.push(n.clone());
        }
    }
    out
}

/// Decides a conjunction of literals for a point known to be `pin`
/// (`None`: the point differs from every pivot). Returns `None` when false.
pub fn decide(lits: &[Lit], pin: Option<&NodeId>) -> Option<()> {
    for l in lits {
        let holds = match pin {
            Some(p) => (&l.node == p) == l.eq,
            None => !l.eq,
        };
        if !holds {
            return None;
        }
    }
    Some(())
}

/// Whether a conjunction of literals is contradictory, given that distinct
/// names denote distinct nodes.
pub fn contradictory(lits: &[Lit]) -> bool {
    let eqs: Vec<&NodeId> = lits.iter().filter(|l| l.eq).map(|l| &l.node).collect();
    if eqs.windows(2).any(|w| w[0] != w[1]) {
        return true;
    }
    match eqs.first() {
        Some(e) => lits.iter().any(|l| !l.eq && &l.node == *e),
        None => false,
    }
}
