//! Explicit enumeration of small graphs and parameter bindings. Slow, but
//! independent of the symbolic encoding, which it is used to cross-check.

use std::collections::BTreeSet;

use super::{holds_with, params_of, Bounds, Counterexample, Reading, VerifyError};
use crate::graph::{Alphabet, LDGraph, NodeId};
use crate::logic::{Formula, Valuation};

/// Number of graphs [`graphs`] yields.
pub fn space_size(alphabet: &Alphabet, bounds: &Bounds) -> Option<u64> {
    let (c, r) = (alphabet.concepts.len() as u32, alphabet.roles.len() as u32);
    let mut total: u64 = 0;
    for k in 0..=bounds.max_nodes as u32 {
        let bits = k.checked_mul(c)?.checked_add(k.checked_mul(k)?.checked_mul(r)?)?;
        total = total.checked_add(1u64.checked_shl(bits)?)?;
    }
    Some(total)
}

/// Every graph with `k ≤ max_nodes` active nodes `n0..` followed by
/// reserved nodes up to `max_nodes + reserved` in total, each label set
/// and each edge set with multiplicity one.
pub fn graphs<'a>(alphabet: &'a Alphabet, bounds: &Bounds) -> impl Iterator<Item = LDGraph> + 'a {
    let bounds = *bounds;
    let concepts: Vec<String> = alphabet.concepts.iter().cloned().collect();
    let roles: Vec<String> = alphabet.roles.iter().cloned().collect();
    (0..=bounds.max_nodes).flat_map(move |k| {
        let (concepts, roles) = (concepts.clone(), roles.clone());
        let label_bits = k * concepts.len();
        let edge_bits = k * k * roles.len();
        let total = label_bits + edge_bits;
        (0..1u64 << total).map(move |code| {
            let mut g = LDGraph::new(alphabet.clone());
            for x in 0..k {
                let labels: Vec<&String> = concepts
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| code >> (x * concepts.len() + c) & 1 == 1)
                    .map(|(_, n)| n)
                    .collect();
                g.add_node(format!("n{x}"), labels.into_iter().cloned()).expect("fresh node");
            }
            for x in k..bounds.max_nodes + bounds.reserved {
                g.add_reserved(format!("n{x}")).expect("fresh node");
            }
            let mut e = 0;
            for (ri, r) in roles.iter().enumerate() {
                for x in 0..k {
                    for y in 0..k {
                        let bit = label_bits + (ri * k + x) * k + y;
                        if code >> bit & 1 == 1 {
                            g.add_edge(format!("e{e}"), format!("n{x}"), format!("n{y}"), r).expect("edge");
                            e += 1;
                        }
                    }
                }
            }
            g
        })
    })
}

/// Every binding of `params` to nodes of `universe`.
pub fn valuations(universe: &BTreeSet<NodeId>, params: &BTreeSet<NodeId>) -> Vec<Valuation> {
    let nodes: Vec<&NodeId> = universe.iter().collect();
    let mut out = vec![Valuation::new()];
    for p in params {
        out = out
            .into_iter()
            .flat_map(|v| {
                nodes.iter().map(move |n| {
                    let mut w = v.clone();
                    w.insert(p.clone(), (*n).clone());
                    w
                })
            })
            .collect();
    }
    out
}

/// [`super::bounded_validity`] by brute force, refusing spaces larger
/// than `budget` graphs.
pub fn bounded_validity_explicit(
    f: &Formula,
    alphabet: &Alphabet,
    bounds: &Bounds,
    reading: Reading,
    budget: u64,
) -> Result<Option<Counterexample>, VerifyError> {
    match space_size(alphabet, bounds) {
        Some(n) if n <= budget => {}
        _ => return Err(VerifyError::BudgetExceeded(budget)),
    }
    for g in graphs(alphabet, bounds) {
        let params = params_of(&g, f);
        for val in valuations(g.universe(), &params) {
            if !holds_with(&g, f, reading, &val)? {
                return Ok(Some(Counterexample { graph: g, valuation: val, formula_value: false }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_counts() {
        let a = Alphabet::new(["A"], ["r"]).unwrap();
        let b = Bounds::nodes(2);
        // 1 + 2^(1+1) + 2^(2+4)
        assert_eq!(space_size(&a, &b), Some(1 + 4 + 64));
        assert_eq!(graphs(&a, &b).count(), 69);
        let distinct: BTreeSet<String> = graphs(&a, &b).map(|g| g.to_json()).collect();
        assert_eq!(distinct.len(), 69);
    }

    #[test]
    fn valuations_cover_all_maps() {
        let u: BTreeSet<NodeId> = ["a", "b", "c"].into_iter().map(NodeId::from).collect();
        let p: BTreeSet<NodeId> = ["?x", "?y"].into_iter().map(NodeId::from).collect();
        assert_eq!(valuations(&u, &p).len(), 9);
        assert_eq!(valuations(&u, &BTreeSet::new()).len(), 1);
    }
}
