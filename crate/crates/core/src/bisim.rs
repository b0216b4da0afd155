//! Bisimulations between finite interpretations for counting logics with
//! nominals, the universal role and optionally `Self`.
//!
//! Interpretations are graphs read over their active nodes. The demo at
//! the end shows two bisimilar points that a substituted concept tells
//! apart, so that concept has no equivalent in these logics.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixtures;
use crate::graph::{apply_elementary, ElementaryAction, LDGraph, NodeId};
use crate::logic::{holds_at, Concept, Role};
use crate::subst::eliminate_dl;

/// Optional conditions; the four basic ones are always checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureSet {
    pub nominals: bool,
    pub counting: bool,
    pub self_loops: bool,
    pub universal: bool,
}

impl FeatureSet {
    pub const ALCQUO: FeatureSet = FeatureSet { nominals: true, counting: true, self_loops: false, universal: true };
    pub const ALCQUO_SELF: FeatureSet = FeatureSet { self_loops: true, ..FeatureSet::ALCQUO };
    pub const ALC: FeatureSet = FeatureSet { nominals: false, counting: false, self_loops: false, universal: false };

    /// Letters `O`, `Q`, `U` and the word `Self`, e.g. `QUOSelf`; `ALC`
    /// or the empty string turn everything off.
    pub fn parse(s: &str) -> Option<FeatureSet> {
        let mut f = FeatureSet::ALC;
        let mut rest = s.strip_prefix("ALC").unwrap_or(s);
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("Self") {
                f.self_loops = true;
                rest = r;
                continue;
            }
            match rest.as_bytes()[0] {
                b'O' => f.nominals = true,
                b'Q' => f.counting = true,
                b'U' => f.universal = true,
                _ => return None,
            }
            rest = &rest[1..];
        }
        Some(f)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ALC")?;
        for (on, s) in [(self.counting, "Q"), (self.universal, "U"), (self.nominals, "O"), (self.self_loops, "Self")] {
            if on {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    Atoms,
    Forth,
    Back,
    NamedPairs,
    Nominals,
    LeftTotal,
    RightTotal,
    Counting,
    SelfLoops,
    NonEmpty,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Atoms => "(ALC_1)",
            Condition::Forth => "(ALC_2)",
            Condition::Back => "(ALC_3)",
            Condition::NamedPairs => "(ALC_4)",
            Condition::Nominals => "(O)",
            Condition::LeftTotal => "(U_1)",
            Condition::RightTotal => "(U_2)",
            Condition::Counting => "(Q)",
            Condition::SelfLoops => "(Self)",
            Condition::NonEmpty => "(non-empty)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.condition, self.detail)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BisimError {
    #[error("`{0}` is not an active node of the first interpretation")]
    LeftDomain(NodeId),
    #[error("`{0}` is not an active node of the second interpretation")]
    RightDomain(NodeId),
}

pub type Relation = BTreeSet<(NodeId, NodeId)>;

/// A relation file: the shared individual names and the pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFile {
    #[serde(default)]
    pub nominals: Vec<NodeId>,
    pub pairs: Vec<(NodeId, NodeId)>,
}

impl RelationFile {
    pub fn relation(&self) -> Relation {
        self.pairs.iter().cloned().collect()
    }
}

/// Two interpretations over shared individual names.
pub struct Pair<'a> {
    pub left: &'a LDGraph,
    pub right: &'a LDGraph,
    /// Names interpreted in both; each must be an active node of both.
    pub nominals: &'a [NodeId],
}

impl Pair<'_> {
    fn concepts(&self) -> BTreeSet<&String> {
        self.left.alphabet().concepts.iter().chain(&self.right.alphabet().concepts).collect()
    }

    fn roles(&self) -> BTreeSet<&String> {
        self.left.alphabet().roles.iter().chain(&self.right.alphabet().roles).collect()
    }

    fn check_domain(&self, z: &Relation) -> Result<(), BisimError> {
        for (a, b) in z {
            if !self.left.is_active(a) {
                return Err(BisimError::LeftDomain(a.clone()));
            }
            if !self.right.is_active(b) {
                return Err(BisimError::RightDomain(b.clone()));
            }
        }
        for n in self.nominals {
            if !self.left.is_active(n) {
                return Err(BisimError::LeftDomain(n.clone()));
            }
            if !self.right.is_active(n) {
                return Err(BisimError::RightDomain(n.clone()));
            }
        }
        Ok(())
    }

    /// Violations of the conditions that only look at one pair.
    fn local(&self, z: &Relation, f: FeatureSet, a: &NodeId, b: &NodeId, out: &mut Vec<Violation>) {
        let mut bad = |condition, detail: String| out.push(Violation { condition, detail });
        for c in self.concepts() {
            if self.left.has_label(a, c) != self.right.has_label(b, c) {
                bad(Condition::Atoms, format!("{a} Z {b} disagree on {c}"));
            }
        }
        if f.nominals {
            for n in self.nominals {
                if (a == n) != (b == n) {
                    bad(Condition::Nominals, format!("{a} Z {b} disagree on {{{n}}}"));
                }
            }
        }
        for r in self.roles() {
            let s1 = successors(self.left, a, r);
            let s2 = successors(self.right, b, r);
            for e1 in &s1 {
                if !s2.iter().any(|e2| z.contains(&(e1.clone(), e2.clone()))) {
                    bad(Condition::Forth, format!("{a} -{r}-> {e1} has no partner from {b}"));
                }
            }
            for e2 in &s2 {
                if !s1.iter().any(|e1| z.contains(&(e1.clone(), e2.clone()))) {
                    bad(Condition::Back, format!("{b} -{r}-> {e2} has no partner from {a}"));
                }
            }
            if f.counting && !perfect_matching(&s1, &s2, z) {
                bad(Condition::Counting, format!("{a} Z {b}: no bijection between {r}-successors within Z"));
            }
            if f.self_loops && self.left.has_edge(a, a, r) != self.right.has_edge(b, b, r) {
                bad(Condition::SelfLoops, format!("{a} Z {b} disagree on a {r}-loop"));
            }
        }
    }

    /// Conditions on the relation as a whole.
    fn global(&self, z: &Relation, f: FeatureSet, out: &mut Vec<Violation>) {
        if z.is_empty() {
            out.push(Violation { condition: Condition::NonEmpty, detail: "Z is empty".into() });
        }
        for n in self.nominals {
            if !z.contains(&(n.clone(), n.clone())) {
                out.push(Violation { condition: Condition::NamedPairs, detail: format!("{n} is not related to {n}") });
            }
        }
        if f.universal {
            for a in self.left.active() {
                if !z.iter().any(|(x, _)| x == a) {
                    out.push(Violation { condition: Condition::LeftTotal, detail: format!("{a} is unrelated") });
                }
            }
            for b in self.right.active() {
                if !z.iter().any(|(_, y)| y == b) {
                    out.push(Violation { condition: Condition::RightTotal, detail: format!("{b} is unrelated") });
                }
            }
        }
    }
}

fn successors(g: &LDGraph, n: &NodeId, r: &str) -> Vec<NodeId> {
    let set: BTreeSet<NodeId> =
        g.edges().values().filter(|e| &e.src == n && e.role == r).map(|e| e.tgt.clone()).collect();
    set.into_iter().collect()
}

/// Whether `z` contains a bijection between `left` and `right` (Kuhn's
/// augmenting paths).
fn perfect_matching(left: &[NodeId], right: &[NodeId], z: &Relation) -> bool {
    if left.len() != right.len() {
        return false;
    }
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|a| (0..right.len()).filter(|&k| z.contains(&(a.clone(), right[k].clone()))).collect())
        .collect();
    let mut owner = vec![None; right.len()];
    (0..left.len()).all(|u| augment(u, &adj, &mut vec![false; right.len()], &mut owner))
}

/// Every failed condition of `z` under `f`; empty means `z` is a
/// bisimulation.
pub fn violations(pair: &Pair, z: &Relation, f: FeatureSet) -> Result<Vec<Violation>, BisimError> {
    pair.check_domain(z)?;
    let mut out = Vec::new();
    pair.global(z, f, &mut out);
    for (a, b) in z {
        pair.local(z, f, a, b, &mut out);
    }
    Ok(out)
}

pub fn is_bisimulation(pair: &Pair, z: &Relation, f: FeatureSet) -> Result<(bool, Vec<Violation>), BisimError> {
    let v = violations(pair, z, f)?;
    Ok((v.is_empty(), v))
}

/// The greatest relation satisfying the pairwise conditions, if it also
/// satisfies the global ones.
pub fn largest_bisimulation(pair: &Pair, f: FeatureSet) -> Option<Relation> {
    let mut z: Relation = Relation::new();
    for a in pair.left.active() {
        for b in pair.right.active() {
            z.insert((a.clone(), b.clone()));
        }
    }
    loop {
        let drop: Vec<(NodeId, NodeId)> = z
            .iter()
            .filter(|(a, b)| {
                let mut v = Vec::new();
                pair.local(&z, f, a, b, &mut v);
                !v.is_empty()
            })
            .cloned()
            .collect();
        if drop.is_empty() {
            break;
        }
        for p in drop {
            z.remove(&p);
        }
    }
    let mut v = Vec::new();
    pair.global(&z, f, &mut v);
    v.is_empty().then_some(z)
}

/// One line of the non-closure demonstration.
#[derive(Clone, Debug)]
pub struct Step {
    pub claim: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct NonClosureReport {
    pub steps: Vec<Step>,
    /// The substitution-free form of the distinguishing concept, which
    /// necessarily leaves the logic (it looks at predecessors).
    pub eliminated: Concept,
}

impl NonClosureReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }
}

impl fmt::Display for NonClosureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(f, "step {}: {} ... {}", k + 1, s.claim, if s.passed { "ok" } else { "FAILED" })?;
        }
        writeln!(f, "eliminated form: {}", self.eliminated)
    }
}

/// `(≥ 2 R C)`.
pub fn witness_concept() -> Concept {
    Concept::ge(2, Role::basic("R"), Concept::atomic("C"))
}

/// Runs the three steps on the built-in pair: the relation is a
/// bisimulation with `Self`; after `mrg(i,j)` the two `i` nodes disagree
/// on `(≥ 2 R C)`; hence `(≥ 2 R C)[mrg(i,j)]` separates bisimilar points.
pub fn demonstrate_non_closure() -> NonClosureReport {
    let (left, right, file) = fixtures::bisim_pair();
    let z = file.relation();
    let pair = Pair { left: &left, right: &right, nominals: &file.nominals };
    let bisimilar = violations(&pair, &z, FeatureSet::ALCQUO_SELF).map(|v| v.is_empty()).unwrap_or(false);
    let mrg = ElementaryAction::Merge("i".into(), "j".into());
    let c = witness_concept();
    let i = NodeId::from("i");
    let after = |g: &LDGraph| apply_elementary(g, &mrg).ok().and_then(|h| holds_at(&h, &i, &c).ok());
    let (l, r) = (after(&left), after(&right));
    let subst = Concept::subst(c.clone(), mrg.clone());
    let eliminated = eliminate_dl(&subst).expect("merge is substitutable");
    let before = |g: &LDGraph| holds_at(g, &i, &eliminated).ok();
    let separated = bisimilar && l == Some(true) && r == Some(false);
    let steps = vec![
        Step { claim: format!("Z is an {} bisimulation", FeatureSet::ALCQUO_SELF), passed: bisimilar },
        Step {
            claim: format!("after mrg(i,j), {c} holds at i on the left and not on the right"),
            passed: l == Some(true) && r == Some(false),
        },
        Step {
            claim: format!("{c}[mrg(i,j)] separates i Z i, so it has no equivalent without substitutions"),
            passed: separated && before(&left) == Some(true) && before(&right) == Some(false),
        },
    ];
    NonClosureReport { steps, eliminated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, FormulaShape};

    fn fixture() -> (LDGraph, LDGraph, RelationFile) {
        fixtures::bisim_pair()
    }

    fn pairs(z: &[(&str, &str)]) -> Relation {
        z.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    #[test]
    fn fixture_relation_is_a_bisimulation() {
        let (l, r, file) = fixture();
        let pair = Pair { left: &l, right: &r, nominals: &file.nominals };
        let z = file.relation();
        for f in [FeatureSet::ALCQUO_SELF, FeatureSet::ALCQUO, FeatureSet::parse("Q").unwrap(), FeatureSet::ALC] {
            assert_eq!(is_bisimulation(&pair, &z, f).unwrap(), (true, vec![]), "{f}");
        }
    }

    #[test]
    fn broken_relations_are_rejected() {
        let (l, r, file) = fixture();
        let z = file.relation();
        let bad = pairs(&[("i", "i"), ("j", "j"), ("d3", "d3"), ("d4", "d3"), ("d3", "i")]);
        let pair = Pair { left: &l, right: &r, nominals: &file.nominals };
        let (ok, v) = is_bisimulation(&pair, &bad, FeatureSet::ALCQUO).unwrap();
        assert!(!ok);
        assert!(v.iter().any(|v| v.condition == Condition::Atoms));
        // Without the edge of j the forth condition fails.
        let mut r2 = LDGraph::new(r.alphabet().clone());
        for n in r.active() {
            r2.add_node(n.clone(), r.labels(n).iter().cloned()).unwrap();
        }
        r2.add_edge("e1", "i", "d3", "R").unwrap();
        let pair = Pair { left: &l, right: &r2, nominals: &file.nominals };
        let (ok, v) = is_bisimulation(&pair, &z, FeatureSet::ALCQUO).unwrap();
        assert!(!ok);
        assert!(v.iter().any(|v| v.condition == Condition::Forth));
        let pair = Pair { left: &l, right: &r, nominals: &file.nominals };
        assert_eq!(
            is_bisimulation(&pair, &Relation::new(), FeatureSet::ALC).unwrap().1[0].condition,
            Condition::NonEmpty
        );
        assert_eq!(
            is_bisimulation(&pair, &pairs(&[("x", "i")]), FeatureSet::ALC),
            Err(BisimError::LeftDomain("x".into()))
        );
    }

    #[test]
    fn counting_needs_a_bijection() {
        // Two C-successors against one.
        let (mut l, r, file) = fixture();
        l.add_edge("e3", "i", "d4", "R").unwrap();
        let z = pairs(&[("i", "i"), ("d3", "d3"), ("d4", "d3")]);
        let pair = Pair { left: &l, right: &r, nominals: &[] };
        assert!(is_bisimulation(&pair, &z, FeatureSet::ALC).unwrap().0);
        let (ok, v) = is_bisimulation(&pair, &z, FeatureSet::parse("Q").unwrap()).unwrap();
        assert!(!ok);
        assert_eq!(v[0].condition, Condition::Counting);
        let _ = file;
    }

    #[test]
    fn identity_and_swap() {
        let (l, r, file) = fixture();
        let id: Relation = l.active().iter().map(|n| (n.clone(), n.clone())).collect();
        let same = Pair { left: &l, right: &l, nominals: &file.nominals };
        assert!(is_bisimulation(&same, &id, FeatureSet::ALCQUO_SELF).unwrap().0);
        let z = file.relation();
        let zt: Relation = z.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        let fwd = Pair { left: &l, right: &r, nominals: &file.nominals };
        let bwd = Pair { left: &r, right: &l, nominals: &file.nominals };
        for f in [FeatureSet::ALCQUO_SELF, FeatureSet::ALC] {
            assert_eq!(is_bisimulation(&fwd, &z, f).unwrap().0, is_bisimulation(&bwd, &zt, f).unwrap().0);
        }
        let bad = pairs(&[("i", "j")]);
        let badt = pairs(&[("j", "i")]);
        assert_eq!(
            is_bisimulation(&fwd, &bad, FeatureSet::ALCQUO).unwrap().0,
            is_bisimulation(&bwd, &badt, FeatureSet::ALCQUO).unwrap().0
        );
    }

    #[test]
    fn largest_relation_contains_the_drawn_one() {
        let (l, r, file) = fixture();
        let pair = Pair { left: &l, right: &r, nominals: &file.nominals };
        for f in [FeatureSet::ALCQUO_SELF, FeatureSet::ALC] {
            let big = largest_bisimulation(&pair, f).unwrap();
            assert!(file.relation().is_subset(&big));
            assert!(is_bisimulation(&pair, &big, f).unwrap().0);
        }
        // Isomorphic copies: the isomorphism is included.
        let copy = l.rename_nodes(|n| NodeId(format!("{n}'")));
        let iso = Pair { left: &l, right: &copy, nominals: &[] };
        let big = largest_bisimulation(&iso, FeatureSet::ALCQUO_SELF).unwrap();
        for n in l.active() {
            assert!(big.contains(&(n.clone(), NodeId(format!("{n}'")))));
        }
        // A C-node on one side only breaks totality.
        let mut plain = LDGraph::new(l.alphabet().clone());
        plain.add_node("x", Vec::<String>::new()).unwrap();
        let lone = Pair { left: &l, right: &plain, nominals: &[] };
        assert!(largest_bisimulation(&lone, FeatureSet::parse("U").unwrap()).is_none());
    }

    #[test]
    fn largest_relation_is_locally_maximal() {
        let (l, r, file) = fixture();
        let pair = Pair { left: &l, right: &r, nominals: &file.nominals };
        let f = FeatureSet::ALCQUO_SELF;
        let big = largest_bisimulation(&pair, f).unwrap();
        for a in l.active() {
            for b in r.active() {
                let p = (a.clone(), b.clone());
                if !big.contains(&p) {
                    let mut more = big.clone();
                    more.insert(p);
                    assert!(!is_bisimulation(&pair, &more, f).unwrap().0, "{a} {b}");
                }
            }
        }
    }

    /// Bisimilar points agree on concepts of the logic.
    #[test]
    fn bisimilar_points_agree() {
        let (l, r, file) = fixture();
        let z = file.relation();
        let mut rng = random::rng(17);
        let alphabet = l.alphabet().clone();
        let shape = FormulaShape { depth: 3, inverse: false, self_loops: true, ..FormulaShape::default() };
        for _ in 0..2000 {
            let c = random::random_concept(&mut rng, &alphabet, &file.nominals, &shape, 3);
            // Counting is only over basic roles in these logics.
            let mut counts_u = false;
            c.walk(&mut |d| counts_u |= matches!(d, Concept::Lt(_, Role::Universal, _)));
            if counts_u {
                continue;
            }
            for (a, b) in &z {
                assert_eq!(holds_at(&l, a, &c).unwrap(), holds_at(&r, b, &c).unwrap(), "{c} at {a}/{b}");
            }
        }
    }

    #[test]
    fn feature_names() {
        assert_eq!(FeatureSet::parse("QUOSelf"), Some(FeatureSet::ALCQUO_SELF));
        assert_eq!(FeatureSet::parse("ALCQUO"), Some(FeatureSet::ALCQUO));
        assert_eq!(FeatureSet::ALCQUO_SELF.to_string(), "ALCQUOSelf");
        assert_eq!(FeatureSet::parse("X"), None);
    }

    #[test]
    fn demonstration_passes() {
        let report = demonstrate_non_closure();
        assert!(report.passed(), "{report}");
        assert!(report.eliminated.uses_inverse() || report.eliminated.uses_self());
    }
}
