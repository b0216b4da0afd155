//! Randomized biconditional suite: `g ⊨ eliminate(φ[a])` against
//! `g[a] ⊨ φ`, per action kind, used by the `fuzz` command and the tests.

use std::collections::BTreeSet;

use super::{check_biconditional, CheckError};
use crate::graph::{CloneParams, ElementaryAction, LDGraph, NodeId};
use crate::logic::{Formula, LogicKind};
use crate::random::{self, FormulaShape, GraphShape, Rng64};

/// A case on which the two sides disagree.
#[derive(Clone, Debug)]
pub struct Failure {
    pub graph: LDGraph,
    pub formula: Formula,
    pub action: ElementaryAction,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    fn absorb(&mut self, other: SuiteReport) {
        self.cases += other.cases;
        self.failures.extend(other.failures);
    }
}

fn constants(g: &LDGraph) -> Vec<NodeId> {
    g.universe().iter().cloned().collect()
}

fn random_formula(rng: &mut Rng64, g: &LDGraph, logic: LogicKind, depth: usize) -> Formula {
    let alphabet = g.alphabet();
    match logic {
        LogicKind::Dl => {
            let shape = FormulaShape { depth, ..FormulaShape::default() };
            Formula::Dl(random::random_concept(rng, alphabet, &constants(g), &shape, depth))
        }
        LogicKind::Fol => Formula::Fol(random::random_fol(rng, alphabet, &constants(g), depth)),
    }
}

fn check(
    report: &mut SuiteReport,
    g: LDGraph,
    formula: Formula,
    action: ElementaryAction,
) -> Result<(), CheckError> {
    report.cases += 1;
    if !check_biconditional(&g, &formula, &action)? {
        report.failures.push(Failure { graph: g, formula, action });
    }
    Ok(())
}

/// `cases` random cases for one action kind (see
/// [`random::ACTION_KINDS`]) on graphs with at most 5 active nodes and
/// formulas of depth at most `depth`.
pub fn run_kind(
    kind: &str,
    logic: LogicKind,
    cases: usize,
    depth: usize,
    rng: &mut Rng64,
) -> Result<SuiteReport, CheckError> {
    let alphabet = random::small_alphabet();
    let mut report = SuiteReport::default();
    let mut tries = 0usize;
    while report.cases < cases && tries < cases.saturating_mul(50) {
        tries += 1;
        let g = random::random_graph(rng, &alphabet, &GraphShape::default());
        let Some(a) = random::random_action(rng, &g, kind) else { continue };
        let f = random_formula(rng, &g, logic, depth);
        check(&mut report, g, f, a)?;
    }
    Ok(report)
}

/// The clone action with each of its five role sets either empty or `{r}`,
/// `per_combination` cases each.
pub fn clone_sweep(
    logic: LogicKind,
    per_combination: usize,
    depth: usize,
    rng: &mut Rng64,
) -> Result<SuiteReport, CheckError> {
    let alphabet = random::small_alphabet();
    let mut report = SuiteReport::default();
    for mask in 0u32..32 {
        let pick = |bit: u32| -> BTreeSet<String> {
            if mask & (1 << bit) != 0 {
                ["r".to_string()].into()
            } else {
                BTreeSet::new()
            }
        };
        let params =
            CloneParams { r_in: pick(0), r_out: pick(1), r_l_in: pick(2), r_l_out: pick(3), r_l_l: pick(4) };
        let mut part = SuiteReport::default();
        while part.cases < per_combination {
            let g = random::random_graph(rng, &alphabet, &GraphShape::default());
            let (Some(i), Some(j)) = (g.active().iter().next().cloned(), g.reserved().next().cloned()) else {
                continue;
            };
            let a = ElementaryAction::Clone(i, j, params.clone());
            let f = random_formula(rng, &g, logic, depth);
            check(&mut part, g, f, a)?;
        }
        report.absorb(part);
    }
    Ok(report)
}

/// Every action kind, `cases` each, plus the clone sweep.
pub fn run_all(
    logic: LogicKind,
    cases: usize,
    depth: usize,
    rng: &mut Rng64,
) -> Result<Vec<(String, SuiteReport)>, CheckError> {
    let mut out = Vec::new();
    for kind in random::ACTION_KINDS {
        out.push((kind.to_string(), run_kind(kind, logic, cases, depth, rng)?));
    }
    let per = cases.div_ceil(32).max(1);
    out.push(("cl sweep".to_string(), clone_sweep(logic, per, depth, rng)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        let mut rng = random::rng(5);
        for logic in [LogicKind::Dl, LogicKind::Fol] {
            let all = run_all(logic, 40, 3, &mut rng).unwrap();
            assert_eq!(all.len(), 10);
            for (kind, r) in &all {
                assert!(r.failures.is_empty(), "{kind}");
                assert!(r.cases >= 32, "{kind}: {}", r.cases);
            }
        }
    }
}
