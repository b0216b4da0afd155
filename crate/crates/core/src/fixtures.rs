//! Built-in example graphs, rules and specifications.
//!
//! The same files ship under `crates/core/fixtures/` so the command line
//! tool can be pointed at them.

use crate::bisim::RelationFile;
use crate::graph::{CloneParams, ElementaryAction, LDGraph};
use crate::rewrite::Rule;
use crate::strategy::RuleSet;
use crate::syntax::parse_rules;
use crate::verifier::{parse_spec, Spec};

pub const MERGE_JSON: &str = include_str!("../fixtures/merge.json");
pub const AUTOMATON_JSON: &str = include_str!("../fixtures/automaton.json");
pub const SERVERNET_JSON: &str = include_str!("../fixtures/servernet.json");
pub const SERVERNET_RULES: &str = include_str!("../fixtures/servernet.ldr");
pub const SERVERNET_SPEC: &str = include_str!("../fixtures/servernet.ldv");
pub const CORPUS_RULES: &str = include_str!("../fixtures/corpus.ldr");
pub const BISIM_I_JSON: &str = include_str!("../fixtures/bisim_i.json");
pub const BISIM_J_JSON: &str = include_str!("../fixtures/bisim_j.json");
pub const BISIM_Z_JSON: &str = include_str!("../fixtures/bisim_z.json");

/// Soundness specifications by file name.
pub const SPECS: [(&str, &str); 10] = [
    ("servernet.ldv", include_str!("../fixtures/specs/servernet.ldv")),
    ("empty.ldv", include_str!("../fixtures/specs/empty.ldv")),
    ("clear.ldv", include_str!("../fixtures/specs/clear.ldv")),
    ("edge_try.ldv", include_str!("../fixtures/specs/edge_try.ldv")),
    ("napp.ldv", include_str!("../fixtures/specs/napp.ldv")),
    ("loop_choice.ldv", include_str!("../fixtures/specs/loop_choice.ldv")),
    ("merge_cycle.ldv", include_str!("../fixtures/specs/merge_cycle.ldv")),
    ("triangle_seq.ldv", include_str!("../fixtures/specs/triangle_seq.ldv")),
    ("star_join.ldv", include_str!("../fixtures/specs/star_join.ldv")),
    ("path_closure.ldv", include_str!("../fixtures/specs/path_closure.ldv")),
];

/// Corpus rules whose left-hand side is a tree without counting labels.
pub const TREE_RULES: [&str; 5] = ["one", "edge", "napp", "star", "path3"];

fn graph(text: &str) -> LDGraph {
    LDGraph::from_json(text).expect("fixture graph")
}

/// Four nodes `i, j, k, l` with `r`-edges `e1: i→l`, `e2: k→i`, `e3: i→j`,
/// `e4: j→k`.
pub fn merge_graph() -> LDGraph {
    graph(MERGE_JSON)
}

/// `q0 -b-> q1 -b-> q2` with an `a`-loop on `q1` and a reserved `q1'`.
pub fn automaton() -> LDGraph {
    graph(AUTOMATON_JSON)
}

/// `cl(q1, q1', {a,b}, {a,b}, X, Y, Z)`.
pub fn automaton_clone(x: bool, y: bool, z: bool) -> ElementaryAction {
    let ab: std::collections::BTreeSet<String> = ["a", "b"].map(String::from).into();
    let pick = |on: bool| if on { ["a".to_string()].into() } else { Default::default() };
    let p = CloneParams { r_in: ab.clone(), r_out: ab, r_l_in: pick(x), r_l_out: pick(y), r_l_l: pick(z) };
    ElementaryAction::Clone("q1".into(), "q1'".into(), p)
}

/// A full proxy `p` with a pending request from `c3`, plus a spare node.
pub fn servernet_graph() -> LDGraph {
    graph(SERVERNET_JSON)
}

pub fn servernet_rules() -> RuleSet {
    crate::strategy::rule_set(parse_rules(SERVERNET_RULES).expect("fixture rules"))
}

pub fn servernet_spec() -> Spec {
    spec_from(SERVERNET_SPEC)
}

/// The ten corpus rules, in file order.
pub fn corpus() -> Vec<Rule> {
    parse_rules(CORPUS_RULES).expect("fixture rules")
}

fn spec_from(text: &str) -> Spec {
    parse_spec(text, &mut |path| match path.trim_start_matches("../") {
        "servernet.ldr" => Ok(SERVERNET_RULES.to_string()),
        "corpus.ldr" => Ok(CORPUS_RULES.to_string()),
        other => Err(format!("no built-in rule file `{other}`")),
    })
    .expect("fixture spec")
}

/// The soundness specifications, by file name.
pub fn specs() -> Vec<(&'static str, Spec)> {
    SPECS.iter().map(|(name, text)| (*name, spec_from(text))).collect()
}

/// The two interpretations and the relation of the non-closure example.
pub fn bisim_pair() -> (LDGraph, LDGraph, RelationFile) {
    let z: RelationFile = serde_json::from_str(BISIM_Z_JSON).expect("fixture relation");
    (graph(BISIM_I_JSON), graph(BISIM_J_JSON), z)
}
