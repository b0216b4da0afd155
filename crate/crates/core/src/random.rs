//! Seeded generators of graphs, formulas, actions and strategies, shared by
//! the property suites and the `fuzz` command.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Alphabet, CloneParams, ElementaryAction, LDGraph, NodeId};
use crate::logic::{Concept, Fol, Role, Term};

pub use rand_chacha::ChaCha8Rng as Rng64;

pub fn rng(seed: u64) -> Rng64 {
    use rand::SeedableRng;
    Rng64::seed_from_u64(seed)
}

/// Size limits for random graphs.
#[derive(Clone, Debug)]
pub struct GraphShape {
    pub max_active: usize,
    pub max_reserved: usize,
    pub max_edges: usize,
}

impl Default for GraphShape {
    fn default() -> Self {
        GraphShape { max_active: 5, max_reserved: 2, max_edges: 8 }
    }
}

pub fn small_alphabet() -> Alphabet {
    Alphabet::new(["A", "B"], ["r", "s"]).expect("valid alphabet")
}

pub fn random_graph(rng: &mut impl Rng, alphabet: &Alphabet, shape: &GraphShape) -> LDGraph {
    let mut g = LDGraph::new(alphabet.clone());
    let concepts: Vec<&String> = alphabet.concepts.iter().collect();
    let roles: Vec<&String> = alphabet.roles.iter().collect();
    let n_active = rng.gen_range(0..=shape.max_active);
    let n_reserved = rng.gen_range(0..=shape.max_reserved);
    let mut ids: Vec<usize> = (0..n_active + n_reserved).collect();
    ids.shuffle(rng);
    let mut active = Vec::new();
    for (k, id) in ids.into_iter().enumerate() {
        let name = NodeId(format!("n{id}"));
        if k < n_active {
            let labels: Vec<String> =
                concepts.iter().filter(|_| rng.gen_bool(0.5)).map(|c| c.to_string()).collect();
            g.add_node(name.clone(), labels).expect("fresh node");
            active.push(name);
        } else {
            g.add_reserved(name).expect("fresh node");
        }
    }
    if !active.is_empty() && !roles.is_empty() {
        let n_edges = rng.gen_range(0..=shape.max_edges);
        for k in 0..n_edges {
            let s = active.choose(rng).expect("nonempty").clone();
            let t = active.choose(rng).expect("nonempty").clone();
            let r = roles.choose(rng).expect("nonempty");
            g.add_edge(format!("e{k}"), s, t, r).expect("valid edge");
        }
    }
    g
}

/// Parameters for random formulas.
#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub depth: usize,
    pub max_count: u32,
    pub inverse: bool,
    pub universal: bool,
    pub self_loops: bool,
    pub counting: bool,
}

impl Default for FormulaShape {
    fn default() -> Self {
        FormulaShape {
            depth: 4,
            max_count: 3,
            inverse: true,
            universal: true,
            self_loops: true,
            counting: true,
        }
    }
}

pub fn random_role(rng: &mut impl Rng, alphabet: &Alphabet, shape: &FormulaShape) -> Role {
    let roles: Vec<&String> = alphabet.roles.iter().collect();
    let pick = rng.gen_range(0..10);
    if shape.universal && (pick == 0 || roles.is_empty()) {
        return Role::Universal;
    }
    let r = roles.choose(rng).expect("alphabet has roles");
    if shape.inverse && pick < 4 {
        Role::Inverse(r.to_string())
    } else {
        Role::Basic(r.to_string())
    }
}

pub fn random_concept(
    rng: &mut impl Rng,
    alphabet: &Alphabet,
    nominals: &[NodeId],
    shape: &FormulaShape,
    depth: usize,
) -> Concept {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        let concepts: Vec<&String> = alphabet.concepts.iter().collect();
        return match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 | 2 if !nominals.is_empty() => Concept::Nominal(nominals.choose(rng).unwrap().clone()),
            3 => Concept::Active,
            4 if shape.self_loops && !alphabet.roles.is_empty() => {
                Concept::ExistsSelf(random_role(rng, alphabet, shape))
            }
            _ if !concepts.is_empty() => Concept::atomic(concepts.choose(rng).unwrap()),
            _ => Concept::Top,
        };
    }
    let sub = |rng: &mut _| random_concept(rng, alphabet, nominals, shape, depth - 1);
    match rng.gen_range(0..9) {
        0 | 1 => Concept::not(sub(rng)),
        2 => Concept::or(sub(rng), sub(rng)),
        3 => Concept::and(sub(rng), sub(rng)),
        4 | 5 if shape.counting => {
            let n = rng.gen_range(0..=shape.max_count);
            let r = random_role(rng, alphabet, shape);
            if rng.gen_bool(0.5) {
                Concept::lt(n, r, sub(rng))
            } else {
                Concept::ge(n, r, sub(rng))
            }
        }
        6 => Concept::forall(random_role(rng, alphabet, shape), sub(rng)),
        _ => Concept::exists(random_role(rng, alphabet, shape), sub(rng)),
    }
}

pub fn random_fol(
    rng: &mut impl Rng,
    alphabet: &Alphabet,
    constants: &[NodeId],
    depth: usize,
) -> Fol {
    let mut vars = Vec::new();
    fol_rec(rng, alphabet, constants, depth, &mut vars)
}

fn fol_term(rng: &mut impl Rng, constants: &[NodeId], vars: &[String]) -> Term {
    if !vars.is_empty() && (constants.is_empty() || rng.gen_bool(0.75)) {
        Term::Var(vars.choose(rng).unwrap().clone())
    } else if !constants.is_empty() {
        Term::Const(constants.choose(rng).unwrap().clone())
    } else {
        Term::Var("x0".into())
    }
}

fn fol_rec(
    rng: &mut impl Rng,
    alphabet: &Alphabet,
    constants: &[NodeId],
    depth: usize,
    vars: &mut Vec<String>,
) -> Fol {
    let can_term = !vars.is_empty() || !constants.is_empty();
    if depth == 0 || (can_term && rng.gen_bool(0.2)) {
        if !can_term {
            return if rng.gen_bool(0.5) { Fol::Top } else { Fol::bot() };
        }
        let concepts: Vec<&String> = alphabet.concepts.iter().collect();
        let roles: Vec<&String> = alphabet.roles.iter().collect();
        return match rng.gen_range(0..8) {
            0 => Fol::Active(fol_term(rng, constants, vars)),
            1 => Fol::eq(fol_term(rng, constants, vars), fol_term(rng, constants, vars)),
            2 | 3 if !concepts.is_empty() => {
                Fol::concept(concepts.choose(rng).unwrap(), fol_term(rng, constants, vars))
            }
            _ if !roles.is_empty() => Fol::role(
                roles.choose(rng).unwrap(),
                fol_term(rng, constants, vars),
                fol_term(rng, constants, vars),
            ),
            _ => Fol::Top,
        };
    }
    match rng.gen_range(0..6) {
        0 => Fol::not(fol_rec(rng, alphabet, constants, depth - 1, vars)),
        1 => {
            let a = fol_rec(rng, alphabet, constants, depth - 1, vars);
            Fol::or(a, fol_rec(rng, alphabet, constants, depth - 1, vars))
        }
        2 => {
            let a = fol_rec(rng, alphabet, constants, depth - 1, vars);
            Fol::and(a, fol_rec(rng, alphabet, constants, depth - 1, vars))
        }
        _ => {
            let x = format!("x{}", vars.len());
            vars.push(x.clone());
            let body = fol_rec(rng, alphabet, constants, depth - 1, vars);
            vars.pop();
            if rng.gen_bool(0.5) {
                Fol::exists(&x, body)
            } else {
                Fol::forall(&x, body)
            }
        }
    }
}

pub const ACTION_KINDS: [&str; 9] =
    ["add_N", "del_N", "add_C", "del_C", "add_E", "del_E", "redirect", "mrg", "cl"];

fn random_subset(rng: &mut impl Rng, items: &[&String]) -> std::collections::BTreeSet<String> {
    items.iter().filter(|_| rng.gen_bool(0.5)).map(|s| s.to_string()).collect()
}

pub fn random_clone_params(rng: &mut impl Rng, alphabet: &Alphabet) -> CloneParams {
    let roles: Vec<&String> = alphabet.roles.iter().collect();
    CloneParams {
        r_in: random_subset(rng, &roles),
        r_out: random_subset(rng, &roles),
        r_l_in: random_subset(rng, &roles),
        r_l_out: random_subset(rng, &roles),
        r_l_l: random_subset(rng, &roles),
    }
}

/// A random action of the given kind applicable to `g`, if one exists.
pub fn random_action(rng: &mut impl Rng, g: &LDGraph, kind: &str) -> Option<ElementaryAction> {
    use ElementaryAction as A;
    let active: Vec<&NodeId> = g.active().iter().collect();
    let reserved: Vec<&NodeId> = g.reserved().collect();
    let universe: Vec<&NodeId> = g.universe().iter().collect();
    let concepts: Vec<&String> = g.alphabet().concepts.iter().collect();
    let roles: Vec<&String> = g.alphabet().roles.iter().collect();
    let pick = |rng: &mut _, v: &[&NodeId]| v.choose(rng).map(|n| (*n).clone());
    Some(match kind {
        "add_N" => A::AddNode(pick(rng, &reserved)?),
        "del_N" => A::DelNode(pick(rng, &active)?),
        "add_C" => A::AddConcept(pick(rng, &active)?, concepts.choose(rng)?.to_string()),
        "del_C" => A::DelConcept(pick(rng, &active)?, concepts.choose(rng)?.to_string()),
        "add_E" => A::add_edge(pick(rng, &active)?, pick(rng, &active)?, roles.choose(rng)?),
        "del_E" => {
            let edges: Vec<_> = g.edges().values().collect();
            if !edges.is_empty() && rng.gen_bool(0.7) {
                let e = edges.choose(rng)?;
                A::del_edge(e.src.clone(), e.tgt.clone(), &e.role)
            } else {
                A::del_edge(pick(rng, &active)?, pick(rng, &active)?, roles.choose(rng)?)
            }
        }
        "redirect" => A::Redirect(pick(rng, &active)?, pick(rng, &active)?),
        "mrg" => A::Merge(pick(rng, &active)?, pick(rng, &active)?),
        "cl" => {
            let j = pick(rng, &reserved)?;
            let sources: Vec<&NodeId> = if rng.gen_bool(0.9) && !active.is_empty() {
                active.clone()
            } else {
                universe.iter().copied().filter(|n| **n != j).collect()
            };
            A::Clone(pick(rng, &sources)?, j, random_clone_params(rng, g.alphabet()))
        }
        _ => return None,
    })
}
