//! Propositional encoding of formula evaluation over a bounded space of
//! graphs, decided with a SAT solver.
//!
//! The universe is a fixed list of nodes. Each node has an activity bit,
//! one bit per concept name and one bit per role and ordered pair; in a
//! fixed space these are constants read off a graph, in a free space they
//! are solver variables constrained so that reserved nodes carry neither
//! labels nor edges. Names that are not nodes of the universe are
//! parameters: one-hot vectors over the universe. Concepts are unrolled
//! node by node, first-order quantifiers by expansion over the universe,
//! counting through a sequential counter. Gates are hashed so that equal
//! subcircuits share a variable.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use varisat::{ExtendFormula, Lit, Solver};

use crate::graph::{Alphabet, LDGraph, NodeId};
use crate::logic::{Concept, Fol, LogicError, Role, Term, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Const(bool),
    Var(Lit),
}

use Bit::Const;

const TRUE: Bit = Const(true);
const FALSE: Bit = Const(false);

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Gate {
    And(Lit, Lit),
}

enum TermVal {
    Node(usize),
    Param(Vec<Bit>),
}

pub struct Encoder {
    solver: Solver<'static>,
    names: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    active: Vec<Bit>,
    labels: BTreeMap<String, Vec<Bit>>,
    edges: BTreeMap<String, Vec<Vec<Bit>>>,
    params: BTreeMap<NodeId, Vec<Bit>>,
    gates: HashMap<Gate, Lit>,
    /// Variables describing the graph, for decoding and random assumptions.
    graph_vars: Vec<Lit>,
    free: bool,
}

/// A satisfying assignment read back as a graph and parameter binding.
#[derive(Clone, Debug)]
pub struct Model {
    pub graph: LDGraph,
    pub valuation: Valuation,
}

impl Encoder {
    /// The single graph `g`; only parameters are free.
    pub fn fixed(g: &LDGraph) -> Encoder {
        let names: Vec<NodeId> = g.universe().iter().cloned().collect();
        let active = names.iter().map(|n| Const(g.is_active(n))).collect();
        let labels = g
            .alphabet()
            .concepts
            .iter()
            .map(|c| (c.clone(), names.iter().map(|n| Const(g.has_label(n, c))).collect()))
            .collect();
        let edges = g
            .alphabet()
            .roles
            .iter()
            .map(|r| {
                let pairs = g.role_pairs(r);
                let table = names
                    .iter()
                    .map(|x| names.iter().map(|y| Const(pairs.contains(&(x.clone(), y.clone())))).collect())
                    .collect();
                (r.clone(), table)
            })
            .collect();
        Encoder::build(names, active, labels, edges, Vec::new(), false)
    }

    /// Every graph over `alphabet` with at most `max_active` active nodes
    /// and `reserved` further reserved nodes, parallel edges collapsed.
    /// Active nodes come first in the node order (symmetry breaking).
    pub fn free(alphabet: &Alphabet, max_active: usize, reserved: usize) -> Encoder {
        let mut solver = Solver::new();
        let size = max_active + reserved;
        let names: Vec<NodeId> = (0..size).map(|k| NodeId(format!("n{k}"))).collect();
        let mut graph_vars = Vec::new();
        let fresh = |solver: &mut Solver<'static>, graph_vars: &mut Vec<Lit>| {
            let l = solver.new_lit();
            graph_vars.push(l);
            Bit::Var(l)
        };
        let active: Vec<Bit> = (0..size)
            .map(|x| if x < max_active { fresh(&mut solver, &mut graph_vars) } else { FALSE })
            .collect();
        for x in 1..max_active {
            if let (Bit::Var(a), Bit::Var(b)) = (active[x], active[x - 1]) {
                solver.add_clause(&[!a, b]);
            }
        }
        let mut labels = BTreeMap::new();
        for c in &alphabet.concepts {
            let v: Vec<Bit> = (0..size)
                .map(|x| if x < max_active { fresh(&mut solver, &mut graph_vars) } else { FALSE })
                .collect();
            for x in 0..max_active {
                implies_clause(&mut solver, v[x], active[x]);
            }
            labels.insert(c.clone(), v);
        }
        let mut edges = BTreeMap::new();
        for r in &alphabet.roles {
            let mut table = vec![vec![FALSE; size]; size];
            for x in 0..max_active {
                for y in 0..max_active {
                    let e = fresh(&mut solver, &mut graph_vars);
                    implies_clause(&mut solver, e, active[x]);
                    implies_clause(&mut solver, e, active[y]);
                    table[x][y] = e;
                }
            }
            edges.insert(r.clone(), table);
        }
        let mut enc = Encoder::build(names, active, labels, edges, graph_vars, true);
        enc.solver = solver;
        enc
    }

    fn build(
        names: Vec<NodeId>,
        active: Vec<Bit>,
        labels: BTreeMap<String, Vec<Bit>>,
        edges: BTreeMap<String, Vec<Vec<Bit>>>,
        graph_vars: Vec<Lit>,
        free: bool,
    ) -> Encoder {
        let index = names.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect();
        Encoder {
            solver: Solver::new(),
            names,
            index,
            active,
            labels,
            edges,
            params: BTreeMap::new(),
            gates: HashMap::new(),
            graph_vars,
            free,
        }
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    // ----- gates -----

    pub fn not(&self, a: Bit) -> Bit {
        match a {
            Const(b) => Const(!b),
            Bit::Var(l) => Bit::Var(!l),
        }
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (FALSE, _) | (_, FALSE) => FALSE,
            (TRUE, x) | (x, TRUE) => x,
            (Bit::Var(x), Bit::Var(y)) => {
                if x == y {
                    return a;
                }
                if x == !y {
                    return FALSE;
                }
                let key = if x.code() <= y.code() { Gate::And(x, y) } else { Gate::And(y, x) };
                if let Some(g) = self.gates.get(&key) {
                    return Bit::Var(*g);
                }
                let g = self.solver.new_lit();
                self.solver.add_clause(&[!g, x]);
                self.solver.add_clause(&[!g, y]);
                self.solver.add_clause(&[g, !x, !y]);
                self.gates.insert(key, g);
                Bit::Var(g)
            }
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        let (na, nb) = (self.not(a), self.not(b));
        let n = self.and(na, nb);
        self.not(n)
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = Bit>) -> Bit {
        let mut acc = TRUE;
        for b in items {
            acc = self.and(acc, b);
            if acc == FALSE {
                break;
            }
        }
        acc
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = Bit>) -> Bit {
        let mut acc = FALSE;
        for b in items {
            acc = self.or(acc, b);
            if acc == TRUE {
                break;
            }
        }
        acc
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        let nb = self.not(b);
        let na = self.not(a);
        let l = self.and(a, nb);
        let r = self.and(na, b);
        self.or(l, r)
    }

    /// True when fewer than `n` of `bits` are true.
    pub fn fewer_than(&mut self, n: u32, bits: &[Bit]) -> Bit {
        let n = n as usize;
        if n == 0 {
            return FALSE;
        }
        // at_least[j]: at least j of the bits seen so far, for j in 0..=n.
        let mut at_least = vec![FALSE; n + 1];
        at_least[0] = TRUE;
        for &b in bits {
            if b == FALSE {
                continue;
            }
            for j in (1..=n).rev() {
                let step = self.and(at_least[j - 1], b);
                at_least[j] = self.or(at_least[j], step);
            }
        }
        self.not(at_least[n])
    }

    pub fn assert(&mut self, b: Bit) {
        match b {
            TRUE => {}
            FALSE => self.solver.add_clause(&[]),
            Bit::Var(l) => self.solver.add_clause(&[l]),
        }
    }

    // ----- names -----

    fn param(&mut self, n: &NodeId) -> Vec<Bit> {
        if let Some(v) = self.params.get(n) {
            return v.clone();
        }
        let size = self.size();
        let v: Vec<Bit> = (0..size).map(|_| Bit::Var(self.solver.new_lit())).collect();
        let lits: Vec<Lit> = v.iter().map(|b| lit_of(*b)).collect();
        self.solver.add_clause(&lits);
        for a in 0..size {
            for b in a + 1..size {
                self.solver.add_clause(&[!lits[a], !lits[b]]);
            }
        }
        self.params.insert(n.clone(), v.clone());
        v
    }

    /// Membership vector of the node named `n`: a constant for nodes of the
    /// universe, a one-hot parameter otherwise.
    pub fn nominal(&mut self, n: &NodeId) -> Vec<Bit> {
        match (self.free, self.index.get(n)) {
            (false, Some(&k)) => (0..self.size()).map(|x| Const(x == k)).collect(),
            _ => self.param(n),
        }
    }

    fn label(&self, a: &str) -> Result<&Vec<Bit>, LogicError> {
        self.labels.get(a).ok_or_else(|| LogicError::UnknownName(a.to_string()))
    }

    fn edge_table(&self, r: &str) -> Result<&Vec<Vec<Bit>>, LogicError> {
        self.edges.get(r).ok_or_else(|| LogicError::UnknownName(r.to_string()))
    }

    /// Bit for "`x` has an `r`-successor `y`".
    fn link(&self, r: &Role, x: usize, y: usize) -> Result<Bit, LogicError> {
        Ok(match r {
            Role::Basic(n) => self.edge_table(n)?[x][y],
            Role::Inverse(n) => self.edge_table(n)?[y][x],
            Role::Universal => TRUE,
        })
    }

    pub fn active(&self) -> &[Bit] {
        &self.active
    }

    pub fn label_bits(&self, a: &str) -> Result<Vec<Bit>, LogicError> {
        self.label(a).cloned()
    }

    pub fn edge_bit(&self, r: &str, x: usize, y: usize) -> Result<Bit, LogicError> {
        Ok(self.edge_table(r)?[x][y])
    }

    // ----- formulas -----

    /// Extension of `c`, one bit per node of the universe.
    pub fn concept(&mut self, c: &Concept) -> Result<Vec<Bit>, LogicError> {
        let size = self.size();
        Ok(match c {
            Concept::Top => vec![TRUE; size],
            Concept::Atomic(a) => self.label(a)?.clone(),
            Concept::Nominal(n) => self.nominal(n),
            Concept::Active => self.active.clone(),
            Concept::Not(d) => self.concept(d)?.into_iter().map(|b| self.not(b)).collect(),
            Concept::Or(a, b) => {
                let (a, b) = (self.concept(a)?, self.concept(b)?);
                a.into_iter().zip(b).map(|(x, y)| self.or(x, y)).collect()
            }
            Concept::Exists(Role::Universal, d) => {
                let inner = self.concept(d)?;
                vec![self.or_all(inner); size]
            }
            Concept::Exists(r, d) => {
                let inner = self.concept(d)?;
                let mut out = Vec::with_capacity(size);
                for x in 0..size {
                    let mut acc = FALSE;
                    for (y, &dy) in inner.iter().enumerate() {
                        let l = self.link(r, x, y)?;
                        let t = self.and(l, dy);
                        acc = self.or(acc, t);
                    }
                    out.push(acc);
                }
                out
            }
            Concept::ExistsSelf(Role::Universal) => vec![TRUE; size],
            Concept::ExistsSelf(r) => (0..size).map(|x| self.link(r, x, x)).collect::<Result<_, _>>()?,
            Concept::Lt(n, Role::Universal, d) => {
                let inner = self.concept(d)?;
                vec![self.fewer_than(*n, &inner); size]
            }
            Concept::Lt(n, r, d) => {
                let inner = self.concept(d)?;
                let mut out = Vec::with_capacity(size);
                for x in 0..size {
                    let mut bits = Vec::with_capacity(size);
                    for (y, &dy) in inner.iter().enumerate() {
                        let l = self.link(r, x, y)?;
                        bits.push(self.and(l, dy));
                    }
                    out.push(self.fewer_than(*n, &bits));
                }
                out
            }
            Concept::Subst(..) => return Err(LogicError::PendingSubstitution),
        })
    }

    fn term(&mut self, t: &Term, env: &[(String, usize)]) -> Result<TermVal, LogicError> {
        match t {
            Term::Var(x) => env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, k)| TermVal::Node(*k))
                .ok_or_else(|| LogicError::UnboundVariable(x.clone())),
            Term::Const(n) => Ok(match (self.free, self.index.get(n)) {
                (false, Some(&k)) => TermVal::Node(k),
                _ => TermVal::Param(self.param(n)),
            }),
        }
    }

    /// Bits `b_x` that hold when the term denotes node `x`.
    fn term_bits(&self, t: &TermVal) -> Vec<Bit> {
        match t {
            TermVal::Node(k) => (0..self.size()).map(|x| Const(x == *k)).collect(),
            TermVal::Param(v) => v.clone(),
        }
    }

    /// `∨_x (t = x ∧ f(x))`.
    fn through(&mut self, t: &TermVal, f: impl Fn(&Self, usize) -> Result<Bit, LogicError>) -> Result<Bit, LogicError> {
        if let TermVal::Node(k) = t {
            return f(self, *k);
        }
        let sel = self.term_bits(t);
        let mut acc = FALSE;
        for (x, s) in sel.into_iter().enumerate() {
            let v = f(self, x)?;
            let t = self.and(s, v);
            acc = self.or(acc, t);
        }
        Ok(acc)
    }

    pub fn fol(&mut self, f: &Fol, env: &mut Vec<(String, usize)>) -> Result<Bit, LogicError> {
        Ok(match f {
            Fol::Top => TRUE,
            Fol::Concept(c, t) => {
                let t = self.term(t, env)?;
                let bits = self.label(c)?.clone();
                self.through(&t, |_, x| Ok(bits[x]))?
            }
            Fol::Active(t) => {
                let t = self.term(t, env)?;
                let bits = self.active.clone();
                self.through(&t, |_, x| Ok(bits[x]))?
            }
            Fol::Role(r, s, t) => {
                let (s, t) = (self.term(s, env)?, self.term(t, env)?);
                let table = self.edge_table(r)?.clone();
                let tb = self.term_bits(&t);
                let mut acc = FALSE;
                let sb = self.term_bits(&s);
                for (x, sx) in sb.into_iter().enumerate() {
                    if sx == FALSE {
                        continue;
                    }
                    let mut row = FALSE;
                    for (y, ty) in tb.iter().enumerate() {
                        let e = self.and(*ty, table[x][y]);
                        row = self.or(row, e);
                    }
                    let v = self.and(sx, row);
                    acc = self.or(acc, v);
                }
                acc
            }
            Fol::Eq(s, t) => {
                let (s, t) = (self.term(s, env)?, self.term(t, env)?);
                let (sb, tb) = (self.term_bits(&s), self.term_bits(&t));
                let mut acc = FALSE;
                for (a, b) in sb.into_iter().zip(tb) {
                    let v = self.and(a, b);
                    acc = self.or(acc, v);
                }
                acc
            }
            Fol::Not(g) => {
                let v = self.fol(g, env)?;
                self.not(v)
            }
            Fol::Or(a, b) => {
                let a = self.fol(a, env)?;
                if a == TRUE {
                    return Ok(TRUE);
                }
                let b = self.fol(b, env)?;
                self.or(a, b)
            }
            Fol::Exists(x, g) => {
                let mut acc = FALSE;
                for k in 0..self.size() {
                    env.push((x.clone(), k));
                    let v = self.fol(g, env);
                    env.pop();
                    acc = self.or(acc, v?);
                    if acc == TRUE {
                        break;
                    }
                }
                acc
            }
            Fol::Subst(..) => return Err(LogicError::PendingSubstitution),
        })
    }

    // ----- solving -----

    pub fn solve(&mut self, assumptions: &[Lit]) -> Option<Model> {
        self.solver.assume(assumptions);
        match self.solver.solve() {
            Ok(true) => {
                let model = self.solver.model().expect("satisfiable");
                Some(self.decode(&model))
            }
            Ok(false) => None,
            Err(e) => panic!("SAT solver failure: {e}"),
        }
    }

    /// A model that also tries to follow random polarities on the graph
    /// variables; fewer of them are imposed after each failed attempt.
    pub fn solve_random(&mut self, rng: &mut impl Rng) -> Option<Model> {
        let mut picks: Vec<Lit> = self
            .graph_vars
            .iter()
            .filter_map(|l| {
                let keep = rng.gen_bool(0.5);
                let neg = rng.gen_bool(0.6);
                keep.then_some(if neg { !*l } else { *l })
            })
            .collect();
        loop {
            if let Some(m) = self.solve(&picks) {
                return Some(m);
            }
            if picks.is_empty() {
                return None;
            }
            picks.truncate(picks.len() / 2);
        }
    }

    fn decode(&self, model: &[Lit]) -> Model {
        let value = |b: Bit| match b {
            Const(v) => v,
            Bit::Var(l) => {
                let m = model[l.index()];
                if l.is_positive() {
                    m.is_positive()
                } else {
                    m.is_negative()
                }
            }
        };
        let alphabet = Alphabet {
            concepts: self.labels.keys().cloned().collect(),
            roles: self.edges.keys().cloned().collect(),
        };
        let mut g = LDGraph::new(alphabet);
        for (x, n) in self.names.iter().enumerate() {
            if value(self.active[x]) {
                let labels: Vec<String> =
                    self.labels.iter().filter(|(_, v)| value(v[x])).map(|(c, _)| c.clone()).collect();
                g.add_node(n.clone(), labels).expect("decoded node");
            } else {
                g.add_reserved(n.clone()).expect("decoded node");
            }
        }
        let mut k = 0;
        for (r, table) in &self.edges {
            for (x, row) in table.iter().enumerate() {
                for (y, e) in row.iter().enumerate() {
                    if value(*e) {
                        g.add_edge(format!("e{k}"), self.names[x].clone(), self.names[y].clone(), r)
                            .expect("decoded edge");
                        k += 1;
                    }
                }
            }
        }
        let valuation = self
            .params
            .iter()
            .filter_map(|(p, v)| v.iter().position(|b| value(*b)).map(|x| (p.clone(), self.names[x].clone())))
            .collect();
        Model { graph: g, valuation }
    }
}

fn lit_of(b: Bit) -> Lit {
    match b {
        Bit::Var(l) => l,
        Const(_) => unreachable!("parameter bits are variables"),
    }
}

fn implies_clause(solver: &mut Solver<'static>, a: Bit, b: Bit) {
    match (a, b) {
        (FALSE, _) | (_, TRUE) => {}
        (Bit::Var(x), Bit::Var(y)) => solver.add_clause(&[!x, y]),
        (Bit::Var(x), FALSE) => solver.add_clause(&[!x]),
        (TRUE, Bit::Var(y)) => solver.add_clause(&[y]),
        (TRUE, FALSE) => solver.add_clause(&[]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval_concept_with, eval_fol_with};
    use crate::random::{random_concept, random_fol, random_graph, rng, small_alphabet, FormulaShape, GraphShape};

    fn agrees_on_fixed_graphs(seed: u64, cases: usize) {
        let mut r = rng(seed);
        let alphabet = small_alphabet();
        for _ in 0..cases {
            let g = random_graph(&mut r, &alphabet, &GraphShape::default());
            let noms: Vec<NodeId> = g.universe().iter().cloned().collect();
            let c = random_concept(&mut r, &alphabet, &noms, &FormulaShape::default(), 4);
            let expected = eval_concept_with(&g, &c, &Valuation::new()).unwrap();
            let mut enc = Encoder::fixed(&g);
            let bits = enc.concept(&c).unwrap();
            for (n, b) in g.universe().iter().zip(bits) {
                assert_eq!(b, Const(expected.contains(n)), "{c} at {n}");
            }
            let f = random_fol(&mut r, &alphabet, &noms, 3);
            let expected = eval_fol_with(&g, &f, &Default::default(), &Valuation::new()).unwrap();
            let mut enc = Encoder::fixed(&g);
            assert_eq!(enc.fol(&f, &mut Vec::new()).unwrap(), Const(expected), "{f}");
        }
    }

    #[test]
    fn constant_folding_matches_evaluation() {
        agrees_on_fixed_graphs(7, 300);
    }

    #[test]
    fn free_models_evaluate_like_the_encoding() {
        let mut r = rng(11);
        let alphabet = small_alphabet();
        let shape = FormulaShape::default();
        let params = vec![NodeId::from("?p"), NodeId::from("?q")];
        for _ in 0..150 {
            let c = random_concept(&mut r, &alphabet, &params, &shape, 3);
            let mut enc = Encoder::free(&alphabet, 3, 1);
            let bits = enc.concept(&c).unwrap();
            let want = r.gen_bool(0.5);
            let target = if want { bits[0] } else { enc.not(bits[0]) };
            enc.assert(target);
            if let Some(m) = enc.solve_random(&mut r) {
                let ext = eval_concept_with(&m.graph, &c, &m.valuation).unwrap();
                assert_eq!(ext.contains(&NodeId::from("n0")), want, "{c}");
            }
        }
    }

    #[test]
    fn counting_threshold() {
        let mut enc = Encoder::free(&Alphabet::new(Vec::<String>::new(), Vec::<String>::new()).unwrap(), 0, 0);
        let a = Bit::Var(enc.solver.new_lit());
        let b = Bit::Var(enc.solver.new_lit());
        let c = Bit::Var(enc.solver.new_lit());
        let lt2 = enc.fewer_than(2, &[a, b, c, TRUE]);
        let l = |b: Bit| lit_of(b);
        enc.assert(lt2);
        assert!(enc.solve(&[!l(a), !l(b), !l(c)]).is_some());
        assert!(enc.solve(&[l(a)]).is_none());
        assert_eq!(enc.fewer_than(1, &[FALSE, FALSE]), TRUE);
        assert_eq!(enc.fewer_than(0, &[]), FALSE);
    }
}
