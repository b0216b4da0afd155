//! Decorated graphs and the elementary actions that transform them.
//!
//! A graph owns a *universe* of node identifiers. The active nodes are the
//! ones that currently exist; the others are reserved names that carry no
//! labels and no edges until an action such as `add_N` or `cl` activates
//! them. Every action is a pure function from graph to graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Names that may not be used as concept or role names.
pub const RESERVED_TOKENS: [&str; 4] = ["top", "Self", "U", "Active"];

/// Node identifier. Identifiers starting with `?` are *parameters*: free
/// nominals that a valuation binds to real nodes (see the verifier).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_param(&self) -> bool {
        self.0.starts_with('?')
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

impl EdgeId {
    pub fn new(s: impl Into<String>) -> Self {
        EdgeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_string())
    }
}

impl From<String> for EdgeId {
    fn from(s: String) -> Self {
        EdgeId(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
}

impl Alphabet {
    pub fn new<C, R>(concepts: C, roles: R) -> Result<Self, GraphError>
    where
        C: IntoIterator,
        C::Item: Into<String>,
        R: IntoIterator,
        R::Item: Into<String>,
    {
        let alphabet = Alphabet {
            concepts: concepts.into_iter().map(Into::into).collect(),
            roles: roles.into_iter().map(Into::into).collect(),
        };
        for name in alphabet.concepts.iter().chain(alphabet.roles.iter()) {
            if name.is_empty() || RESERVED_TOKENS.contains(&name.as_str()) {
                return Err(GraphError::InvalidName(name.clone()));
            }
        }
        Ok(alphabet)
    }

    pub fn has_concept(&self, c: &str) -> bool {
        self.concepts.contains(c)
    }

    pub fn has_role(&self, r: &str) -> bool {
        self.roles.contains(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub tgt: NodeId,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
    #[error("node `{0}` is already active")]
    NodeNotReserved(NodeId),
    #[error("node `{0}` is not active")]
    InactiveNode(NodeId),
    #[error("`{0}` is not a basic concept or role of the alphabet")]
    NonBasicLabel(String),
    #[error("edge endpoint `{0}` is not active")]
    InactiveEndpoint(NodeId),
    #[error("edge id `{0}` already in use")]
    DuplicateEdge(EdgeId),
    #[error("duplicate node `{0}`")]
    DuplicateNode(NodeId),
    #[error("clone source and target must differ (`{0}`)")]
    CloneOntoSelf(NodeId),
    #[error("invalid alphabet name `{0}`")]
    InvalidName(String),
    #[error("action {index}: {error}")]
    AtIndex { index: usize, error: Box<GraphError> },
}

/// A finite logically decorated graph.
///
/// Structural equality compares every component, including identifiers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LDGraph {
    alphabet: Alphabet,
    universe: BTreeSet<NodeId>,
    active: BTreeSet<NodeId>,
    labels: BTreeMap<NodeId, BTreeSet<String>>,
    edges: BTreeMap<EdgeId, Edge>,
}

impl LDGraph {
    pub fn new(alphabet: Alphabet) -> Self {
        LDGraph {
            alphabet,
            universe: BTreeSet::new(),
            active: BTreeSet::new(),
            labels: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn universe(&self) -> &BTreeSet<NodeId> {
        &self.universe
    }

    pub fn active(&self) -> &BTreeSet<NodeId> {
        &self.active
    }

    pub fn edges(&self) -> &BTreeMap<EdgeId, Edge> {
        &self.edges
    }

    pub fn edge(&self, e: &EdgeId) -> Option<&Edge> {
        self.edges.get(e)
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.universe.contains(n)
    }

    pub fn is_active(&self, n: &NodeId) -> bool {
        self.active.contains(n)
    }

    pub fn reserved(&self) -> impl Iterator<Item = &NodeId> {
        self.universe.iter().filter(move |n| !self.active.contains(*n))
    }

    /// Labels of `n`; empty for reserved or unknown nodes.
    pub fn labels(&self, n: &NodeId) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.labels.get(n).unwrap_or(&EMPTY)
    }

    pub fn has_label(&self, n: &NodeId, c: &str) -> bool {
        self.labels.get(n).is_some_and(|l| l.contains(c))
    }

    /// Distinct `(src, tgt)` pairs carrying `role`.
    pub fn role_pairs(&self, role: &str) -> BTreeSet<(NodeId, NodeId)> {
        self.edges
            .values()
            .filter(|e| e.role == role)
            .map(|e| (e.src.clone(), e.tgt.clone()))
            .collect()
    }

    pub fn has_edge(&self, src: &NodeId, tgt: &NodeId, role: &str) -> bool {
        self.edges
            .values()
            .any(|e| &e.src == src && &e.tgt == tgt && e.role == role)
    }

    /// Adds a reserved node to the universe.
    pub fn add_reserved(&mut self, n: impl Into<NodeId>) -> Result<(), GraphError> {
        let n = n.into();
        if !self.universe.insert(n.clone()) {
            return Err(GraphError::DuplicateNode(n));
        }
        Ok(())
    }

    /// Adds an active node with the given basic labels.
    pub fn add_node<I, S>(&mut self, n: impl Into<NodeId>, labels: I) -> Result<(), GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let n = n.into();
        let labels: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        for c in &labels {
            if !self.alphabet.has_concept(c) {
                return Err(GraphError::NonBasicLabel(c.clone()));
            }
        }
        self.add_reserved(n.clone())?;
        self.active.insert(n.clone());
        if !labels.is_empty() {
            self.labels.insert(n, labels);
        }
        Ok(())
    }

    /// Adds an edge with an explicit identifier.
    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        src: impl Into<NodeId>,
        tgt: impl Into<NodeId>,
        role: &str,
    ) -> Result<(), GraphError> {
        let (id, src, tgt) = (id.into(), src.into(), tgt.into());
        self.check_edge(&src, &tgt, role)?;
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        self.edges.insert(id, Edge { src, tgt, role: role.to_string() });
        Ok(())
    }

    fn check_edge(&self, src: &NodeId, tgt: &NodeId, role: &str) -> Result<(), GraphError> {
        for n in [src, tgt] {
            if !self.universe.contains(n) {
                return Err(GraphError::UnknownNode(n.clone()));
            }
            if !self.active.contains(n) {
                return Err(GraphError::InactiveEndpoint(n.clone()));
            }
        }
        if !self.alphabet.has_role(role) {
            return Err(GraphError::NonBasicLabel(role.to_string()));
        }
        Ok(())
    }

    fn require_active(&self, n: &NodeId) -> Result<(), GraphError> {
        if !self.universe.contains(n) {
            Err(GraphError::UnknownNode(n.clone()))
        } else if !self.active.contains(n) {
            Err(GraphError::InactiveNode(n.clone()))
        } else {
            Ok(())
        }
    }

    fn require_reserved(&self, n: &NodeId) -> Result<(), GraphError> {
        if !self.universe.contains(n) {
            Err(GraphError::UnknownNode(n.clone()))
        } else if self.active.contains(n) {
            Err(GraphError::NodeNotReserved(n.clone()))
        } else {
            Ok(())
        }
    }

    fn require_concept(&self, c: &str) -> Result<(), GraphError> {
        if self.alphabet.has_concept(c) {
            Ok(())
        } else {
            Err(GraphError::NonBasicLabel(c.to_string()))
        }
    }

    /// Smallest `n<k>` not in the universe.
    pub fn fresh_node_id(&self) -> NodeId {
        (0..)
            .map(|k| NodeId(format!("n{k}")))
            .find(|n| !self.universe.contains(n))
            .expect("unbounded range")
    }

    /// Smallest `e<k>` not used by an edge.
    pub fn fresh_edge_id(&self) -> EdgeId {
        (0..)
            .map(|k| EdgeId(format!("e{k}")))
            .find(|e| !self.edges.contains_key(e))
            .expect("unbounded range")
    }

    /// Checks the structural invariants; used by tests and file loading.
    pub fn validate(&self) -> Result<(), GraphError> {
        for n in &self.active {
            if !self.universe.contains(n) {
                return Err(GraphError::UnknownNode(n.clone()));
            }
        }
        for (n, ls) in &self.labels {
            if !self.active.contains(n) {
                return Err(GraphError::InactiveNode(n.clone()));
            }
            for c in ls {
                self.require_concept(c)?;
            }
        }
        for e in self.edges.values() {
            self.check_edge(&e.src, &e.tgt, &e.role)?;
        }
        Ok(())
    }

    /// Graph with the nodes renamed through `f` (edges keep their ids).
    pub fn rename_nodes(&self, f: impl Fn(&NodeId) -> NodeId) -> LDGraph {
        LDGraph {
            alphabet: self.alphabet.clone(),
            universe: self.universe.iter().map(&f).collect(),
            active: self.active.iter().map(&f).collect(),
            labels: self.labels.iter().map(|(n, l)| (f(n), l.clone())).collect(),
            edges: self
                .edges
                .iter()
                .map(|(id, e)| {
                    (id.clone(), Edge { src: f(&e.src), tgt: f(&e.tgt), role: e.role.clone() })
                })
                .collect(),
        }
    }
}

/// Role sets of a clone action.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CloneParams {
    pub r_in: BTreeSet<String>,
    pub r_out: BTreeSet<String>,
    pub r_l_in: BTreeSet<String>,
    pub r_l_out: BTreeSet<String>,
    pub r_l_l: BTreeSet<String>,
}

impl CloneParams {
    /// Every set equal to `roles`: each incident edge and loop is copied.
    pub fn all(roles: &BTreeSet<String>) -> Self {
        CloneParams {
            r_in: roles.clone(),
            r_out: roles.clone(),
            r_l_in: roles.clone(),
            r_l_out: roles.clone(),
            r_l_l: roles.clone(),
        }
    }

    pub fn sets(&self) -> [&BTreeSet<String>; 5] {
        [&self.r_in, &self.r_out, &self.r_l_in, &self.r_l_out, &self.r_l_l]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementaryAction {
    AddNode(NodeId),
    DelNode(NodeId),
    AddConcept(NodeId, String),
    DelConcept(NodeId, String),
    /// `add_E`; `id` is `None` for the shorthand that allocates a fresh id.
    AddEdge { id: Option<EdgeId>, src: NodeId, tgt: NodeId, role: String },
    DelEdgeId(EdgeId),
    /// `del_E(i,j,r)`: removes every edge with that triple.
    DelEdge { src: NodeId, tgt: NodeId, role: String },
    /// `i >> j`: retargets the incoming edges of `i` to `j`.
    Redirect(NodeId, NodeId),
    Merge(NodeId, NodeId),
    Clone(NodeId, NodeId, CloneParams),
}

pub type ActionSeq = Vec<ElementaryAction>;

impl ElementaryAction {
    pub fn add_edge(src: impl Into<NodeId>, tgt: impl Into<NodeId>, role: &str) -> Self {
        ElementaryAction::AddEdge { id: None, src: src.into(), tgt: tgt.into(), role: role.into() }
    }

    pub fn del_edge(src: impl Into<NodeId>, tgt: impl Into<NodeId>, role: &str) -> Self {
        ElementaryAction::DelEdge { src: src.into(), tgt: tgt.into(), role: role.into() }
    }

    /// Node arguments in order of appearance.
    pub fn nodes(&self) -> Vec<&NodeId> {
        use ElementaryAction::*;
        match self {
            AddNode(i) | DelNode(i) | AddConcept(i, _) | DelConcept(i, _) => vec![i],
            AddEdge { src, tgt, .. } | DelEdge { src, tgt, .. } => vec![src, tgt],
            DelEdgeId(_) => vec![],
            Redirect(i, j) | Merge(i, j) | Clone(i, j, _) => vec![i, j],
        }
    }

    /// Renames node arguments through `f`.
    pub fn map_nodes(&self, f: &impl Fn(&NodeId) -> NodeId) -> Self {
        use ElementaryAction::*;
        match self {
            AddNode(i) => AddNode(f(i)),
            DelNode(i) => DelNode(f(i)),
            AddConcept(i, c) => AddConcept(f(i), c.clone()),
            DelConcept(i, c) => DelConcept(f(i), c.clone()),
            AddEdge { id, src, tgt, role } => {
                AddEdge { id: id.clone(), src: f(src), tgt: f(tgt), role: role.clone() }
            }
            DelEdgeId(e) => DelEdgeId(e.clone()),
            DelEdge { src, tgt, role } => DelEdge { src: f(src), tgt: f(tgt), role: role.clone() },
            Redirect(i, j) => Redirect(f(i), f(j)),
            Merge(i, j) => Merge(f(i), f(j)),
            Clone(i, j, p) => Clone(f(i), f(j), p.clone()),
        }
    }

    /// Short kind name (`add_N`, `mrg`, ...).
    pub fn kind(&self) -> &'static str {
        use ElementaryAction::*;
        match self {
            AddNode(_) => "add_N",
            DelNode(_) => "del_N",
            AddConcept(..) => "add_C",
            DelConcept(..) => "del_C",
            AddEdge { .. } => "add_E",
            DelEdgeId(_) | DelEdge { .. } => "del_E",
            Redirect(..) => "redirect",
            Merge(..) => "mrg",
            Clone(..) => "cl",
        }
    }
}

/// Applies one elementary action, returning the new graph.
pub fn apply_elementary(g: &LDGraph, a: &ElementaryAction) -> Result<LDGraph, GraphError> {
    use ElementaryAction::*;
    let mut out = g.clone();
    match a {
        AddNode(i) => {
            g.require_reserved(i)?;
            out.active.insert(i.clone());
        }
        DelNode(i) => {
            g.require_active(i)?;
            out.active.remove(i);
            out.labels.remove(i);
            out.edges.retain(|_, e| &e.src != i && &e.tgt != i);
        }
        AddConcept(i, c) => {
            g.require_active(i)?;
            g.require_concept(c)?;
            out.labels.entry(i.clone()).or_default().insert(c.clone());
        }
        DelConcept(i, c) => {
            g.require_active(i)?;
            g.require_concept(c)?;
            if let Some(ls) = out.labels.get_mut(i) {
                ls.remove(c);
                if ls.is_empty() {
                    out.labels.remove(i);
                }
            }
        }
        AddEdge { id, src, tgt, role } => {
            g.check_edge(src, tgt, role)?;
            let id = match id {
                Some(id) if g.edges.contains_key(id) => {
                    return Err(GraphError::DuplicateEdge(id.clone()))
                }
                Some(id) => id.clone(),
                None => g.fresh_edge_id(),
            };
            out.edges.insert(id, Edge { src: src.clone(), tgt: tgt.clone(), role: role.clone() });
        }
        DelEdgeId(e) => {
            if out.edges.remove(e).is_none() {
                return Err(GraphError::UnknownEdge(e.clone()));
            }
        }
        DelEdge { src, tgt, role } => {
            g.check_edge(src, tgt, role)?;
            out.edges.retain(|_, e| !(&e.src == src && &e.tgt == tgt && &e.role == role));
        }
        Redirect(i, j) => {
            g.require_active(i)?;
            g.require_active(j)?;
            for e in out.edges.values_mut() {
                if &e.tgt == i {
                    e.tgt = j.clone();
                }
            }
        }
        Merge(i, j) => {
            g.require_active(i)?;
            g.require_active(j)?;
            if i != j {
                for e in out.edges.values_mut() {
                    if &e.src == j {
                        e.src = i.clone();
                    }
                    if &e.tgt == j {
                        e.tgt = i.clone();
                    }
                }
                if let Some(lj) = out.labels.remove(j) {
                    out.labels.entry(i.clone()).or_default().extend(lj);
                }
                out.active.remove(j);
            }
        }
        Clone(i, j, p) => {
            if i == j {
                return Err(GraphError::CloneOntoSelf(i.clone()));
            }
            if !g.universe.contains(i) {
                return Err(GraphError::UnknownNode(i.clone()));
            }
            g.require_reserved(j)?;
            for r in p.sets().into_iter().flatten() {
                if !g.alphabet.has_role(r) {
                    return Err(GraphError::NonBasicLabel(r.clone()));
                }
            }
            out.active.insert(j.clone());
            let lj: BTreeSet<String> = g.labels(i).clone();
            if !lj.is_empty() {
                out.labels.insert(j.clone(), lj);
            }
            for (src, tgt, role) in clone_edges(g, i, j, p) {
                let id = out.fresh_edge_id();
                out.edges.insert(id, Edge { src, tgt, role });
            }
        }
    }
    Ok(out)
}

/// New edges created by `cl(i,j,p)`, in allocation order: the incoming,
/// outgoing, loop-in, loop-out and loop-loop families, each in edge-id order.
pub fn clone_edges(
    g: &LDGraph,
    i: &NodeId,
    j: &NodeId,
    p: &CloneParams,
) -> Vec<(NodeId, NodeId, String)> {
    let mut fams: [Vec<(NodeId, NodeId, String)>; 5] = Default::default();
    for e in g.edges.values() {
        let r = e.role.clone();
        let is_loop = &e.src == i && &e.tgt == i;
        if &e.tgt == i && &e.src != i && p.r_in.contains(&r) {
            fams[0].push((e.src.clone(), j.clone(), r.clone()));
        }
        if &e.src == i && &e.tgt != i && p.r_out.contains(&r) {
            fams[1].push((j.clone(), e.tgt.clone(), r.clone()));
        }
        if is_loop {
            if p.r_l_in.contains(&r) {
                fams[2].push((i.clone(), j.clone(), r.clone()));
            }
            if p.r_l_out.contains(&r) {
                fams[3].push((j.clone(), i.clone(), r.clone()));
            }
            if p.r_l_l.contains(&r) {
                fams[4].push((j.clone(), j.clone(), r.clone()));
            }
        }
    }
    fams.into_iter().flatten().collect()
}

/// Left fold of [`apply_elementary`]; errors carry the failing index.
pub fn apply_sequence(g: &LDGraph, alpha: &[ElementaryAction]) -> Result<LDGraph, GraphError> {
    let mut cur = g.clone();
    for (index, a) in alpha.iter().enumerate() {
        cur = apply_elementary(&cur, a)
            .map_err(|e| GraphError::AtIndex { index, error: Box::new(e) })?;
    }
    Ok(cur)
}

/// Adds one reserved node named by the smallest unused `n<k>`.
pub fn reserve_fresh(g: &LDGraph) -> (LDGraph, NodeId) {
    let id = g.fresh_node_id();
    let mut out = g.clone();
    out.universe.insert(id.clone());
    (out, id)
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(default)]
    concepts: Vec<String>,
    #[serde(default)]
    roles: Vec<String>,
    #[serde(default)]
    nodes: Vec<NodeEntry>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
struct NodeEntry {
    id: NodeId,
    #[serde(default = "default_true")]
    active: bool,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    id: EdgeId,
    src: NodeId,
    tgt: NodeId,
    role: String,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Error)]
pub enum GraphFileError {
    #[error("malformed graph JSON: {0}")]
    Json(serde_json::Error),
    #[error("invalid graph: {0}")]
    Graph(GraphError),
}

impl From<serde_json::Error> for GraphFileError {
    fn from(e: serde_json::Error) -> Self {
        GraphFileError::Json(e)
    }
}

impl From<GraphError> for GraphFileError {
    fn from(e: GraphError) -> Self {
        GraphFileError::Graph(e)
    }
}

impl LDGraph {
    pub fn from_json(text: &str) -> Result<LDGraph, GraphFileError> {
        let file: GraphFile = serde_json::from_str(text)?;
        let mut g = LDGraph::new(Alphabet::new(file.concepts, file.roles)?);
        for n in file.nodes {
            if n.active {
                g.add_node(n.id, n.labels)?;
            } else if !n.labels.is_empty() {
                return Err(GraphError::InactiveNode(n.id).into());
            } else {
                g.add_reserved(n.id)?;
            }
        }
        for e in file.edges {
            g.add_edge(e.id, e.src, e.tgt, &e.role)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            concepts: self.alphabet.concepts.iter().cloned().collect(),
            roles: self.alphabet.roles.iter().cloned().collect(),
            nodes: self
                .universe
                .iter()
                .map(|n| NodeEntry {
                    id: n.clone(),
                    active: self.active.contains(n),
                    labels: self.labels(n).iter().cloned().collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(id, e)| EdgeEntry {
                    id: id.clone(),
                    src: e.src.clone(),
                    tgt: e.tgt.clone(),
                    role: e.role.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    /// Graphviz rendering; reserved nodes are drawn dashed.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for n in &self.universe {
            let labels: Vec<&str> = self.labels(n).iter().map(String::as_str).collect();
            let style = if self.is_active(n) { "solid" } else { "dashed" };
            s.push_str(&format!(
                "  \"{n}\" [label=\"{n}\\n{}\", style={style}];\n",
                labels.join(",")
            ));
        }
        for (id, e) in &self.edges {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}:{}\"];\n",
                e.src, e.tgt, id, e.role
            ));
        }
        s.push_str("}\n");
        s
    }
}
