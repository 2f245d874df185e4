//! The degeneration order on grid instantiations: assembly from verified certificates,
//! closure, Hasse reduction, consistency checks and DOT output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebras::derivation_dim;
use crate::catalog::{expected_der_dim, grid_types, instantiate, normalize_parameters, CanonicalType, CatalogError, Family};
use crate::certificates::{degeneration_instances, CertError, Certificate, Report, Status};
use crate::scalars::GaussRational;

/// Levels that occur in the figure of the degeneration graph.
pub const LEVEL_AXIS: [usize; 11] = [7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 25];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("certificate {0} failed verification; refusing to assemble")]
    FailedCertificate(String),
    #[error("cycle between {0} and {1}")]
    Cycle(String, String),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub ty: CanonicalType,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub provenance: String,
    /// Target parameters in terms of the source's, from the certificate.
    pub label: String,
    /// Added by transitivity rather than by a certificate.
    pub closure: bool,
}

/// Nodes are normalized types, kept sorted; edges are keyed by node index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DegenGraph {
    nodes: Vec<Node>,
    edges: BTreeMap<(usize, usize), Edge>,
}

fn key(t: &CanonicalType) -> (Family, Vec<String>) {
    t.sort_key()
}

impl DegenGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (&CanonicalType, &CanonicalType, &Edge)> {
        self.edges.iter().map(|(&(a, b), e)| (&self.nodes[a].ty, &self.nodes[b].ty, e))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, t: &CanonicalType) -> Option<usize> {
        self.nodes.binary_search_by(|n| key(&n.ty).cmp(&key(t))).ok()
    }

    /// Inserts a node (normalizing it); its level is computed from its algebra.
    pub fn add_node(&mut self, t: &CanonicalType) -> Result<usize, GraphError> {
        let t = normalize_parameters(t)?;
        match self.nodes.binary_search_by(|n| key(&n.ty).cmp(&key(&t))) {
            Ok(i) => Ok(i),
            Err(i) => {
                let level = derivation_dim(&instantiate(&t)?);
                self.nodes.insert(i, Node { ty: t, level });
                self.edges = std::mem::take(&mut self.edges)
                    .into_iter()
                    .map(|((a, b), e)| (((a + (a >= i) as usize), (b + (b >= i) as usize)), e))
                    .collect();
                Ok(i)
            }
        }
    }

    /// Adds `a → b` unless it is a loop or already present.
    pub fn add_edge(&mut self, a: &CanonicalType, b: &CanonicalType, provenance: &str, label: &str) -> Result<(), GraphError> {
        self.add_node(a)?;
        let j = self.add_node(b)?;
        let i = self.index_of(&normalize_parameters(a)?).expect("just inserted");
        if i != j {
            self.edges.entry((i, j)).or_insert_with(|| Edge {
                provenance: provenance.to_string(),
                label: label.to_string(),
                closure: false,
            });
        }
        Ok(())
    }

    pub fn has_edge(&self, a: &CanonicalType, b: &CanonicalType) -> bool {
        let (Ok(a), Ok(b)) = (normalize_parameters(a), normalize_parameters(b)) else { return false };
        match (self.index_of(&a), self.index_of(&b)) {
            (Some(i), Some(j)) => self.edges.contains_key(&(i, j)),
            _ => false,
        }
    }

    fn successors(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.nodes.len()];
        for &(a, b) in self.edges.keys() {
            out[a].insert(b);
        }
        out
    }

    /// Transitive closure; new edges carry `closure = true`.
    pub fn closure(&self) -> DegenGraph {
        let succ = self.successors();
        let mut g = self.clone();
        for start in 0..self.nodes.len() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<usize> = succ[start].iter().copied().collect();
            while let Some(v) = stack.pop() {
                if seen.insert(v) {
                    stack.extend(succ[v].iter().copied());
                }
            }
            for v in seen {
                if v != start {
                    g.edges.entry((start, v)).or_insert_with(|| Edge {
                        provenance: "transitivity".into(),
                        label: String::new(),
                        closure: true,
                    });
                }
            }
        }
        g
    }
}

/// Builds the closed graph: every grid type, every instance of a verified degeneration
/// certificate, and an edge from every node to the zero algebra. A failed report aborts.
pub fn assemble_graph(certs: &[Certificate], reports: &[Report], grid: &[GaussRational]) -> Result<DegenGraph, GraphError> {
    if let Some(r) = reports.iter().find(|r| r.status == Status::Failed) {
        return Err(GraphError::FailedCertificate(r.id.clone()));
    }
    let verified: BTreeSet<&str> = reports.iter().filter(|r| r.status == Status::Verified).map(|r| r.id.as_str()).collect();
    let mut g = DegenGraph::new();
    for t in grid_types(grid) {
        g.add_node(&t)?;
    }
    for c in certs {
        let Certificate::Degeneration(d) = c else { continue };
        if !verified.contains(d.id.as_str()) {
            continue;
        }
        for inst in degeneration_instances(d, grid)? {
            g.add_edge(&inst.source, &inst.target, &d.id, &inst.label)?;
        }
    }
    let zero = CanonicalType::plain(Family::Zero);
    g.add_node(&zero)?;
    let others: Vec<CanonicalType> = g.nodes.iter().map(|n| n.ty.clone()).filter(|t| *t != zero).collect();
    for t in others {
        g.add_edge(&t, &zero, "zero multiplication", "")?;
    }
    Ok(g.closure())
}

/// The unique minimal edge set with the same closure. Edges keep their provenance.
pub fn transitive_reduction(g: &DegenGraph) -> Result<DegenGraph, GraphError> {
    let c = g.closure();
    for &(a, b) in c.edges.keys() {
        if c.edges.contains_key(&(b, a)) {
            return Err(GraphError::Cycle(c.nodes[a].ty.to_string(), c.nodes[b].ty.to_string()));
        }
    }
    let succ = c.successors();
    let edges = c
        .edges
        .iter()
        .filter(|((a, b), _)| !succ[*a].iter().any(|m| succ[*m].contains(b)))
        .map(|(k, e)| (*k, e.clone()))
        .collect();
    Ok(DegenGraph { nodes: c.nodes, edges })
}

/// A `(source, target)` pair ruled out by a non-degeneration certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockedPair {
    pub certificate: String,
    pub source: CanonicalType,
    pub target: CanonicalType,
}

/// Every blocked pair of every non-degeneration certificate on the grid, normalized.
pub fn blocked_pairs(certs: &[Certificate], grid: &[GaussRational]) -> Result<Vec<BlockedPair>, GraphError> {
    let mut out = Vec::new();
    for c in certs {
        for (s, t) in c.blocked_pairs(grid)? {
            out.push(BlockedPair {
                certificate: c.id().to_string(),
                source: normalize_parameters(&s)?,
                target: normalize_parameters(&t)?,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    LevelNotIncreasing { from: String, to: String, from_level: usize, to_level: usize },
    LevelMismatch { node: String, computed: usize, expected: usize },
    OffAxis { node: String, level: usize },
    Contradiction { from: String, to: String, certificate: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub nodes_checked: usize,
    pub edges_checked: usize,
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Strict level increase along every edge of the closure, levels against the closed-form
/// table and the figure's axis, and no edge that a non-degeneration certificate forbids.
pub fn consistency_check(g: &DegenGraph, blocked: &[BlockedPair]) -> ConsistencyReport {
    let c = g.closure();
    let mut out = ConsistencyReport { nodes_checked: c.nodes.len(), edges_checked: c.edges.len(), ..Default::default() };
    for n in &c.nodes {
        let expected = expected_der_dim(&n.ty);
        if expected != n.level {
            out.violations.push(Violation::LevelMismatch { node: n.ty.to_string(), computed: n.level, expected });
        }
        if !LEVEL_AXIS.contains(&n.level) {
            out.violations.push(Violation::OffAxis { node: n.ty.to_string(), level: n.level });
        }
    }
    for &(a, b) in c.edges.keys() {
        let (na, nb) = (&c.nodes[a], &c.nodes[b]);
        if na.level >= nb.level {
            out.violations.push(Violation::LevelNotIncreasing {
                from: na.ty.to_string(),
                to: nb.ty.to_string(),
                from_level: na.level,
                to_level: nb.level,
            });
        }
    }
    for p in blocked {
        if c.has_edge(&p.source, &p.target) {
            out.violations.push(Violation::Contradiction {
                from: p.source.to_string(),
                to: p.target.to_string(),
                certificate: p.certificate.clone(),
            });
        }
    }
    out
}

/// Nodes without an incoming edge. These are only candidates for orbit closures that are
/// irreducible components.
pub fn maximal_nodes(g: &DegenGraph) -> Vec<CanonicalType> {
    let targets: BTreeSet<usize> = g.edges.keys().map(|&(_, b)| b).collect();
    (0..g.nodes.len()).filter(|i| !targets.contains(i)).map(|i| g.nodes[i].ty.clone()).collect()
}

/// Deterministic DOT text, one `rank=same` group per level, most generic level first.
pub fn emit_dot(g: &DegenGraph) -> String {
    let mut s = String::from("digraph degenerations {\n  rankdir=TB;\n  node [shape=box];\n");
    let mut levels: BTreeMap<usize, Vec<&Node>> = BTreeMap::new();
    for n in &g.nodes {
        levels.entry(n.level).or_default().push(n);
    }
    for (level, ns) in &levels {
        let names: Vec<String> = ns.iter().map(|n| format!("\"{}\";", n.ty)).collect();
        let _ = writeln!(s, "  {{ rank=same; {} }} // dim Der = {level}", names.join(" "));
    }
    for (a, b, e) in g.edges() {
        let _ = write!(s, "  \"{a}\" -> \"{b}\"");
        let mut attrs = Vec::new();
        if !e.label.is_empty() {
            attrs.push(format!("label=\"{}\"", e.label));
        }
        if e.closure {
            attrs.push("style=dashed".to_string());
        }
        if !attrs.is_empty() {
            let _ = write!(s, " [{}]", attrs.join(", "));
        }
        s.push_str(";\n");
    }
    s.push_str("}\n");
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    #[serde(rename = "type")]
    pub ty: String,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default)]
    pub closure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

pub fn to_json(g: &DegenGraph) -> GraphJson {
    GraphJson {
        nodes: g.nodes.iter().map(|n| NodeJson { ty: n.ty.to_string(), level: n.level }).collect(),
        edges: g
            .edges()
            .map(|(a, b, e)| EdgeJson {
                from: a.to_string(),
                to: b.to_string(),
                provenance: e.provenance.clone(),
                label: e.label.clone(),
                closure: e.closure,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(f: Family) -> CanonicalType {
        CanonicalType::plain(f)
    }

    #[test]
    fn reduction_of_a_triangle() {
        let mut g = DegenGraph::new();
        g.add_edge(&h(Family::H02), &h(Family::H01), "x", "").unwrap();
        g.add_edge(&h(Family::H01), &h(Family::Zero), "x", "").unwrap();
        g.add_edge(&h(Family::H02), &h(Family::Zero), "x", "").unwrap();
        let r = transitive_reduction(&g).unwrap();
        assert_eq!(r.edge_count(), 2);
        assert!(!r.has_edge(&h(Family::H02), &h(Family::Zero)));
        assert_eq!(transitive_reduction(&r).unwrap(), r);
        assert_eq!(maximal_nodes(&r), vec![h(Family::H02)]);
        assert_eq!(transitive_reduction(&DegenGraph::new()).unwrap().edge_count(), 0);
    }

    #[test]
    fn cycle_is_an_error() {
        let mut g = DegenGraph::new();
        g.add_edge(&h(Family::H02), &h(Family::H01), "x", "").unwrap();
        g.add_edge(&h(Family::H01), &h(Family::H02), "x", "").unwrap();
        assert!(matches!(transitive_reduction(&g), Err(GraphError::Cycle(..))));
    }

    #[test]
    fn injected_edge_breaks_levels() {
        let mut g = DegenGraph::new();
        g.add_edge(&h(Family::H01), &h(Family::H02), "injected", "").unwrap();
        let r = consistency_check(&g, &[]);
        assert_eq!(
            r.violations,
            vec![Violation::LevelNotIncreasing { from: "H01".into(), to: "H02".into(), from_level: 17, to_level: 14 }]
        );
    }

    #[test]
    fn dot_shapes() {
        assert_eq!(emit_dot(&DegenGraph::new()), "digraph degenerations {\n  rankdir=TB;\n  node [shape=box];\n}\n");
        let mut g = DegenGraph::new();
        g.add_edge(&h(Family::H02), &h(Family::H01), "x", "").unwrap();
        let dot = emit_dot(&g);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 1);
        assert!(dot.contains("\"H02\" -> \"H01\";"));
    }
}
