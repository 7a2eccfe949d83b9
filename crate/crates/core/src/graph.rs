//! Uniform export containers shared by every graph builder.

use crate::Rational;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

/// Edge weight. Amounts are integral rationals (`n/1`); address-graph weights
/// carry a real denominator.
pub type Weight = Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate edge {from} -> {to} in a simple graph")]
    DuplicateEdge { from: String, to: String },
    #[error("hyperedge needs at least two members, got {0}")]
    HyperedgeTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub weight: Option<Weight>,
    pub attributes: BTreeMap<String, String>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            weight: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn weighted(mut self, weight: Weight) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn attr(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.attributes.insert(key.into(), value.to_string());
        self
    }
}

/// Directed or undirected edge list, optionally allowing parallel edges.
///
/// When `multi` is false, `(source, target, currency)` triples must be unique
/// (the `currency` attribute distinguishes parallel credit lines).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub directed: bool,
    pub multi: bool,
    nodes: BTreeSet<String>,
    edges: Vec<Edge>,
    keys: HashSet<(String, String, Option<String>)>,
}

impl EdgeList {
    pub fn new(directed: bool, multi: bool) -> Self {
        EdgeList {
            directed,
            multi,
            nodes: BTreeSet::new(),
            edges: Vec::new(),
            keys: HashSet::new(),
        }
    }

    /// Registers a node that may have no incident edges.
    pub fn add_node(&mut self, id: impl Into<String>) {
        self.nodes.insert(id.into());
    }

    pub fn push(&mut self, edge: Edge) -> Result<(), GraphError> {
        if !self.multi {
            let (a, b) = if self.directed || edge.source <= edge.target {
                (edge.source.clone(), edge.target.clone())
            } else {
                (edge.target.clone(), edge.source.clone())
            };
            let key = (a, b, edge.attributes.get("currency").cloned());
            if !self.keys.insert(key) {
                return Err(GraphError::DuplicateEdge {
                    from: edge.source,
                    to: edge.target,
                });
            }
        }
        self.nodes.insert(edge.source.clone());
        self.nodes.insert(edge.target.clone());
        self.edges.push(edge);
        Ok(())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Anything that can be flattened into an [`EdgeList`] for export.
pub trait ToEdgeList {
    fn to_edge_list(&self) -> EdgeList;
}

impl ToEdgeList for EdgeList {
    fn to_edge_list(&self) -> EdgeList {
        self.clone()
    }
}

/// Minimal structural view used by summary statistics.
pub trait GraphView {
    fn node_ids(&self) -> Vec<String>;
    fn edge_pairs(&self) -> Vec<(String, String)>;
    fn is_directed(&self) -> bool;
}

impl GraphView for EdgeList {
    fn node_ids(&self) -> Vec<String> {
        self.nodes.iter().cloned().collect()
    }

    fn edge_pairs(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|e| (e.source.clone(), e.target.clone()))
            .collect()
    }

    fn is_directed(&self) -> bool {
        self.directed
    }
}

/// An edge joining two or more nodes, in call or path order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    members: Vec<String>,
    pub label: String,
    pub step_attributes: Vec<BTreeMap<String, String>>,
}

impl Hyperedge {
    pub fn new(
        members: Vec<String>,
        label: impl Into<String>,
        step_attributes: Vec<BTreeMap<String, String>>,
    ) -> Result<Self, GraphError> {
        if members.len() < 2 {
            return Err(GraphError::HyperedgeTooSmall(members.len()));
        }
        Ok(Hyperedge {
            members,
            label: label.into(),
            step_attributes,
        })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypergraph {
    pub hyperedges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, edge: Hyperedge) {
        self.hyperedges.push(edge);
    }

    pub fn nodes(&self) -> BTreeSet<&str> {
        self.hyperedges
            .iter()
            .flat_map(|h| h.members.iter().map(String::as_str))
            .collect()
    }
}
