//! Structural summary of any graph exposing a [`GraphView`].

use crate::graph::GraphView;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub self_loops: usize,
    /// total degree (in + out, self-loops counted twice) -> number of nodes
    pub degree_distribution: BTreeMap<usize, usize>,
    /// weakly connected components
    pub components: usize,
    /// triangles in the undirected simple projection (self-loops and
    /// parallel edges ignored)
    pub triangles: usize,
}

pub fn graph_stats(graph: &impl GraphView) -> GraphStats {
    let ids = graph.node_ids();
    let pairs = graph.edge_pairs();
    let mut idx: HashMap<&str, usize> = HashMap::with_capacity(ids.len());
    for id in &ids {
        let next = idx.len();
        idx.entry(id.as_str()).or_insert(next);
    }
    let mut names: Vec<&str> = ids.iter().map(String::as_str).collect();
    for (s, t) in &pairs {
        for n in [s.as_str(), t.as_str()] {
            if !idx.contains_key(n) {
                idx.insert(n, names.len());
                names.push(n);
            }
        }
    }
    let n = names.len();
    let mut degree = vec![0usize; n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut self_loops = 0;
    for (s, t) in &pairs {
        let (a, b) = (idx[s.as_str()], idx[t.as_str()]);
        degree[a] += 1;
        degree[b] += 1;
        if a == b {
            self_loops += 1;
            continue;
        }
        union(&mut parent, a, b);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut degree_distribution = BTreeMap::new();
    for d in &degree {
        *degree_distribution.entry(*d).or_insert(0) += 1;
    }
    let components = (0..n).filter(|&i| find(&mut parent, i) == i).count();

    // count each triangle once via its lowest-index vertex ordering u < v < w
    let mut triangles = 0;
    for u in 0..n {
        for &v in adj[u].range(u + 1..) {
            triangles += adj[v].range(v + 1..).filter(|w| adj[u].contains(w)).count();
        }
    }
    GraphStats {
        nodes: n,
        edges: pairs.len(),
        self_loops,
        degree_distribution,
        components,
        triangles,
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, EdgeList};

    #[test]
    fn empty_graph_all_zero() {
        assert_eq!(
            graph_stats(&EdgeList::new(true, true)),
            GraphStats::default()
        );
    }

    #[test]
    fn triangle_and_isolated_node() {
        let mut g = EdgeList::new(true, true);
        for (s, t) in [("a", "b"), ("b", "c"), ("c", "a"), ("a", "b"), ("d", "d")] {
            g.push(Edge::new(s, t)).unwrap();
        }
        g.add_node("e");
        let s = graph_stats(&g);
        assert_eq!(s.nodes, 5);
        assert_eq!(s.edges, 5);
        assert_eq!(s.self_loops, 1);
        assert_eq!(s.triangles, 1);
        assert_eq!(s.components, 3);
        assert_eq!(s.degree_distribution.get(&0), Some(&1));
    }
}
