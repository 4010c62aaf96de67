//! Weighted undirected graphs and shortest-path services.
//!
//! Nodes are identified by dense indices (`NodeId`); the original names are
//! kept for I/O. Edge lengths are non-negative `f64`; parallel edges are
//! allowed (only the shortest matters for distances) and zero-length edges
//! are legal. Self-loops are rejected.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{DeliveryError, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub length: f64,
}

/// Undirected graph with non-negative edge lengths.
#[derive(Debug, Clone)]
pub struct Graph {
    names: Vec<String>,
    edges: Vec<Edge>,
    /// Adjacency: per node, list of `(neighbor, length)` sorted by
    /// `(neighbor, length)` for deterministic traversal.
    adj: Vec<Vec<(NodeId, f64)>>,
}

impl Graph {
    /// Builds a graph from node names and `(u, v, length)` edges.
    pub fn new(names: Vec<String>, edge_list: Vec<(NodeId, NodeId, f64)>) -> Result<Self> {
        let n = names.len();
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v, length) in &edge_list {
            if u >= n || v >= n {
                return Err(DeliveryError::invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(DeliveryError::invalid(format!("self-loop at node {u}")));
            }
            if !(length >= 0.0) {
                return Err(DeliveryError::invalid(format!(
                    "edge ({u}, {v}) has negative or NaN length {length}"
                )));
            }
            edges.push(Edge { u, v, length });
        }
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push((e.v, e.length));
            adj[e.v].push((e.u, e.length));
        }
        for list in &mut adj {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        }
        Ok(Graph { names, edges, adj })
    }

    /// Graph with `n` nodes named `"0".."n-1"`.
    pub fn with_n_nodes(n: usize, edge_list: Vec<(NodeId, NodeId, f64)>) -> Result<Self> {
        Graph::new((0..n).map(|i| i.to_string()).collect(), edge_list)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adj[u]
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if u >= self.node_count() {
            return Err(DeliveryError::invalid(format!(
                "unknown node {u} (graph has {} nodes)",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Single-source shortest distances (Dijkstra). `INFINITY` marks
    /// unreachable nodes.
    pub fn dijkstra(&self, src: NodeId) -> Result<Vec<f64>> {
        self.check_node(src)?;
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        heap.push(HeapEntry { dist: 0.0, node: src });
        let mut done = vec![false; n];
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, len) in &self.adj[u] {
                let nd = d + len;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapEntry { dist: nd, node: v });
                }
            }
        }
        Ok(dist)
    }

    /// Length of a shortest `u`-`v` path; `INFINITY` when disconnected.
    pub fn shortest_distance(&self, u: NodeId, v: NodeId) -> Result<f64> {
        self.check_node(v)?;
        Ok(self.dijkstra(u)?[v])
    }

    /// All-pairs shortest distances via Floyd-Warshall.
    pub fn all_pairs(&self) -> DistanceMatrix {
        let n = self.node_count();
        let mut d = vec![f64::INFINITY; n * n];
        for i in 0..n {
            d[i * n + i] = 0.0;
        }
        for e in &self.edges {
            let slot = &mut d[e.u * n + e.v];
            if e.length < *slot {
                *slot = e.length;
            }
            let slot = &mut d[e.v * n + e.u];
            if e.length < *slot {
                *slot = e.length;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + d[k * n + j];
                    if cand < d[i * n + j] {
                        d[i * n + j] = cand;
                    }
                }
            }
        }
        DistanceMatrix { n, d }
    }

    /// A shortest `u`-`v` path as a node sequence.
    ///
    /// Among minimum-length paths the one with fewest hops is chosen, then
    /// the lexicographically smallest node sequence; this keeps trajectories
    /// deterministic and avoids zero-length-edge cycles.
    pub fn shortest_path(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Ok(vec![u]);
        }
        // (distance, hops) labels from the target; then walk forward greedily.
        let labels = self.dijkstra_hops(v);
        if labels[u].0.is_infinite() {
            return Err(DeliveryError::infeasible(format!(
                "no path between nodes {u} and {v}"
            )));
        }
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let (dc, hc) = labels[cur];
            let mut next: Option<NodeId> = None;
            for &(w, len) in &self.adj[cur] {
                let (dw, hw) = labels[w];
                if dw.is_infinite() {
                    continue;
                }
                if (len + dw - dc).abs() <= 1e-12 && hw + 1 == hc {
                    next = Some(w);
                    break; // adjacency sorted by node id: first hit is smallest
                }
            }
            let w = next.ok_or_else(|| {
                DeliveryError::Internal("shortest_path walk lost the optimal DAG".into())
            })?;
            path.push(w);
            cur = w;
        }
        Ok(path)
    }

    /// Dijkstra minimizing `(distance, hops)` lexicographically.
    fn dijkstra_hops(&self, src: NodeId) -> Vec<(f64, usize)> {
        let n = self.node_count();
        let mut dist = vec![(f64::INFINITY, usize::MAX); n];
        dist[src] = (0.0, 0);
        let mut heap: BinaryHeap<HopEntry> = BinaryHeap::new();
        heap.push(HopEntry { dist: 0.0, hops: 0, node: src });
        let mut done = vec![false; n];
        while let Some(HopEntry { dist: d, hops: h, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, len) in &self.adj[u] {
                let nd = d + len;
                let nh = h + 1;
                let (cd, ch) = dist[v];
                if nd < cd || (nd == cd && nh < ch) {
                    dist[v] = (nd, nh);
                    heap.push(HopEntry { dist: nd, hops: nh, node: v });
                }
            }
        }
        dist
    }
}

/// All-pairs distances. Satisfies `d(u,u) = 0`, symmetry and the triangle
/// inequality by construction.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, u: NodeId, v: NodeId) -> f64 {
        self.d[u * self.n + v]
    }

    /// Total length of walking `nodes` in order.
    pub fn path_length(&self, nodes: &[NodeId]) -> f64 {
        nodes.windows(2).map(|w| self.dist(w[0], w[1])).sum()
    }
}

struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, node) through BinaryHeap's max ordering.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

struct HopEntry {
    dist: f64,
    hops: usize,
    node: NodeId,
}

impl PartialEq for HopEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HopEntry {}
impl PartialOrd for HopEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HopEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.hops.cmp(&self.hops).reverse())
            .then_with(|| other.node.cmp(&self.node))
    }
}
