//! Optimal polynomial-time delivery of a single message.
//!
//! Any optimal single-message schedule uses each agent for at most one
//! pickup/drop pair, with strictly decreasing weights along the handover
//! chain. This makes the problem a shortest-path computation in a layered
//! auxiliary digraph: one layer per agent (a scaled copy of the graph),
//! entry arcs from a virtual source into each layer at the message source,
//! handover arcs between layers at equal nodes, and zero-cost exit arcs at
//! the message target.
//!
//! [`build_handover_graph`] materializes that digraph literally, with a
//! handover arc `(u_{a_i}, u_{a_j})` of cost `w_j * d(p_j, u)` exactly when
//! `w_i > w_j`. [`solve_single_message`] searches an equivalent factorized
//! form in which the quadratic handover fan at each node is routed through a
//! "message resting at u" state (a drop arc of cost zero plus a pickup arc
//! of cost `w_j * d(p_j, u)`). Dropping the weight gate only adds feasible
//! schedules that optimal paths provably never use, so the optimum value is
//! unchanged while the arc count falls from cubic to near-linear; decoding
//! collapses the zero-progress and equal-weight artifacts that ties can
//! introduce.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{DeliveryError, Result};
use crate::graph::NodeId;
use crate::model::{Action, ActionKind, DeliveryInstance, Schedule};
use crate::EPS;

/// Explicit layered auxiliary digraph for one message.
#[derive(Debug, Clone)]
pub struct HandoverGraph {
    /// Number of base graph nodes.
    pub base_nodes: usize,
    /// Number of agents (= layers).
    pub layers: usize,
    /// Arcs `(from, to, cost)` over ids: 0 = source, 1 = target,
    /// `2 + i * base_nodes + v` = node `v` in agent `i`'s layer.
    pub arcs: Vec<(usize, usize, f64)>,
}

impl HandoverGraph {
    pub const SOURCE: usize = 0;
    pub const TARGET: usize = 1;

    pub fn layer_node(&self, agent: usize, node: NodeId) -> usize {
        2 + agent * self.base_nodes + node
    }

    pub fn node_count(&self) -> usize {
        2 + self.base_nodes * self.layers
    }

    /// Shortest source-to-target path, as `(cost, node id sequence)`.
    /// Ties prefer the smaller node id, i.e. lower layer index first.
    pub fn shortest_path(&self) -> Option<(f64, Vec<usize>)> {
        let n = self.node_count();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, c) in &self.arcs {
            adj[u].push((v, c));
        }
        for list in &mut adj {
            list.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut done = vec![false; n];
        dist[Self::SOURCE] = 0.0;
        let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
        heap.push(Entry { f: 0.0, id: Self::SOURCE });
        while let Some(Entry { id: u, .. }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == Self::TARGET {
                break;
            }
            for &(v, c) in &adj[u] {
                let nd = dist[u] + c;
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = u;
                    heap.push(Entry { f: nd, id: v });
                }
            }
        }
        if dist[Self::TARGET].is_infinite() {
            return None;
        }
        let mut path = vec![Self::TARGET];
        let mut cur = Self::TARGET;
        while cur != Self::SOURCE {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Some((dist[Self::TARGET], path))
    }
}

/// Node budget for materializing the explicit digraph.
const EXPLICIT_NODE_LIMIT: usize = 4_000_000;

/// Builds the explicit layered digraph for a one-message instance.
pub fn build_handover_graph(inst: &DeliveryInstance) -> Result<HandoverGraph> {
    let (s, _t) = single_message_endpoints(inst)?;
    let n = inst.graph.node_count();
    let k = inst.agent_count();
    if n * k > EXPLICIT_NODE_LIMIT {
        return Err(DeliveryError::ResourceLimit(format!(
            "explicit handover graph would have {} nodes; use solve_single_message instead",
            n * k
        )));
    }
    let dm = inst.graph.all_pairs();
    let mut hg = HandoverGraph { base_nodes: n, layers: k, arcs: Vec::new() };
    for (i, a) in inst.agents.iter().enumerate() {
        let entry = a.weight * dm.dist(a.start, s);
        if entry.is_finite() {
            hg.arcs.push((HandoverGraph::SOURCE, hg.layer_node(i, s), entry));
        }
    }
    let (s_node, t_node) = (s, _t);
    for i in 0..k {
        hg.arcs.push((hg.layer_node(i, t_node), HandoverGraph::TARGET, 0.0));
    }
    for e in inst.graph.edges() {
        for (i, a) in inst.agents.iter().enumerate() {
            let c = a.weight * e.length;
            hg.arcs.push((hg.layer_node(i, e.u), hg.layer_node(i, e.v), c));
            hg.arcs.push((hg.layer_node(i, e.v), hg.layer_node(i, e.u), c));
        }
    }
    for u in 0..n {
        for (i, ai) in inst.agents.iter().enumerate() {
            for (j, aj) in inst.agents.iter().enumerate() {
                if ai.weight > aj.weight {
                    let c = aj.weight * dm.dist(aj.start, u);
                    if c.is_finite() {
                        hg.arcs.push((hg.layer_node(i, u), hg.layer_node(j, u), c));
                    }
                }
            }
        }
    }
    let _ = s_node;
    Ok(hg)
}

fn single_message_endpoints(inst: &DeliveryInstance) -> Result<(NodeId, NodeId)> {
    if inst.message_count() != 1 {
        return Err(DeliveryError::invalid(format!(
            "single-message solver requires exactly one message, got {}",
            inst.message_count()
        )));
    }
    if inst.agent_count() == 0 {
        return Err(DeliveryError::infeasible("no agents available"));
    }
    let msg = inst.messages[0];
    Ok((msg.source, msg.target))
}

struct Entry {
    f: f64,
    id: usize,
}
impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.id.cmp(&self.id))
    }
}

/// One carrying stretch of the decoded solution.
#[derive(Debug, Clone, Copy)]
struct Segment {
    agent: usize,
    from: NodeId,
    to: NodeId,
}

/// State-budget guard for the factorized search.
const STATE_LIMIT: usize = 150_000_000;

/// Optimal delivery of the unique message; returns the schedule and its cost.
pub fn solve_single_message(inst: &DeliveryInstance) -> Result<(Schedule, f64)> {
    let (s, t) = single_message_endpoints(inst)?;
    let g = &inst.graph;
    let n = g.node_count();
    let k = inst.agent_count();

    let d_from_s = g.dijkstra(s)?;
    if s == t {
        // Degenerate delivery: the cheapest agent walks over and performs
        // the canonical pickup/drop pair.
        let mut best: Option<(f64, usize)> = None;
        for (j, a) in inst.agents.iter().enumerate() {
            let c = a.weight * d_from_s[a.start];
            if c.is_finite() && best.map_or(true, |(bc, _)| c < bc - EPS) {
                best = Some((c, j));
            }
        }
        let (cost, agent) =
            best.ok_or_else(|| DeliveryError::infeasible("no agent can reach the message"))?;
        let schedule = Schedule::from_actions(vec![
            Action { agent, node: s, message: 0, kind: ActionKind::Pickup },
            Action { agent, node: t, message: 0, kind: ActionKind::Drop },
        ]);
        return Ok((schedule, cost));
    }

    if d_from_s[t].is_infinite() {
        return Err(DeliveryError::infeasible(
            "message target unreachable from its source".to_string(),
        ));
    }
    let d_to_t = g.dijkstra(t)?;
    let w_min = inst.agents.iter().map(|a| a.weight).fold(f64::INFINITY, f64::min);

    // Feasible upper bound: the best lone agent. Used to prune the search.
    let mut ub = f64::INFINITY;
    for a in &inst.agents {
        let c = a.weight * (d_from_s[a.start] + d_from_s[t]);
        ub = ub.min(c);
    }
    if ub.is_infinite() {
        return Err(DeliveryError::infeasible("no agent can reach the message"));
    }

    // States: u * (k + 1) + j with j < k carried-by-j, j = k resting-at-u.
    let free = |u: usize| u * (k + 1) + k;
    let carried = |u: usize, j: usize| u * (k + 1) + j;
    let states = n * (k + 1);
    if states > STATE_LIMIT {
        return Err(DeliveryError::ResourceLimit(format!(
            "single-message search needs {states} states"
        )));
    }

    let mut dist = vec![f64::INFINITY; states];
    let mut parent = vec![u32::MAX; states];
    let mut done = vec![false; states];
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
    let start = free(s);
    let goal = free(t);
    dist[start] = 0.0;
    heap.push(Entry { f: w_min * d_to_t[s], id: start });

    while let Some(Entry { id, .. }) = heap.pop() {
        if done[id] {
            continue;
        }
        done[id] = true;
        if id == goal {
            break;
        }
        let u = id / (k + 1);
        let c = id % (k + 1);
        let gval = dist[id];
        let relax = |to: usize, ng: f64, h: f64, heap: &mut BinaryHeap<Entry>,
                     dist: &mut Vec<f64>, parent: &mut Vec<u32>| {
            if ng < dist[to] && ng + h <= ub + EPS {
                dist[to] = ng;
                parent[to] = id as u32;
                heap.push(Entry { f: ng + h, id: to });
            }
        };
        if c == k {
            // Resting at u: any agent may walk over and pick it up.
            let d_from_u = g.dijkstra(u)?;
            for (j, a) in inst.agents.iter().enumerate() {
                let approach = d_from_u[a.start];
                if approach.is_finite() {
                    relax(
                        carried(u, j),
                        gval + a.weight * approach,
                        w_min * d_to_t[u],
                        &mut heap,
                        &mut dist,
                        &mut parent,
                    );
                }
            }
        } else {
            let w = inst.agents[c].weight;
            for &(v, len) in g.neighbors(u) {
                relax(
                    carried(v, c),
                    gval + w * len,
                    w_min * d_to_t[v],
                    &mut heap,
                    &mut dist,
                    &mut parent,
                );
            }
            relax(free(u), gval, w_min * d_to_t[u], &mut heap, &mut dist, &mut parent);
        }
    }

    if !done[goal] || dist[goal].is_infinite() {
        return Err(DeliveryError::infeasible(
            "message target unreachable by any agent chain".to_string(),
        ));
    }
    let cost = dist[goal];

    // Decode the state path into carrying segments.
    let mut ids = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = parent[cur] as usize;
        ids.push(cur);
    }
    ids.reverse();
    let mut segments: Vec<Segment> = Vec::new();
    let mut open: Option<Segment> = None;
    for id in ids {
        let u = id / (k + 1);
        let c = id % (k + 1);
        if c == k {
            if let Some(mut seg) = open.take() {
                seg.to = u;
                segments.push(seg);
            }
        } else {
            match &mut open {
                Some(seg) if seg.agent == c => seg.to = u,
                _ => {
                    // A new carrier takes over exactly at a rest state, so
                    // `open` is always empty here.
                    open = Some(Segment { agent: c, from: u, to: u });
                }
            }
        }
    }
    debug_assert!(open.is_none(), "path must end in a rest state");

    // Drop zero-progress stretches, then merge equal-weight neighbors; both
    // only occur through zero-cost ties and never change the total cost.
    segments.retain(|seg| seg.from != seg.to);
    let mut merged: Vec<Segment> = Vec::new();
    for seg in segments {
        match merged.last_mut() {
            Some(prev)
                if prev.to == seg.from
                    && (prev.agent == seg.agent
                        || (inst.agents[prev.agent].weight - inst.agents[seg.agent].weight)
                            .abs()
                            == 0.0) =>
            {
                prev.to = seg.to;
            }
            _ => merged.push(seg),
        }
    }

    let mut actions = Vec::with_capacity(2 * merged.len());
    for seg in &merged {
        actions.push(Action { agent: seg.agent, node: seg.from, message: 0, kind: ActionKind::Pickup });
        actions.push(Action { agent: seg.agent, node: seg.to, message: 0, kind: ActionKind::Drop });
    }
    Ok((Schedule::from_actions(actions), cost))
}
