//! Collaboration bounds: what is lost when each message gets one carrier.
//!
//! * [`best_single_agent`] — for a single message, the cheapest lone agent
//!   is within a factor `1/ln 2` of the collaborative optimum.
//! * [`decollaborate`] — rewrites any feasible schedule so that every
//!   message is carried by exactly one agent, at most doubling the cost.
//!   The input schedule's moves become a directed multigraph with an arc
//!   per move, labeled with the exact carried message set, plus an empty
//!   reverse arc; the cheapest agent of each connected component then walks
//!   an Eulerian tour that obeys the labels.
//! * [`to_direct_delivery`] — strengthens this for capacities 1 and
//!   unbounded: one pickup/drop pair per message, every agent back at its
//!   start, still within twice the input cost.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{DeliveryError, Result};
use crate::graph::NodeId;
use crate::model::{
    check_feasible, distances_from_sources, Action, ActionKind, Capacity, DeliveryInstance,
    Schedule,
};
use crate::EPS;

/// Cheapest lone agent for a one-message instance: minimizes
/// `w_j * (d(p_j, s) + d(s, t))`, ties broken by agent index.
pub fn best_single_agent(inst: &DeliveryInstance) -> Result<(Schedule, f64)> {
    if inst.message_count() != 1 {
        return Err(DeliveryError::invalid(
            "best_single_agent requires exactly one message".to_string(),
        ));
    }
    let msg = inst.messages[0];
    let d_s = inst.graph.dijkstra(msg.source)?;
    let carry = d_s[msg.target];
    if !carry.is_finite() {
        return Err(DeliveryError::infeasible("message target unreachable"));
    }
    let mut best: Option<(f64, usize)> = None;
    for (j, a) in inst.agents.iter().enumerate() {
        let c = a.weight * (d_s[a.start] + carry);
        if c.is_finite() && best.map_or(true, |(bc, _)| c < bc - EPS) {
            best = Some((c, j));
        }
    }
    let (cost, agent) =
        best.ok_or_else(|| DeliveryError::infeasible("no agent can reach the message"))?;
    let schedule = Schedule::from_actions(vec![
        Action { agent, node: msg.source, message: 0, kind: ActionKind::Pickup },
        Action { agent, node: msg.target, message: 0, kind: ActionKind::Drop },
    ]);
    Ok((schedule, cost))
}

// ---------------------------------------------------------------------------
// Labeled multigraph reconstruction
// ---------------------------------------------------------------------------

/// One edge traversal of the input schedule, labeled with the messages that
/// ride along after cycle truncation.
#[derive(Debug, Clone)]
pub struct LabeledMove {
    pub agent: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub label: BTreeSet<usize>,
}

/// The schedule's moves as a directed multigraph: every move contributes a
/// forward arc (label = carried set) and a reverse arc with the same label.
/// Connected components are Eulerian by construction.
#[derive(Debug, Clone)]
pub struct LabeledMultigraph {
    pub moves: Vec<LabeledMove>,
    /// For each message with an empty trajectory (`source == target`), the
    /// agent that performed its canonical pair in the input.
    pub stationary: Vec<(usize, usize)>,
}

/// Reconstructs per-move carried sets from a feasible schedule.
///
/// Routes between consecutive action nodes are fixed to the deterministic
/// shortest paths of [`Graph::shortest_path`](crate::graph::Graph::shortest_path).
/// If a message's resulting trajectory revisits a node, the cycle is
/// truncated (the message conceptually waits at the first visit), so every
/// label set describes a simple source-to-target path per message.
pub fn build_labeled_multigraph(
    inst: &DeliveryInstance,
    s: &Schedule,
) -> Result<LabeledMultigraph> {
    let report = check_feasible(inst, s)?;
    if !report.is_feasible() {
        return Err(DeliveryError::infeasible(report.to_string()));
    }
    let mut pos: Vec<NodeId> = inst.agents.iter().map(|a| a.start).collect();
    let mut carried: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); inst.agent_count()];
    let mut moves: Vec<LabeledMove> = Vec::new();
    let mut first_agent: Vec<Option<usize>> = vec![None; inst.message_count()];
    // Move ids carrying each message, in temporal order.
    let mut rides: Vec<Vec<usize>> = vec![Vec::new(); inst.message_count()];

    for action in &s.actions {
        let j = action.agent;
        if pos[j] != action.node {
            let path = inst.graph.shortest_path(pos[j], action.node)?;
            for w in path.windows(2) {
                let id = moves.len();
                for &i in &carried[j] {
                    rides[i].push(id);
                }
                moves.push(LabeledMove {
                    agent: j,
                    from: w[0],
                    to: w[1],
                    label: carried[j].clone(),
                });
            }
            pos[j] = action.node;
        }
        match action.kind {
            ActionKind::Pickup => {
                carried[j].insert(action.message);
                if first_agent[action.message].is_none() {
                    first_agent[action.message] = Some(j);
                }
            }
            ActionKind::Drop => {
                carried[j].remove(&action.message);
            }
        }
    }

    // Truncate cycles per message: retain only the moves of the simple path.
    let mut stationary = Vec::new();
    for (i, msg) in inst.messages.iter().enumerate() {
        let mut stack: Vec<(NodeId, Option<usize>)> = vec![(msg.source, None)];
        for &mid in &rides[i] {
            let (from, to) = (moves[mid].from, moves[mid].to);
            debug_assert_eq!(stack.last().unwrap().0, from);
            if let Some(q) = stack.iter().position(|&(n, _)| n == to) {
                for (_, entered_by) in stack.drain(q + 1..) {
                    if let Some(d) = entered_by {
                        moves[d].label.remove(&i);
                    }
                }
                moves[mid].label.remove(&i);
            } else {
                stack.push((to, Some(mid)));
            }
        }
        debug_assert_eq!(stack.last().unwrap().0, msg.target);
        if stack.len() == 1 {
            // Never carried over an edge; feasibility forces source == target.
            debug_assert_eq!(msg.source, msg.target);
            stationary.push((i, first_agent[i].expect("feasible message has actions")));
        }
    }

    Ok(LabeledMultigraph { moves, stationary })
}

// ---------------------------------------------------------------------------
// Eulerian tours that obey arc labels
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArcDir {
    Forward,
    Reverse,
}

#[derive(Debug, Clone)]
struct Arc {
    from: NodeId,
    to: NodeId,
    label: BTreeSet<usize>,
    dir: ArcDir,
}

/// Mutable tour-construction state for one component.
struct TourState {
    arcs: Vec<Arc>,
    alive: Vec<bool>,
    out: HashMap<NodeId, Vec<usize>>,
    /// Messages resting at each node (the agent drops everything between
    /// moves; only per-vertex positions matter for tour construction).
    resting: HashMap<NodeId, BTreeSet<usize>>,
    steps: usize,
    budget: usize,
}

impl TourState {
    fn first_alive<F: Fn(&Arc) -> bool>(&self, v: NodeId, pred: F) -> Option<usize> {
        self.out
            .get(&v)?
            .iter()
            .copied()
            .find(|&id| self.alive[id] && pred(&self.arcs[id]))
    }

    fn consume(&mut self, id: usize, tour: &mut Vec<usize>) -> NodeId {
        debug_assert!(self.alive[id]);
        self.alive[id] = false;
        if self.arcs[id].dir == ArcDir::Forward {
            let label = self.arcs[id].label.clone();
            let (from, to) = (self.arcs[id].from, self.arcs[id].to);
            if let Some(set) = self.resting.get_mut(&from) {
                for i in &label {
                    set.remove(i);
                }
            }
            self.resting.entry(to).or_default().extend(label.iter().copied());
        }
        tour.push(id);
        self.arcs[id].to
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(DeliveryError::Internal(
                "label-obeying tour did not terminate within its step budget".to_string(),
            ));
        }
        Ok(())
    }
}

/// The fetch procedure, run with an explicit frame stack: walk backward
/// along reverse arcs labeled with the wanted message, then push it forward
/// to `home`, recursively fetching whatever else is missing along the way.
/// The "give up" branch is unreachable on feasible inputs; hitting it
/// reports an internal invariant violation rather than a user error.
fn fetch_message(
    st: &mut TourState,
    msg: usize,
    home: NodeId,
    cur: &mut NodeId,
    tour: &mut Vec<usize>,
) -> Result<()> {
    #[derive(Clone, Copy)]
    struct Frame {
        msg: usize,
        home: NodeId,
    }
    let mut stack = vec![Frame { msg, home }];
    while let Some(&Frame { msg: fi, home: fv }) = stack.last() {
        st.tick()?;
        let here = st.resting.get(cur).map_or(false, |set| set.contains(&fi));
        if !here {
            let back = st
                .first_alive(*cur, |a| a.dir == ArcDir::Reverse && a.label.contains(&fi))
                .ok_or_else(|| {
                    DeliveryError::Internal(format!(
                        "fetch of message {fi} gave up at node {cur}: no reverse arc left"
                    ))
                })?;
            *cur = st.consume(back, tour);
            continue;
        }
        if *cur == fv {
            stack.pop();
            continue;
        }
        let fwd = st
            .first_alive(*cur, |a| a.dir == ArcDir::Forward && a.label.contains(&fi))
            .ok_or_else(|| {
                DeliveryError::Internal(format!(
                    "message {fi} has no forward arc toward its return point"
                ))
            })?;
        let need = st.arcs[fwd].label.clone();
        let have = st.resting.get(cur).cloned().unwrap_or_default();
        if let Some(&missing) = need.difference(&have).next() {
            stack.push(Frame { msg: missing, home: *cur });
        } else {
            *cur = st.consume(fwd, tour);
        }
    }
    Ok(())
}

/// One closed label-obeying tour from `start`, consuming arcs greedily:
/// prefer a forward arc (fetching missing messages first), fall back to
/// reverse arcs, stop when the vertex has no live outgoing arc.
fn compute_tour(st: &mut TourState, start: NodeId) -> Result<Vec<usize>> {
    let mut tour = Vec::new();
    let mut cur = start;
    loop {
        st.tick()?;
        if let Some(fwd) = st.first_alive(cur, |a| a.dir == ArcDir::Forward) {
            let need = st.arcs[fwd].label.clone();
            let have = st.resting.get(&cur).cloned().unwrap_or_default();
            if let Some(&missing) = need.difference(&have).next() {
                fetch_message(st, missing, cur, &mut cur, &mut tour)?;
            } else {
                cur = st.consume(fwd, &mut tour);
            }
        } else if let Some(rev) = st.first_alive(cur, |a| a.dir == ArcDir::Reverse) {
            cur = st.consume(rev, &mut tour);
        } else {
            break;
        }
    }
    if cur != start {
        return Err(DeliveryError::Internal(
            "label-obeying tour did not close at its start vertex".to_string(),
        ));
    }
    Ok(tour)
}

/// Rewrites a feasible schedule so that each message is transported by
/// exactly one agent, at a cost of at most twice the input's (the final
/// empty walk back to the tour start is included via the return leg).
pub fn decollaborate(inst: &DeliveryInstance, s: &Schedule) -> Result<Schedule> {
    let lm = build_labeled_multigraph(inst, s)?;

    // Connected components over the nodes touched by moves.
    let n = inst.graph.node_count();
    let mut dsu = Dsu::new(n);
    for mv in &lm.moves {
        dsu.unite(mv.from, mv.to);
    }
    let mut comp_moves: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (id, mv) in lm.moves.iter().enumerate() {
        comp_moves.entry(dsu.find(mv.from)).or_default().push(id);
    }

    // Messages that never move: pair them into the tour that visits their
    // node, or keep the original stationary performer.
    let mut pending_pairs: HashMap<NodeId, Vec<usize>> = HashMap::new();
    let mut leftover: Vec<Action> = Vec::new();
    for &(i, orig_agent) in &lm.stationary {
        let node = inst.messages[i].source;
        let in_component = lm.moves.iter().any(|m| m.from == node || m.to == node);
        if in_component {
            pending_pairs.entry(node).or_default().push(i);
        } else {
            leftover.push(Action { agent: orig_agent, node, message: i, kind: ActionKind::Pickup });
            leftover.push(Action { agent: orig_agent, node, message: i, kind: ActionKind::Drop });
        }
    }

    let mut actions: Vec<Action> = Vec::new();
    let mut returns = BTreeMap::new();

    for (_root, move_ids) in comp_moves {
        // Cheapest agent among those that move in this component.
        let mut agents: Vec<usize> = move_ids.iter().map(|&id| lm.moves[id].agent).collect();
        agents.sort_unstable();
        agents.dedup();
        let a_min = *agents
            .iter()
            .min_by(|&&a, &&b| {
                inst.agents[a]
                    .weight
                    .total_cmp(&inst.agents[b].weight)
                    .then(a.cmp(&b))
            })
            .expect("component has at least one move");
        let start = inst.agents[a_min].start;

        // Arcs: one forward + one reverse per move, ids in move order.
        let mut arcs = Vec::with_capacity(move_ids.len() * 2);
        for &id in &move_ids {
            let mv = &lm.moves[id];
            arcs.push(Arc { from: mv.from, to: mv.to, label: mv.label.clone(), dir: ArcDir::Forward });
            arcs.push(Arc { from: mv.to, to: mv.from, label: mv.label.clone(), dir: ArcDir::Reverse });
        }
        let mut out: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (id, a) in arcs.iter().enumerate() {
            out.entry(a.from).or_default().push(id);
        }
        let comp_messages: BTreeSet<usize> =
            arcs.iter().flat_map(|a| a.label.iter().copied()).collect();
        let mut resting: HashMap<NodeId, BTreeSet<usize>> = HashMap::new();
        for &i in &comp_messages {
            resting.entry(inst.messages[i].source).or_default().insert(i);
        }
        let budget = 20 * arcs.len() + 100;
        let alive = vec![true; arcs.len()];
        let mut st = TourState { arcs, alive, out, resting, steps: 0, budget };

        // Eulerian tour with stitching: run tours, splicing each new one in
        // at the last walk position still incident to unconsumed arcs.
        let mut walk = compute_tour(&mut st, start)?;
        while st.alive.iter().any(|&a| a) {
            let mut vertices = Vec::with_capacity(walk.len() + 1);
            vertices.push(start);
            for &id in &walk {
                vertices.push(st.arcs[id].to);
            }
            let (splice_idx, splice_vertex) = vertices
                .iter()
                .enumerate()
                .rev()
                .find(|(_, &v)| st.first_alive(v, |_| true).is_some())
                .map(|(q, &v)| (q, v))
                .ok_or_else(|| {
                    DeliveryError::Internal(
                        "unconsumed arcs but no splice point on the tour".to_string(),
                    )
                })?;
            let segment = compute_tour(&mut st, splice_vertex)?;
            if segment.is_empty() {
                return Err(DeliveryError::Internal(
                    "stitched tour made no progress".to_string(),
                ));
            }
            let tail = walk.split_off(splice_idx);
            walk.extend(segment);
            walk.extend(tail);
        }

        // Emit actions along the combined walk, re-verifying the labels:
        // pick the label up before each forward arc, drop it on arrival.
        // Canonical pairs of stationary messages go at the first visit of
        // their node.
        let mut at: HashMap<NodeId, BTreeSet<usize>> = HashMap::new();
        for &i in &comp_messages {
            at.entry(inst.messages[i].source).or_default().insert(i);
        }
        let mut emit_pairs = |node: NodeId, actions: &mut Vec<Action>| {
            if let Some(pairs) = pending_pairs.remove(&node) {
                for i in pairs {
                    actions.push(Action { agent: a_min, node, message: i, kind: ActionKind::Pickup });
                    actions.push(Action { agent: a_min, node, message: i, kind: ActionKind::Drop });
                }
            }
        };
        let mut cur = start;
        emit_pairs(cur, &mut actions);
        for &id in &walk {
            let arc = st.arcs[id].clone();
            if arc.from != cur {
                return Err(DeliveryError::Internal("walk is not connected".to_string()));
            }
            if arc.dir == ArcDir::Forward {
                for &i in &arc.label {
                    let present = at.get_mut(&arc.from).map_or(false, |s| s.remove(&i));
                    if !present {
                        return Err(DeliveryError::Internal(format!(
                            "walk traverses an arc without message {i} present"
                        )));
                    }
                    actions.push(Action { agent: a_min, node: arc.from, message: i, kind: ActionKind::Pickup });
                }
                for &i in &arc.label {
                    at.entry(arc.to).or_default().insert(i);
                    actions.push(Action { agent: a_min, node: arc.to, message: i, kind: ActionKind::Drop });
                }
            }
            cur = arc.to;
            emit_pairs(cur, &mut actions);
        }
        for &i in &comp_messages {
            if !at.get(&inst.messages[i].target).map_or(false, |s| s.contains(&i)) {
                return Err(DeliveryError::Internal(format!(
                    "message {i} did not end at its target after the tour"
                )));
            }
        }
        returns.insert(a_min, start);
    }

    actions.extend(leftover);
    let out = Schedule { actions, returns };
    debug_assert!(check_feasible(inst, &out).map(|r| r.is_feasible()).unwrap_or(false));
    Ok(out)
}

// ---------------------------------------------------------------------------
// No intermediate drop-offs (capacity 1 or unbounded)
// ---------------------------------------------------------------------------

/// Auxiliary forest for the unit-capacity construction: one vertex per
/// message plus one anchor per component's cheapest agent; edges are the
/// empty-travel gaps (drop of one message to pickup of the next) weighted
/// by graph distance.
#[derive(Debug, Clone)]
pub struct MessageForest {
    /// `(message a, message b, length, drop waypoint on a, pickup waypoint on b)`
    pub gap_edges: Vec<(usize, usize, f64, usize, usize)>,
    /// Per component: `(cheapest agent, its first message, entry waypoint, approach length)`.
    pub anchors: Vec<(usize, usize, usize, f64)>,
}

/// Builds the gap forest of a feasible unit-capacity schedule.
pub fn build_message_forest(inst: &DeliveryInstance, s: &Schedule) -> Result<MessageForest> {
    let report = check_feasible(inst, s)?;
    if !report.is_feasible() {
        return Err(DeliveryError::infeasible(report.to_string()));
    }
    let mut nodes_needed: BTreeSet<NodeId> = inst.agents.iter().map(|a| a.start).collect();
    for a in &s.actions {
        nodes_needed.insert(a.node);
    }
    let dist = distances_from_sources(&inst.graph, nodes_needed)?;

    // Per-agent alternating pair lists with waypoint indices.
    let mut pair_seq: Vec<Vec<(usize, usize, NodeId, NodeId)>> =
        vec![Vec::new(); inst.agent_count()];
    let mut drop_count = vec![0usize; inst.message_count()];
    let mut open: Vec<Option<(usize, usize, NodeId)>> = vec![None; inst.agent_count()];
    for a in &s.actions {
        match a.kind {
            ActionKind::Pickup => {
                open[a.agent] = Some((a.message, drop_count[a.message], a.node));
            }
            ActionKind::Drop => {
                drop_count[a.message] += 1;
                let (msg, wp, from) = open[a.agent]
                    .take()
                    .ok_or_else(|| DeliveryError::Internal("drop without open pickup".into()))?;
                debug_assert_eq!(msg, a.message);
                pair_seq[a.agent].push((msg, wp, from, a.node));
            }
        }
    }

    let mut gap_edges = Vec::new();
    for pairs in &pair_seq {
        for w in pairs.windows(2) {
            let (m_a, wp_a, _, drop_node) = w[0];
            let (m_b, wp_b, pick_node, _) = w[1];
            if m_a == m_b {
                continue; // re-pickup of the same message, not a gap
            }
            let len = dist[&drop_node][pick_node];
            gap_edges.push((m_a, m_b, len, wp_a + 1, wp_b));
        }
    }

    // Components over messages; anchor each at its cheapest acting agent.
    let m = inst.message_count();
    let mut dsu = Dsu::new(m);
    for &(a, b, _, _, _) in &gap_edges {
        dsu.unite(a, b);
    }
    let mut comp_agents: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (j, pairs) in pair_seq.iter().enumerate() {
        if let Some(&(msg, _, _, _)) = pairs.first() {
            comp_agents.entry(dsu.find(msg)).or_default().push(j);
        }
    }
    let mut anchors = Vec::new();
    for (_, agents) in comp_agents {
        let a_min = *agents
            .iter()
            .min_by(|&&a, &&b| {
                inst.agents[a]
                    .weight
                    .total_cmp(&inst.agents[b].weight)
                    .then(a.cmp(&b))
            })
            .unwrap();
        let (msg, wp, node, _) = pair_seq[a_min][0];
        let len = dist[&inst.agents[a_min].start][node];
        anchors.push((a_min, msg, wp, len));
    }
    Ok(MessageForest { gap_edges, anchors })
}

/// Converts a feasible schedule into one where every message has exactly one
/// pickup (at its source) and one drop (at its target), every agent returns
/// to its start, and the cost is at most doubled. Supports capacity 1 and
/// unbounded capacity only.
pub fn to_direct_delivery(inst: &DeliveryInstance, s: &Schedule) -> Result<Schedule> {
    match inst.capacity {
        Capacity::Infinite => to_direct_infinite(inst, s),
        Capacity::Finite(1) => to_direct_unit(inst, s),
        other => Err(DeliveryError::Unsupported(format!(
            "direct delivery is only available for capacity 1 or inf, got {other}"
        ))),
    }
}

/// Unbounded capacity: remove collaboration, then keep only each message's
/// first pickup and last drop (the single carrier simply holds on to it).
fn to_direct_infinite(inst: &DeliveryInstance, s: &Schedule) -> Result<Schedule> {
    let single = decollaborate(inst, s)?;
    let m = inst.message_count();
    let mut first_pick = vec![usize::MAX; m];
    let mut last_drop = vec![usize::MAX; m];
    for (idx, a) in single.actions.iter().enumerate() {
        match a.kind {
            ActionKind::Pickup => {
                if first_pick[a.message] == usize::MAX {
                    first_pick[a.message] = idx;
                }
            }
            ActionKind::Drop => last_drop[a.message] = idx,
        }
    }
    let actions: Vec<Action> = single
        .actions
        .iter()
        .enumerate()
        .filter(|(idx, a)| *idx == first_pick[a.message] || *idx == last_drop[a.message])
        .map(|(_, a)| *a)
        .collect();
    let out = Schedule { actions, returns: single.returns };
    debug_assert!(check_feasible(inst, &out).map(|r| r.is_feasible()).unwrap_or(false));
    Ok(out)
}

/// Unit capacity: minimum spanning tree over the gap forest, then a
/// recursive tour that serves each subtree while walking each message's
/// trajectory and each tree gap at most twice.
fn to_direct_unit(inst: &DeliveryInstance, s: &Schedule) -> Result<Schedule> {
    let forest = build_message_forest(inst, s)?;
    let m = inst.message_count();

    // Kruskal over the gap edges (anchor edges are bridges and always kept).
    let mut order: Vec<usize> = (0..forest.gap_edges.len()).collect();
    order.sort_by(|&a, &b| {
        forest.gap_edges[a]
            .2
            .total_cmp(&forest.gap_edges[b].2)
            .then(a.cmp(&b))
    });
    let mut dsu = Dsu::new(m);
    // Tree adjacency: per message, (child message, waypoint here, waypoint there).
    let mut tree: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); m];
    for id in order {
        let (a, b, len, wp_a, wp_b) = forest.gap_edges[id];
        if len.is_infinite() {
            continue;
        }
        if dsu.find(a) != dsu.find(b) {
            dsu.unite(a, b);
            tree[a].push((b, wp_a, wp_b));
            tree[b].push((a, wp_b, wp_a));
        }
    }

    let mut actions = Vec::new();
    let mut returns = BTreeMap::new();
    let mut visited = vec![false; m];

    for &(agent, root_msg, entry_wp, _) in &forest.anchors {
        serve_message(inst, &tree, agent, root_msg, entry_wp, &mut visited, &mut actions);
        returns.insert(agent, inst.agents[agent].start);
    }

    if let Some(miss) = visited.iter().position(|&v| !v) {
        return Err(DeliveryError::Internal(format!(
            "message {miss} was not reached by any anchor tour"
        )));
    }
    let out = Schedule { actions, returns };
    debug_assert!(check_feasible(inst, &out).map(|r| r.is_feasible()).unwrap_or(false));
    Ok(out)
}

/// Emits the pickup/drop pair for `msg` and recursively serves subtrees
/// hanging off its trajectory: children attached at or before the entry
/// waypoint are served on the inbound walk toward the source, the rest on
/// the return walk from the target.
fn serve_message(
    inst: &DeliveryInstance,
    tree: &[Vec<(usize, usize, usize)>],
    agent: usize,
    msg: usize,
    entry_wp: usize,
    visited: &mut [bool],
    actions: &mut Vec<Action>,
) {
    visited[msg] = true;
    let mut inbound: Vec<(usize, usize, usize)> = Vec::new();
    let mut outbound: Vec<(usize, usize, usize)> = Vec::new();
    for &(child, wp_here, wp_there) in &tree[msg] {
        if visited[child] {
            continue;
        }
        if wp_here <= entry_wp {
            inbound.push((wp_here, child, wp_there));
        } else {
            outbound.push((wp_here, child, wp_there));
        }
    }
    // Inbound: walking from the entry waypoint down to the source.
    inbound.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, child, wp_there) in &inbound {
        if !visited[child] {
            serve_message(inst, tree, agent, child, wp_there, visited, actions);
        }
    }
    actions.push(Action {
        agent,
        node: inst.messages[msg].source,
        message: msg,
        kind: ActionKind::Pickup,
    });
    actions.push(Action {
        agent,
        node: inst.messages[msg].target,
        message: msg,
        kind: ActionKind::Drop,
    });
    // Return walk: from the target back toward the entry waypoint.
    outbound.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, child, wp_there) in &outbound {
        if !visited[child] {
            serve_message(inst, tree, agent, child, wp_there, visited, actions);
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn unite(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
