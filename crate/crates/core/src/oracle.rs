//! Exact minimum-cost solver for desk-sized instances.
//!
//! The solver runs best-first search over the joint state space (agent
//! positions × message locations). A transition moves one agent along a
//! shortest path to any node where it picks up a resting message or drops a
//! carried one; handovers at nodes arise as drop/pickup transition pairs.
//! Restricting actions to graph nodes loses no generality: schedules are
//! defined by their action nodes and agents travel shortest paths between
//! them.
//!
//! The expansion order uses an admissible, consistent lower bound
//! (`w_min` times the largest remaining approach+carry distance over
//! undelivered messages), so the first settled all-delivered state is
//! optimal. Note the bound must not sum over messages: with capacity above
//! one, a single move can advance several messages at once.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{DeliveryError, Result};
use crate::graph::DistanceMatrix;
use crate::model::{check_feasible, Action, ActionKind, DeliveryInstance, Schedule};
use crate::EPS;

/// Guards and bounds for [`solve_exact_with`].
#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Abort with a resource error once this many distinct states exist.
    pub max_states: usize,
    /// Stop early once the optimum provably exceeds this bound.
    pub cost_bound: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_states: DEFAULT_MAX_STATES, cost_bound: None }
    }
}

/// Default state guard.
pub const DEFAULT_MAX_STATES: usize = 5_000_000;

/// Result of a bounded exact solve.
#[derive(Debug, Clone)]
pub enum OracleOutcome {
    Solved { schedule: Schedule, cost: f64 },
    /// The optimum exceeds the requested cost bound.
    BoundExceeded,
}

/// Exact solve with default guards.
pub fn solve_exact(inst: &DeliveryInstance) -> Result<(Schedule, f64)> {
    match solve_exact_with(inst, &OracleOptions::default())? {
        OracleOutcome::Solved { schedule, cost } => Ok((schedule, cost)),
        OracleOutcome::BoundExceeded => unreachable!("no bound was set"),
    }
}

const DELIVERED: u16 = u16::MAX;

struct Search<'a> {
    inst: &'a DeliveryInstance,
    dist: DistanceMatrix,
    n: usize,
    k: usize,
    m: usize,
    w_min: f64,
}

type Key = Box<[u16]>;

struct NodeInfo {
    g: f64,
    settled: bool,
    parent: Option<(Key, Action)>,
}

struct QueueItem {
    f: f64,
    tie: (usize, usize, usize, u8),
    seq: u64,
    key: Key,
}

impl PartialEq for QueueItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueItem {}
impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap; equal costs expand the lowest
        // (agent, node, message, kind) first.
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.tie.cmp(&self.tie))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl<'a> Search<'a> {
    fn agent_pos(&self, key: &[u16], j: usize) -> usize {
        key[j] as usize
    }

    fn msg_state(&self, key: &[u16], i: usize) -> u16 {
        key[self.k + i]
    }

    fn carried_count(&self, key: &[u16], j: usize) -> usize {
        (0..self.m)
            .filter(|&i| self.msg_state(key, i) == (self.n + j) as u16)
            .count()
    }

    fn is_goal(&self, key: &[u16]) -> bool {
        (0..self.m).all(|i| self.msg_state(key, i) == DELIVERED)
    }

    /// Admissible remaining-cost bound (see module docs).
    fn heuristic(&self, key: &[u16]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            let st = self.msg_state(key, i);
            if st == DELIVERED {
                continue;
            }
            let target = self.inst.messages[i].target;
            let bound = if (st as usize) < self.n {
                let at = st as usize;
                let approach = (0..self.k)
                    .map(|j| self.dist.dist(self.agent_pos(key, j), at))
                    .fold(f64::INFINITY, f64::min);
                approach + self.dist.dist(at, target)
            } else {
                let carrier = st as usize - self.n;
                self.dist.dist(self.agent_pos(key, carrier), target)
            };
            worst = worst.max(bound);
        }
        if worst.is_infinite() {
            worst // goal unreachable from here
        } else {
            self.w_min * worst
        }
    }

    /// Canonically ordered successor transitions: `(action, edge cost)`.
    fn successors(&self, key: &[u16]) -> Vec<(Action, f64, Key)> {
        let mut out = Vec::new();
        for j in 0..self.k {
            let pos = self.agent_pos(key, j);
            let held = self.carried_count(key, j);
            // Pickups: move to a resting message and take it.
            if self.inst.capacity.allows(held + 1) {
                for i in 0..self.m {
                    let st = self.msg_state(key, i);
                    if (st as usize) < self.n {
                        let at = st as usize;
                        let d = self.dist.dist(pos, at);
                        if d.is_finite() {
                            let mut next = key.to_vec();
                            next[j] = at as u16;
                            next[self.k + i] = (self.n + j) as u16;
                            out.push((
                                Action { agent: j, node: at, message: i, kind: ActionKind::Pickup },
                                self.inst.agents[j].weight * d,
                                next.into_boxed_slice(),
                            ));
                        }
                    }
                }
            }
            // Drops: move to any node and put a carried message down.
            for i in 0..self.m {
                if self.msg_state(key, i) == (self.n + j) as u16 {
                    let target = self.inst.messages[i].target;
                    for v in 0..self.n {
                        let d = self.dist.dist(pos, v);
                        if !d.is_finite() {
                            continue;
                        }
                        let mut next = key.to_vec();
                        next[j] = v as u16;
                        next[self.k + i] =
                            if v == target { DELIVERED } else { v as u16 };
                        out.push((
                            Action { agent: j, node: v, message: i, kind: ActionKind::Drop },
                            self.inst.agents[j].weight * d,
                            next.into_boxed_slice(),
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Exact solve over the joint state space.
pub fn solve_exact_with(inst: &DeliveryInstance, opts: &OracleOptions) -> Result<OracleOutcome> {
    let n = inst.graph.node_count();
    let k = inst.agent_count();
    let m = inst.message_count();
    if n > (u16::MAX as usize) / 2 || k + n >= DELIVERED as usize {
        return Err(DeliveryError::ResourceLimit(
            "instance too large for the exact oracle's state encoding".into(),
        ));
    }
    if m > 0 && k == 0 {
        return Err(DeliveryError::infeasible("messages present but no agents"));
    }
    let search = Search {
        inst,
        dist: inst.graph.all_pairs(),
        n,
        k,
        m,
        w_min: inst.agents.iter().map(|a| a.weight).fold(f64::INFINITY, f64::min),
    };

    let mut start: Vec<u16> = Vec::with_capacity(k + m);
    for a in &inst.agents {
        start.push(a.start as u16);
    }
    for msg in &inst.messages {
        start.push(msg.source as u16);
    }
    let start: Key = start.into_boxed_slice();

    let mut info: HashMap<Key, NodeInfo> = HashMap::new();
    info.insert(start.clone(), NodeInfo { g: 0.0, settled: false, parent: None });
    let mut heap = BinaryHeap::new();
    let h0 = search.heuristic(&start);
    heap.push(QueueItem { f: h0, tie: (0, 0, 0, 0), seq: 0, key: start });
    let mut seq = 1u64;

    while let Some(QueueItem { f, key, .. }) = heap.pop() {
        if let Some(bound) = opts.cost_bound {
            if f > bound + EPS {
                return Ok(OracleOutcome::BoundExceeded);
            }
        }
        {
            let entry = info.get_mut(&key).expect("queued state must exist");
            if entry.settled {
                continue;
            }
            entry.settled = true;
        }
        let g = info[&key].g;
        if search.is_goal(&key) {
            let schedule = reconstruct(&info, &key);
            debug_assert!(check_feasible(inst, &schedule)
                .map(|r| r.is_feasible())
                .unwrap_or(false));
            return Ok(OracleOutcome::Solved { schedule, cost: g });
        }
        for (action, step, next) in search.successors(&key) {
            let ng = g + step;
            let improved = match info.get(&next) {
                Some(e) => !e.settled && ng < e.g - 1e-15,
                None => true,
            };
            if improved {
                if info.len() >= opts.max_states {
                    return Err(DeliveryError::ResourceLimit(format!(
                        "exact oracle exceeded {} states",
                        opts.max_states
                    )));
                }
                let nf = ng + search.heuristic(&next);
                info.insert(
                    next.clone(),
                    NodeInfo { g: ng, settled: false, parent: Some((key.clone(), action)) },
                );
                heap.push(QueueItem {
                    f: nf,
                    tie: (action.agent, action.node, action.message, action.kind as u8),
                    seq,
                    key: next,
                });
                seq += 1;
            }
        }
    }

    Err(DeliveryError::infeasible(
        "some message cannot be delivered (disconnected instance)".to_string(),
    ))
}

fn reconstruct(info: &HashMap<Key, NodeInfo>, goal: &Key) -> Schedule {
    let mut actions = Vec::new();
    let mut cur = goal.clone();
    while let Some((prev, action)) = info[&cur].parent.as_ref() {
        actions.push(*action);
        cur = prev.clone();
    }
    actions.reverse();
    Schedule::from_actions(actions)
}

// ---------------------------------------------------------------------------
// Optimal reordering for a single agent
// ---------------------------------------------------------------------------

/// Maximum number of messages [`reorder_exact`] accepts.
pub const REORDER_LIMIT: usize = 8;

/// Minimum-cost ordering (and interleaving) of one agent's pickup/drop
/// pairs, with the restriction that each message is carried from its source
/// straight to its target by this agent. For unit capacity this is the best
/// permutation of the messages; for larger capacities pickups and drops may
/// interleave as long as the carried count stays within the capacity.
pub fn reorder_exact(
    inst: &DeliveryInstance,
    agent: usize,
    messages: &[usize],
) -> Result<(Schedule, f64)> {
    if agent >= inst.agent_count() {
        return Err(DeliveryError::invalid(format!("unknown agent {agent}")));
    }
    for &i in messages {
        if i >= inst.message_count() {
            return Err(DeliveryError::invalid(format!("unknown message {i}")));
        }
    }
    if messages.len() > REORDER_LIMIT {
        return Err(DeliveryError::ResourceLimit(format!(
            "reorder_exact handles at most {REORDER_LIMIT} messages, got {}",
            messages.len()
        )));
    }
    let q = messages.len();
    let w = inst.agents[agent].weight;
    if q == 0 {
        return Ok((Schedule::default(), 0.0));
    }

    // Points: 0 = start, 1+2i = source of messages[i], 2+2i = its target.
    let mut points = vec![inst.agents[agent].start];
    for &i in messages {
        points.push(inst.messages[i].source);
        points.push(inst.messages[i].target);
    }
    let dist_map = crate::model::distances_from_sources(&inst.graph, points.iter().copied())?;
    let d = |a: usize, b: usize| dist_map[&points[a]][points[b]];

    // Dijkstra over (picked mask, dropped mask, point index).
    #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
    struct St {
        picked: u16,
        dropped: u16,
        at: u8,
    }
    let full = (1u16 << q) - 1;
    let start = St { picked: 0, dropped: 0, at: 0 };
    let mut best: HashMap<St, (f64, Option<(St, usize, ActionKind)>)> = HashMap::new();
    best.insert(start, (0.0, None));
    let mut heap: BinaryHeap<(std::cmp::Reverse<ordered::F64>, u64, St)> = BinaryHeap::new();
    heap.push((std::cmp::Reverse(ordered::F64(0.0)), 0, start));
    let mut seq = 1u64;
    let mut settled: HashMap<St, bool> = HashMap::new();
    let mut goal: Option<St> = None;

    while let Some((std::cmp::Reverse(ordered::F64(g)), _, st)) = heap.pop() {
        if *settled.get(&st).unwrap_or(&false) {
            continue;
        }
        settled.insert(st, true);
        if st.dropped == full {
            goal = Some(st);
            break;
        }
        let held = (st.picked & !st.dropped).count_ones() as usize;
        for (slot, &msg) in messages.iter().enumerate() {
            let bit = 1u16 << slot;
            if st.picked & bit == 0 {
                if !inst.capacity.allows(held + 1) {
                    continue;
                }
                let to = 1 + 2 * slot;
                let leg = d(st.at as usize, to);
                if !leg.is_finite() {
                    continue;
                }
                let next = St { picked: st.picked | bit, dropped: st.dropped, at: to as u8 };
                let ng = g + w * leg;
                if best.get(&next).map_or(true, |(bg, _)| ng < bg - 1e-15) {
                    best.insert(next, (ng, Some((st, msg, ActionKind::Pickup))));
                    heap.push((std::cmp::Reverse(ordered::F64(ng)), seq, next));
                    seq += 1;
                }
            } else if st.dropped & bit == 0 {
                let to = 2 + 2 * slot;
                let leg = d(st.at as usize, to);
                if !leg.is_finite() {
                    continue;
                }
                let next = St { picked: st.picked, dropped: st.dropped | bit, at: to as u8 };
                let ng = g + w * leg;
                if best.get(&next).map_or(true, |(bg, _)| ng < bg - 1e-15) {
                    best.insert(next, (ng, Some((st, msg, ActionKind::Drop))));
                    heap.push((std::cmp::Reverse(ordered::F64(ng)), seq, next));
                    seq += 1;
                }
            }
        }
    }

    let goal = goal.ok_or_else(|| {
        DeliveryError::infeasible("assigned messages are unreachable for this agent".to_string())
    })?;
    let cost = best[&goal].0;
    let mut actions = Vec::new();
    let mut cur = goal;
    while let (_, Some((prev, msg, kind))) = &best[&cur] {
        let node = match kind {
            ActionKind::Pickup => inst.messages[*msg].source,
            ActionKind::Drop => inst.messages[*msg].target,
        };
        actions.push(Action { agent, node, message: *msg, kind: *kind });
        cur = *prev;
    }
    actions.reverse();
    Ok((Schedule::from_actions(actions), cost))
}

/// Total-order wrapper so `f64` can live in a heap.
mod ordered {
    #[derive(PartialEq)]
    pub struct F64(pub f64);
    impl Eq for F64 {}
    impl PartialOrd for F64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for F64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}
