//! Seeded random instances, skeletons and assignments.
//!
//! Everything here is driven by [`SplitMix64`](crate::rng::SplitMix64), so a
//! `(seed, parameters)` pair reproduces the same fixture on every platform.
//! The CLI's `gen random` and the test corpora both go through this module.

use crate::model::{
    Agent, Capacity, DeliveryInstance, Message, ScheduleSkeleton, SkeletonAction,
};
use crate::model::ActionKind;
use crate::graph::Graph;
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct CorpusParams {
    pub seed: u64,
    pub nodes: usize,
    pub agents: usize,
    pub messages: usize,
    pub weight_range: (f64, f64),
    pub capacity: Capacity,
}

/// Connected random instance: a random spanning tree plus a few chords,
/// edge lengths in `[0.5, 2)`, agents and message endpoints uniform.
pub fn random_instance(p: &CorpusParams) -> DeliveryInstance {
    let mut rng = SplitMix64::new(p.seed);
    random_instance_with(&mut rng, p)
}

/// Same as [`random_instance`] but drawing from a caller-owned generator.
pub fn random_instance_with(rng: &mut SplitMix64, p: &CorpusParams) -> DeliveryInstance {
    let n = p.nodes.max(1);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.below(v);
        edges.push((u, v, rng.range_f64(0.5, 2.0)));
    }
    let chords = if n >= 3 { rng.below(n) } else { 0 };
    for _ in 0..chords {
        let u = rng.below(n);
        let v = rng.below(n);
        if u != v {
            edges.push((u.min(v), u.max(v), rng.range_f64(0.5, 2.0)));
        }
    }
    let graph = Graph::with_n_nodes(n, edges).expect("generated edges are valid");
    let agents = (0..p.agents)
        .map(|_| Agent {
            start: rng.below(n),
            weight: rng.range_f64(p.weight_range.0, p.weight_range.1),
        })
        .collect();
    let messages = (0..p.messages)
        .map(|_| {
            let source = rng.below(n);
            let target = if n == 1 {
                source
            } else {
                let mut t = rng.below(n);
                while t == source {
                    t = rng.below(n);
                }
                t
            };
            Message { source, target }
        })
        .collect();
    DeliveryInstance::new(graph, agents, messages, p.capacity)
        .expect("generated instance is valid")
}

/// Random fixed schedule (skeleton): each message travels over one or two
/// legs through random handover nodes; the per-message pair lists are then
/// interleaved at random while preserving each message's order.
pub fn random_skeleton(inst: &DeliveryInstance, seed: u64) -> ScheduleSkeleton {
    let mut rng = SplitMix64::new(seed);
    let n = inst.graph.node_count();
    let mut per_message: Vec<Vec<(SkeletonAction, SkeletonAction)>> = Vec::new();
    for (i, msg) in inst.messages.iter().enumerate() {
        let legs = if n >= 2 && rng.next_f64() < 0.4 { 2 } else { 1 };
        let mut pairs = Vec::new();
        if legs == 1 || msg.source == msg.target {
            pairs.push((
                SkeletonAction { node: msg.source, message: i, kind: ActionKind::Pickup },
                SkeletonAction { node: msg.target, message: i, kind: ActionKind::Drop },
            ));
        } else {
            let mid = rng.below(n);
            pairs.push((
                SkeletonAction { node: msg.source, message: i, kind: ActionKind::Pickup },
                SkeletonAction { node: mid, message: i, kind: ActionKind::Drop },
            ));
            pairs.push((
                SkeletonAction { node: mid, message: i, kind: ActionKind::Pickup },
                SkeletonAction { node: msg.target, message: i, kind: ActionKind::Drop },
            ));
        }
        per_message.push(pairs);
    }
    // Interleave: repeatedly pop the first remaining pair of a random message.
    let mut cursors = vec![0usize; per_message.len()];
    let total: usize = per_message.iter().map(|p| p.len()).sum();
    let mut actions = Vec::with_capacity(total * 2);
    let mut remaining = total;
    while remaining > 0 {
        let mut pick = rng.below(remaining);
        let mut chosen = usize::MAX;
        for (i, pairs) in per_message.iter().enumerate() {
            let left = pairs.len() - cursors[i];
            if pick < left {
                chosen = i;
                break;
            }
            pick -= left;
        }
        let (up, down) = per_message[chosen][cursors[chosen]];
        cursors[chosen] += 1;
        remaining -= 1;
        actions.push(up);
        actions.push(down);
    }
    ScheduleSkeleton { actions }
}

/// Random partition of all messages among the agents, at most
/// `max_per_agent` each (assumes enough agents to hold them all).
pub fn random_assignment(
    inst: &DeliveryInstance,
    seed: u64,
    max_per_agent: usize,
) -> Vec<Vec<usize>> {
    let mut rng = SplitMix64::new(seed);
    let k = inst.agent_count();
    let mut buckets = vec![Vec::new(); k];
    let mut order: Vec<usize> = (0..inst.message_count()).collect();
    rng.shuffle(&mut order);
    for msg in order {
        let open: Vec<usize> = (0..k).filter(|&j| buckets[j].len() < max_per_agent).collect();
        let j = open[rng.below(open.len())];
        buckets[j].push(msg);
    }
    for b in &mut buckets {
        b.sort_unstable();
    }
    buckets
}
