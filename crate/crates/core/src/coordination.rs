//! Coordination: assigning agents to a fixed schedule skeleton.
//!
//! With uniform weights and capacity 1, only *where an agent comes from*
//! matters at each pickup: either its start node or some earlier drop in
//! the skeleton. That makes optimal coordination a minimum-cost maximum
//! matching on a bipartite graph between `{starts} ∪ {drops}` and the
//! pickups, solved here with the potentials form of the successive
//! shortest path method.

use std::collections::BTreeSet;

use crate::error::{DeliveryError, Result};
use crate::model::{
    check_feasible, distances_from_sources, validate_skeleton, Action, ActionKind,
    DeliveryInstance, Schedule, ScheduleSkeleton,
};
use crate::EPS;

/// One left-side element of the assignment graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftElement {
    /// Agent start `p_j`.
    Start(usize),
    /// Drop action at this skeleton position.
    Drop(usize),
}

/// Bipartite structure between agent starts plus drops and all pickups.
/// `cost[a][b]` is the empty-travel distance, `None` when the pair is
/// forbidden (a drop can only feed a strictly later pickup).
#[derive(Debug, Clone)]
pub struct AssignmentGraph {
    pub left: Vec<LeftElement>,
    /// Skeleton positions of the pickups, in skeleton order.
    pub pickups: Vec<usize>,
    pub cost: Vec<Vec<Option<f64>>>,
}

/// Builds the assignment graph of a skeleton.
pub fn build_assignment_graph(
    inst: &DeliveryInstance,
    skeleton: &ScheduleSkeleton,
) -> Result<AssignmentGraph> {
    validate_skeleton(inst, skeleton)?;
    let mut sources: BTreeSet<usize> = inst.agents.iter().map(|a| a.start).collect();
    for a in &skeleton.actions {
        sources.insert(a.node);
    }
    let dist = distances_from_sources(&inst.graph, sources)?;

    let mut left: Vec<LeftElement> = (0..inst.agent_count()).map(LeftElement::Start).collect();
    let mut pickups = Vec::new();
    for (pos, a) in skeleton.actions.iter().enumerate() {
        match a.kind {
            ActionKind::Drop => left.push(LeftElement::Drop(pos)),
            ActionKind::Pickup => pickups.push(pos),
        }
    }
    let mut cost = vec![vec![None; pickups.len()]; left.len()];
    for (ai, &elem) in left.iter().enumerate() {
        for (bi, &ppos) in pickups.iter().enumerate() {
            let to = skeleton.actions[ppos].node;
            cost[ai][bi] = match elem {
                LeftElement::Start(j) => {
                    let d = dist[&inst.agents[j].start][to];
                    d.is_finite().then_some(d)
                }
                LeftElement::Drop(dpos) => {
                    if dpos < ppos {
                        let d = dist[&skeleton.actions[dpos].node][to];
                        d.is_finite().then_some(d)
                    } else {
                        None
                    }
                }
            };
        }
    }
    Ok(AssignmentGraph { left, pickups, cost })
}

/// Minimum-cost matching that covers every column of `cost`; rows may stay
/// unmatched. Returns the matched row per column and the total weight.
/// `None` entries are forbidden pairs. Deterministic: among equal-cost
/// augmenting steps the smallest row index wins.
pub fn min_cost_assignment(cost: &[Vec<Option<f64>>]) -> Result<(Vec<usize>, f64)> {
    let nb = cost.first().map_or(0, |r| r.len());
    let na = cost.len();
    if nb == 0 {
        return Ok((Vec::new(), 0.0));
    }
    for row in cost {
        if row.len() != nb {
            return Err(DeliveryError::invalid("ragged cost table".to_string()));
        }
    }
    let price = |b: usize, a: usize| cost[a][b].unwrap_or(f64::INFINITY);

    // Successive shortest paths with potentials; columns are introduced one
    // at a time and each augmentation reassigns rows along the found path.
    // Indices are 1-based with a virtual row 0 holding the entering column.
    let mut u = vec![0.0f64; nb + 1];
    let mut v = vec![0.0f64; na + 1];
    let mut col_of_row: Vec<usize> = vec![0; na + 1];
    let mut way = vec![0usize; na + 1];
    for b in 1..=nb {
        col_of_row[0] = b;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; na + 1];
        let mut used = vec![false; na + 1];
        loop {
            used[j0] = true;
            let b0 = col_of_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = usize::MAX;
            for j in 1..=na {
                if used[j] {
                    continue;
                }
                let cur = price(b0 - 1, j - 1) - u[b0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return Err(DeliveryError::infeasible(format!(
                    "pickup {} cannot be matched to any start or preceding drop",
                    b - 1
                )));
            }
            for j in 0..=na {
                if used[j] {
                    u[col_of_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_of_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_of_row[j0] = col_of_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut match_of_b = vec![usize::MAX; nb];
    let mut total = 0.0;
    for j in 1..=na {
        if col_of_row[j] != 0 {
            let b = col_of_row[j] - 1;
            match_of_b[b] = j - 1;
            total += cost[j - 1][b].expect("matched pair is allowed");
        }
    }
    debug_assert!(match_of_b.iter().all(|&a| a != usize::MAX));
    Ok((match_of_b, total))
}

/// Optimal agent assignment for a skeleton with uniform weights and unit
/// capacity. Returns the assigned schedule and its total cost, which
/// decomposes as `w * (matching weight + sum of carry distances)`.
pub fn assign_agents(
    inst: &DeliveryInstance,
    skeleton: &ScheduleSkeleton,
) -> Result<(Schedule, f64)> {
    if !inst.capacity.is_one() {
        return Err(DeliveryError::Unsupported(
            "coordination requires capacity 1".to_string(),
        ));
    }
    if inst.agent_count() == 0 {
        return Err(DeliveryError::infeasible("no agents available"));
    }
    let w0 = inst.agents[0].weight;
    if inst.agents.iter().any(|a| (a.weight - w0).abs() > EPS) {
        return Err(DeliveryError::Unsupported(
            "coordination requires uniform weights; the unit-capacity approximation covers the general case"
                .to_string(),
        ));
    }

    let graph = build_assignment_graph(inst, skeleton)?;
    let (match_of_b, matching_weight) = min_cost_assignment(&graph.cost)?;

    // Pair every pickup with its message's next action (its drop).
    let mut pair_drop = vec![usize::MAX; skeleton.actions.len()];
    let mut open: Vec<Option<usize>> = vec![None; inst.message_count()];
    for (pos, a) in skeleton.actions.iter().enumerate() {
        match a.kind {
            ActionKind::Pickup => open[a.message] = Some(pos),
            ActionKind::Drop => {
                let p = open[a.message].take().expect("validated skeleton alternates");
                pair_drop[p] = pos;
            }
        }
    }

    // Resolve agents by chaining: a pickup inherits from its predecessor.
    let mut agent_of_action = vec![usize::MAX; skeleton.actions.len()];
    for (bi, &ppos) in graph.pickups.iter().enumerate() {
        let agent = match graph.left[match_of_b[bi]] {
            LeftElement::Start(j) => j,
            LeftElement::Drop(dpos) => {
                let a = agent_of_action[dpos];
                debug_assert!(a != usize::MAX, "drop resolved before its pickup");
                a
            }
        };
        agent_of_action[ppos] = agent;
        agent_of_action[pair_drop[ppos]] = agent;
    }

    let actions: Vec<Action> = skeleton
        .actions
        .iter()
        .enumerate()
        .map(|(pos, a)| Action {
            agent: agent_of_action[pos],
            node: a.node,
            message: a.message,
            kind: a.kind,
        })
        .collect();
    let schedule = Schedule::from_actions(actions);

    let carry_sources: BTreeSet<_> = skeleton.actions.iter().map(|a| a.node).collect();
    let dist = distances_from_sources(&inst.graph, carry_sources)?;
    let mut carry = 0.0;
    for (pos, a) in skeleton.actions.iter().enumerate() {
        if a.kind == ActionKind::Pickup {
            let d = dist[&a.node][skeleton.actions[pair_drop[pos]].node];
            if !d.is_finite() {
                return Err(DeliveryError::infeasible(format!(
                    "message {} pair spans disconnected nodes",
                    a.message
                )));
            }
            carry += d;
        }
    }
    let cost = w0 * (matching_weight + carry);

    let report = check_feasible(inst, &schedule)?;
    if !report.is_feasible() {
        return Err(DeliveryError::Internal(format!(
            "decoded coordination schedule is infeasible: {report}"
        )));
    }
    Ok((schedule, cost))
}
