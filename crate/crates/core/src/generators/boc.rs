//! Relay-star family exhibiting the benefit of collaboration.
//!
//! A star with `r + 1` arms of total length 1 each (subdivided into `n`
//! edges of length `1/n`): message `i` travels from the tip of arm `i`
//! through the center and down the shared trunk to its far end. An agent
//! of weight `2r / (2r + j/n)` sits at every vertex at distance `j/n` from
//! its arm tip, so relaying each message one edge at a time (then bundling
//! all `r` on the trunk) costs about `2r * ln((1 + 1/2r)^r (1 + 1/(2r+1)))`,
//! while any schedule giving each message a single carrier pays at least
//! `2r`.

use crate::error::{DeliveryError, Result};
use crate::graph::Graph;
use crate::model::{
    Action, ActionKind, Agent, Capacity, DeliveryInstance, Message, Schedule,
};

/// A generated relay star with its reference collaborative schedule.
#[derive(Debug, Clone)]
pub struct BocInstance {
    pub r: usize,
    pub n: usize,
    pub instance: DeliveryInstance,
    pub collaborative_schedule: Schedule,
    /// Exact cost of the collaborative relay (closed-form sum).
    pub collaborative_cost: f64,
    /// Lower bound on any schedule with one carrier per message.
    pub single_carrier_floor: f64,
}

impl BocInstance {
    /// The finite-subdivision upper bound on the collaborative cost,
    /// `2r ln( ((2r - 1/n + 1)/(2r - 1/n))^r * ((2r - 1/n + 2)/(2r - 1/n + 1)) )`.
    pub fn log_upper_bound(&self) -> f64 {
        let r = self.r as f64;
        let inv = 1.0 / self.n as f64;
        2.0 * r
            * (((2.0 * r - inv + 1.0) / (2.0 * r - inv)).powf(r)
                * ((2.0 * r - inv + 2.0) / (2.0 * r - inv + 1.0)))
            .ln()
    }

    /// The subdivision limit of [`Self::log_upper_bound`],
    /// `2r ln( (1 + 1/(2r))^r * (1 + 1/(2r+1)) )`.
    pub fn limit_upper_bound(&self) -> f64 {
        let r = self.r as f64;
        2.0 * r * ((1.0 + 1.0 / (2.0 * r)).powf(r) * (1.0 + 1.0 / (2.0 * r + 1.0))).ln()
    }
}

/// Builds the relay star with `r` messages and `n` subdivisions per arm.
/// The emitted capacity is `r` (the trunk agent bundles all messages).
pub fn gen_boc(r: usize, n: usize) -> Result<BocInstance> {
    if r == 0 || n == 0 {
        return Err(DeliveryError::invalid("gen_boc requires r >= 1 and n >= 1"));
    }
    let seg = 1.0 / n as f64;
    let weight = |j: usize| 2.0 * r as f64 / (2.0 * r as f64 + j as f64 * seg);

    // Arm i (1-based) occupies ids (i-1)*n .. i*n-1; the trunk holds
    // ids r*n ..= r*n + n, with the star center at trunk position n.
    let arm = |i: usize, j: usize| (i - 1) * n + j;
    let trunk = |j: usize| r * n + (j - n);
    let center = trunk(n);
    let node_count = r * n + n + 1;

    let mut names = Vec::with_capacity(node_count);
    for i in 1..=r {
        for j in 0..n {
            names.push(format!("v{i}_{j}"));
        }
    }
    for j in n..=2 * n {
        names.push(format!("v0_{j}"));
    }

    let mut edges = Vec::new();
    for i in 1..=r {
        for j in 0..n {
            let next = if j + 1 < n { arm(i, j + 1) } else { center };
            edges.push((arm(i, j), next, seg));
        }
    }
    for j in n..2 * n {
        edges.push((trunk(j), trunk(j + 1), seg));
    }
    let graph = Graph::new(names, edges)?;

    let mut agents = Vec::new();
    for i in 1..=r {
        for j in 0..n {
            agents.push(Agent { start: arm(i, j), weight: weight(j) });
        }
    }
    for j in n..=2 * n {
        agents.push(Agent { start: trunk(j), weight: weight(j) });
    }

    let messages: Vec<Message> = (1..=r)
        .map(|i| Message { source: arm(i, 0), target: trunk(2 * n) })
        .collect();
    let instance = DeliveryInstance::new(graph, agents, messages, Capacity::Finite(r))?;

    // Relay: agent (i, j) moves message i one edge outward; then each trunk
    // agent moves all r messages one edge at a time.
    let mut actions = Vec::new();
    for i in 1..=r {
        for j in 0..n {
            let agent = (i - 1) * n + j;
            let next = if j + 1 < n { arm(i, j + 1) } else { center };
            actions.push(Action { agent, node: arm(i, j), message: i - 1, kind: ActionKind::Pickup });
            actions.push(Action { agent, node: next, message: i - 1, kind: ActionKind::Drop });
        }
    }
    for j in n..2 * n {
        let agent = r * n + (j - n);
        for msg in 0..r {
            actions.push(Action { agent, node: trunk(j), message: msg, kind: ActionKind::Pickup });
        }
        for msg in 0..r {
            actions.push(Action { agent, node: trunk(j + 1), message: msg, kind: ActionKind::Drop });
        }
    }
    let collaborative_schedule = Schedule::from_actions(actions);

    let arm_leg: f64 = (0..n).map(|j| seg * weight(j)).sum();
    let trunk_leg: f64 = (n..2 * n).map(|j| seg * weight(j)).sum();
    let collaborative_cost = r as f64 * arm_leg + trunk_leg;

    Ok(BocInstance {
        r,
        n,
        instance,
        collaborative_schedule,
        collaborative_cost,
        single_carrier_floor: 2.0 * r as f64,
    })
}
