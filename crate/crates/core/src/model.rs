//! Problem and solution data model.
//!
//! A [`DeliveryInstance`] couples a graph with agents (start node, weight),
//! messages (source, target) and a carry capacity. A [`Schedule`] is a
//! globally ordered list of pickup/drop [`Action`]s; agents move between the
//! nodes of their consecutive actions along shortest paths, so a schedule
//! stores action nodes only, never routes. Feasibility and energy cost are
//! defined by [`check_feasible`] and [`schedule_cost`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DeliveryError, Result};
use crate::graph::{Graph, NodeId};

/// Maximum number of messages an agent may carry simultaneously.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Finite(usize),
    Infinite,
}

impl Capacity {
    pub fn allows(&self, carried: usize) -> bool {
        match self {
            Capacity::Finite(k) => carried <= *k,
            Capacity::Infinite => true,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Capacity::Finite(1))
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(k) => write!(f, "{k}"),
            Capacity::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub start: NodeId,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub source: NodeId,
    pub target: NodeId,
}

/// A full problem instance.
#[derive(Debug, Clone)]
pub struct DeliveryInstance {
    pub graph: Graph,
    pub agents: Vec<Agent>,
    pub messages: Vec<Message>,
    pub capacity: Capacity,
}

impl DeliveryInstance {
    pub fn new(
        graph: Graph,
        agents: Vec<Agent>,
        messages: Vec<Message>,
        capacity: Capacity,
    ) -> Result<Self> {
        let n = graph.node_count();
        for (j, a) in agents.iter().enumerate() {
            if a.start >= n {
                return Err(DeliveryError::invalid(format!(
                    "agent {j} starts at unknown node {}",
                    a.start
                )));
            }
            if !(a.weight > 0.0) {
                return Err(DeliveryError::invalid(format!(
                    "agent {j} has non-positive weight {}",
                    a.weight
                )));
            }
        }
        for (i, m) in messages.iter().enumerate() {
            if m.source >= n || m.target >= n {
                return Err(DeliveryError::invalid(format!(
                    "message {i} references an unknown node"
                )));
            }
        }
        if let Capacity::Finite(k) = capacity {
            if k == 0 {
                return Err(DeliveryError::invalid("capacity must be at least 1"));
            }
        }
        Ok(DeliveryInstance { graph, agents, messages, capacity })
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// Largest weight ratio `max w_i / min w_j`.
    pub fn weight_ratio(&self) -> f64 {
        let max = self.agents.iter().map(|a| a.weight).fold(f64::MIN, f64::max);
        let min = self.agents.iter().map(|a| a.weight).fold(f64::MAX, f64::min);
        max / min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Pickup,
    Drop,
}

/// One pickup or drop, performed by `agent` at `node` on `message`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Action {
    pub agent: usize,
    pub node: NodeId,
    pub message: usize,
    pub kind: ActionKind,
}

/// An action with the agent left open; the coordination module fills it in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkeletonAction {
    pub node: NodeId,
    pub message: usize,
    pub kind: ActionKind,
}

/// Globally ordered action sequence, all agents assigned.
///
/// `returns` optionally sends agents back to a final node after their last
/// action (transforms that close tours use it); the leg is priced into
/// [`schedule_cost`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    pub actions: Vec<Action>,
    pub returns: BTreeMap<usize, NodeId>,
}

impl Schedule {
    pub fn from_actions(actions: Vec<Action>) -> Self {
        Schedule { actions, returns: BTreeMap::new() }
    }

    /// Order-preserving subsequence of one agent's actions.
    pub fn project_agent(&self, agent: usize) -> Vec<Action> {
        self.actions.iter().copied().filter(|a| a.agent == agent).collect()
    }

    /// Order-preserving subsequence of one message's actions.
    pub fn project_message(&self, message: usize) -> Vec<Action> {
        self.actions.iter().copied().filter(|a| a.message == message).collect()
    }
}

/// A schedule with every agent field unassigned.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScheduleSkeleton {
    pub actions: Vec<SkeletonAction>,
}

/// A single feasibility defect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// F1: message actions do not alternate pickup/drop.
    Alternation { message: usize, position: usize },
    /// F1: first pickup is not at the message source.
    FirstPickupNotAtSource { message: usize },
    /// F1: a re-pickup is not at the node of the directly preceding drop.
    PickupAwayFromDrop { message: usize, position: usize },
    /// F1: a drop is performed by a different agent than the pickup.
    DropAgentMismatch { message: usize, position: usize },
    /// F1/F3: the message does not end with a drop at its target.
    Undelivered { message: usize },
    /// F2: an agent exceeds its carry capacity.
    CapacityExceeded { agent: usize, position: usize },
    /// F2: an agent drops more than it picked up.
    NegativeCarry { agent: usize, position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Alternation { message, position } => {
                write!(f, "message {message}: pickups and drops do not alternate (action {position})")
            }
            Violation::FirstPickupNotAtSource { message } => {
                write!(f, "message {message}: first pickup is not at its source")
            }
            Violation::PickupAwayFromDrop { message, position } => {
                write!(f, "message {message}: pickup at action {position} is not at the preceding drop node")
            }
            Violation::DropAgentMismatch { message, position } => {
                write!(f, "message {message}: drop at action {position} by a different agent than its pickup")
            }
            Violation::Undelivered { message } => write!(f, "message {message}: undelivered"),
            Violation::CapacityExceeded { agent, position } => {
                write!(f, "agent {agent}: capacity exceeded at action {position}")
            }
            Violation::NegativeCarry { agent, position } => {
                write!(f, "agent {agent}: drop without a held message at action {position}")
            }
        }
    }
}

/// Outcome of [`check_feasible`]: ok, or the list of violations.
#[derive(Debug, Clone, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_feasible() {
            write!(f, "feasible")
        } else {
            writeln!(f, "infeasible:")?;
            for v in &self.violations {
                writeln!(f, "  - {v}")?;
            }
            Ok(())
        }
    }
}

/// Validates indices of a schedule against an instance. Malformed schedules
/// are input errors, distinct from infeasibility.
fn validate_schedule(inst: &DeliveryInstance, s: &Schedule) -> Result<()> {
    let n = inst.graph.node_count();
    for (idx, a) in s.actions.iter().enumerate() {
        if a.agent >= inst.agent_count() {
            return Err(DeliveryError::invalid(format!(
                "action {idx}: agent index {} out of range",
                a.agent
            )));
        }
        if a.node >= n {
            return Err(DeliveryError::invalid(format!(
                "action {idx}: node {} out of range",
                a.node
            )));
        }
        if a.message >= inst.message_count() {
            return Err(DeliveryError::invalid(format!(
                "action {idx}: message index {} out of range",
                a.message
            )));
        }
    }
    for (&agent, &node) in &s.returns {
        if agent >= inst.agent_count() || node >= n {
            return Err(DeliveryError::invalid(
                "return entry references an unknown agent or node".to_string(),
            ));
        }
    }
    Ok(())
}

/// Checks feasibility of a schedule.
///
/// F1: per message, actions alternate pickup/drop, start with a pickup at the
/// source, every re-pickup happens at the node of the directly preceding drop
/// and later in the global order, every drop is by the picking agent, and the
/// final action is a drop at the target. F2: per agent, the number of held
/// messages never goes negative and never exceeds the capacity. F3: every
/// message is delivered (messages with `source == target` still require their
/// canonical pickup/drop pair).
pub fn check_feasible(inst: &DeliveryInstance, s: &Schedule) -> Result<FeasibilityReport> {
    validate_schedule(inst, s)?;
    let mut violations = Vec::new();

    for (i, msg) in inst.messages.iter().enumerate() {
        let seq: Vec<(usize, &Action)> = s
            .actions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.message == i)
            .collect();
        if seq.is_empty() {
            violations.push(Violation::Undelivered { message: i });
            continue;
        }
        let mut broken = false;
        for (q, (pos, a)) in seq.iter().enumerate() {
            let expect = if q % 2 == 0 { ActionKind::Pickup } else { ActionKind::Drop };
            if a.kind != expect {
                violations.push(Violation::Alternation { message: i, position: *pos });
                broken = true;
                break;
            }
            if q == 0 {
                if a.node != msg.source {
                    violations.push(Violation::FirstPickupNotAtSource { message: i });
                }
            } else if q % 2 == 0 {
                // Re-pickup: must be at the preceding drop's node.
                if a.node != seq[q - 1].1.node {
                    violations.push(Violation::PickupAwayFromDrop { message: i, position: *pos });
                }
            } else {
                // Drop: same agent as the preceding pickup.
                if a.agent != seq[q - 1].1.agent {
                    violations.push(Violation::DropAgentMismatch { message: i, position: *pos });
                }
            }
        }
        if !broken {
            let last = seq.last().unwrap().1;
            if last.kind != ActionKind::Drop || last.node != msg.target {
                violations.push(Violation::Undelivered { message: i });
            }
        }
    }

    for j in 0..inst.agent_count() {
        let mut held: isize = 0;
        for (pos, a) in s.actions.iter().enumerate() {
            if a.agent != j {
                continue;
            }
            match a.kind {
                ActionKind::Pickup => {
                    held += 1;
                    if !inst.capacity.allows(held as usize) {
                        violations.push(Violation::CapacityExceeded { agent: j, position: pos });
                    }
                }
                ActionKind::Drop => {
                    held -= 1;
                    if held < 0 {
                        violations.push(Violation::NegativeCarry { agent: j, position: pos });
                        held = 0;
                    }
                }
            }
        }
    }

    Ok(FeasibilityReport { violations })
}

/// Shortest distances from every node in `sources`.
pub(crate) fn distances_from_sources(
    g: &Graph,
    sources: impl IntoIterator<Item = NodeId>,
) -> Result<HashMap<NodeId, Vec<f64>>> {
    let set: BTreeSet<NodeId> = sources.into_iter().collect();
    let mut map = HashMap::with_capacity(set.len());
    for src in set {
        map.insert(src, g.dijkstra(src)?);
    }
    Ok(map)
}

/// Per-agent node chains, starting at the agent's start node and including
/// the return node when present.
fn agent_chains(inst: &DeliveryInstance, s: &Schedule) -> Vec<Vec<NodeId>> {
    let mut chains: Vec<Vec<NodeId>> = inst.agents.iter().map(|a| vec![a.start]).collect();
    for a in &s.actions {
        chains[a.agent].push(a.node);
    }
    for (&agent, &node) in &s.returns {
        chains[agent].push(node);
    }
    chains
}

/// Total energy `sum_j w_j * d_j` of a feasible schedule, where `d_j` walks
/// agent `j` from its start through its action nodes (and return node, if
/// any) along shortest paths.
pub fn schedule_cost(inst: &DeliveryInstance, s: &Schedule) -> Result<f64> {
    let report = check_feasible(inst, s)?;
    if !report.is_feasible() {
        return Err(DeliveryError::infeasible(report.to_string()));
    }
    schedule_cost_unchecked(inst, s)
}

/// Energy of a schedule without re-running the feasibility check.
pub fn schedule_cost_unchecked(inst: &DeliveryInstance, s: &Schedule) -> Result<f64> {
    validate_schedule(inst, s)?;
    let chains = agent_chains(inst, s);
    let sources = chains
        .iter()
        .flat_map(|c| c[..c.len().saturating_sub(1)].iter().copied());
    let dist = distances_from_sources(&inst.graph, sources)?;
    let mut total = 0.0;
    for (j, chain) in chains.iter().enumerate() {
        let mut d = 0.0;
        for w in chain.windows(2) {
            let leg = dist[&w[0]][w[1]];
            if leg.is_infinite() {
                return Err(DeliveryError::infeasible(format!(
                    "agent {j} cannot reach node {} from node {}",
                    w[1], w[0]
                )));
            }
            d += leg;
        }
        total += inst.agents[j].weight * d;
    }
    Ok(total)
}

/// Validates a skeleton's per-message structure (F1 with agents ignored).
pub fn validate_skeleton(inst: &DeliveryInstance, sk: &ScheduleSkeleton) -> Result<()> {
    let n = inst.graph.node_count();
    for (idx, a) in sk.actions.iter().enumerate() {
        if a.node >= n || a.message >= inst.message_count() {
            return Err(DeliveryError::invalid(format!(
                "skeleton action {idx} references an unknown node or message"
            )));
        }
    }
    for (i, msg) in inst.messages.iter().enumerate() {
        let seq: Vec<&SkeletonAction> =
            sk.actions.iter().filter(|a| a.message == i).collect();
        if seq.is_empty() {
            return Err(DeliveryError::infeasible(format!(
                "skeleton leaves message {i} undelivered"
            )));
        }
        for (q, a) in seq.iter().enumerate() {
            let expect = if q % 2 == 0 { ActionKind::Pickup } else { ActionKind::Drop };
            if a.kind != expect {
                return Err(DeliveryError::infeasible(format!(
                    "skeleton message {i}: pickups and drops do not alternate"
                )));
            }
            if q == 0 && a.node != msg.source {
                return Err(DeliveryError::infeasible(format!(
                    "skeleton message {i}: first pickup not at source"
                )));
            }
            if q > 0 && q % 2 == 0 && a.node != seq[q - 1].node {
                return Err(DeliveryError::infeasible(format!(
                    "skeleton message {i}: pickup not at preceding drop node"
                )));
            }
        }
        let last = seq.last().unwrap();
        if last.kind != ActionKind::Drop || last.node != msg.target {
            return Err(DeliveryError::infeasible(format!(
                "skeleton message {i}: does not end with a drop at the target"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON wire formats
// ---------------------------------------------------------------------------

/// A node referenced either by name or by index, as both appear in files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRef {
    Index(u64),
    Name(String),
}

impl NodeRef {
    fn resolve(&self, g: &Graph) -> Result<NodeId> {
        match self {
            NodeRef::Index(i) => {
                let id = *i as usize;
                if id < g.node_count() {
                    Ok(id)
                } else {
                    Err(DeliveryError::invalid(format!("node index {id} out of range")))
                }
            }
            NodeRef::Name(name) => g
                .node_by_name(name)
                .ok_or_else(|| DeliveryError::invalid(format!("unknown node name {name:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AgentFile {
    start: NodeRef,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct MessageFile {
    source: NodeRef,
    target: NodeRef,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CapacityFile {
    Finite(u64),
    Tag(String),
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    nodes: Vec<String>,
    edges: Vec<(NodeRef, NodeRef, f64)>,
    agents: Vec<AgentFile>,
    messages: Vec<MessageFile>,
    capacity: CapacityFile,
}

impl DeliveryInstance {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| DeliveryError::invalid(format!("instance JSON: {e}")))?;
        let name_graph = Graph::new(file.nodes.clone(), vec![])?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for (u, v, len) in &file.edges {
            edges.push((u.resolve(&name_graph)?, v.resolve(&name_graph)?, *len));
        }
        let graph = Graph::new(file.nodes, edges)?;
        let mut agents = Vec::with_capacity(file.agents.len());
        for a in &file.agents {
            agents.push(Agent { start: a.start.resolve(&graph)?, weight: a.weight });
        }
        let mut messages = Vec::with_capacity(file.messages.len());
        for m in &file.messages {
            messages.push(Message {
                source: m.source.resolve(&graph)?,
                target: m.target.resolve(&graph)?,
            });
        }
        let capacity = match file.capacity {
            CapacityFile::Finite(k) => Capacity::Finite(k as usize),
            CapacityFile::Tag(t) if t == "inf" => Capacity::Infinite,
            CapacityFile::Tag(t) => {
                return Err(DeliveryError::invalid(format!(
                    "capacity must be an integer or \"inf\", got {t:?}"
                )))
            }
        };
        DeliveryInstance::new(graph, agents, messages, capacity)
    }

    pub fn to_json_string(&self) -> String {
        let file = InstanceFile {
            nodes: self.graph.node_names().to_vec(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|e| {
                    (
                        NodeRef::Name(self.graph.node_name(e.u).to_string()),
                        NodeRef::Name(self.graph.node_name(e.v).to_string()),
                        e.length,
                    )
                })
                .collect(),
            agents: self
                .agents
                .iter()
                .map(|a| AgentFile {
                    start: NodeRef::Name(self.graph.node_name(a.start).to_string()),
                    weight: a.weight,
                })
                .collect(),
            messages: self
                .messages
                .iter()
                .map(|m| MessageFile {
                    source: NodeRef::Name(self.graph.node_name(m.source).to_string()),
                    target: NodeRef::Name(self.graph.node_name(m.target).to_string()),
                })
                .collect(),
            capacity: match self.capacity {
                Capacity::Finite(k) => CapacityFile::Finite(k as u64),
                Capacity::Infinite => CapacityFile::Tag("inf".into()),
            },
        };
        serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct ActionFile {
    agent: Option<usize>,
    node: NodeRef,
    message: usize,
    kind: ActionKind,
}

#[derive(Serialize, Deserialize)]
struct ReturnFile {
    agent: usize,
    node: NodeRef,
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    actions: Vec<ActionFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    returns: Vec<ReturnFile>,
}

impl Schedule {
    pub fn from_json_str(text: &str, g: &Graph) -> Result<Self> {
        let file: ScheduleFile = serde_json::from_str(text)
            .map_err(|e| DeliveryError::invalid(format!("schedule JSON: {e}")))?;
        let mut actions = Vec::with_capacity(file.actions.len());
        for (idx, a) in file.actions.iter().enumerate() {
            let agent = a.agent.ok_or_else(|| {
                DeliveryError::invalid(format!(
                    "action {idx} has no agent; use the skeleton reader for unassigned schedules"
                ))
            })?;
            actions.push(Action {
                agent,
                node: a.node.resolve(g)?,
                message: a.message,
                kind: a.kind,
            });
        }
        let mut returns = BTreeMap::new();
        for r in &file.returns {
            returns.insert(r.agent, r.node.resolve(g)?);
        }
        Ok(Schedule { actions, returns })
    }

    pub fn to_json_string(&self, g: &Graph) -> String {
        let file = ScheduleFile {
            actions: self
                .actions
                .iter()
                .map(|a| ActionFile {
                    agent: Some(a.agent),
                    node: NodeRef::Name(g.node_name(a.node).to_string()),
                    message: a.message,
                    kind: a.kind,
                })
                .collect(),
            returns: self
                .returns
                .iter()
                .map(|(&agent, &node)| ReturnFile {
                    agent,
                    node: NodeRef::Name(g.node_name(node).to_string()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("schedule serialization cannot fail")
    }
}

impl ScheduleSkeleton {
    pub fn from_json_str(text: &str, g: &Graph) -> Result<Self> {
        let file: ScheduleFile = serde_json::from_str(text)
            .map_err(|e| DeliveryError::invalid(format!("skeleton JSON: {e}")))?;
        let mut actions = Vec::with_capacity(file.actions.len());
        for (idx, a) in file.actions.iter().enumerate() {
            if a.agent.is_some() {
                return Err(DeliveryError::invalid(format!(
                    "skeleton action {idx} must have \"agent\": null"
                )));
            }
            actions.push(SkeletonAction {
                node: a.node.resolve(g)?,
                message: a.message,
                kind: a.kind,
            });
        }
        Ok(ScheduleSkeleton { actions })
    }

    pub fn to_json_string(&self, g: &Graph) -> String {
        let file = ScheduleFile {
            actions: self
                .actions
                .iter()
                .map(|a| ActionFile {
                    agent: None,
                    node: NodeRef::Name(g.node_name(a.node).to_string()),
                    message: a.message,
                    kind: a.kind,
                })
                .collect(),
            returns: Vec::new(),
        };
        serde_json::to_string_pretty(&file).expect("skeleton serialization cannot fail")
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{drop_at, increasing_weights_instance, pickup};
    use super::*;
    use crate::EPS;

    fn simple_instance() -> DeliveryInstance {
        // 0 -1- 1 -1- 2 -1- 3, agent (w=2) at 0, message 0 -> 3.
        let g = Graph::with_n_nodes(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        DeliveryInstance::new(
            g,
            vec![Agent { start: 0, weight: 2.0 }],
            vec![Message { source: 0, target: 3 }],
            Capacity::Finite(1),
        )
        .unwrap()
    }

    #[test]
    fn empty_instance_empty_schedule_is_ok() {
        let g = Graph::with_n_nodes(1, vec![]).unwrap();
        let inst = DeliveryInstance::new(g, vec![], vec![], Capacity::Finite(1)).unwrap();
        let report = check_feasible(&inst, &Schedule::default()).unwrap();
        assert!(report.is_feasible());
        assert_eq!(schedule_cost(&inst, &Schedule::default()).unwrap(), 0.0);
    }

    #[test]
    fn direct_delivery_is_feasible_and_priced() {
        let inst = simple_instance();
        let s = Schedule::from_actions(vec![pickup(0, 0, 0), drop_at(0, 3, 0)]);
        assert!(check_feasible(&inst, &s).unwrap().is_feasible());
        assert!((schedule_cost(&inst, &s).unwrap() - 6.0).abs() <= EPS);
    }

    #[test]
    fn wrong_drop_node_is_undelivered() {
        let inst = simple_instance();
        let s = Schedule::from_actions(vec![pickup(0, 0, 0), drop_at(0, 2, 0)]);
        let report = check_feasible(&inst, &s).unwrap();
        assert_eq!(report.violations, vec![Violation::Undelivered { message: 0 }]);
    }

    #[test]
    fn missing_actions_is_undelivered() {
        let inst = simple_instance();
        let report = check_feasible(&inst, &Schedule::default()).unwrap();
        assert_eq!(report.violations, vec![Violation::Undelivered { message: 0 }]);
    }

    #[test]
    fn dangling_indices_are_input_errors_not_infeasibility() {
        let inst = simple_instance();
        let s = Schedule::from_actions(vec![pickup(5, 0, 0)]);
        assert!(matches!(
            check_feasible(&inst, &s),
            Err(DeliveryError::InvalidInput(_))
        ));
    }

    #[test]
    fn handover_requires_drop_before_pickup() {
        let (inst, s) = increasing_weights_instance();
        assert!(check_feasible(&inst, &s).unwrap().is_feasible());
        // Swap the drop/pickup pair at the handover node: now the second
        // pickup precedes the drop, which breaks alternation.
        let mut bad = s.clone();
        bad.actions.swap(1, 2);
        let report = check_feasible(&inst, &bad).unwrap();
        assert!(!report.is_feasible());
    }

    #[test]
    fn appendix_increasing_weights_example_costs_4_5() {
        let (inst, s) = increasing_weights_instance();
        assert!((schedule_cost(&inst, &s).unwrap() - 4.5).abs() <= EPS);
    }

    #[test]
    fn capacity_is_enforced() {
        let g = Graph::with_n_nodes(2, vec![(0, 1, 1.0)]).unwrap();
        let inst = DeliveryInstance::new(
            g,
            vec![Agent { start: 0, weight: 1.0 }],
            vec![Message { source: 0, target: 1 }, Message { source: 0, target: 1 }],
            Capacity::Finite(1),
        )
        .unwrap();
        let s = Schedule::from_actions(vec![
            pickup(0, 0, 0),
            pickup(0, 0, 1),
            drop_at(0, 1, 0),
            drop_at(0, 1, 1),
        ]);
        let report = check_feasible(&inst, &s).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CapacityExceeded { .. })));
        // Raising capacity clears it (monotonicity in kappa).
        let mut relaxed = inst.clone();
        relaxed.capacity = Capacity::Finite(2);
        assert!(check_feasible(&relaxed, &s).unwrap().is_feasible());
        let mut unbounded = inst.clone();
        unbounded.capacity = Capacity::Infinite;
        assert!(check_feasible(&unbounded, &s).unwrap().is_feasible());
    }

    #[test]
    fn source_equals_target_requires_canonical_pair() {
        let g = Graph::with_n_nodes(2, vec![(0, 1, 1.0)]).unwrap();
        let inst = DeliveryInstance::new(
            g,
            vec![Agent { start: 1, weight: 1.0 }],
            vec![Message { source: 0, target: 0 }],
            Capacity::Finite(1),
        )
        .unwrap();
        assert!(!check_feasible(&inst, &Schedule::default()).unwrap().is_feasible());
        let s = Schedule::from_actions(vec![pickup(0, 0, 0), drop_at(0, 0, 0)]);
        assert!(check_feasible(&inst, &s).unwrap().is_feasible());
        // The agent walks over, the pair itself is free.
        assert!((schedule_cost(&inst, &s).unwrap() - 1.0).abs() <= EPS);
    }

    #[test]
    fn idle_agents_contribute_zero() {
        let g = Graph::with_n_nodes(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let inst = DeliveryInstance::new(
            g,
            vec![Agent { start: 0, weight: 2.0 }, Agent { start: 3, weight: 100.0 }],
            vec![Message { source: 0, target: 3 }],
            Capacity::Finite(1),
        )
        .unwrap();
        let s = Schedule::from_actions(vec![pickup(0, 0, 0), drop_at(0, 3, 0)]);
        assert!((schedule_cost(&inst, &s).unwrap() - 6.0).abs() <= EPS);
    }

    #[test]
    fn return_legs_are_priced() {
        let inst = simple_instance();
        let mut s = Schedule::from_actions(vec![pickup(0, 0, 0), drop_at(0, 3, 0)]);
        s.returns.insert(0, 0);
        assert!((schedule_cost(&inst, &s).unwrap() - 12.0).abs() <= EPS);
    }

    #[test]
    fn projections_partition_the_actions() {
        let (_, s) = increasing_weights_instance();
        let by_agents: usize = (0..2).map(|j| s.project_agent(j).len()).sum();
        assert_eq!(by_agents, s.actions.len());
        let by_messages: usize = (0..2).map(|i| s.project_message(i).len()).sum();
        assert_eq!(by_messages, s.actions.len());
        assert!(s.project_agent(1).windows(2).all(|w| {
            let pos = |a: &Action| s.actions.iter().position(|b| b == a).unwrap();
            pos(&w[0]) < pos(&w[1])
        }));
        assert!(Schedule::default().project_agent(0).is_empty());
    }

    #[test]
    fn cost_depends_only_on_per_agent_sequences() {
        let (inst, s) = increasing_weights_instance();
        let base = schedule_cost(&inst, &s).unwrap();
        // Move agent 1's pair earlier while keeping both per-agent
        // projections (and message validity) intact.
        let reordered = Schedule::from_actions(vec![
            s.actions[0],
            s.actions[1],
            s.actions[2],
            s.actions[4],
            s.actions[3],
            s.actions[5],
        ]);
        assert!(check_feasible(&inst, &reordered).unwrap().is_feasible());
        assert!((schedule_cost(&inst, &reordered).unwrap() - base).abs() <= EPS);
    }

    #[test]
    fn scaling_weights_scales_cost() {
        let (mut inst, s) = increasing_weights_instance();
        let base = schedule_cost(&inst, &s).unwrap();
        for a in &mut inst.agents {
            a.weight *= 3.0;
        }
        assert!((schedule_cost(&inst, &s).unwrap() - 3.0 * base).abs() <= EPS);
    }

    #[test]
    fn json_round_trip_is_identity() {
        let (inst, s) = increasing_weights_instance();
        let text = inst.to_json_string();
        let inst2 = DeliveryInstance::from_json_str(&text).unwrap();
        assert_eq!(text, inst2.to_json_string());
        let stext = s.to_json_string(&inst.graph);
        let s2 = Schedule::from_json_str(&stext, &inst2.graph).unwrap();
        assert_eq!(s, s2);
        assert_eq!(stext, s2.to_json_string(&inst2.graph));
    }

    #[test]
    fn capacity_json_forms() {
        let (inst, _) = increasing_weights_instance();
        let mut inf = inst.clone();
        inf.capacity = Capacity::Infinite;
        let round = DeliveryInstance::from_json_str(&inf.to_json_string()).unwrap();
        assert_eq!(round.capacity, Capacity::Infinite);
        // Node indices are accepted in place of names.
        let text = r#"{"nodes":["a","b"],"edges":[[0,1,2.0]],
            "agents":[{"start":0,"weight":1.0}],
            "messages":[{"source":"a","target":1}],"capacity":1}"#;
        let parsed = DeliveryInstance::from_json_str(text).unwrap();
        assert_eq!(parsed.messages[0].target, 1);
    }

    #[test]
    fn skeleton_round_trip_and_validation() {
        let (inst, s) = increasing_weights_instance();
        let sk = ScheduleSkeleton {
            actions: s
                .actions
                .iter()
                .map(|a| SkeletonAction { node: a.node, message: a.message, kind: a.kind })
                .collect(),
        };
        validate_skeleton(&inst, &sk).unwrap();
        let text = sk.to_json_string(&inst.graph);
        let sk2 = ScheduleSkeleton::from_json_str(&text, &inst.graph).unwrap();
        assert_eq!(sk, sk2);
        // An assigned schedule is not a skeleton.
        assert!(ScheduleSkeleton::from_json_str(&s.to_json_string(&inst.graph), &inst.graph).is_err());
    }
}
