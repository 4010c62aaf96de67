//! Planning approximations for the restricted setting.
//!
//! Given a partition of the messages among the agents, with every message
//! carried start-to-finish by its assigned agent, each agent can be planned
//! independently:
//!
//! * capacity 1 ([`plan_unit_capacity`]): seed a forest with all
//!   source-target edges, grow it Kruskal-style with anchor-to-source and
//!   target-to-source candidates, and emit pickup/drop pairs whenever a DFS
//!   from the agent's start crosses a message edge in source-to-target
//!   direction. The result is within twice the optimal reordering.
//! * unbounded capacity ([`plan_infinite_capacity`]): collect all messages
//!   along a doubled MST of the sources, then deliver along a metric
//!   TSP path over the targets with fixed start ([`tsp_path`]), for a
//!   3.5-approximation when the path subroutine achieves its 3/2 bound.

use std::collections::BTreeSet;

use crate::error::{DeliveryError, Result};
use crate::graph::NodeId;
use crate::model::{
    check_feasible, distances_from_sources, Action, ActionKind, Capacity, DeliveryInstance,
    Schedule,
};

/// Per-agent point set of the auxiliary metric: the agent's start plus one
/// point per (message, role).
#[derive(Debug, Clone)]
pub struct MetricPointSet {
    /// Graph node of each point; point 0 is the anchor.
    pub nodes: Vec<NodeId>,
    /// `roles[i] = None` for the anchor, `Some((message, role))` otherwise.
    pub roles: Vec<Option<(usize, PointRole)>>,
    /// Dense pairwise distances inherited from the graph metric.
    pub dist: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRole {
    Source,
    Target,
}

impl MetricPointSet {
    /// Builds the point set for `agent` and its assigned `messages`.
    pub fn build(inst: &DeliveryInstance, agent: usize, messages: &[usize]) -> Result<Self> {
        let mut nodes = vec![inst.agents[agent].start];
        let mut roles = vec![None];
        for &i in messages {
            nodes.push(inst.messages[i].source);
            roles.push(Some((i, PointRole::Source)));
            nodes.push(inst.messages[i].target);
            roles.push(Some((i, PointRole::Target)));
        }
        let per_source = distances_from_sources(&inst.graph, nodes.iter().copied())?;
        let dist = nodes
            .iter()
            .map(|&u| nodes.iter().map(|&v| per_source[&u][v]).collect())
            .collect();
        Ok(MetricPointSet { nodes, roles, dist })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn source_point(&self, slot: usize) -> usize {
        1 + 2 * slot
    }

    fn target_point(&self, slot: usize) -> usize {
        2 + 2 * slot
    }
}

fn validate_assignment(inst: &DeliveryInstance, assignment: &[Vec<usize>]) -> Result<()> {
    if assignment.len() != inst.agent_count() {
        return Err(DeliveryError::invalid(format!(
            "assignment has {} agent buckets, instance has {} agents",
            assignment.len(),
            inst.agent_count()
        )));
    }
    let mut seen = vec![false; inst.message_count()];
    for bucket in assignment {
        for &i in bucket {
            if i >= inst.message_count() {
                return Err(DeliveryError::invalid(format!("unknown message {i}")));
            }
            if seen[i] {
                return Err(DeliveryError::invalid(format!(
                    "message {i} assigned to two agents"
                )));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(DeliveryError::invalid(format!(
            "message {i} is not assigned to any agent"
        )));
    }
    Ok(())
}

/// Unit-capacity planning over a message partition. With `close_tour`, each
/// agent's full DFS tour is kept and the agent returns to its start;
/// otherwise movement after the last drop is truncated.
pub fn plan_unit_capacity(
    inst: &DeliveryInstance,
    assignment: &[Vec<usize>],
    close_tour: bool,
) -> Result<Schedule> {
    if !inst.capacity.is_one() {
        return Err(DeliveryError::Unsupported(
            "unit-capacity planning requires capacity 1".to_string(),
        ));
    }
    validate_assignment(inst, assignment)?;
    let mut schedule = Schedule::default();
    for (agent, messages) in assignment.iter().enumerate() {
        if messages.is_empty() {
            continue;
        }
        let points = MetricPointSet::build(inst, agent, messages)?;
        let adj = seeded_tree(&points)?;
        emit_dfs(inst, &points, &adj, agent, &mut schedule.actions);
        if close_tour {
            schedule.returns.insert(agent, inst.agents[agent].start);
        }
    }
    debug_assert!(check_feasible(inst, &schedule).map(|r| r.is_feasible()).unwrap_or(false));
    Ok(schedule)
}

/// Spanning tree on the point set: message edges seeded first, then
/// anchor-source and target-source candidates in ascending length.
/// Returns the adjacency lists (children unsorted).
fn seeded_tree(points: &MetricPointSet) -> Result<Vec<Vec<usize>>> {
    let n = points.len();
    let x = (n - 1) / 2;
    let mut dsu = Dsu::new(n);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for slot in 0..x {
        let (s, t) = (points.source_point(slot), points.target_point(slot));
        dsu.unite(s, t);
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for slot in 0..x {
        let s = points.source_point(slot);
        candidates.push((points.dist[0][s], 0, s));
        for other in 0..x {
            let t = points.target_point(other);
            if other != slot {
                candidates.push((points.dist[t][s], t, s));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut components = x + 1;
    for (len, u, v) in candidates {
        if components == 1 {
            break;
        }
        if len.is_infinite() {
            continue;
        }
        if dsu.find(u) != dsu.find(v) {
            dsu.unite(u, v);
            adj[u].push(v);
            adj[v].push(u);
            components -= 1;
        }
    }
    if components != 1 {
        return Err(DeliveryError::infeasible(
            "assigned messages are not all reachable from the agent".to_string(),
        ));
    }
    Ok(adj)
}

/// DFS from the anchor; crossing a message edge in source-to-target
/// direction (downward or on the way back up) emits its pickup/drop pair.
/// Children are explored in ascending (edge length, point id) order.
fn emit_dfs(
    inst: &DeliveryInstance,
    points: &MetricPointSet,
    adj: &[Vec<usize>],
    agent: usize,
    actions: &mut Vec<Action>,
) {
    let mut visited = vec![false; points.len()];
    fn rec(
        points: &MetricPointSet,
        adj: &[Vec<usize>],
        inst: &DeliveryInstance,
        agent: usize,
        u: usize,
        visited: &mut [bool],
        actions: &mut Vec<Action>,
    ) {
        visited[u] = true;
        let mut children: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
        children.sort_by(|&a, &b| points.dist[u][a].total_cmp(&points.dist[u][b]).then(a.cmp(&b)));
        for v in children {
            if visited[v] {
                continue;
            }
            // Downward crossing u -> v.
            if let (Some((i, PointRole::Source)), Some((iv, PointRole::Target))) =
                (point_role(points, u), point_role(points, v))
            {
                if i == iv {
                    push_pair(inst, agent, i, actions);
                }
            }
            rec(points, adj, inst, agent, v, visited, actions);
            // Upward crossing v -> u.
            if let (Some((iv, PointRole::Source)), Some((i, PointRole::Target))) =
                (point_role(points, v), point_role(points, u))
            {
                if i == iv {
                    push_pair(inst, agent, i, actions);
                }
            }
        }
    }
    rec(points, adj, inst, agent, 0, &mut visited, actions);
}

fn point_role(points: &MetricPointSet, p: usize) -> Option<(usize, PointRole)> {
    points.roles[p]
}

fn push_pair(inst: &DeliveryInstance, agent: usize, message: usize, actions: &mut Vec<Action>) {
    actions.push(Action {
        agent,
        node: inst.messages[message].source,
        message,
        kind: ActionKind::Pickup,
    });
    actions.push(Action {
        agent,
        node: inst.messages[message].target,
        message,
        kind: ActionKind::Drop,
    });
}

/// Unbounded-capacity planning: per agent, a DFS over the MST of
/// `{start} ∪ sources` collects every message (pickup at the first visit of
/// its source), then a TSP path over `{start} ∪ targets` delivers them
/// (drop at the first visit of its target).
pub fn plan_infinite_capacity(
    inst: &DeliveryInstance,
    assignment: &[Vec<usize>],
    close_tour: bool,
) -> Result<(Schedule, PathBound)> {
    if inst.capacity != Capacity::Infinite {
        return Err(DeliveryError::Unsupported(
            "infinite-capacity planning requires capacity inf".to_string(),
        ));
    }
    validate_assignment(inst, assignment)?;
    let mut schedule = Schedule::default();
    let mut worst_bound = PathBound::ThreeHalves;
    for (agent, messages) in assignment.iter().enumerate() {
        if messages.is_empty() {
            continue;
        }
        let points = MetricPointSet::build(inst, agent, messages)?;
        let x = messages.len();

        // Collection phase: MST over anchor + sources, preorder pickups.
        let mut coll_ids = vec![0usize];
        coll_ids.extend((0..x).map(|slot| points.source_point(slot)));
        let mst = prim_mst(&points.dist, &coll_ids)?;
        let mut picked: BTreeSet<usize> = BTreeSet::new();
        let mut order = Vec::new();
        preorder(&mst, 0, usize::MAX, &mut order);
        for &local in &order {
            let point = coll_ids[local];
            if let Some((i, PointRole::Source)) = points.roles[point] {
                if picked.insert(i) {
                    schedule.actions.push(Action {
                        agent,
                        node: inst.messages[i].source,
                        message: i,
                        kind: ActionKind::Pickup,
                    });
                }
            }
        }

        // Delivery phase: TSP path over anchor + targets from the anchor.
        let mut del_ids = vec![0usize];
        del_ids.extend((0..x).map(|slot| points.target_point(slot)));
        let sub = submatrix(&points.dist, &del_ids);
        let (path, bound) = tsp_path(&sub, 0)?;
        if bound == PathBound::Double {
            worst_bound = PathBound::Double;
        }
        let mut dropped: BTreeSet<usize> = BTreeSet::new();
        for &local in &path {
            let point = del_ids[local];
            if let Some((i, PointRole::Target)) = points.roles[point] {
                if dropped.insert(i) {
                    schedule.actions.push(Action {
                        agent,
                        node: inst.messages[i].target,
                        message: i,
                        kind: ActionKind::Drop,
                    });
                }
            }
        }
        if close_tour {
            schedule.returns.insert(agent, inst.agents[agent].start);
        }
    }
    debug_assert!(check_feasible(inst, &schedule).map(|r| r.is_feasible()).unwrap_or(false));
    Ok((schedule, worst_bound))
}

/// Which guarantee the TSP-path subroutine achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathBound {
    /// Christofides-style: within 3/2 of the optimal path.
    ThreeHalves,
    /// Doubled-tree fallback (too many odd vertices): within 2.
    Double,
}

/// Maximum number of wrong-parity vertices handled by the exact matching.
pub const MATCHING_LIMIT: usize = 16;

/// Metric TSP path with fixed start and free end.
///
/// Builds an MST, then for every candidate endpoint computes an exact
/// minimum-weight perfect matching (subset DP) on the wrong-parity set and
/// shortcuts an Eulerian trail; the best candidate is returned with the 3/2
/// guarantee. If any matching instance exceeds [`MATCHING_LIMIT`] vertices,
/// the doubled-MST preorder is returned instead with a 2x guarantee.
pub fn tsp_path(dist: &[Vec<f64>], start: usize) -> Result<(Vec<usize>, PathBound)> {
    let n = dist.len();
    if start >= n {
        return Err(DeliveryError::invalid("tsp_path start out of range".to_string()));
    }
    if n <= 2 {
        let order = (0..n).map(|i| (start + i) % n).collect();
        return Ok((order, PathBound::ThreeHalves));
    }
    for row in dist {
        if row.iter().any(|d| !d.is_finite()) {
            return Err(DeliveryError::infeasible(
                "tsp_path requires finite pairwise distances".to_string(),
            ));
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mst = prim_mst(dist, &all)?;
    let mut degree = vec![0usize; n];
    for (u, list) in mst.iter().enumerate() {
        degree[u] = list.len();
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut fell_back = false;
    for end in 0..n {
        if end == start {
            continue;
        }
        // Wrong-parity set: odd MST degree, adjusted at the two endpoints.
        let mut wrong: Vec<usize> = Vec::new();
        for v in 0..n {
            let want_odd = v == start || v == end;
            if (degree[v] % 2 == 1) != want_odd {
                wrong.push(v);
            }
        }
        if wrong.len() > MATCHING_LIMIT {
            fell_back = true;
            continue;
        }
        let matching = min_perfect_matching(dist, &wrong);
        // Eulerian trail over MST + matching edges, then shortcut.
        let mut multi: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, list) in mst.iter().enumerate() {
            for &v in list {
                multi[u].push(v);
            }
        }
        for pair in matching.chunks(2) {
            multi[pair[0]].push(pair[1]);
            multi[pair[1]].push(pair[0]);
        }
        let trail = euler_trail(&mut multi, start);
        let mut seen = vec![false; n];
        let mut path = Vec::with_capacity(n);
        for v in trail {
            if !seen[v] {
                seen[v] = true;
                path.push(v);
            }
        }
        let len = path_len(dist, &path);
        if best.as_ref().map_or(true, |(bl, _)| len < *bl - 1e-15) {
            best = Some((len, path));
        }
    }

    match best {
        Some((_, path)) => Ok((path, PathBound::ThreeHalves)),
        None => {
            debug_assert!(fell_back);
            let mut order = Vec::new();
            preorder(&mst, start, usize::MAX, &mut order);
            Ok((order, PathBound::Double))
        }
    }
}

fn path_len(dist: &[Vec<f64>], path: &[usize]) -> f64 {
    path.windows(2).map(|w| dist[w[0]][w[1]]).sum()
}

/// Exact minimum-weight perfect matching on `verts` by subset DP.
/// Returns the matched vertices as consecutive pairs.
fn min_perfect_matching(dist: &[Vec<f64>], verts: &[usize]) -> Vec<usize> {
    let q = verts.len();
    debug_assert!(q % 2 == 0);
    if q == 0 {
        return Vec::new();
    }
    let full = (1usize << q) - 1;
    let mut dp = vec![f64::INFINITY; full + 1];
    let mut choice = vec![(0usize, 0usize); full + 1];
    dp[0] = 0.0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        if mask & (1 << i) == 0 {
            continue;
        }
        let rest = mask & !(1 << i);
        let mut m = rest;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            let prev = rest & !(1 << j);
            let cand = dp[prev] + dist[verts[i]][verts[j]];
            if cand < dp[mask] {
                dp[mask] = cand;
                choice[mask] = (i, j);
            }
        }
    }
    let mut pairs = Vec::with_capacity(q);
    let mut mask = full;
    while mask != 0 {
        let (i, j) = choice[mask];
        pairs.push(verts[i]);
        pairs.push(verts[j]);
        mask &= !(1 << i);
        mask &= !(1 << j);
    }
    pairs
}

/// Prim MST over `ids` (indices into `dist`); returns adjacency lists in
/// local indices. Deterministic: ties prefer the smaller local index.
fn prim_mst(dist: &[Vec<f64>], ids: &[usize]) -> Result<Vec<Vec<usize>>> {
    let n = ids.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut link = vec![usize::MAX; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    best[0] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        if best[u].is_infinite() {
            return Err(DeliveryError::infeasible(
                "point set is not metrically connected".to_string(),
            ));
        }
        in_tree[u] = true;
        if link[u] != usize::MAX {
            adj[link[u]].push(u);
            adj[u].push(link[u]);
        }
        for v in 0..n {
            if !in_tree[v] {
                let d = dist[ids[u]][ids[v]];
                if d < best[v] {
                    best[v] = d;
                    link[v] = u;
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(adj)
}

fn preorder(adj: &[Vec<usize>], u: usize, parent: usize, out: &mut Vec<usize>) {
    out.push(u);
    for &v in &adj[u] {
        if v != parent {
            preorder(adj, v, u, out);
        }
    }
}

/// Hierholzer's algorithm on an undirected multigraph given as adjacency
/// lists (each edge appears in both directions); consumes the graph.
fn euler_trail(multi: &mut [Vec<usize>], start: usize) -> Vec<usize> {
    let mut stack = vec![start];
    let mut trail = Vec::new();
    while let Some(&u) = stack.last() {
        if let Some(v) = multi[u].pop() {
            // Remove one matching reverse entry.
            if let Some(pos) = multi[v].iter().position(|&w| w == u) {
                multi[v].remove(pos);
            }
            stack.push(v);
        } else {
            trail.push(u);
            stack.pop();
        }
    }
    trail.reverse();
    trail
}

fn submatrix(dist: &[Vec<f64>], ids: &[usize]) -> Vec<Vec<f64>> {
    ids.iter()
        .map(|&u| ids.iter().map(|&v| dist[u][v]).collect())
        .collect()
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
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::{schedule_cost, Agent, Message};
    use crate::oracle::reorder_exact;
    use crate::rng::SplitMix64;
    use crate::EPS;

    fn line(n: usize) -> Graph {
        Graph::with_n_nodes(n, (0..n - 1).map(|i| (i, i + 1, 1.0)).collect()).unwrap()
    }

    fn line_instance(cap: Capacity) -> DeliveryInstance {
        // p = 0, s1 = 1, t1 = 2, s2 = 3, t2 = 4 with unit edges.
        DeliveryInstance::new(
            line(5),
            vec![Agent { start: 0, weight: 1.0 }],
            vec![Message { source: 1, target: 2 }, Message { source: 3, target: 4 }],
            cap,
        )
        .unwrap()
    }

    #[test]
    fn single_message_goes_straight() {
        let inst = DeliveryInstance::new(
            line(3),
            vec![Agent { start: 0, weight: 2.0 }],
            vec![Message { source: 1, target: 2 }],
            Capacity::Finite(1),
        )
        .unwrap();
        let s = plan_unit_capacity(&inst, &[vec![0]], false).unwrap();
        assert!((schedule_cost(&inst, &s).unwrap() - 2.0 * 2.0).abs() <= EPS);
    }

    #[test]
    fn line_instance_plans_in_order() {
        let inst = line_instance(Capacity::Finite(1));
        let s = plan_unit_capacity(&inst, &[vec![0, 1]], false).unwrap();
        // Tree: (0,s1), (s1,t1), (t1,s2), (s2,t2); DFS serves m0 then m1.
        let cost = schedule_cost(&inst, &s).unwrap();
        assert!((cost - 4.0).abs() <= EPS);
        let (_, opt) = reorder_exact(&inst, 0, &[0, 1]).unwrap();
        assert!(cost <= 2.0 * opt + EPS);
        // With the closed tour the agent walks back: cost 8.
        let closed = plan_unit_capacity(&inst, &[vec![0, 1]], true).unwrap();
        assert!((schedule_cost(&inst, &closed).unwrap() - 8.0).abs() <= EPS);
    }

    #[test]
    fn opposite_branches_served_one_then_other() {
        // Two messages on opposite sides of the anchor.
        let inst = DeliveryInstance::new(
            line(5),
            vec![Agent { start: 2, weight: 1.0 }],
            vec![Message { source: 1, target: 0 }, Message { source: 3, target: 4 }],
            Capacity::Finite(1),
        )
        .unwrap();
        let s = plan_unit_capacity(&inst, &[vec![0, 1]], false).unwrap();
        let cost = schedule_cost(&inst, &s).unwrap();
        let (_, opt) = reorder_exact(&inst, 0, &[0, 1]).unwrap();
        assert!(cost <= 2.0 * opt + EPS);
        // Full DFS walks 2 + 2 on each side minus the truncated last leg.
        assert!((cost - 6.0).abs() <= EPS);
    }

    #[test]
    fn unit_plan_respects_capacity_and_restriction() {
        let inst = line_instance(Capacity::Finite(1));
        let s = plan_unit_capacity(&inst, &[vec![0, 1]], false).unwrap();
        for i in 0..2 {
            let acts = s.project_message(i);
            assert_eq!(acts.len(), 2);
            assert_eq!(acts[0].kind, ActionKind::Pickup);
            assert_eq!(acts[0].node, inst.messages[i].source);
            assert_eq!(acts[1].node, inst.messages[i].target);
            assert_eq!(acts[0].agent, acts[1].agent);
        }
    }

    #[test]
    fn bad_assignments_are_rejected() {
        let inst = line_instance(Capacity::Finite(1));
        assert!(plan_unit_capacity(&inst, &[vec![0]], false).is_err());
        assert!(plan_unit_capacity(&inst, &[vec![0, 0]], false).is_err());
        assert!(plan_unit_capacity(&inst, &[vec![0, 1, 7]], false).is_err());
    }

    #[test]
    fn infinite_plan_collects_then_delivers() {
        let inst = line_instance(Capacity::Infinite);
        let (s, bound) = plan_infinite_capacity(&inst, &[vec![0, 1]], false).unwrap();
        assert_eq!(bound, PathBound::ThreeHalves);
        let cost = schedule_cost(&inst, &s).unwrap();
        let (_, opt) = reorder_exact(&inst, 0, &[0, 1]).unwrap();
        assert!(cost <= 3.5 * opt + EPS);
        // Pickups precede drops.
        let first_drop = s.actions.iter().position(|a| a.kind == ActionKind::Drop).unwrap();
        assert!(s.actions[..first_drop].iter().all(|a| a.kind == ActionKind::Pickup));
    }

    #[test]
    fn colocated_sources_make_collection_free() {
        let inst = DeliveryInstance::new(
            line(4),
            vec![Agent { start: 0, weight: 1.0 }],
            vec![Message { source: 0, target: 2 }, Message { source: 0, target: 3 }],
            Capacity::Infinite,
        )
        .unwrap();
        let (s, _) = plan_infinite_capacity(&inst, &[vec![0, 1]], false).unwrap();
        let cost = schedule_cost(&inst, &s).unwrap();
        // Collection costs nothing; delivery is the straight sweep.
        assert!((cost - 3.0).abs() <= EPS);
    }

    #[test]
    fn tsp_path_trivial_cases() {
        let d = vec![vec![0.0, 2.0], vec![2.0, 0.0]];
        let (p, _) = tsp_path(&d, 0).unwrap();
        assert_eq!(p, vec![0, 1]);
        // Collinear points from an end: straight sweep is optimal.
        let pts = [0.0, 1.0, 3.0];
        let d: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| (a - b) as f64).map(f64::abs).collect())
            .collect();
        let (p, _) = tsp_path(&d, 0).unwrap();
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn tsp_path_within_three_halves_of_brute_force() {
        let mut rng = SplitMix64::new(2024);
        for round in 0..100 {
            let n = 4 + (round % 4);
            // Random points in the plane give a metric.
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.range_f64(0.0, 10.0), rng.range_f64(0.0, 10.0)))
                .collect();
            let d: Vec<Vec<f64>> = pts
                .iter()
                .map(|a| {
                    pts.iter()
                        .map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                        .collect()
                })
                .collect();
            let (path, bound) = tsp_path(&d, 0).unwrap();
            assert_eq!(bound, PathBound::ThreeHalves);
            assert_eq!(path[0], 0);
            let mut sorted = path.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            let got = path_len(&d, &path);
            // Brute force over all permutations with fixed start.
            let mut rest: Vec<usize> = (1..n).collect();
            let mut best = f64::INFINITY;
            permute(&mut rest, 0, &mut |perm| {
                let mut order = vec![0];
                order.extend_from_slice(perm);
                best = best.min(path_len(&d, &order));
            });
            assert!(
                got <= 1.5 * best + EPS,
                "round {round}: {got} > 1.5 * {best}"
            );
        }
    }

    fn permute(xs: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
        if k == xs.len() {
            f(xs);
            return;
        }
        for i in k..xs.len() {
            xs.swap(k, i);
            permute(xs, k + 1, f);
            xs.swap(k, i);
        }
    }

    #[test]
    fn random_assignments_meet_their_bounds() {
        use crate::corpus::{random_assignment, random_instance, CorpusParams};
        for seed in 0..25u64 {
            let base = CorpusParams {
                seed: 7000 + seed,
                nodes: 6,
                agents: 2,
                messages: 4,
                weight_range: (0.5, 2.0),
                capacity: Capacity::Finite(1),
            };
            let inst = random_instance(&base);
            let assignment = random_assignment(&inst, seed, 4);
            let planned = plan_unit_capacity(&inst, &assignment, false).unwrap();
            let cost = schedule_cost(&inst, &planned).unwrap();
            let mut opt = 0.0;
            for (j, msgs) in assignment.iter().enumerate() {
                if !msgs.is_empty() {
                    opt += reorder_exact(&inst, j, msgs).unwrap().1;
                }
            }
            assert!(cost <= 2.0 * opt + EPS, "seed {seed}: {cost} > 2*{opt}");

            let mut inf = inst.clone();
            inf.capacity = Capacity::Infinite;
            let (planned, bound) = plan_infinite_capacity(&inf, &assignment, false).unwrap();
            assert_eq!(bound, PathBound::ThreeHalves);
            let cost = schedule_cost(&inf, &planned).unwrap();
            let mut opt = 0.0;
            for (j, msgs) in assignment.iter().enumerate() {
                if !msgs.is_empty() {
                    opt += reorder_exact(&inf, j, msgs).unwrap().1;
                }
            }
            assert!(cost <= 3.5 * opt + EPS, "seed {seed}: {cost} > 3.5*{opt}");
        }
    }

    #[test]
    fn seeded_message_edges_always_in_tree() {
        use crate::corpus::{random_instance, CorpusParams};
        for seed in 0..10u64 {
            let inst = random_instance(&CorpusParams {
                seed: 41 + seed,
                nodes: 6,
                agents: 1,
                messages: 4,
                weight_range: (1.0, 1.0),
                capacity: Capacity::Finite(1),
            });
            let points = MetricPointSet::build(&inst, 0, &[0, 1, 2, 3]).unwrap();
            let adj = seeded_tree(&points).unwrap();
            for slot in 0..4 {
                let (s, t) = (points.source_point(slot), points.target_point(slot));
                assert!(adj[s].contains(&t), "seed {seed}: message edge {slot} missing");
            }
            // It is a tree: n - 1 edges, connected by construction.
            let edges: usize = adj.iter().map(|l| l.len()).sum::<usize>() / 2;
            assert_eq!(edges, points.len() - 1);
        }
    }
}
