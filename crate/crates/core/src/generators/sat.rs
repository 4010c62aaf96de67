//! Coordination gadget built from a CNF formula.
//!
//! Each variable gets a box: a variable node with an epsilon edge into a
//! *true path* and another into a *false path*. Each path has `2y` internal
//! nodes (`y` = clause count) joined by unit edges, a literal message on
//! every internal node addressed one node to the right, and `y` literal
//! agents of weights `1 + i*eps` sitting on the even positions (heaviest
//! nearest the variable node). Clause `c` gets a node with a unit edge to a
//! fresh target `c'`, and one edge of length `(1 - i*eps)/(1 + i*eps)` to
//! the position of the weight-`1 + i*eps` agent on the matching path of
//! each of its literals.
//!
//! A satisfying assignment yields the reference schedule: each variable
//! agent sweeps its chosen path, the opposite path's literal agents carry
//! two messages each, and freed literal agents on chosen paths deliver the
//! clause messages; its cost is exactly
//! `4xy + 2y + x(y^2 + y + 1) * eps` with `eps = (8xy)^-2`.

use std::collections::HashMap;

use crate::error::{DeliveryError, Result};
use crate::graph::Graph;
use crate::model::{
    Action, ActionKind, Agent, Capacity, DeliveryInstance, Message, Schedule, ScheduleSkeleton,
    SkeletonAction,
};

/// CNF with DIMACS-style signed 1-based literals.
#[derive(Debug, Clone)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let f = CnfFormula { num_vars, clauses };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        if self.num_vars == 0 || self.clauses.is_empty() {
            return Err(DeliveryError::invalid(
                "formula needs at least one variable and one clause".to_string(),
            ));
        }
        for (c, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() || clause.len() > 3 {
                return Err(DeliveryError::invalid(format!(
                    "clause {c} must have 1 to 3 literals"
                )));
            }
            let mut seen = Vec::new();
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > self.num_vars {
                    return Err(DeliveryError::invalid(format!(
                        "clause {c} has an out-of-range literal {lit}"
                    )));
                }
                if seen.contains(&var) {
                    return Err(DeliveryError::invalid(format!(
                        "variable {var} appears twice in clause {c}"
                    )));
                }
                seen.push(var);
            }
        }
        Ok(())
    }

    /// `Ok(())` if satisfied, else the index of the first violated clause.
    pub fn check_assignment(&self, assignment: &[bool]) -> std::result::Result<(), usize> {
        for (c, clause) in self.clauses.iter().enumerate() {
            let sat = clause.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                (lit > 0) == assignment[v]
            });
            if !sat {
                return Err(c);
            }
        }
        Ok(())
    }

    /// Parses DIMACS CNF text.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut num_vars = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(DeliveryError::invalid("malformed DIMACS problem line"));
                }
                num_vars = Some(parts[1].parse::<usize>().map_err(|_| {
                    DeliveryError::invalid("malformed variable count in DIMACS header")
                })?);
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| DeliveryError::invalid(format!("bad DIMACS token {tok:?}")))?;
                if lit == 0 {
                    if !current.is_empty() {
                        clauses.push(std::mem::take(&mut current));
                    }
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let num_vars =
            num_vars.ok_or_else(|| DeliveryError::invalid("missing DIMACS problem line"))?;
        CnfFormula::new(num_vars, clauses)
    }
}

/// The generated gadget. `target_cost` is the reference schedule's cost;
/// `sol_schedule` is present when a satisfying assignment was supplied.
#[derive(Debug, Clone)]
pub struct SatGadget {
    pub formula: CnfFormula,
    pub instance: DeliveryInstance,
    pub skeleton: ScheduleSkeleton,
    pub epsilon: f64,
    pub target_cost: f64,
    pub sol_schedule: Option<Schedule>,
}

struct Layout {
    x: usize,
    y: usize,
}

impl Layout {
    fn var_node(&self, v: usize) -> usize {
        v * (1 + 2 * (2 * self.y + 1))
    }
    fn path_node(&self, v: usize, truthy: bool, j: usize) -> usize {
        let base = self.var_node(v) + 1;
        let offset = if truthy { 0 } else { 2 * self.y + 1 };
        base + offset + j
    }
    fn clause_node(&self, c: usize) -> usize {
        self.x * (1 + 2 * (2 * self.y + 1)) + 2 * c
    }
    fn clause_target(&self, c: usize) -> usize {
        self.clause_node(c) + 1
    }
    fn node_count(&self) -> usize {
        self.x * (1 + 2 * (2 * self.y + 1)) + 2 * self.y
    }
    /// Literal message `j` of a path (source at internal node `j`).
    fn literal_message(&self, v: usize, truthy: bool, j: usize) -> usize {
        v * 4 * self.y + if truthy { 0 } else { 2 * self.y } + j
    }
    fn clause_message(&self, c: usize) -> usize {
        self.x * 4 * self.y + c
    }
    fn variable_agent(&self, v: usize) -> usize {
        v
    }
    /// Literal agent `i` (1-based weight index) of a path.
    fn literal_agent(&self, v: usize, truthy: bool, i: usize) -> usize {
        self.x + v * 2 * self.y + if truthy { 0 } else { self.y } + (i - 1)
    }
}

/// Builds the delivery gadget for `formula`; with a satisfying `assignment`
/// the reference schedule is constructed and attached.
pub fn gen_sat_gadget(formula: &CnfFormula, assignment: Option<&[bool]>) -> Result<SatGadget> {
    formula.validate()?;
    let x = formula.num_vars;
    let y = formula.clauses.len();
    let eps = ((8 * x * y) as f64).powi(-2);
    let lay = Layout { x, y };

    let mut names = vec![String::new(); lay.node_count()];
    for v in 0..x {
        names[lay.var_node(v)] = format!("v{}", v + 1);
        for j in 0..=2 * y {
            names[lay.path_node(v, true, j)] = format!("v{}_T{j}", v + 1);
            names[lay.path_node(v, false, j)] = format!("v{}_F{j}", v + 1);
        }
    }
    for c in 0..y {
        names[lay.clause_node(c)] = format!("c{}", c + 1);
        names[lay.clause_target(c)] = format!("c{}p", c + 1);
    }

    let mut edges = Vec::new();
    for v in 0..x {
        for truthy in [true, false] {
            edges.push((lay.var_node(v), lay.path_node(v, truthy, 0), eps));
            for j in 0..2 * y {
                edges.push((
                    lay.path_node(v, truthy, j),
                    lay.path_node(v, truthy, j + 1),
                    1.0,
                ));
            }
        }
    }

    // Clause attachments: the q-th occurrence of a literal (v, sign) over
    // the clause order sits at path position 2q, home of the literal agent
    // with weight index i = y - q.
    let mut occurrence: HashMap<(usize, bool), usize> = HashMap::new();
    // Per clause: (variable, sign, weight index i) per literal.
    let mut attachments: Vec<Vec<(usize, bool, usize)>> = vec![Vec::new(); y];
    for (c, clause) in formula.clauses.iter().enumerate() {
        for &lit in clause {
            let v = lit.unsigned_abs() as usize - 1;
            let sign = lit > 0;
            let q = occurrence.entry((v, sign)).or_insert(0);
            let i = y - *q;
            let pos = 2 * *q;
            *q += 1;
            let len = (1.0 - i as f64 * eps) / (1.0 + i as f64 * eps);
            edges.push((lay.clause_node(c), lay.path_node(v, sign, pos), len));
            attachments[c].push((v, sign, i));
        }
        edges.push((lay.clause_node(c), lay.clause_target(c), 1.0));
    }
    let graph = Graph::new(names, edges)?;

    let mut agents = vec![Agent { start: 0, weight: 0.0 }; x + 2 * x * y];
    for v in 0..x {
        agents[lay.variable_agent(v)] = Agent { start: lay.var_node(v), weight: 1.0 };
        for truthy in [true, false] {
            for i in 1..=y {
                agents[lay.literal_agent(v, truthy, i)] = Agent {
                    start: lay.path_node(v, truthy, 2 * (y - i)),
                    weight: 1.0 + i as f64 * eps,
                };
            }
        }
    }

    let mut messages = vec![Message { source: 0, target: 0 }; 4 * x * y + y];
    for v in 0..x {
        for truthy in [true, false] {
            for j in 0..2 * y {
                messages[lay.literal_message(v, truthy, j)] = Message {
                    source: lay.path_node(v, truthy, j),
                    target: lay.path_node(v, truthy, j + 1),
                };
            }
        }
    }
    for c in 0..y {
        messages[lay.clause_message(c)] =
            Message { source: lay.clause_node(c), target: lay.clause_target(c) };
    }
    let instance = DeliveryInstance::new(graph, agents, messages.clone(), Capacity::Finite(1))?;

    // Fixed sequence: adjacent pickup/drop pairs, literal messages in
    // left-to-right path order, clause messages last.
    let mut skeleton_actions = Vec::with_capacity(2 * messages.len());
    for (i, msg) in messages.iter().enumerate() {
        skeleton_actions.push(SkeletonAction {
            node: msg.source,
            message: i,
            kind: ActionKind::Pickup,
        });
        skeleton_actions.push(SkeletonAction { node: msg.target, message: i, kind: ActionKind::Drop });
    }
    let skeleton = ScheduleSkeleton { actions: skeleton_actions };

    let xf = x as f64;
    let yf = y as f64;
    let target_cost = 4.0 * xf * yf + 2.0 * yf + xf * (yf * yf + yf + 1.0) * eps;

    let sol_schedule = match assignment {
        None => None,
        Some(assign) => {
            if assign.len() != x {
                return Err(DeliveryError::invalid(format!(
                    "assignment has {} values for {x} variables",
                    assign.len()
                )));
            }
            if let Err(c) = formula.check_assignment(assign) {
                return Err(DeliveryError::infeasible(format!(
                    "assignment does not satisfy clause {} ({:?})",
                    c + 1,
                    formula.clauses[c]
                )));
            }
            Some(build_sol_schedule(formula, &lay, assign, &attachments))
        }
    };

    Ok(SatGadget {
        formula: formula.clone(),
        instance,
        skeleton,
        epsilon: eps,
        target_cost,
        sol_schedule,
    })
}

/// The reference schedule of a satisfying assignment.
fn build_sol_schedule(
    formula: &CnfFormula,
    lay: &Layout,
    assign: &[bool],
    attachments: &[Vec<(usize, bool, usize)>],
) -> Schedule {
    let y = lay.y;
    let mut actions = Vec::new();
    for (v, &value) in assign.iter().enumerate() {
        let chosen = value;
        // The variable agent sweeps the chosen path, one message at a time.
        let agent = lay.variable_agent(v);
        for j in 0..2 * y {
            let msg = lay.literal_message(v, chosen, j);
            actions.push(Action {
                agent,
                node: lay.path_node(v, chosen, j),
                message: msg,
                kind: ActionKind::Pickup,
            });
            actions.push(Action {
                agent,
                node: lay.path_node(v, chosen, j + 1),
                message: msg,
                kind: ActionKind::Drop,
            });
        }
        // Literal agents on the other path carry two consecutive messages.
        let other = !chosen;
        for i in 1..=y {
            let agent = lay.literal_agent(v, other, i);
            let base = 2 * (y - i);
            for step in 0..2 {
                let msg = lay.literal_message(v, other, base + step);
                actions.push(Action {
                    agent,
                    node: lay.path_node(v, other, base + step),
                    message: msg,
                    kind: ActionKind::Pickup,
                });
                actions.push(Action {
                    agent,
                    node: lay.path_node(v, other, base + step + 1),
                    message: msg,
                    kind: ActionKind::Drop,
                });
            }
        }
    }
    // Clause messages: a freed literal agent adjacent to the clause walks
    // over and delivers. Freed = sitting on the path the variable agent
    // swept, i.e. the path matching the satisfied literal's sign.
    for (c, clause) in formula.clauses.iter().enumerate() {
        let hit = clause
            .iter()
            .position(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                (lit > 0) == assign[v]
            })
            .expect("assignment satisfies every clause");
        let (v, sign, i) = attachments[c][hit];
        debug_assert_eq!(sign, assign[v]);
        let agent = lay.literal_agent(v, sign, i);
        let msg = lay.clause_message(c);
        actions.push(Action { agent, node: lay.clause_node(c), message: msg, kind: ActionKind::Pickup });
        actions.push(Action { agent, node: lay.clause_target(c), message: msg, kind: ActionKind::Drop });
    }
    Schedule::from_actions(actions)
}
