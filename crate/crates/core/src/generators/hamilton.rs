//! Hamiltonian-cycle planning gadget on grid graphs.
//!
//! Every grid node `v` gets a pendant twin `v'` and a message `v -> v'`.
//! All pendant edges have length 0 except the one at the lone agent's
//! start, which is long enough (`x = 2 |V_H|`) that an optimal schedule
//! saves it for last. Delivering everything then costs exactly
//! `|V_H| + x` precisely when the agent can walk a closed length-`|V_H|`
//! walk covering all grid nodes — that is, when the grid has a Hamiltonian
//! cycle (in the closed-walk sense that also admits the one- and two-node
//! grids, matching the delivery cost exactly).

use crate::error::{DeliveryError, Result};
use crate::graph::Graph;
use crate::model::{Agent, Capacity, DeliveryInstance, Message};

/// A generated grid gadget.
#[derive(Debug, Clone)]
pub struct HamiltonGadget {
    pub rows: usize,
    pub cols: usize,
    /// Grid cell of the agent (node id in the instance graph).
    pub start: usize,
    pub instance: DeliveryInstance,
    pub x_length: f64,
    /// The exact optimum equals this iff the grid is Hamiltonian.
    pub threshold: f64,
}

/// Builds the gadget for a full `rows x cols` grid with the agent at
/// `start_cell` (row-major index).
pub fn gen_hamilton_gadget(rows: usize, cols: usize, start_cell: usize) -> Result<HamiltonGadget> {
    if rows == 0 || cols == 0 {
        return Err(DeliveryError::invalid("grid must be non-empty"));
    }
    let cells = rows * cols;
    if start_cell >= cells {
        return Err(DeliveryError::invalid(format!(
            "start cell {start_cell} outside the {rows}x{cols} grid"
        )));
    }
    let x_length = 2.0 * cells as f64;
    let threshold = if cells >= 2 { cells as f64 + x_length } else { x_length };

    let cell = |r: usize, c: usize| r * cols + c;
    let twin = |v: usize| cells + v;
    let mut names = Vec::with_capacity(2 * cells);
    for r in 0..rows {
        for c in 0..cols {
            names.push(format!("g{r}_{c}"));
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            names.push(format!("g{r}_{c}p"));
        }
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((cell(r, c), cell(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((cell(r, c), cell(r + 1, c), 1.0));
            }
        }
    }
    for v in 0..cells {
        let len = if v == start_cell { x_length } else { 0.0 };
        edges.push((v, twin(v), len));
    }
    let graph = Graph::new(names, edges)?;
    let agents = vec![Agent { start: start_cell, weight: 1.0 }];
    let messages = (0..cells).map(|v| Message { source: v, target: twin(v) }).collect();
    let instance = DeliveryInstance::new(graph, agents, messages, Capacity::Finite(1))?;
    Ok(HamiltonGadget { rows, cols, start: start_cell, instance, x_length, threshold })
}

/// Brute-force Hamiltonian-cycle check on the full grid, in the closed-walk
/// convention used by the gadget threshold: a cyclic ordering of all cells
/// with every consecutive pair adjacent. Single cells pass trivially and a
/// lone edge counts as a (degenerate) 2-cycle.
pub fn grid_has_hamiltonian_cycle(rows: usize, cols: usize) -> bool {
    let cells = rows * cols;
    if cells == 0 {
        return false;
    }
    if cells == 1 {
        return true;
    }
    let adjacent = |a: usize, b: usize| {
        let (ra, ca) = (a / cols, a % cols);
        let (rb, cb) = (b / cols, b % cols);
        ra.abs_diff(rb) + ca.abs_diff(cb) == 1
    };
    // DFS over orderings starting (and ending) at cell 0.
    fn rec(
        cur: usize,
        used: &mut Vec<bool>,
        left: usize,
        adjacent: &impl Fn(usize, usize) -> bool,
        cells: usize,
    ) -> bool {
        if left == 0 {
            return adjacent(cur, 0);
        }
        for next in 0..cells {
            if !used[next] && adjacent(cur, next) {
                used[next] = true;
                if rec(next, used, left - 1, adjacent, cells) {
                    return true;
                }
                used[next] = false;
            }
        }
        false
    }
    let mut used = vec![false; cells];
    used[0] = true;
    rec(0, &mut used, cells - 1, &adjacent, cells)
}
