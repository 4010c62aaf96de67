//! # delivery-core
//!
//! Library for the *weighted delivery* problem: `m` messages must be moved
//! between source/target node pairs of an undirected edge-weighted graph by
//! `k` mobile agents. Agent `j` starts at node `p_j`, consumes `w_j` energy
//! per unit distance and may carry at most `kappa` messages at a time. The
//! objective is to minimize total energy `sum_j w_j * d_j` where `d_j` is the
//! distance traveled by agent `j`.
//!
//! The crate provides:
//!
//! * [`graph`] — weighted undirected graphs and shortest-path services,
//! * [`model`] — instances, schedules, feasibility checking and energy cost,
//! * [`oracle`] — an exact solver for desk-sized instances (search over the
//!   joint agent/message state space) plus optimal single-agent reordering,
//! * [`single_message`] — the polynomial-time optimal solver for `m = 1`
//!   built on a layered handover graph,
//! * [`collaboration`] — the best-single-agent selector, the
//!   collaboration-removing 2-approximation (labeled Eulerian tours) and the
//!   no-intermediate-dropoff 2-approximation,
//! * [`planning`] — per-agent reordering approximations for unit and
//!   unbounded capacity, with a metric TSP-path subroutine,
//! * [`coordination`] — optimal agent assignment for a fixed schedule
//!   skeleton (uniform weights, unit capacity) via min-cost matching,
//! * [`approx4`] — the end-to-end `4 * max(w_i/w_j)` approximation for unit
//!   capacity built on a constrained minimum tree cover,
//! * [`generators`] — instance families with known reference schedules and
//!   target costs (relay stars, CNF coordination gadgets, Hamiltonian-grid
//!   planning gadgets),
//! * [`corpus`] — seeded random instances for reproducible benchmarks.
//!
//! All costs are `f64`; comparisons throughout the crate and its test suite
//! use the absolute tolerance [`EPS`].

pub mod approx4;
pub mod collaboration;
pub mod coordination;
pub mod corpus;
pub mod error;
pub mod generators;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod planning;
pub mod rng;
pub mod single_message;

pub use error::{DeliveryError, Result};
pub use graph::{DistanceMatrix, Graph, NodeId};
pub use model::{
    Action, ActionKind, Capacity, DeliveryInstance, FeasibilityReport, Schedule, Violation,
};

/// Absolute tolerance for every cost/distance comparison in this crate.
pub const EPS: f64 = 1e-9;
