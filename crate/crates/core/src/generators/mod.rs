//! Instance families with known reference schedules and target costs.
//!
//! * [`boc`] — relay stars where collaboration beats any single-carrier
//!   schedule by a factor approaching 2.
//! * [`sat`] — coordination gadgets built from CNF formulas, with the
//!   reference solution schedule and its closed-form cost.
//! * [`hamilton`] — grid gadgets whose exact delivery cost hits a threshold
//!   precisely when the grid has a Hamiltonian cycle.

pub mod boc;
pub mod hamilton;
pub mod sat;

pub use boc::{gen_boc, BocInstance};
pub use hamilton::{gen_hamilton_gadget, grid_has_hamiltonian_cycle, HamiltonGadget};
pub use sat::{gen_sat_gadget, CnfFormula, SatGadget};
