//! Exact methods: a branch-and-bound solver for small instances and the
//! mixed-integer model used to cross-check solutions.

pub mod bnb;
pub mod milp;

pub use bnb::{solve_exact, ExactBudget, ExactResult, ExactStatus};
pub use milp::{build_model, evaluate_milp, export_lp, ConstraintReport, MilpModel};
