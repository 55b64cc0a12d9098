//! Vehicle routing with time windows and AND/OR precedence constraints.
//!
//! A customer's AND-type predecessors must be visited before it whenever
//! they share its vehicle; a customer with OR-type predecessors needs at
//! least one of them earlier on its own vehicle. The objective is the sum of
//! route completion times.

pub mod construct;
pub mod exact;
pub mod experiment;
pub mod feasibility;
pub mod instance;
pub mod model;
pub mod rng;
pub mod solver;

pub use feasibility::{check_move, Move, MoveOutcome, Stage};
pub use model::{
    validate, Instance, NodeId, Relation, Route, Solution, ValidationReport, Violation, EPS,
};
