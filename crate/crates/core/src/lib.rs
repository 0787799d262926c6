//! Certified global optimization of nonconvex constrained problems over
//! box domains.
//!
//! Two workers cooperate: a deterministic interval branch-and-contract
//! search that proves bounds, and a stochastic differential-evolution
//! search that supplies good feasible points quickly. They exchange
//! upper bounds, candidate solutions and reduced domains over an
//! in-process channel, and the solver returns an enclosure of the
//! global minimum that holds under floating-point roundoff.

pub mod contractor;
pub mod coop;
pub mod de;
pub mod expr;
pub mod ibc;
pub mod interval;
pub mod model;

pub use coop::{orchestrate, Certificate, Message, SolveStatus, SolverConfig};
pub use expr::Expr;
pub use interval::{Interval, IntervalBox};
pub use model::{parse_problem, ParseError, Problem};
