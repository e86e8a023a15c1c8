//! Gradient methods with three-dimensional quadratic termination.
//!
//! The crate provides the NY stepsize and the cyclic NY/ANY solvers, the
//! classical comparison methods (SD, BB, ABBmin, MPSG, SDC, SL), nine test
//! problems and a benchmark harness with performance profiles.

pub mod bench;
pub mod linalg;
pub mod linesearch;
pub mod model;
pub mod parallel;
pub mod problems;
pub mod solvers;
pub mod stepsize;

pub use model::{Objective, QuadraticProblem, RunReport, SolverConfig, Status, StepKind};
pub use problems::{Problem, ProblemKind, ProblemSpec};
pub use solvers::{five_step_3d, solve_any, solve_ny, solve_strategy, Strategy, Target};
