//! Radial porous medium solver, the Barenblatt family, and numerical checks of
//! the a priori estimates satisfied by nonnegative solutions.

pub mod barenblatt;
pub mod estimates;
pub mod grid;
pub mod harness;
pub mod solver;
pub mod weak_dual;

pub use barenblatt::BarenblattParams;
pub use estimates::{verify_paper_estimates, CheckResult, EstimateReport, EstimateRuns};
pub use grid::RadialGrid;
pub use harness::{fit_slope, optimality_harness, OptimalityReport};
pub use solver::{OuterBoundary, RadialState, RunRecord, Scheme, Solver, SolverConfig};
pub use weak_dual::{weak_dual_residual, BumpInTime, SeparableTest};
