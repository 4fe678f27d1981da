//! Numerical checks: residual sweeps, boundary conditions, round trips and
//! one-parameter group flows.

mod barrier;
mod checks;
mod flow;
mod generator;
mod report;
mod suites;

pub use barrier::{boundary_invariance_check, find_combination, BarrierCurve, Combination};
pub use checks::{
    barrier_check, exponential_family_check, pde_residual_sweep, residual_sweep, roundtrip_check,
    terminal_check,
};
pub use flow::{
    flow_map, integrate, solution_to_solution_check, surface_residual, FlowInput, FlowOptions,
    Reconstruction,
};
pub use generator::{Chart, Generator, GeneratorSet};
pub use report::{Report, VerifyError, ERRATUM_CANDIDATE};
pub use suites::*;
