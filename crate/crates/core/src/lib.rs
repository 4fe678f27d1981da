//! Equivalence transformations, closed-form similarity solutions and a
//! finite-difference pricer for the semi-linear bond-pricing equation
//!
//! ```text
//! u_t + ½ρ²x^{2γ} u_xx + (α + βx − λρx^δ) u_x − f(x, u) = 0,   x > 0.
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`]: parse, evaluate and differentiate expression trees;
//! - [`model`]: parameters, case classification and the PDE residual;
//! - [`transforms`]: the chain of point transformations that reduces the
//!   equation to the heat equation with a nonlinear source;
//! - [`solutions`]: the catalogue of closed-form similarity solutions;
//! - [`verify`]: residual sweeps, boundary checks, round trips and group flows;
//! - [`fdsolver`]: θ-scheme solver for terminal and moving-barrier problems;
//! - [`cli`]: the `bondsym` command-line front end.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod cli;
pub mod expr;
pub mod fdsolver;
pub mod model;
pub mod sampling;
pub mod solutions;
pub mod transforms;
pub mod verify;

pub use expr::{parse, Expr, ExprError, Point};
pub use model::{CaseTag, Params, PdeProblem};
