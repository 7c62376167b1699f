//! Galerkin solution of the coupled Dirichlet problem
//!
//! ```text
//! -u'' + λ₁ u = f,   -v'' + λ₂ v = g   on (0, 1)
//! u(0) = α₁, v(0) = α₂, u(1) = β₁, v(1) = β₂
//! ```
//!
//! over the Faber–Schauder basis, and recovery of `(λ₁, λ₂)` from a target
//! solution by minimizing the discretized collage residual over a box.

pub mod basis;
pub mod expr;
pub mod forward;
pub mod inverse;
pub mod linalg;
pub mod quadrature;

use thiserror::Error;

pub use expr::{Expression, ParseError};
pub use forward::{
    error_report, solve_forward, Component, EquationSpec, ErrorReport, ErrorRow, GalerkinSolution, ProblemSpec,
};
pub use inverse::{
    build_residual, collage_bound_check, minimize, objective, BoxConstraint, CollageCheck, MinimizeResult,
    MinimizeSettings, ObjectiveMode, ResidualModel,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] expr::EvalError),
    #[error(transparent)]
    Basis(#[from] basis::BasisError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error("invalid problem: {0}")]
    InvalidSpec(String),
    #[error("exact solution for the {0} equation is missing")]
    MissingExact(Component),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
