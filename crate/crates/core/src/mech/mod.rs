//! Lagrangian mechanics on a supermanifold chart: the Tulczyjew
//! differential, phase-dynamics generators, Euler–Lagrange equations and
//! their normal form, vector fields with their tangent lifts, symmetry
//! checks and induced chart changes.

mod chart;
mod field;
mod normal;
mod symmetry;
mod system;

use thiserror::Error;

use crate::superexpr::ExprError;

pub use chart::{induced_chart_change, InducedChange};
pub use field::{tangent_lift, SuperVectorField};
pub use normal::{normal_form, ImplicitReport, NormalForm, NormalFormResult};
pub(crate) use symmetry::lifted_residuals;
pub use symmetry::{check_symmetry, on_shell_reducer, OnShellReducer, SymmetryReport};
pub use system::{alpha_inv, alpha_map, lagrangian_differential, LagrangianSystem, PhaseDynamics, Pullbacks};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechError {
    #[error("the Lagrangian has an odd term")]
    OddLagrangian,
    #[error("the Lagrangian depends on '{0}', which is not a coordinate, velocity or parameter")]
    InvalidLagrangianSymbol(String),
    #[error("coordinate index {0} is out of range")]
    UnknownCoordinate(usize),
    #[error("vector field component for '{symbol}' has the wrong parity")]
    FieldParity { symbol: String },
    #[error("'{0}' cannot carry a vector field component here")]
    FieldTarget(String),
    #[error("chart change: {0}")]
    ChartChange(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
