//! S-curves over Λ_q: component systems, integration, verification,
//! reparametrisation and constants of motion.

mod along;
mod closed_form;
mod component;
mod integrate;
mod reparam;
mod trajectory;
mod verify;

use thiserror::Error;

use crate::grassmann::GrassmannError;
use crate::mech::MechError;
use crate::superexpr::ExprError;

pub use closed_form::{sample_solution, uniform_times};
pub use component::{expand_system, parameter_substitution, ComponentSystem, InitialState};
pub use integrate::integrate;
pub use reparam::{reparametrise, Reparametrisation};
pub use trajectory::{Channel, Trajectory, TrajectoryMeta};
pub use verify::{
    check_constant, numeric_symmetry_check, verify_solution, ConstantReport, NumericSymmetryReport, PhaseContext,
    SolutionEquations, VerificationReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("trajectory schema: {0}")]
    Schema(String),
    #[error("value of '{0}' has the wrong parity")]
    Parity(String),
    #[error("trajectory has no channel '{0}'")]
    MissingChannel(String),
    #[error("no explicit normal form: {0}")]
    Implicit(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("state became non-finite after t = {last_good}")]
    NonFinite { last_good: f64 },
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Mech(#[from] MechError),
}
