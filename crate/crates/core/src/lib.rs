//! Symbolic-numeric mechanics on supermanifolds.
//!
//! Grassmann arithmetic, canonical superfunctions, the Tulczyjew phase
//! dynamics of a Lagrangian, and the integration of S-curves over finite
//! Grassmann parametrisations.

pub mod grassmann;
pub mod mech;
pub mod modelio;
pub mod scalar;
pub mod scurves;
pub mod superexpr;

pub use grassmann::{Blade, Grading, GrassmannElement, GrassmannError, Parity};
pub use scalar::{Real, Scalar};
pub use superexpr::{ExprError, SuperExpr, SymbolId, SymbolTable};

/// Double-precision Grassmann element, the default numeric type.
pub type Grassmann = GrassmannElement<f64>;
/// Single-precision Grassmann element.
pub type Grassmann32 = GrassmannElement<f32>;
