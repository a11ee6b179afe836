//! Canonical symbolic superfunctions over a parity-tagged symbol table.

mod deriv;
mod eval;
mod expr;
mod render;
mod subst;
mod symbols;

use thiserror::Error;

use crate::grassmann::{Grading, GrassmannError, Parity};

pub use deriv::{deven, dodd_left, partial};
pub use eval::{binding_parity, eval_at, eval_env, Bindings, DenseEnv, Env};
pub use expr::{mul_odd, Atom, EvenMono, FuncKind, OddMono, SuperExpr, TermKey};
pub use render::{format_number, render, Rendered};
pub use subst::{substitute, FunctionDef, FunctionDefs, Substitution};
pub use symbols::{SymbolError, SymbolId, SymbolInfo, SymbolKind, SymbolTable, TimeDerivative, MAX_COORD_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unknown symbol id {0}")]
    UnknownSymbolId(u32),
    #[error("parity mismatch for '{symbol}': expected {expected}")]
    ParityMismatch { symbol: String, expected: Parity },
    #[error("expression is not invertible: {0}")]
    NotInvertible(String),
    #[error("library functions take even, odd-free arguments")]
    OddFunctionArgument,
    #[error("no time derivative available for '{0}'")]
    NoTimeDerivative(String),
    #[error("no binding for symbol '{0}'")]
    MissingBinding(String),
    #[error("formal function '{0}' has no definition")]
    MissingFunction(String),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

/// Grading of an expression; the zero expression is even.
pub fn parity_of_expr(f: &SuperExpr) -> Grading {
    f.grading()
}

/// True when every term of `f` is even.
pub fn is_even_lagrangian(f: &SuperExpr) -> bool {
    f.grading() == Grading::Homogeneous(Parity::Even)
}
