//! Model files, Grassmann literals, reparametrisation blocks and trajectory
//! serialization.

mod grassmann_text;
mod lexer;
mod model;
mod parser;
mod trajio;

use std::fmt;

use thiserror::Error;

pub use grassmann_text::{parse_grassmann, parse_reparam, render_grassmann};
pub use model::{parse_model, render_model, FieldDecl, FunctionDecl, ModelFile, SolutionDecl};
pub use trajio::{
    model_hash, read_trajectory, read_trajectory_csv, read_trajectory_json, write_trajectory_csv, write_trajectory_json,
    TrajectoryFormat,
};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelErrorKind {
    Syntax,
    Undeclared,
    Parity,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {message}")]
pub struct ModelError {
    pub kind: ModelErrorKind,
    pub span: Span,
    pub message: String,
}

impl ModelError {
    pub fn new(kind: ModelErrorKind, span: Span, message: impl Into<String>) -> Self {
        ModelError { kind, span, message: message.into() }
    }

    pub fn syntax(span: Span, message: impl Into<String>) -> Self {
        ModelError::new(ModelErrorKind::Syntax, span, message)
    }

    pub fn invalid(span: Span, message: impl Into<String>) -> Self {
        ModelError::new(ModelErrorKind::Invalid, span, message)
    }
}

/// Errors reading or writing trajectories.
#[derive(Debug, Error)]
pub enum TrajectoryIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error(transparent)]
    Grassmann(#[from] crate::grassmann::GrassmannError),
}
