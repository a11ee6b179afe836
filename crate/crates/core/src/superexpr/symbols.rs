//! Parity-tagged symbols of a chart and its induced bundles.
//!
//! For every declared coordinate `x` the table holds the jet symbols
//! `x, dx, ddx, dddx`, the momenta `p_x, dp_x` of T*M / TT*M, and the fibre
//! coordinates `q_x, dq_x` of T*TM (`q_x` dual to `x`, `dq_x` dual to `dx`).
//! Symbol ids fix a total order, used to sort odd monomials.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::grassmann::Parity;

/// Highest time derivative of a coordinate the table provides.
pub const MAX_COORD_ORDER: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// `order` 0 is the base coordinate, 1 the velocity, 2 the acceleration.
    Coordinate {
        coord: usize,
        order: u8,
    },
    /// `order` 0 is the momentum p, 1 the momentum velocity ṗ.
    Momentum {
        coord: usize,
        order: u8,
    },
    /// Fibre coordinates of T*TM: `dotted == false` is dual to x, `true` to ẋ.
    CoMomentum {
        coord: usize,
        dotted: bool,
    },
    Parameter,
    /// Grassmann-valued integration constant of a closed-form solution.
    Constant,
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolInfo {
    pub name: String,
    pub parity: Parity,
    pub kind: SymbolKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("duplicate symbol name '{0}'")]
    Duplicate(String),
    #[error("invalid symbol name '{0}'")]
    InvalidName(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    entries: Vec<SymbolInfo>,
    coords: Vec<(String, Parity)>,
    by_name: HashMap<String, SymbolId>,
}

impl SymbolTable {
    /// Builds the induced table for a chart with the given coordinates and
    /// parameter names.
    pub fn for_chart(coords: &[(String, Parity)], params: &[String]) -> Result<Self, SymbolError> {
        let mut table = SymbolTable { entries: Vec::new(), coords: coords.to_vec(), by_name: HashMap::new() };
        for (name, _) in coords {
            if !valid_name(name) {
                return Err(SymbolError::InvalidName(name.clone()));
            }
        }
        for order in 0..=MAX_COORD_ORDER {
            for (i, (name, parity)) in coords.iter().enumerate() {
                let jet = format!("{}{}", "d".repeat(order as usize), name);
                table.push(jet, *parity, SymbolKind::Coordinate { coord: i, order })?;
            }
        }
        for order in 0..=1u8 {
            for (i, (name, parity)) in coords.iter().enumerate() {
                let prefix = if order == 0 { "p_" } else { "dp_" };
                table.push(format!("{prefix}{name}"), *parity, SymbolKind::Momentum { coord: i, order })?;
            }
        }
        for dotted in [false, true] {
            for (i, (name, parity)) in coords.iter().enumerate() {
                let prefix = if dotted { "dq_" } else { "q_" };
                table.push(format!("{prefix}{name}"), *parity, SymbolKind::CoMomentum { coord: i, dotted })?;
            }
        }
        for name in params {
            if !valid_name(name) {
                return Err(SymbolError::InvalidName(name.clone()));
            }
            table.push(name.clone(), Parity::Even, SymbolKind::Parameter)?;
        }
        Ok(table)
    }

    fn push(&mut self, name: String, parity: Parity, kind: SymbolKind) -> Result<SymbolId, SymbolError> {
        if self.by_name.contains_key(&name) || RESERVED.contains(&name.as_str()) {
            return Err(SymbolError::Duplicate(name));
        }
        let id = SymbolId(self.entries.len() as u32);
        self.by_name.insert(name.clone(), id);
        self.entries.push(SymbolInfo { name, parity, kind });
        Ok(id)
    }

    /// Adds a Grassmann-valued constant (closed-form solution data).
    pub fn add_constant(&mut self, name: &str, parity: Parity) -> Result<SymbolId, SymbolError> {
        if !valid_name(name) {
            return Err(SymbolError::InvalidName(name.to_string()));
        }
        self.push(name.to_string(), parity, SymbolKind::Constant)
    }

    /// Adds the even time symbol `t` (idempotent).
    pub fn add_time(&mut self) -> Result<SymbolId, SymbolError> {
        if let Some(id) = self.lookup("t") {
            if self.info(id).kind == SymbolKind::Time {
                return Ok(id);
            }
        }
        self.push("t".to_string(), Parity::Even, SymbolKind::Time)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coordinate_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinates(&self) -> &[(String, Parity)] {
        &self.coords
    }

    pub fn coordinate_parity(&self, coord: usize) -> Parity {
        self.coords[coord].1
    }

    pub fn info(&self, id: SymbolId) -> &SymbolInfo {
        &self.entries[id.index()]
    }

    pub fn get(&self, id: SymbolId) -> Option<&SymbolInfo> {
        self.entries.get(id.index())
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.entries[id.index()].name
    }

    pub fn parity(&self, id: SymbolId) -> Parity {
        self.entries[id.index()].parity
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.entries.len() as u32).map(SymbolId)
    }

    fn stride(&self) -> u32 {
        self.coords.len() as u32
    }

    /// The jet symbol of coordinate `coord` at derivative order `order`.
    pub fn coord(&self, coord: usize, order: u8) -> SymbolId {
        assert!(order <= MAX_COORD_ORDER && coord < self.coords.len());
        SymbolId(order as u32 * self.stride() + coord as u32)
    }

    pub fn momentum(&self, coord: usize, order: u8) -> SymbolId {
        assert!(order <= 1 && coord < self.coords.len());
        let base = (MAX_COORD_ORDER as u32 + 1) * self.stride();
        SymbolId(base + order as u32 * self.stride() + coord as u32)
    }

    pub fn comomentum(&self, coord: usize, dotted: bool) -> SymbolId {
        assert!(coord < self.coords.len());
        let base = (MAX_COORD_ORDER as u32 + 3) * self.stride();
        SymbolId(base + dotted as u32 * self.stride() + coord as u32)
    }

    /// Symbol whose value is the time derivative of `id` along a curve.
    pub fn time_derivative(&self, id: SymbolId) -> TimeDerivative {
        match self.info(id).kind {
            SymbolKind::Coordinate { coord, order } => {
                if order < MAX_COORD_ORDER {
                    TimeDerivative::Symbol(self.coord(coord, order + 1))
                } else {
                    TimeDerivative::Unavailable
                }
            }
            SymbolKind::Momentum { coord, order: 0 } => TimeDerivative::Symbol(self.momentum(coord, 1)),
            SymbolKind::Momentum { .. } | SymbolKind::CoMomentum { .. } | SymbolKind::Time => TimeDerivative::Unavailable,
            SymbolKind::Parameter | SymbolKind::Constant => TimeDerivative::Zero,
        }
    }
}

/// Result of differentiating a symbol along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDerivative {
    Zero,
    Symbol(SymbolId),
    Unavailable,
}

/// Names the expression grammar treats specially.
const RESERVED: &[&str] = &[
    "sin",
    "cos",
    "sinh",
    "cosh",
    "exp",
    "even",
    "odd",
    "model",
    "coords",
    "params",
    "lagrangian",
    "constraint",
    "field",
    "solution",
    "function",
    "pi",
];

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Coordinate { order: 0, .. } => f.write_str("coordinate"),
            SymbolKind::Coordinate { order: 1, .. } => f.write_str("velocity"),
            SymbolKind::Coordinate { order, .. } => write!(f, "derivative of order {order}"),
            SymbolKind::Momentum { order: 0, .. } => f.write_str("momentum"),
            SymbolKind::Momentum { .. } => f.write_str("momentum velocity"),
            SymbolKind::CoMomentum { .. } => f.write_str("T*TM fibre coordinate"),
            SymbolKind::Parameter => f.write_str("parameter"),
            SymbolKind::Constant => f.write_str("constant"),
            SymbolKind::Time => f.write_str("time"),
        }
    }
}
