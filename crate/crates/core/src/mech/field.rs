//! Homogeneous vector fields `X = Σ Xˢ ∂_s` acting by left derivatives, the
//! graded bracket, and the tangent lift to the jet symbols.

use std::collections::BTreeMap;

use crate::grassmann::{Grading, Parity};
use crate::mech::MechError;
use crate::superexpr::{render, SuperExpr, SymbolId, SymbolTable, TimeDerivative};

#[derive(Debug, Clone, PartialEq)]
pub struct SuperVectorField {
    parity: Parity,
    components: BTreeMap<SymbolId, SuperExpr>,
}

impl SuperVectorField {
    /// Checks that each component has parity `parity + parity(target)`.
    /// Zero components are dropped.
    pub fn new(
        table: &SymbolTable,
        parity: Parity,
        components: impl IntoIterator<Item = (SymbolId, SuperExpr)>,
    ) -> Result<Self, MechError> {
        let mut map = BTreeMap::new();
        for (s, c) in components {
            if c.is_zero() {
                continue;
            }
            let expected = if table.parity(s) == parity { Parity::Even } else { Parity::Odd };
            if c.grading() != Grading::Homogeneous(expected) {
                return Err(MechError::FieldParity { symbol: table.name(s).to_string() });
            }
            let slot: &mut SuperExpr = map.entry(s).or_default();
            *slot = &*slot + &c;
        }
        map.retain(|_, c: &mut SuperExpr| !c.is_zero());
        Ok(SuperVectorField { parity, components: map })
    }

    pub fn zero() -> Self {
        SuperVectorField { parity: Parity::Even, components: BTreeMap::new() }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn component(&self, s: SymbolId) -> SuperExpr {
        self.components.get(&s).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (SymbolId, &SuperExpr)> {
        self.components.iter().map(|(s, c)| (*s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// `X(f) = Σ Xˢ · ∂f/∂s`.
    pub fn apply(&self, f: &SuperExpr, table: &SymbolTable) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (s, c) in &self.components {
            let d = f.partial(*s, table.parity(*s));
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        out
    }

    /// Graded bracket `[X, Y]ˢ = X(Yˢ) − (−1)^{|X||Y|} Y(Xˢ)`.
    pub fn bracket(&self, other: &SuperVectorField, table: &SymbolTable) -> Result<SuperVectorField, MechError> {
        let sign = self.parity.koszul_sign(other.parity);
        let targets: std::collections::BTreeSet<SymbolId> =
            self.components.keys().chain(other.components.keys()).copied().collect();
        let comps = targets.into_iter().map(|s| {
            let c = &self.apply(&other.component(s), table) - &other.apply(&self.component(s), table).scale(sign);
            (s, c)
        });
        let parity = if self.parity == other.parity { Parity::Even } else { Parity::Odd };
        SuperVectorField::new(table, parity, comps.collect::<Vec<_>>())
    }

    pub fn render_lines(&self, table: &SymbolTable) -> Vec<String> {
        self.components.iter().map(|(s, c)| format!("{} = {}", table.name(*s), render(c, table))).collect()
    }
}

/// The tangent lift `d_T X`: base components unchanged, and each symbol's
/// time derivative receives the total time derivative of its component
/// (`dx ← d/dt Xˣ`, `dp_x ← d/dt Xᵖ`).
pub fn tangent_lift(field: &SuperVectorField, table: &SymbolTable) -> Result<SuperVectorField, MechError> {
    let mut comps: Vec<(SymbolId, SuperExpr)> = Vec::new();
    for (s, c) in field.components() {
        comps.push((s, c.clone()));
        match table.time_derivative(s) {
            TimeDerivative::Symbol(ds) => {
                if field.components.contains_key(&ds) {
                    return Err(MechError::FieldTarget(table.name(ds).to_string()));
                }
                comps.push((ds, c.total_time_derivative(table)?));
            }
            TimeDerivative::Zero | TimeDerivative::Unavailable => {
                return Err(MechError::FieldTarget(table.name(s).to_string()));
            }
        }
    }
    SuperVectorField::new(table, field.parity, comps)
}
