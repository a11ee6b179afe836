//! Lagrangian systems and the maps of the Tulczyjew triple in coordinates.
//!
//! Every map is stored as a pullback: a substitution sending the target's
//! coordinate symbols to expressions in the source's symbols. Coordinates
//! not listed are pulled back to themselves.
//!
//! Symbols in use, for a coordinate `x`:
//! TM has `x, dx`; T*M has `x, p_x`; TT*M has `x, p_x, dx, dp_x`;
//! T*TM has `x, dx, q_x, dq_x` with `q_x` dual to `x` and `dq_x` dual to `dx`.

use crate::grassmann::{Grading, Parity};
use crate::mech::MechError;
use crate::superexpr::{render, Substitution, SuperExpr, SymbolId, SymbolKind, SymbolTable};

/// Pullbacks of a map's target coordinates, in display order.
#[derive(Debug, Clone, PartialEq)]
pub struct Pullbacks {
    pub entries: Vec<(SymbolId, SuperExpr)>,
}

impl Pullbacks {
    pub fn get(&self, id: SymbolId) -> Option<&SuperExpr> {
        self.entries.iter().find(|(s, _)| *s == id).map(|(_, e)| e)
    }

    pub fn substitution(&self) -> Substitution {
        self.entries.iter().cloned().collect()
    }

    /// One `name = expr` line per entry.
    pub fn render_lines(&self, table: &SymbolTable) -> Vec<String> {
        self.entries.iter().map(|(s, e)| format!("{} = {}", table.name(*s), render(e, table))).collect()
    }
}

/// A chart with an even, autonomous Lagrangian on TM and an optional set of
/// coordinates whose velocities are constrained to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSystem {
    table: SymbolTable,
    lagrangian: SuperExpr,
    constraint: Vec<usize>,
}

/// The phase-dynamics generators `φ_a = p_a − ∂L/∂ẋ^a` and
/// `φ̂_a = ṗ_a − ∂L/∂x^a`, one pair per unconstrained coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDynamics {
    pub coords: Vec<usize>,
    pub phi: Vec<SuperExpr>,
    pub phi_hat: Vec<SuperExpr>,
}

impl PhaseDynamics {
    /// Generators with their display names `phi_x`, `phihat_x`.
    pub fn named(&self, table: &SymbolTable) -> Vec<(String, SuperExpr)> {
        let mut out = Vec::new();
        for (&a, g) in self.coords.iter().zip(&self.phi) {
            out.push((format!("phi_{}", table.coordinates()[a].0), g.clone()));
        }
        for (&a, g) in self.coords.iter().zip(&self.phi_hat) {
            out.push((format!("phihat_{}", table.coordinates()[a].0), g.clone()));
        }
        out
    }

    pub fn all(&self) -> impl Iterator<Item = &SuperExpr> {
        self.phi.iter().chain(&self.phi_hat)
    }
}

impl LagrangianSystem {
    /// Validates that `lagrangian` is even and depends only on coordinates,
    /// velocities and parameters.
    pub fn new(table: SymbolTable, lagrangian: SuperExpr) -> Result<Self, MechError> {
        if lagrangian.grading() != Grading::Homogeneous(Parity::Even) {
            return Err(MechError::OddLagrangian);
        }
        for s in lagrangian.free_symbols() {
            match table.info(s).kind {
                SymbolKind::Coordinate { order: 0 | 1, .. } | SymbolKind::Parameter => {}
                _ => return Err(MechError::InvalidLagrangianSymbol(table.name(s).to_string())),
            }
        }
        Ok(LagrangianSystem { table, lagrangian, constraint: Vec::new() })
    }

    /// Constrains the velocities of the given coordinates to zero.
    pub fn with_constraint(mut self, coords: &[usize]) -> Result<Self, MechError> {
        for &c in coords {
            if c >= self.table.coordinate_count() {
                return Err(MechError::UnknownCoordinate(c));
            }
        }
        let mut coords = coords.to_vec();
        coords.sort_unstable();
        coords.dedup();
        self.constraint = coords;
        Ok(self)
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn lagrangian(&self) -> &SuperExpr {
        &self.lagrangian
    }

    pub fn constraint(&self) -> &[usize] {
        &self.constraint
    }

    pub fn is_constrained(&self, coord: usize) -> bool {
        self.constraint.contains(&coord)
    }

    pub fn coordinate_count(&self) -> usize {
        self.table.coordinate_count()
    }

    /// ∂L/∂ẋ^a (left derivative for odd coordinates).
    pub fn d_velocity(&self, a: usize) -> SuperExpr {
        let v = self.table.coord(a, 1);
        self.lagrangian.partial(v, self.table.parity(v))
    }

    /// ∂L/∂x^a.
    pub fn d_position(&self, a: usize) -> SuperExpr {
        let x = self.table.coord(a, 0);
        self.lagrangian.partial(x, self.table.parity(x))
    }

    /// The Tulczyjew differential 𝒯L = α⁻¹ ∘ dL as pullbacks of
    /// `(x, p, dx, dp)`, computed by composing the two maps.
    pub fn tulczyjew(&self) -> Result<Pullbacks, MechError> {
        let dl = lagrangian_differential(self)?.substitution();
        let inv = alpha_inv(&self.table);
        let t = &self.table;
        let n = t.coordinate_count();
        let ident = |id: SymbolId| (id, SuperExpr::symbol(t, id));
        // 𝒯L*(p) = dL*(α⁻¹*(p))
        let pulled = |p: SymbolId| -> Result<(SymbolId, SuperExpr), MechError> { Ok((p, inv[&p].subst(&dl)?)) };
        let mut entries = Vec::with_capacity(4 * n);
        entries.extend((0..n).map(|a| ident(t.coord(a, 0))));
        for a in 0..n {
            entries.push(pulled(t.momentum(a, 0))?);
        }
        entries.extend((0..n).map(|a| ident(t.coord(a, 1))));
        for a in 0..n {
            entries.push(pulled(t.momentum(a, 1))?);
        }
        Ok(Pullbacks { entries })
    }

    /// Momentum and momentum-velocity pullbacks only: `p_a` then `dp_a`.
    /// With a constraint the components dual to constrained velocities are
    /// dropped and constrained velocities are set to zero in the rest.
    pub fn momentum_pullbacks(&self) -> Result<Pullbacks, MechError> {
        let full = self.tulczyjew()?;
        let t = &self.table;
        let zero = self.constraint_substitution();
        let mut entries = Vec::new();
        for order in 0..=1u8 {
            for a in 0..t.coordinate_count() {
                if self.is_constrained(a) {
                    continue;
                }
                let p = t.momentum(a, order);
                let e = full.get(p).expect("tulczyjew covers every momentum");
                entries.push((p, e.subst(&zero)?));
            }
        }
        Ok(Pullbacks { entries })
    }

    /// The constrained Tulczyjew differential `Tι† ∘ α⁻¹ ∘ dL` (identical to
    /// [`momentum_pullbacks`](Self::momentum_pullbacks) plus the surviving
    /// base and velocity coordinates).
    pub fn constrained_tulczyjew(&self) -> Result<Pullbacks, MechError> {
        let t = &self.table;
        let n = t.coordinate_count();
        let moms = self.momentum_pullbacks()?;
        let free: Vec<usize> = (0..n).filter(|a| !self.is_constrained(*a)).collect();
        let mut entries = Vec::new();
        for a in 0..n {
            entries.push((t.coord(a, 0), SuperExpr::symbol(t, t.coord(a, 0))));
        }
        entries.extend(moms.entries[..free.len()].iter().cloned());
        for &a in &free {
            entries.push((t.coord(a, 1), SuperExpr::symbol(t, t.coord(a, 1))));
        }
        entries.extend(moms.entries[free.len()..].iter().cloned());
        Ok(Pullbacks { entries })
    }

    /// Sends the velocity and every higher jet of each constrained
    /// coordinate to zero.
    pub fn constraint_substitution(&self) -> Substitution {
        let mut map = Substitution::new();
        for &c in &self.constraint {
            for order in 1..=crate::superexpr::MAX_COORD_ORDER {
                map.insert(self.table.coord(c, order), SuperExpr::zero());
            }
        }
        map
    }

    pub fn phase_generators(&self) -> Result<PhaseDynamics, MechError> {
        let t = &self.table;
        let moms = self.momentum_pullbacks()?;
        let coords: Vec<usize> = (0..t.coordinate_count()).filter(|a| !self.is_constrained(*a)).collect();
        let mut phi = Vec::new();
        let mut phi_hat = Vec::new();
        for &a in &coords {
            let p = t.momentum(a, 0);
            let dp = t.momentum(a, 1);
            phi.push(&SuperExpr::symbol(t, p) - moms.get(p).expect("momentum pullback"));
            phi_hat.push(&SuperExpr::symbol(t, dp) - moms.get(dp).expect("momentum pullback"));
        }
        Ok(PhaseDynamics { coords, phi, phi_hat })
    }

    /// Euler–Lagrange expressions `E_a = d/dt(∂L/∂ẋ^a) − ∂L/∂x^a`, one per
    /// coordinate. A constrained coordinate contributes its velocity.
    pub fn euler_lagrange(&self) -> Result<Vec<SuperExpr>, MechError> {
        let t = &self.table;
        let zero = self.constraint_substitution();
        let mut out = Vec::with_capacity(t.coordinate_count());
        for a in 0..t.coordinate_count() {
            if self.is_constrained(a) {
                out.push(SuperExpr::symbol(t, t.coord(a, 1)));
                continue;
            }
            let dv = self.d_velocity(a).subst(&zero)?;
            let e = &dv.total_time_derivative(t)? - &self.d_position(a);
            out.push(e.subst(&zero)?);
        }
        Ok(out)
    }

    /// Renders `E_x = ...` lines.
    pub fn render_euler_lagrange(&self) -> Result<Vec<String>, MechError> {
        let t = &self.table;
        Ok(self
            .euler_lagrange()?
            .iter()
            .enumerate()
            .map(|(a, e)| format!("E_{} = {}", t.coordinates()[a].0, render(e, t)))
            .collect())
    }
}

/// dL : TM → T*TM as pullbacks of `q_a` and `dq_a`:
/// `q_a ↦ ∂L/∂x^a`, `dq_a ↦ ∂L/∂ẋ^a`.
pub fn lagrangian_differential(sys: &LagrangianSystem) -> Result<Pullbacks, MechError> {
    let t = sys.table();
    let mut entries = Vec::new();
    for a in 0..t.coordinate_count() {
        entries.push((t.comomentum(a, false), sys.d_position(a)));
    }
    for a in 0..t.coordinate_count() {
        entries.push((t.comomentum(a, true), sys.d_velocity(a)));
    }
    Ok(Pullbacks { entries })
}

/// α : TT*M → T*TM, `(x, p, ẋ, ṗ) ↦ (x, ẋ, ṗ, p)`, as the pullback
/// `q_a ↦ dp_a`, `dq_a ↦ p_a`.
pub fn alpha_map(table: &SymbolTable) -> Substitution {
    let mut map = Substitution::new();
    for a in 0..table.coordinate_count() {
        map.insert(table.comomentum(a, false), SuperExpr::symbol(table, table.momentum(a, 1)));
        map.insert(table.comomentum(a, true), SuperExpr::symbol(table, table.momentum(a, 0)));
    }
    map
}

/// α⁻¹ : T*TM → TT*M as the pullback `p_a ↦ dq_a`, `dp_a ↦ q_a`.
pub fn alpha_inv(table: &SymbolTable) -> Substitution {
    let mut map = Substitution::new();
    for a in 0..table.coordinate_count() {
        map.insert(table.momentum(a, 0), SuperExpr::symbol(table, table.comomentum(a, true)));
        map.insert(table.momentum(a, 1), SuperExpr::symbol(table, table.comomentum(a, false)));
    }
    map
}
