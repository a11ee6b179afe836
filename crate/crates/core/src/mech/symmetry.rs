//! The local symmetry criterion: a homogeneous field X on T*M is an
//! infinitesimal symmetry iff the tangent lift of X annihilates every
//! phase-dynamics generator along solutions.
//!
//! Residuals `d_T X(φ)` are reduced on shell in two steps: momenta and
//! momentum velocities are replaced by their 𝒯L pullbacks, then highest
//! derivatives (and their prolongations) by the normal form.

use crate::mech::{normal_form, tangent_lift, LagrangianSystem, MechError, NormalFormResult, SuperVectorField};
use crate::superexpr::{render, Substitution, SuperExpr, SymbolTable, MAX_COORD_ORDER};

/// Substitutions realising the on-shell reduction of a system.
#[derive(Debug, Clone)]
pub struct OnShellReducer {
    momenta: Substitution,
    jets: Option<Substitution>,
}

impl OnShellReducer {
    /// Replaces `p_a` and `dp_a` by their 𝒯L pullbacks.
    pub fn momenta(&self, f: &SuperExpr) -> Result<SuperExpr, MechError> {
        Ok(f.subst(&self.momenta)?)
    }

    /// Full reduction; `None` when the system has no explicit normal form.
    pub fn full(&self, f: &SuperExpr) -> Result<Option<SuperExpr>, MechError> {
        let Some(jets) = &self.jets else { return Ok(None) };
        let mut cur = self.momenta(f)?;
        // momenta pullbacks contain velocities only, so one more pass after
        // the jets settle is enough; loop defensively until a fixed point
        for _ in 0..=MAX_COORD_ORDER as usize + 1 {
            let next = cur.subst(jets)?;
            if next == cur {
                return Ok(Some(cur));
            }
            cur = next;
        }
        Ok(Some(cur))
    }

    pub fn is_explicit(&self) -> bool {
        self.jets.is_some()
    }
}

/// Builds the reducer: the normal form `u_a = rhs_a` is prolonged to
/// `u_a^{(k)} = d^k/dt^k rhs_a`, each level reduced by the ones below.
pub fn on_shell_reducer(sys: &LagrangianSystem) -> Result<OnShellReducer, MechError> {
    let t = sys.table();
    let mut momenta = sys.momentum_pullbacks()?.substitution();
    momenta.extend(sys.constraint_substitution());
    let jets = match normal_form(&sys.euler_lagrange()?, t) {
        NormalFormResult::Explicit(nf) => {
            let mut map = sys.constraint_substitution();
            let mut level: Vec<(usize, u8, SuperExpr)> =
                nf.rhs.iter().enumerate().map(|(a, (_, e))| (a, nf.orders[a], e.clone())).collect();
            for (a, order, e) in &level {
                map.insert(t.coord(*a, *order), e.clone());
            }
            loop {
                let mut next = Vec::new();
                for (a, order, e) in &level {
                    if *order >= MAX_COORD_ORDER {
                        continue;
                    }
                    match e.total_time_derivative(t) {
                        Ok(d) => next.push((*a, order + 1, reduce_fixed(&d, &map)?)),
                        // a jet beyond the table cannot appear in residuals
                        Err(_) => continue,
                    }
                }
                if next.is_empty() {
                    break;
                }
                for (a, order, e) in &next {
                    map.insert(t.coord(*a, *order), e.clone());
                }
                level = next;
            }
            Some(map)
        }
        NormalFormResult::Implicit(_) => None,
    };
    Ok(OnShellReducer { momenta, jets })
}

fn reduce_fixed(f: &SuperExpr, map: &Substitution) -> Result<SuperExpr, MechError> {
    let mut cur = f.clone();
    for _ in 0..=MAX_COORD_ORDER as usize + 1 {
        let next = cur.subst(map)?;
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

/// Outcome of the symbolic symmetry check.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// `(generator name, reduced residual)` for every generator.
    pub residuals: Vec<(String, SuperExpr)>,
    /// False when the system has no explicit normal form; residuals are then
    /// reduced on the momenta only.
    pub fully_reduced: bool,
    pub passed: bool,
}

impl SymmetryReport {
    pub fn render_lines(&self, table: &SymbolTable) -> Vec<String> {
        self.residuals
            .iter()
            .map(|(n, r)| format!("{n}: {}", if r.is_zero() { "0".to_string() } else { render(r, table) }))
            .collect()
    }
}

/// The lifted field applied to each generator, before any reduction.
pub(crate) fn lifted_residuals(sys: &LagrangianSystem, field: &SuperVectorField) -> Result<Vec<(String, SuperExpr)>, MechError> {
    let t = sys.table();
    let lift = tangent_lift(field, t)?;
    Ok(sys
        .phase_generators()?
        .named(t)
        .into_iter()
        .map(|(name, g)| {
            let r = lift.apply(&g, t);
            (name, r)
        })
        .collect())
}

/// Checks whether `field` is an infinitesimal symmetry of the phase dynamics.
pub fn check_symmetry(sys: &LagrangianSystem, field: &SuperVectorField) -> Result<SymmetryReport, MechError> {
    let reducer = on_shell_reducer(sys)?;
    let mut residuals = Vec::new();
    for (name, r) in lifted_residuals(sys, field)? {
        let reduced = match reducer.full(&r)? {
            Some(e) => e,
            None => reducer.momenta(&r)?,
        };
        residuals.push((name, reduced));
    }
    let passed = residuals.iter().all(|(_, r)| r.is_zero());
    Ok(SymmetryReport { residuals, fully_reduced: reducer.is_explicit(), passed })
}
