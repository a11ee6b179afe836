//! The real ODE system induced on the Grassmann components of an S-curve.
//!
//! A coordinate `x^a` of order `k_a` contributes its jets `x^a, …, x^{a(k_a−1)}`
//! to the state, each expanded over the basis monomials of Λ_q whose parity
//! matches `x^a`. The right-hand side of the top jet is evaluated over Λ_q and
//! read back monomial by monomial.

use std::collections::BTreeMap;

use crate::grassmann::{Blade, GrassmannElement, Parity};
use crate::mech::{NormalForm, NormalFormResult, SuperVectorField};
use crate::scalar::Real;
use crate::scurves::{Channel, CurveError};
use crate::superexpr::{eval_env, DenseEnv, Substitution, SuperExpr, SymbolId, SymbolKind, SymbolTable};

/// Initial values of the state jets, keyed by jet symbol; unset jets are zero.
pub type InitialState<T> = BTreeMap<SymbolId, GrassmannElement<T>>;

/// Numeric parameter values as a substitution.
pub fn parameter_substitution(params: &[(SymbolId, f64)]) -> Substitution {
    params.iter().map(|(id, v)| (*id, SuperExpr::constant(*v))).collect()
}

#[derive(Debug, Clone)]
pub struct ComponentSystem {
    q: u32,
    table: SymbolTable,
    orders: Vec<u8>,
    rhs: Vec<SuperExpr>,
    blades: Vec<Vec<Blade>>,
    offsets: Vec<usize>,
    dim: usize,
}

/// Expands an explicit normal form over Λ_q.
pub fn expand_system(
    result: &NormalFormResult,
    table: &SymbolTable,
    params: &[(SymbolId, f64)],
    q: u32,
) -> Result<ComponentSystem, CurveError> {
    match result {
        NormalFormResult::Explicit(nf) => ComponentSystem::from_normal_form(nf, table, params, q),
        NormalFormResult::Implicit(rep) => Err(CurveError::Implicit(format!(
            "{}; the equations cannot be integrated, but trajectories can still be verified",
            rep.reason
        ))),
    }
}

impl ComponentSystem {
    pub fn from_normal_form(
        nf: &NormalForm,
        table: &SymbolTable,
        params: &[(SymbolId, f64)],
        q: u32,
    ) -> Result<Self, CurveError> {
        let rhs = nf.rhs.iter().map(|(_, e)| e.clone()).collect();
        Self::build(table, nf.orders.clone(), rhs, params, q)
    }

    /// The first-order system `ẋ^a = X^a(x)` of an even field whose
    /// components target base coordinates and depend on them only.
    pub fn from_field(
        field: &SuperVectorField,
        table: &SymbolTable,
        params: &[(SymbolId, f64)],
        q: u32,
    ) -> Result<Self, CurveError> {
        if field.parity() != Parity::Even {
            return Err(CurveError::Unsupported("only even vector fields define an ODE on S-points".into()));
        }
        let n = table.coordinate_count();
        let mut rhs = vec![SuperExpr::zero(); n];
        for (s, c) in field.components() {
            match table.info(s).kind {
                SymbolKind::Coordinate { coord, order: 0 } => rhs[coord] = c.clone(),
                _ => {
                    return Err(CurveError::Unsupported(format!(
                        "field has a component on '{}'; only base coordinates can be integrated",
                        table.name(s)
                    )))
                }
            }
        }
        Self::build(table, vec![1; n], rhs, params, q)
    }

    fn build(
        table: &SymbolTable,
        orders: Vec<u8>,
        rhs: Vec<SuperExpr>,
        params: &[(SymbolId, f64)],
        q: u32,
    ) -> Result<Self, CurveError> {
        GrassmannElement::<f64>::zero(q)?;
        let values = parameter_substitution(params);
        let mut subst_rhs = Vec::with_capacity(rhs.len());
        for (a, e) in rhs.iter().enumerate() {
            let e = e.subst(&values)?;
            if e.has_formal_functions() {
                return Err(CurveError::Unsupported(format!(
                    "right-hand side of '{}' calls a formal function; define it with a function block",
                    table.name(table.coord(a, orders[a]))
                )));
            }
            for s in e.free_symbols() {
                let ok = matches!(table.info(s).kind, SymbolKind::Coordinate { coord, order } if order < orders[coord]);
                if !ok {
                    return Err(CurveError::Unsupported(format!(
                        "right-hand side of '{}' depends on '{}', which is not part of the state",
                        table.name(table.coord(a, orders[a])),
                        table.name(s)
                    )));
                }
            }
            subst_rhs.push(e);
        }
        let blades: Vec<Vec<Blade>> =
            (0..table.coordinate_count()).map(|a| Blade::all_with_parity(q, table.coordinate_parity(a))).collect();
        let mut offsets = Vec::with_capacity(blades.len());
        let mut dim = 0;
        for (a, b) in blades.iter().enumerate() {
            offsets.push(dim);
            dim += orders[a] as usize * b.len();
        }
        Ok(ComponentSystem { q, table: table.clone(), orders, rhs: subst_rhs, blades, offsets, dim })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    /// Order of the top jet of each coordinate.
    pub fn orders(&self) -> &[u8] {
        &self.orders
    }

    /// Right-hand sides with parameters substituted.
    pub fn rhs(&self) -> &[SuperExpr] {
        &self.rhs
    }

    /// Number of real state variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(jet symbol, monomial)` of every state variable, in state order.
    pub fn variables(&self) -> Vec<(SymbolId, Blade)> {
        let mut out = Vec::with_capacity(self.dim);
        for (a, blades) in self.blades.iter().enumerate() {
            for j in 0..self.orders[a] {
                out.extend(blades.iter().map(|b| (self.table.coord(a, j), *b)));
            }
        }
        out
    }

    /// Channels of the trajectories this system produces: every jet up to
    /// and including the top one.
    pub fn channels(&self) -> Vec<Channel> {
        let mut out = Vec::new();
        for a in 0..self.orders.len() {
            for j in 0..=self.orders[a] {
                let id = self.table.coord(a, j);
                out.push(Channel::new(self.table.name(id), self.table.parity(id)));
            }
        }
        out
    }

    fn slot(&self, a: usize, j: u8) -> std::ops::Range<usize> {
        let n = self.blades[a].len();
        let start = self.offsets[a] + j as usize * n;
        start..start + n
    }

    fn element<T: Real>(&self, a: usize, values: &[T]) -> Result<GrassmannElement<T>, CurveError> {
        Ok(GrassmannElement::from_terms(self.q, self.blades[a].iter().copied().zip(values.iter().copied()))?)
    }

    /// State vector from initial jets. Keys must be state jets.
    pub fn pack<T: Real>(&self, init: &InitialState<T>) -> Result<Vec<T>, CurveError> {
        let mut state = vec![T::zero(); self.dim];
        for (id, v) in init {
            let Some(info) = self.table.get(*id) else {
                return Err(CurveError::Schema(format!("unknown symbol id {}", id.0)));
            };
            let (a, j) = match info.kind {
                SymbolKind::Coordinate { coord, order } if order < self.orders[coord] => (coord, order),
                _ => return Err(CurveError::Schema(format!("'{}' is not an initial datum of this system", info.name))),
            };
            if v.q() != self.q {
                return Err(CurveError::Schema(format!(
                    "initial value of '{}' has q = {}, expected {}",
                    info.name,
                    v.q(),
                    self.q
                )));
            }
            if !v.is_zero() && v.grading() != crate::grassmann::Grading::Homogeneous(info.parity) {
                return Err(CurveError::Parity(info.name.clone()));
            }
            let range = self.slot(a, j);
            for (k, b) in self.blades[a].iter().enumerate() {
                state[range.start + k] = v.component(*b);
            }
        }
        Ok(state)
    }

    /// Time derivative of the state, also returning the values of the top
    /// jets (the right-hand sides).
    pub fn derivative<T: Real>(&self, state: &[T], out: &mut [T]) -> Result<Vec<GrassmannElement<T>>, CurveError> {
        let mut env = DenseEnv::new(self.q, self.table.len());
        for a in 0..self.orders.len() {
            for j in 0..self.orders[a] {
                env.set(self.table.coord(a, j), self.element(a, &state[self.slot(a, j)])?);
            }
        }
        let mut tops = Vec::with_capacity(self.orders.len());
        for a in 0..self.orders.len() {
            let k = self.orders[a];
            for j in 0..k.saturating_sub(1) {
                let (src, dst) = (self.slot(a, j + 1), self.slot(a, j));
                out[dst].copy_from_slice(&state[src]);
            }
            let top = eval_env(&self.rhs[a], &env)?;
            if k > 0 {
                let dst = self.slot(a, k - 1);
                for (slot, b) in out[dst].iter_mut().zip(&self.blades[a]) {
                    *slot = top.component(*b);
                }
            }
            tops.push(top.parity_part(self.table.coordinate_parity(a)));
        }
        Ok(tops)
    }

    /// One trajectory sample: the state jets followed by each top jet.
    pub fn sample<T: Real>(&self, state: &[T], tops: &[GrassmannElement<T>]) -> Result<Vec<GrassmannElement<T>>, CurveError> {
        let mut out = Vec::new();
        for a in 0..self.orders.len() {
            for j in 0..self.orders[a] {
                out.push(self.element(a, &state[self.slot(a, j)])?);
            }
            out.push(tops[a].clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mech::{normal_form, LagrangianSystem};
    use crate::modelio::parse_model;

    fn system(text: &str, q: u32) -> ComponentSystem {
        let m = parse_model(text).unwrap();
        if let Some(l) = m.lagrangian.clone() {
            let sys = LagrangianSystem::new(m.table.clone(), l).unwrap();
            let nf = normal_form(&sys.euler_lagrange().unwrap(), &m.table);
            expand_system(&nf, &m.table, &m.params, q).unwrap()
        } else {
            let f = &m.fields[0];
            let x = SuperVectorField::new(&m.table, f.parity, f.components.clone()).unwrap();
            ComponentSystem::from_field(&x, &m.table, &m.params, q).unwrap()
        }
    }

    const ROTATION: &str = "model rot\ncoords { th_p: odd, th_m: odd }\nfield X { th_p = th_m, th_m = -th_p }";
    const DIRAC: &str = "model d\ncoords { psi_p: odd, psi_m: odd }\nparams { m = 1 }\n\
                         lagrangian: 0.5*(psi_p*dpsi_p + psi_m*dpsi_m) - m*psi_p*psi_m";

    #[test]
    fn state_counts() {
        assert_eq!(system(ROTATION, 3).dim(), 8);
        assert_eq!(system(DIRAC, 2).dim(), 4);
        assert_eq!(system("model f\ncoords { x: even }\nlagrangian: 0.5*dx^2", 0).dim(), 2);
        let vars = system(DIRAC, 2).variables();
        assert_eq!(vars[0].1, Blade(0b01));
        assert_eq!(vars[1].1, Blade(0b10));
    }

    #[test]
    fn dirac_derivative_by_hand() {
        let s = system(DIRAC, 2);
        // psi_p = 2 z1 + 3 z2, psi_m = 5 z1 + 7 z2; psi_p' = m psi_m, psi_m' = -m psi_p
        let state = [2.0, 3.0, 5.0, 7.0];
        let mut out = [0.0; 4];
        s.derivative(&state, &mut out).unwrap();
        assert_eq!(out, [5.0, 7.0, -2.0, -3.0]);
    }

    #[test]
    fn implicit_input_is_refused() {
        let m = parse_model("model z\ncoords { x: even }\nlagrangian: 0").unwrap();
        let sys = LagrangianSystem::new(m.table.clone(), m.lagrangian.unwrap()).unwrap();
        let nf = normal_form(&sys.euler_lagrange().unwrap(), &m.table);
        assert!(matches!(expand_system(&nf, &m.table, &[], 2), Err(CurveError::Implicit(_))));
    }

    #[test]
    fn formal_potentials_cannot_be_integrated() {
        let m = parse_model("model n2\ncoords { x: even }\nlagrangian: 0.5*dx^2 - U(x)").unwrap();
        let sys = LagrangianSystem::new(m.table.clone(), m.lagrangian.unwrap()).unwrap();
        let nf = normal_form(&sys.euler_lagrange().unwrap(), &m.table);
        assert!(matches!(expand_system(&nf, &m.table, &[], 1), Err(CurveError::Unsupported(_))));
    }

    #[test]
    fn pack_checks_keys_and_parity() {
        let s = system(DIRAC, 2);
        let t = s.table().clone();
        let mut init = InitialState::new();
        init.insert(t.lookup("psi_p").unwrap(), GrassmannElement::scalar(2, 1.0).unwrap());
        assert!(matches!(s.pack(&init), Err(CurveError::Parity(_))));
        let mut init = InitialState::<f64>::new();
        init.insert(t.lookup("dpsi_p").unwrap(), GrassmannElement::generator(2, 1).unwrap());
        assert!(s.pack(&init).is_err());
    }

    fn subsets_with_parity(q: u32, odd: bool) -> usize {
        (0u32..1 << q).filter(|m| (m.count_ones() % 2 == 1) == odd).count()
    }

    #[test]
    fn state_dimension_matches_subset_enumeration() {
        let text = "model n2\ncoords { x: even, psi_p: odd, psi_m: odd }\nparams { k = 1 }\n\
                    lagrangian: 0.5*dx^2 + 0.5*k^2*x^2 + 0.5*(dpsi_p*psi_p - dpsi_m*psi_m) + k*psi_p*psi_m";
        for q in 0..=6 {
            let s = system(text, q);
            // x is second order, the fermions first order
            let expected = 2 * subsets_with_parity(q, false) + 2 * subsets_with_parity(q, true);
            assert_eq!(s.dim(), expected, "q = {q}");
            assert_eq!(s.variables().len(), expected);
        }
    }
}
