//! Coordinate changes `x' = G(x)` and the maps they induce on TM, T*M,
//! TT*M and T*TM.
//!
//! Old and new coordinates live in one symbol table; pair `i` relates old
//! coordinate `old[i]` to new coordinate `new[i]`. Every induced image is
//! written in the old chart's symbols:
//!
//! * velocities `ẋ'^a = d/dt G^a`
//! * momenta `p_{a'} = Σ_c (∂_{a'} H^c)∘G · p_c`, with `H = G⁻¹`
//! * momentum velocities `ṗ_{a'} = d/dt p_{a'}`
//! * T*TM fibres, dual to `(x', ẋ')`:
//!   `q_{a'} = Σ_c (∂_{a'} H^c) q_c + (∂_{a'} Ḣ^c) dq_c` and
//!   `dq_{a'} = Σ_c (∂_{ẋ'^a} Ḣ^c) dq_c`, both composed with `(G, Ġ)`.
//!
//! `H` is found by the fixed point `x = (x' − n(x)) / c` where `G^i = c_i x^i + n^i(x)`,
//! which terminates for nilpotent or triangular polynomial corrections.

use crate::grassmann::Grading;
use crate::mech::{alpha_map, MechError};
use crate::superexpr::{render, Substitution, SuperExpr, SymbolKind, SymbolTable};

const MAX_INVERSE_ITERATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct InducedChange {
    pub old: Vec<usize>,
    pub new: Vec<usize>,
    /// `G^a` in old base coordinates.
    pub forward: Vec<SuperExpr>,
    /// `H^a` in new base coordinates.
    pub inverse: Vec<SuperExpr>,
    pub velocities: Vec<SuperExpr>,
    pub momenta: Vec<SuperExpr>,
    pub momentum_velocities: Vec<SuperExpr>,
    pub comomenta: Vec<SuperExpr>,
    pub comomenta_dotted: Vec<SuperExpr>,
}

impl InducedChange {
    /// Pullbacks of every new induced symbol to old-chart expressions.
    pub fn substitution(&self, table: &SymbolTable) -> Substitution {
        let mut map = Substitution::new();
        for (i, &b) in self.new.iter().enumerate() {
            map.insert(table.coord(b, 0), self.forward[i].clone());
            map.insert(table.coord(b, 1), self.velocities[i].clone());
            map.insert(table.momentum(b, 0), self.momenta[i].clone());
            map.insert(table.momentum(b, 1), self.momentum_velocities[i].clone());
            map.insert(table.comomentum(b, false), self.comomenta[i].clone());
            map.insert(table.comomentum(b, true), self.comomenta_dotted[i].clone());
        }
        map
    }

    /// Pushes the T*TM law through α and compares with the TT*M law:
    /// `α*(q_{a'}) − ṗ_{a'}` and `α*(dq_{a'}) − p_{a'}`, all zero when the two
    /// routes agree.
    pub fn alpha_residuals(&self, table: &SymbolTable) -> Result<Vec<SuperExpr>, MechError> {
        let alpha = alpha_map(table);
        let mut out = Vec::new();
        for i in 0..self.new.len() {
            out.push(&self.comomenta[i].subst(&alpha)? - &self.momentum_velocities[i]);
            out.push(&self.comomenta_dotted[i].subst(&alpha)? - &self.momenta[i]);
        }
        Ok(out)
    }

    pub fn render_lines(&self, table: &SymbolTable) -> Vec<String> {
        let mut map: Vec<_> = self.substitution(table).into_iter().collect();
        map.sort_by_key(|(s, _)| *s);
        map.iter().map(|(s, e)| format!("{} = {}", table.name(*s), render(e, table))).collect()
    }
}

fn chart_error(msg: impl Into<String>) -> MechError {
    MechError::ChartChange(msg.into())
}

/// Induced transformation laws for `new[i] = forward[i](old)`.
pub fn induced_chart_change(
    table: &SymbolTable,
    old: &[usize],
    new: &[usize],
    forward: &[SuperExpr],
) -> Result<InducedChange, MechError> {
    let n = old.len();
    if new.len() != n || forward.len() != n {
        return Err(chart_error("old, new and forward must have the same length"));
    }
    for i in 0..n {
        if old[i] >= table.coordinate_count() || new[i] >= table.coordinate_count() {
            return Err(MechError::UnknownCoordinate(old[i].max(new[i])));
        }
        let p = table.coordinate_parity(old[i]);
        if table.coordinate_parity(new[i]) != p {
            return Err(chart_error(format!("pair {i} mixes parities")));
        }
        if !forward[i].is_zero() && forward[i].grading() != Grading::Homogeneous(p) {
            return Err(chart_error(format!("image of '{}' has the wrong parity", table.coordinates()[new[i]].0)));
        }
        for s in forward[i].free_symbols() {
            match table.info(s).kind {
                SymbolKind::Coordinate { coord, order: 0 } if old.contains(&coord) => {}
                SymbolKind::Parameter => {}
                _ => return Err(chart_error(format!("image depends on '{}'", table.name(s)))),
            }
        }
    }

    let sym = |c: usize, order: u8| SuperExpr::symbol(table, table.coord(c, order));
    // split G^i = c_i x^i + n^i(x)
    let mut linear = Vec::with_capacity(n);
    let mut rest = Vec::with_capacity(n);
    for i in 0..n {
        let x = table.coord(old[i], 0);
        let d = forward[i].partial(x, table.parity(x));
        let c = d.terms().find(|(k, _)| k.even.is_empty() && k.odd.is_empty()).map(|(_, c)| c).unwrap_or(0.0);
        if c == 0.0 {
            return Err(chart_error(format!(
                "body Jacobian of '{}' has no constant diagonal entry",
                table.coordinates()[new[i]].0
            )));
        }
        linear.push(c);
        rest.push(&forward[i] - &sym(old[i], 0).scale(c));
    }

    let inverse = invert(table, old, new, &linear, &rest)?;

    // base and velocity of the new chart in old symbols
    let mut to_old = Substitution::new();
    let mut velocities = Vec::with_capacity(n);
    for i in 0..n {
        let v = forward[i].total_time_derivative(table)?;
        to_old.insert(table.coord(new[i], 0), forward[i].clone());
        to_old.insert(table.coord(new[i], 1), v.clone());
        velocities.push(v);
    }
    let inverse_dot: Vec<SuperExpr> = inverse.iter().map(|h| h.total_time_derivative(table)).collect::<Result<_, _>>()?;

    let mut momenta = Vec::with_capacity(n);
    let mut momentum_velocities = Vec::with_capacity(n);
    let mut comomenta = Vec::with_capacity(n);
    let mut comomenta_dotted = Vec::with_capacity(n);
    for &na in &new[..n] {
        let xa = table.coord(na, 0);
        let va = table.coord(na, 1);
        let (pa, pva) = (table.parity(xa), table.parity(va));
        let mut p = SuperExpr::zero();
        let mut q = SuperExpr::zero();
        let mut dq = SuperExpr::zero();
        for c in 0..n {
            let jac = inverse[c].partial(xa, pa).subst(&to_old)?;
            let jac_dot = inverse_dot[c].partial(xa, pa).subst(&to_old)?;
            let jac_vel = inverse_dot[c].partial(va, pva).subst(&to_old)?;
            let pc = SuperExpr::symbol(table, table.momentum(old[c], 0));
            let qc = SuperExpr::symbol(table, table.comomentum(old[c], false));
            let dqc = SuperExpr::symbol(table, table.comomentum(old[c], true));
            p = &p + &(&jac * &pc);
            q = &q + &(&(&jac * &qc) + &(&jac_dot * &dqc));
            dq = &dq + &(&jac_vel * &dqc);
        }
        momentum_velocities.push(p.total_time_derivative(table)?);
        momenta.push(p);
        comomenta.push(q);
        comomenta_dotted.push(dq);
    }
    Ok(InducedChange {
        old: old.to_vec(),
        new: new.to_vec(),
        forward: forward.to_vec(),
        inverse,
        velocities,
        momenta,
        momentum_velocities,
        comomenta,
        comomenta_dotted,
    })
}

fn invert(
    table: &SymbolTable,
    old: &[usize],
    new: &[usize],
    linear: &[f64],
    rest: &[SuperExpr],
) -> Result<Vec<SuperExpr>, MechError> {
    let n = old.len();
    let primed: Vec<SuperExpr> = new.iter().map(|&b| SuperExpr::symbol(table, table.coord(b, 0))).collect();
    let mut h: Vec<SuperExpr> = (0..n).map(|i| primed[i].scale(1.0 / linear[i])).collect();
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let back: Substitution = (0..n).map(|i| (table.coord(old[i], 0), h[i].clone())).collect();
        let next: Vec<SuperExpr> =
            (0..n).map(|i| Ok((&primed[i] - &rest[i].subst(&back)?).scale(1.0 / linear[i]))).collect::<Result<_, MechError>>()?;
        if next == h {
            return Ok(h);
        }
        h = next;
    }
    Err(chart_error("the inverse change did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Parity;
    use crate::superexpr::{eval_at, Bindings};
    use crate::{Blade, GrassmannElement};

    fn table() -> SymbolTable {
        SymbolTable::for_chart(
            &[
                ("x".into(), Parity::Even),
                ("a".into(), Parity::Odd),
                ("b".into(), Parity::Odd),
                ("y".into(), Parity::Even),
                ("c".into(), Parity::Odd),
                ("e".into(), Parity::Odd),
            ],
            &[],
        )
        .unwrap()
    }

    fn s(t: &SymbolTable, name: &str) -> SuperExpr {
        SuperExpr::symbol(t, t.lookup(name).unwrap())
    }

    fn shift(t: &SymbolTable) -> InducedChange {
        let g = vec![&s(t, "x") + &(&s(t, "a") * &s(t, "b")), s(t, "a"), s(t, "b")];
        induced_chart_change(t, &[0, 1, 2], &[3, 4, 5], &g).unwrap()
    }

    #[test]
    fn identity_change_is_the_identity() {
        let t = table();
        let g = vec![s(&t, "x"), s(&t, "a"), s(&t, "b")];
        let ch = induced_chart_change(&t, &[0, 1, 2], &[3, 4, 5], &g).unwrap();
        for (i, name) in ["x", "a", "b"].iter().enumerate() {
            assert_eq!(ch.velocities[i], s(&t, &format!("d{name}")));
            assert_eq!(ch.momenta[i], s(&t, &format!("p_{name}")));
            assert_eq!(ch.momentum_velocities[i], s(&t, &format!("dp_{name}")));
            assert_eq!(ch.comomenta[i], s(&t, &format!("q_{name}")));
            assert_eq!(ch.comomenta_dotted[i], s(&t, &format!("dq_{name}")));
        }
    }

    #[test]
    fn nilpotent_shift_velocity() {
        let t = table();
        let ch = shift(&t);
        assert_eq!(render(&ch.velocities[0], &t), "a*db - b*da + dx");
        assert_eq!(render(&ch.inverse[0], &t), "-c*e + y");
        // oracle: ẋ + ȧb + aḃ evaluated at random Grassmann points
        let oracle = &s(&t, "dx") + &(&(&s(&t, "da") * &s(&t, "b")) + &(&s(&t, "a") * &s(&t, "db")));
        let mut state = 7u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        };
        let q = 3;
        for _ in 0..50 {
            let mut bind = Bindings::<f64>::new(q);
            for name in ["x", "dx"] {
                let v = GrassmannElement::from_terms(q, [(Blade(0), rnd()), (Blade(3), rnd()), (Blade(5), rnd())]).unwrap();
                bind.bind(t.lookup(name).unwrap(), v);
            }
            for name in ["a", "b", "da", "db"] {
                let v =
                    GrassmannElement::from_terms(q, [(Blade(1), rnd()), (Blade(2), rnd()), (Blade(4), rnd()), (Blade(7), rnd())])
                        .unwrap();
                bind.bind(t.lookup(name).unwrap(), v);
            }
            let l = eval_at(&ch.velocities[0], &bind, &t).unwrap();
            let r = eval_at(&oracle, &bind, &t).unwrap();
            assert!(l.try_sub(&r).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn cotangent_law_agrees_with_alpha() {
        let t = table();
        for ch in [
            shift(&t),
            induced_chart_change(
                &t,
                &[0, 1, 2],
                &[3, 4, 5],
                &[s(&t, "x").scale(2.0), &s(&t, "a") + &(&s(&t, "x") * &s(&t, "b")), s(&t, "b").scale(-1.0)],
            )
            .unwrap(),
        ] {
            for r in ch.alpha_residuals(&t).unwrap() {
                assert!(r.is_zero(), "{}", render(&r, &t));
            }
        }
    }

    #[test]
    fn change_composed_with_its_inverse_is_the_identity() {
        let t = table();
        let ch = shift(&t);
        let back = induced_chart_change(&t, &[3, 4, 5], &[0, 1, 2], &ch.inverse).unwrap();
        let there = ch.substitution(&t);
        let round = back.substitution(&t);
        for name in ["x", "a", "b"] {
            for sym in [
                name.to_string(),
                format!("d{name}"),
                format!("p_{name}"),
                format!("dp_{name}"),
                format!("q_{name}"),
                format!("dq_{name}"),
            ] {
                let id = t.lookup(&sym).unwrap();
                let e = round[&id].subst(&there).unwrap();
                assert_eq!(e, SuperExpr::symbol(&t, id), "{sym}: {}", render(&e, &t));
            }
        }
    }

    #[test]
    fn rejects_singular_and_mixed_changes() {
        let t = table();
        let g = vec![s(&t, "x").powi(2).unwrap(), s(&t, "a"), s(&t, "b")];
        assert!(induced_chart_change(&t, &[0, 1, 2], &[3, 4, 5], &g).is_err());
        let g = vec![s(&t, "a"), s(&t, "a"), s(&t, "b")];
        assert!(induced_chart_change(&t, &[0, 1, 2], &[3, 4, 5], &g).is_err());
    }
}
