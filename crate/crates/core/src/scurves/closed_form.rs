//! Sampling closed-form S-curves `x^a = f^a(t)` with exact time derivatives.

use std::collections::BTreeMap;

use crate::grassmann::{GrassmannElement, Parity};
use crate::modelio::SolutionDecl;
use crate::scalar::Real;
use crate::scurves::{parameter_substitution, Channel, CurveError, Trajectory};
use crate::superexpr::{eval_env, DenseEnv, SuperExpr, SymbolId, SymbolKind, SymbolTable};

/// Samples a closed-form solution and its derivatives up to `orders[a]`
/// for coordinate `a`. Every declared constant must be given a value.
pub fn sample_solution<T: Real>(
    solution: &SolutionDecl,
    table: &SymbolTable,
    params: &[(SymbolId, f64)],
    constants: &BTreeMap<SymbolId, GrassmannElement<T>>,
    q: u32,
    orders: &[u8],
    times: &[T],
) -> Result<Trajectory<T>, CurveError> {
    let time = table
        .ids()
        .find(|id| table.info(*id).kind == SymbolKind::Time)
        .ok_or_else(|| CurveError::Schema("the model declares no time symbol".into()))?;
    for c in &solution.constants {
        let v = constants.get(c).ok_or_else(|| CurveError::Schema(format!("no value for constant '{}'", table.name(*c))))?;
        if v.q() != q {
            return Err(CurveError::Schema(format!("constant '{}' has q = {}, expected {q}", table.name(*c), v.q())));
        }
        if !v.is_zero() && v.grading() != crate::grassmann::Grading::Homogeneous(table.parity(*c)) {
            return Err(CurveError::Parity(table.name(*c).to_string()));
        }
    }
    let values = parameter_substitution(params);
    let mut channels = Vec::new();
    let mut exprs: Vec<SuperExpr> = Vec::new();
    for (a, f) in &solution.components {
        let mut e = f.subst(&values)?;
        for j in 0..=orders.get(*a).copied().unwrap_or(0) {
            let id = table.coord(*a, j);
            channels.push(Channel::new(table.name(id), table.parity(id)));
            exprs.push(e.clone());
            e = e.partial(time, Parity::Even);
        }
    }
    let mut traj = Trajectory::new(q, channels);
    let mut env = DenseEnv::new(q, table.len());
    for (id, v) in constants {
        env.set(*id, v.clone());
    }
    for t in times {
        env.set(time, GrassmannElement::scalar(q, *t)?);
        let row = exprs.iter().map(|e| eval_env(e, &env)).collect::<Result<Vec<_>, _>>()?;
        traj.push(*t, row)?;
    }
    Ok(traj)
}

/// `n + 1` equally spaced times from `t0` to `t1`.
pub fn uniform_times<T: Real>(t0: T, t1: T, n: usize) -> Vec<T> {
    let h = (t1 - t0) / T::from_usize(n.max(1)).expect("count fits the scalar type");
    (0..=n).map(|i| t0 + T::from_usize(i).expect("count fits the scalar type") * h).collect()
}
