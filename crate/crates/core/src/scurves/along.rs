//! Evaluating superfunctions of the jets along a sampled trajectory.
//!
//! Jets missing from the trajectory are rebuilt from the next lower jet by
//! second-order finite differences on the (possibly uneven) time grid:
//! central in the interior, one-sided at the ends.

use std::collections::BTreeSet;

use crate::grassmann::GrassmannElement;
use crate::scalar::{lit, Real};
use crate::scurves::{Channel, CurveError, Trajectory};
use crate::superexpr::{eval_env, DenseEnv, SuperExpr, SymbolId, SymbolKind, SymbolTable};

fn combine<T: Real>(q: u32, terms: &[(T, &GrassmannElement<T>)]) -> Result<GrassmannElement<T>, CurveError> {
    let mut out = GrassmannElement::zero(q)?;
    for (c, v) in terms {
        out = out.try_add(&v.scale(c))?;
    }
    Ok(out)
}

/// Second-order derivative estimate of channel `src` at every sample.
pub(crate) fn differentiate<T: Real>(traj: &Trajectory<T>, src: usize) -> Result<Vec<GrassmannElement<T>>, CurveError> {
    let n = traj.len();
    let t = traj.times();
    let v = |i: usize| traj.value(i, src);
    let q = traj.q();
    if n < 2 {
        return Err(CurveError::Schema("at least two samples are needed to differentiate".into()));
    }
    if n == 2 {
        let d = combine(q, &[(T::one() / (t[1] - t[0]), v(1)), (-T::one() / (t[1] - t[0]), v(0))])?;
        return Ok(vec![d.clone(), d]);
    }
    let two = lit::<T>(2.0);
    let mut out = Vec::with_capacity(n);
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    out.push(combine(
        q,
        &[(-(two * h0 + h1) / (h0 * (h0 + h1)), v(0)), ((h0 + h1) / (h0 * h1), v(1)), (-h0 / (h1 * (h0 + h1)), v(2))],
    )?);
    for i in 1..n - 1 {
        let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        out.push(combine(
            q,
            &[(-h1 / (h0 * (h0 + h1)), v(i - 1)), ((h1 - h0) / (h0 * h1), v(i)), (h0 / (h1 * (h0 + h1)), v(i + 1))],
        )?);
    }
    let (h0, h1) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    out.push(combine(
        q,
        &[(h1 / (h0 * (h0 + h1)), v(n - 3)), (-(h0 + h1) / (h0 * h1), v(n - 2)), ((two * h1 + h0) / (h1 * (h0 + h1)), v(n - 1))],
    )?);
    Ok(out)
}

/// A trajectory extended with every jet the expressions need.
pub(crate) struct JetTrajectory<T> {
    pub traj: Trajectory<T>,
    pub reconstructed: Vec<String>,
}

pub(crate) fn with_jets<T: Real>(
    traj: &Trajectory<T>,
    table: &SymbolTable,
    exprs: &[SuperExpr],
) -> Result<JetTrajectory<T>, CurveError> {
    let mut needed: BTreeSet<(usize, u8)> = BTreeSet::new();
    for e in exprs {
        for s in e.free_symbols() {
            match table.info(s).kind {
                SymbolKind::Coordinate { coord, order } => {
                    needed.insert((coord, order));
                }
                _ => {
                    if traj.channel_index(table.name(s)).is_none() {
                        return Err(CurveError::MissingChannel(table.name(s).to_string()));
                    }
                }
            }
        }
    }
    let mut out = traj.clone();
    let mut reconstructed = Vec::new();
    for (coord, order) in needed {
        for j in 0..=order {
            let id = table.coord(coord, j);
            let name = table.name(id);
            if out.channel_index(name).is_some() {
                continue;
            }
            if j == 0 {
                return Err(CurveError::MissingChannel(name.to_string()));
            }
            let src = out.channel_index(table.name(table.coord(coord, j - 1))).expect("lower jet present");
            let values = differentiate(&out, src)?;
            out.add_channel(Channel::new(name, table.parity(id)), |i| Ok(values[i].clone()))?;
            reconstructed.push(name.to_string());
        }
    }
    Ok(JetTrajectory { traj: out, reconstructed })
}

/// Channel index of every table symbol that the trajectory carries.
fn bindings<T: Real>(traj: &Trajectory<T>, table: &SymbolTable) -> Vec<(SymbolId, usize)> {
    traj.channels().iter().enumerate().filter_map(|(i, c)| table.lookup(&c.name).map(|id| (id, i))).collect()
}

/// `values[i][k]` is `exprs[k]` at sample `i`.
pub(crate) fn evaluate<T: Real>(
    exprs: &[SuperExpr],
    table: &SymbolTable,
    traj: &Trajectory<T>,
) -> Result<Vec<Vec<GrassmannElement<T>>>, CurveError> {
    let binds = bindings(traj, table);
    for e in exprs {
        if let Some(s) = e.free_symbols().into_iter().find(|s| !binds.iter().any(|(id, _)| id == s)) {
            return Err(CurveError::MissingChannel(table.name(s).to_string()));
        }
    }
    let mut out = Vec::with_capacity(traj.len());
    let mut env = DenseEnv::new(traj.q(), table.len());
    for i in 0..traj.len() {
        for (id, c) in &binds {
            env.set(*id, traj.value(i, *c).clone());
        }
        out.push(exprs.iter().map(|e| eval_env(e, &env)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Parity;

    #[test]
    fn differences_are_exact_on_quadratics() {
        let mut traj = Trajectory::<f64>::new(0, vec![Channel::new("x", Parity::Even)]);
        let times = [0.0, 0.1, 0.25, 0.3, 0.5];
        for t in times {
            traj.push(t, vec![GrassmannElement::scalar(0, 3.0 * t * t - t + 2.0).unwrap()]).unwrap();
        }
        let d = differentiate(&traj, 0).unwrap();
        for (t, v) in times.iter().zip(d) {
            assert!((v.body() - (6.0 * t - 1.0)).abs() < 1e-12, "{t}");
        }
    }
}
