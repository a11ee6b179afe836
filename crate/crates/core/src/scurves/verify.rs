//! Checks along sampled S-curves: solution residuals, constants of motion and
//! the numeric form of the symmetry criterion.

use std::collections::BTreeMap;

use crate::grassmann::{Blade, GrassmannElement, Parity};
use crate::mech::{lifted_residuals, LagrangianSystem, SuperVectorField};
use crate::scalar::{lit, Real};
use crate::scurves::along::{evaluate, with_jets};
use crate::scurves::{parameter_substitution, Channel, CurveError, Trajectory};
use crate::superexpr::{render, Substitution, SuperExpr, SymbolId, SymbolKind, SymbolTable};

/// Named equations `E = 0` in the jets of the coordinates, parameters
/// already substituted.
#[derive(Debug, Clone)]
pub struct SolutionEquations {
    table: SymbolTable,
    names: Vec<String>,
    exprs: Vec<SuperExpr>,
}

impl SolutionEquations {
    /// The Euler–Lagrange equations (constrained if the system is).
    pub fn euler_lagrange(sys: &LagrangianSystem, params: &[(SymbolId, f64)]) -> Result<Self, CurveError> {
        let t = sys.table();
        let values = parameter_substitution(params);
        let exprs = sys.euler_lagrange()?.iter().map(|e| e.subst(&values)).collect::<Result<Vec<_>, _>>()?;
        let names = (0..t.coordinate_count()).map(|a| format!("E_{}", t.coordinates()[a].0)).collect();
        Ok(SolutionEquations { table: t.clone(), names, exprs })
    }

    /// `ẋ^a − X^a(x)` for a field on the base.
    pub fn field(field: &SuperVectorField, table: &SymbolTable, params: &[(SymbolId, f64)]) -> Result<Self, CurveError> {
        let values = parameter_substitution(params);
        let mut names = Vec::new();
        let mut exprs = Vec::new();
        for (s, _) in field.components() {
            if !matches!(table.info(s).kind, SymbolKind::Coordinate { order: 0, .. }) {
                return Err(CurveError::Unsupported(format!(
                    "field has a component on '{}'; only base coordinates can be verified",
                    table.name(s)
                )));
            }
        }
        for a in 0..table.coordinate_count() {
            let x = table.coord(a, 0);
            let e = &SuperExpr::symbol(table, table.coord(a, 1)) - &field.component(x);
            names.push(format!("E_{}", table.name(x)));
            exprs.push(e.subst(&values)?);
        }
        Ok(SolutionEquations { table: table.clone(), names, exprs })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn exprs(&self) -> &[SuperExpr] {
        &self.exprs
    }

    pub fn render_lines(&self) -> Vec<String> {
        self.names.iter().zip(&self.exprs).map(|(n, e)| format!("{n} = {}", render(e, &self.table))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    /// Largest coefficient of any equation over all samples.
    pub max_residual: T,
    /// Equation and time of the largest residual.
    pub worst: Option<(String, T)>,
    /// Largest mismatch between a jet's increment over two steps and the
    /// Simpson integral of the next jet; only jets carried by the trajectory
    /// are compared.
    pub prolongation_defect: T,
    /// Jets rebuilt by finite differences.
    pub reconstructed: Vec<String>,
    /// Sampled time range; nothing is certified outside it.
    pub horizon: (T, T),
    pub samples: usize,
    pub tol: T,
    pub passed: bool,
}

impl<T: Real> VerificationReport<T> {
    pub fn render_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("horizon: [{}, {}] ({} samples)", self.horizon.0, self.horizon.1, self.samples),
            format!("max residual: {:e}", f64_of(self.max_residual)),
        ];
        if let Some((name, t)) = &self.worst {
            out.push(format!("worst: {name} at t = {t}"));
        }
        out.push(format!("prolongation defect: {:e}", f64_of(self.prolongation_defect)));
        if !self.reconstructed.is_empty() {
            out.push(format!("reconstructed: {}", self.reconstructed.join(", ")));
        }
        out.push(format!("tolerance: {:e}", f64_of(self.tol)));
        out.push(if self.passed { "PASS".into() } else { "FAIL".into() });
        out
    }
}

fn f64_of<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Three-point Simpson rule on an uneven pair of steps.
fn simpson<T: Real>(q: u32, h0: T, h1: T, f: [&GrassmannElement<T>; 3]) -> Result<GrassmannElement<T>, CurveError> {
    let two = lit::<T>(2.0);
    let w = [two - h1 / h0, (h0 + h1) * (h0 + h1) / (h0 * h1), two - h0 / h1];
    let mut out = GrassmannElement::zero(q)?;
    for (wi, fi) in w.iter().zip(f) {
        out = out.try_add(&fi.scale(wi))?;
    }
    Ok(out.scale(&((h0 + h1) / lit::<T>(6.0))))
}

fn prolongation_defect<T: Real>(traj: &Trajectory<T>, table: &SymbolTable, rebuilt: &[String]) -> Result<T, CurveError> {
    let mut worst = T::zero();
    if traj.len() < 3 {
        return Ok(worst);
    }
    let times = traj.times();
    for a in 0..table.coordinate_count() {
        for j in 0..crate::superexpr::MAX_COORD_ORDER {
            let (lo, hi) = (table.coord(a, j), table.coord(a, j + 1));
            let (Some(ci), Some(di)) = (traj.channel_index(table.name(lo)), traj.channel_index(table.name(hi))) else {
                continue;
            };
            if rebuilt.iter().any(|r| r == table.name(hi)) {
                continue;
            }
            let mut i = 0;
            while i + 2 < traj.len() {
                let (h0, h1) = (times[i + 1] - times[i], times[i + 2] - times[i + 1]);
                let integral = simpson(traj.q(), h0, h1, [traj.value(i, di), traj.value(i + 1, di), traj.value(i + 2, di)])?;
                let increment = traj.value(i + 2, ci).try_sub(traj.value(i, ci))?;
                worst = worst.max(increment.try_sub(&integral)?.max_abs());
                i += 1;
            }
        }
    }
    Ok(worst)
}

/// Evaluates every equation at every sample. Passes when both the largest
/// residual and the prolongation defect are at most `tol`.
pub fn verify_solution<T: Real>(
    eqs: &SolutionEquations,
    traj: &Trajectory<T>,
    tol: T,
) -> Result<VerificationReport<T>, CurveError> {
    if traj.is_empty() {
        return Err(CurveError::Schema("trajectory has no samples".into()));
    }
    let jets = with_jets(traj, &eqs.table, &eqs.exprs)?;
    let values = evaluate(&eqs.exprs, &eqs.table, &jets.traj)?;
    let mut max_residual = T::zero();
    let mut worst = None;
    for (i, row) in values.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let r = v.max_abs();
            if r > max_residual || (worst.is_none() && !r.is_nan()) {
                max_residual = r;
                worst = Some((eqs.names[k].clone(), traj.times()[i]));
            }
            if r.is_nan() {
                max_residual = r;
            }
        }
    }
    let defect = prolongation_defect(&jets.traj, &eqs.table, &jets.reconstructed)?;
    let passed = max_residual <= tol && defect <= tol;
    let times = traj.times();
    Ok(VerificationReport {
        max_residual,
        worst,
        prolongation_defect: defect,
        reconstructed: jets.reconstructed,
        horizon: (times[0], times[times.len() - 1]),
        samples: traj.len(),
        tol,
        passed,
    })
}

/// Eliminates momenta from phase-space functions through the pullbacks
/// `p = ∂L/∂ẋ`, `ṗ = ∂L/∂x` and substitutes parameter values.
#[derive(Debug, Clone)]
pub struct PhaseContext {
    table: SymbolTable,
    momenta: Substitution,
    params: Substitution,
}

impl PhaseContext {
    pub fn new(sys: &LagrangianSystem, params: &[(SymbolId, f64)]) -> Result<Self, CurveError> {
        let mut momenta = sys.momentum_pullbacks()?.substitution();
        momenta.extend(sys.constraint_substitution());
        Ok(PhaseContext { table: sys.table().clone(), momenta, params: parameter_substitution(params) })
    }

    /// For models without a Lagrangian: only parameters are substituted.
    pub fn without_lagrangian(table: &SymbolTable, params: &[(SymbolId, f64)]) -> Self {
        PhaseContext { table: table.clone(), momenta: Substitution::new(), params: parameter_substitution(params) }
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    /// `f` as a function of the jets.
    pub fn to_jets(&self, f: &SuperExpr) -> Result<SuperExpr, CurveError> {
        Ok(f.subst(&self.momenta)?.subst(&self.params)?)
    }

    /// Adds a `p_x` channel for every momentum with a pullback.
    pub fn attach_momenta<T: Real>(&self, traj: &Trajectory<T>) -> Result<Trajectory<T>, CurveError> {
        let t = &self.table;
        let ids: Vec<SymbolId> = (0..t.coordinate_count())
            .map(|a| t.momentum(a, 0))
            .filter(|p| self.momenta.contains_key(p) && traj.channel_index(t.name(*p)).is_none())
            .collect();
        let exprs = ids.iter().map(|p| self.to_jets(&SuperExpr::symbol(t, *p))).collect::<Result<Vec<_>, _>>()?;
        let jets = with_jets(traj, t, &exprs)?;
        let values = evaluate(&exprs, t, &jets.traj)?;
        let mut out = traj.clone();
        for (k, p) in ids.iter().enumerate() {
            out.add_channel(Channel::new(t.name(*p), t.parity(*p)), |i| Ok(values[i][k].clone()))?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantReport<T> {
    pub initial: GrassmannElement<T>,
    /// Largest spread (max − min) of any Grassmann component.
    pub drift: T,
    pub horizon: (T, T),
    pub tol: T,
    pub passed: bool,
}

/// Tests whether `f` (a function on T*M) stays constant along `traj` in
/// every Grassmann component.
pub fn check_constant<T: Real>(
    f: &SuperExpr,
    ctx: &PhaseContext,
    traj: &Trajectory<T>,
    tol: T,
) -> Result<ConstantReport<T>, CurveError> {
    if traj.is_empty() {
        return Err(CurveError::Schema("trajectory has no samples".into()));
    }
    let g = ctx.to_jets(f)?;
    let exprs = [g];
    let jets = with_jets(traj, &ctx.table, &exprs)?;
    let values = evaluate(&exprs, &ctx.table, &jets.traj)?;
    let mut range: BTreeMap<Blade, (T, T)> = BTreeMap::new();
    for row in &values {
        let v = &row[0];
        for b in Blade::all_with_parity(traj.q(), Parity::Even).into_iter().chain(Blade::all_with_parity(traj.q(), Parity::Odd)) {
            let c = v.component(b);
            let e = range.entry(b).or_insert((c, c));
            e.0 = e.0.min(c);
            e.1 = e.1.max(c);
        }
    }
    let drift = range.values().fold(T::zero(), |m, (lo, hi)| m.max(*hi - *lo));
    let times = traj.times();
    Ok(ConstantReport {
        initial: values[0][0].clone(),
        drift,
        horizon: (times[0], times[times.len() - 1]),
        tol,
        passed: drift <= tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericSymmetryReport<T> {
    /// Largest coefficient of `d_T X(φ)` per generator.
    pub residuals: Vec<(String, T)>,
    pub max_residual: T,
    pub tol: T,
    pub passed: bool,
}

/// Evaluates the lifted field on each generator along the trajectory, after
/// eliminating momenta through their pullbacks.
pub fn numeric_symmetry_check<T: Real>(
    field: &SuperVectorField,
    sys: &LagrangianSystem,
    ctx: &PhaseContext,
    traj: &Trajectory<T>,
    tol: T,
) -> Result<NumericSymmetryReport<T>, CurveError> {
    let lifted = lifted_residuals(sys, field)?;
    let exprs = lifted.iter().map(|(_, r)| ctx.to_jets(r)).collect::<Result<Vec<_>, _>>()?;
    let jets = with_jets(traj, &ctx.table, &exprs)?;
    let values = evaluate(&exprs, &ctx.table, &jets.traj)?;
    let mut residuals: Vec<(String, T)> = lifted.iter().map(|(n, _)| (n.clone(), T::zero())).collect();
    for row in &values {
        for (k, v) in row.iter().enumerate() {
            residuals[k].1 = residuals[k].1.max(v.max_abs());
        }
    }
    let max_residual = residuals.iter().fold(T::zero(), |m, (_, r)| m.max(*r));
    Ok(NumericSymmetryReport { residuals, max_residual, tol, passed: max_residual <= tol })
}
