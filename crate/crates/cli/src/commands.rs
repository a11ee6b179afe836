use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use smech_core::mech::{check_symmetry, normal_form, LagrangianSystem, NormalFormResult, SuperVectorField};
use smech_core::modelio::{
    model_hash, parse_grassmann, parse_model, parse_reparam, read_trajectory, render_grassmann, render_model,
    write_trajectory_csv, write_trajectory_json, ModelFile, TrajectoryFormat,
};
use smech_core::scurves::{
    check_constant, expand_system, integrate, numeric_symmetry_check, reparametrise, sample_solution, uniform_times,
    verify_solution, ComponentSystem, InitialState, PhaseContext, Reparametrisation, SolutionEquations, Trajectory,
};
use smech_core::superexpr::SymbolTable;
use smech_core::{Grassmann, SymbolId};

/// Writes a line to stdout; a closed pipe is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn emit(text: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

use crate::config::{Cli, Command, Format, ModelArgs, RunConfig};
use crate::Verdict;

pub fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::Tulczyjew { model } => dump(model, true),
        Command::El { model } => dump(model, false),
        Command::Solve { model, run, field, solution, constants } => solve(model, run, field.as_deref(), *solution, constants),
        Command::Verify { model, trajectory, tol, field } => verify(model, trajectory, *tol, field.as_deref()),
        Command::Symcheck { model, field, trajectory, tol } => symcheck(model, field, trajectory.as_deref(), *tol),
        Command::Reparam { trajectory, map, out, format } => reparam(trajectory, map, out.as_deref(), *format),
        Command::Constants { model, trajectory, exprs, tol } => constants(model, trajectory, exprs, *tol),
    }
}

fn load_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_model(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn system(m: &ModelFile, args: &ModelArgs) -> Result<LagrangianSystem> {
    let l = m.lagrangian.clone().ok_or_else(|| anyhow!("model '{}' has no lagrangian", m.name))?;
    let sys = LagrangianSystem::new(m.table.clone(), l)?;
    if args.constrained {
        if m.constraint.is_empty() {
            bail!("--constrained given but model '{}' declares no constraint", m.name);
        }
        Ok(sys.with_constraint(&m.constraint)?)
    } else {
        Ok(sys)
    }
}

fn field(m: &ModelFile, name: &str) -> Result<SuperVectorField> {
    let decl = m.field(name).ok_or_else(|| {
        let known: Vec<&str> = m.fields.iter().map(|f| f.name.as_str()).collect();
        anyhow!("model '{}' has no field '{name}' (fields: {})", m.name, known.join(", "))
    })?;
    Ok(SuperVectorField::new(&m.table, decl.parity, decl.components.clone())?)
}

fn normal_form_lines(nf: &NormalFormResult, table: &SymbolTable) -> Vec<String> {
    match nf {
        NormalFormResult::Explicit(nf) => nf.render_lines(table),
        NormalFormResult::Implicit(rep) => {
            let eqs: Vec<String> = rep.equations.iter().map(|i| format!("E_{}", table.coordinates()[*i].0)).collect();
            vec![format!("implicit ({}): {}", eqs.join(", "), rep.reason)]
        }
    }
}

fn section(out: &mut String, title: &str, lines: &[String]) {
    let _ = writeln!(out, "[{title}]");
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
}

fn dump(args: &ModelArgs, with_phase: bool) -> Result<Verdict> {
    let m = load_model(&args.model)?;
    let sys = system(&m, args)?;
    let t = sys.table();
    let mut out = String::new();
    if with_phase {
        section(&mut out, "tulczyjew", &sys.momentum_pullbacks()?.render_lines(t));
        let gens: Vec<String> = sys
            .phase_generators()?
            .named(t)
            .into_iter()
            .map(|(n, g)| format!("{n} = {}", smech_core::superexpr::render(&g, t)))
            .collect();
        section(&mut out, "generators", &gens);
    }
    section(&mut out, "euler-lagrange", &sys.render_euler_lagrange()?);
    let nf = normal_form(&sys.euler_lagrange()?, t);
    section(&mut out, "normal form", &normal_form_lines(&nf, t));
    emit(&out);
    Ok(Verdict::Pass)
}

/// `--init` bindings split by role.
struct Bindings {
    params: Vec<(SymbolId, f64)>,
    values: BTreeMap<SymbolId, Grassmann>,
}

fn bindings(m: &ModelFile, init: &[String], q: u32) -> Result<Bindings> {
    let mut params = m.params.clone();
    let mut values = BTreeMap::new();
    for item in init {
        let (name, text) = item.split_once('=').ok_or_else(|| anyhow!("--init expects SYMBOL=VALUE, got '{item}'"))?;
        let name = name.trim();
        let id = m.table.lookup(name).ok_or_else(|| anyhow!("--init: unknown symbol '{name}'"))?;
        if let Some(slot) = params.iter_mut().find(|(p, _)| *p == id) {
            slot.1 = text.trim().parse().map_err(|_| anyhow!("--init: parameter '{name}' needs a real value, got '{text}'"))?;
            continue;
        }
        let g = parse_grassmann(text, Some(q)).map_err(|e| anyhow!("--init {name}: {e}"))?;
        if values.insert(id, g).is_some() {
            bail!("--init: '{name}' given twice");
        }
    }
    Ok(Bindings { params, values })
}

fn write_output(traj: &Trajectory, out: Option<&Path>, format: Option<Format>) -> Result<()> {
    let format = format.unwrap_or_else(|| match out.map(TrajectoryFormat::from_path) {
        Some(TrajectoryFormat::Csv) => Format::Csv,
        _ => Format::Json,
    });
    let text = match format {
        Format::Csv => write_trajectory_csv(traj),
        Format::Json => write_trajectory_json(traj),
        Format::Text => render_text(traj),
    };
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            emit(&text);
            Ok(())
        }
    }
}

fn render_text(traj: &Trajectory) -> String {
    let mut s = String::new();
    for i in 0..traj.len() {
        let _ = writeln!(s, "t = {:e}", traj.times()[i]);
        for (c, v) in traj.channels().iter().zip(traj.sample(i)) {
            let _ = writeln!(s, "  {} = {}", c.name, render_grassmann(v));
        }
    }
    s
}

fn equations(m: &ModelFile, args: &ModelArgs, params: &[(SymbolId, f64)], field_name: Option<&str>) -> Result<SolutionEquations> {
    match field_name {
        Some(name) => Ok(SolutionEquations::field(&field(m, name)?, &m.table, params)?),
        None => Ok(SolutionEquations::euler_lagrange(&system(m, args)?, params)?),
    }
}

fn phase_context(m: &ModelFile, args: &ModelArgs, params: &[(SymbolId, f64)]) -> Result<PhaseContext> {
    if m.lagrangian.is_some() {
        Ok(PhaseContext::new(&system(m, args)?, params)?)
    } else {
        Ok(PhaseContext::without_lagrangian(&m.table, params))
    }
}

fn solve(args: &ModelArgs, run: &RunConfig, field_name: Option<&str>, closed: bool, consts: &[String]) -> Result<Verdict> {
    let m = load_model(&args.model)?;
    if !run.dt.is_finite() || run.dt <= 0.0 {
        bail!("--dt must be positive");
    }
    if run.t0.is_nan() || run.t1.is_nan() || run.t1 <= run.t0 {
        bail!("--t1 must exceed --t0");
    }
    Grassmann::zero(run.q)?;
    if m.lagrangian.is_none() && field_name.is_none() {
        bail!("model '{}' has no lagrangian; pass --field to integrate a vector field", m.name);
    }
    let b = bindings(&m, &run.init, run.q)?;
    let nf = match (&m.lagrangian, field_name) {
        (Some(_), None) => {
            let sys = system(&m, args)?;
            Some(normal_form(&sys.euler_lagrange()?, sys.table()))
        }
        _ => None,
    };
    let mut traj = if closed {
        let sol = m.solution.as_ref().ok_or_else(|| anyhow!("model '{}' has no solution block", m.name))?;
        let orders = match nf.as_ref() {
            Some(NormalFormResult::Explicit(nf)) => nf.orders.clone(),
            Some(NormalFormResult::Implicit(_)) => vec![2; m.table.coordinate_count()],
            None => vec![1; m.table.coordinate_count()],
        };
        for id in b.values.keys() {
            if !sol.constants.contains(id) {
                bail!("--init: '{}' is not a constant of the solution block", m.table.name(*id));
            }
        }
        let steps = ((run.t1 - run.t0) / run.dt).round() as usize;
        let times = uniform_times(run.t0, run.t1, steps.max(1));
        sample_solution(sol, &m.table, &b.params, &b.values, run.q, &orders, &times)?
    } else {
        let sys = match (nf.as_ref(), field_name) {
            (Some(nf), _) => expand_system(nf, &m.table, &b.params, run.q).map_err(|e| match e {
                smech_core::scurves::CurveError::Implicit(msg) => {
                    anyhow!("{msg}; use `smech verify` with a trajectory from another source")
                }
                e => e.into(),
            })?,
            (None, Some(name)) => ComponentSystem::from_field(&field(&m, name)?, &m.table, &b.params, run.q)?,
            (None, None) => unreachable!("checked above"),
        };
        let state: Vec<SymbolId> = sys.variables().into_iter().map(|(s, _)| s).collect();
        let init: InitialState<f64> = b.values;
        for id in init.keys() {
            if !state.contains(id) {
                bail!("--init: '{}' is not part of the integrated state", m.table.name(*id));
            }
        }
        integrate(&sys, &init, run.t0, run.t1, run.dt)?
    };
    traj.meta.model_hash = Some(model_hash(&render_model(&m)));
    if closed {
        traj.meta.dt = None;
    }

    let mut verdict = Verdict::Pass;
    let mut summary = String::new();
    let _ = writeln!(summary, "model {} (q = {}, {} samples)", m.name, traj.q(), traj.len());
    if nf.is_some() || field_name.is_some() {
        let eqs = equations(&m, args, &b.params, field_name)?;
        let rep = verify_solution(&eqs, &traj, run.tol)?;
        for l in rep.render_lines() {
            let _ = writeln!(summary, "{l}");
        }
        if !rep.passed {
            verdict = Verdict::Fail;
        }
    }
    if !consts.is_empty() {
        let ctx = phase_context(&m, args, &b.params)?;
        for text in consts {
            let f = m.parse_expr(text).map_err(|e| anyhow!("--constant '{text}': {e}"))?;
            let rep = check_constant(&f, &ctx, &traj, run.tol)?;
            let _ = writeln!(
                summary,
                "constant {text}: drift {:.3e} (tol {:.1e}) {}",
                rep.drift,
                rep.tol,
                if rep.passed { "PASS" } else { "FAIL" }
            );
            if !rep.passed {
                verdict = Verdict::Fail;
            }
        }
    }
    match (run.out.as_deref(), run.format) {
        (None, None) => {}
        (out, format) => write_output(&traj, out, format)?,
    }
    if run.out.is_some() || run.format.is_none() {
        emit(&summary);
    } else {
        eprint!("{summary}");
    }
    Ok(verdict)
}

fn load_trajectory(path: &Path) -> Result<Trajectory> {
    read_trajectory(path).with_context(|| format!("cannot load trajectory {}", path.display()))
}

fn verify(args: &ModelArgs, path: &Path, tol: f64, field_name: Option<&str>) -> Result<Verdict> {
    let m = load_model(&args.model)?;
    let traj = load_trajectory(path)?;
    let eqs = equations(&m, args, &m.params, field_name)?;
    let rep = verify_solution(&eqs, &traj, tol)?;
    for l in rep.render_lines() {
        say!("{l}");
    }
    Ok(if rep.passed { Verdict::Pass } else { Verdict::Fail })
}

fn symcheck(args: &ModelArgs, name: &str, path: Option<&Path>, tol: f64) -> Result<Verdict> {
    let m = load_model(&args.model)?;
    let sys = system(&m, args)?;
    let x = field(&m, name)?;
    let rep = check_symmetry(&sys, &x)?;
    say!("[symbolic]");
    for l in rep.render_lines(sys.table()) {
        say!("{l}");
    }
    if !rep.fully_reduced {
        say!("note: no explicit normal form; reduced on the momenta only");
    }
    say!("{}", if rep.passed { "PASS" } else { "FAIL" });
    let mut passed = rep.passed;
    if let Some(path) = path {
        let traj = load_trajectory(path)?;
        let ctx = PhaseContext::new(&sys, &m.params)?;
        let num = numeric_symmetry_check(&x, &sys, &ctx, &traj, tol)?;
        say!("[numeric]");
        for (n, r) in &num.residuals {
            say!("{n}: {r:.3e}");
        }
        say!("max residual {:.3e} (tol {:.1e}) {}", num.max_residual, num.tol, if num.passed { "PASS" } else { "FAIL" });
        passed &= num.passed;
    }
    Ok(if passed { Verdict::Pass } else { Verdict::Fail })
}

fn reparam(path: &Path, map: &Path, out: Option<&Path>, format: Option<Format>) -> Result<Verdict> {
    let traj = load_trajectory(path)?;
    let text = fs::read_to_string(map).with_context(|| format!("cannot read {}", map.display()))?;
    let (images, target_q) = parse_reparam(&text).map_err(|e| anyhow!("{}:{e}", map.display()))?;
    let psi = Reparametrisation::new(images, target_q)?;
    let mut mapped = reparametrise(&traj, &psi)?;
    mapped.meta = traj.meta.clone();
    write_output(&mapped, out, format)?;
    Ok(Verdict::Pass)
}

fn constants(args: &ModelArgs, path: &Path, exprs: &[String], tol: f64) -> Result<Verdict> {
    let m = load_model(&args.model)?;
    let traj = load_trajectory(path)?;
    let ctx = phase_context(&m, args, &m.params)?;
    let mut passed = true;
    for text in exprs {
        let f = m.parse_expr(text).map_err(|e| anyhow!("--expr '{text}': {e}"))?;
        let rep = check_constant(&f, &ctx, &traj, tol)?;
        say!(
            "{text}: initial {} drift {:.3e} over [{}, {}] (tol {:.1e}) {}",
            render_grassmann(&rep.initial),
            rep.drift,
            rep.horizon.0,
            rep.horizon.1,
            rep.tol,
            if rep.passed { "PASS" } else { "FAIL" }
        );
        passed &= rep.passed;
    }
    Ok(if passed { Verdict::Pass } else { Verdict::Fail })
}
