//! Acceptance criteria, one report line each. Run with
//! `cargo test --test acceptance`; the lines are written straight to stdout
//! so they show up without `--nocapture`.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use smech_core::mech::{
    alpha_inv, alpha_map, check_symmetry, normal_form, tangent_lift, LagrangianSystem, NormalFormResult, SuperVectorField,
};
use smech_core::modelio::{parse_model, ModelFile};
use smech_core::scurves::{
    check_constant, expand_system, integrate, numeric_symmetry_check, reparametrise, sample_solution, uniform_times,
    verify_solution, ComponentSystem, InitialState, PhaseContext, Reparametrisation, SolutionEquations, Trajectory,
};
use smech_core::superexpr::{eval_at, Bindings, FuncKind};
use smech_core::{Blade, Grassmann, GrassmannElement, Parity, SuperExpr, SymbolTable};

// Pinned tolerances and budgets.
const DUMP_BUDGET: Duration = Duration::from_secs(1);
const DIRAC_BUDGET: Duration = Duration::from_secs(5);
const DIRAC_DEVIATION: f64 = 1e-8;
const DIRAC_RESIDUAL: f64 = 1e-8;
const DIRAC_CHARGE_DRIFT: f64 = 1e-9;
const ROTATION_DEVIATION: f64 = 1e-8;
const PROJECTION_DEVIATION: f64 = 1e-12;
const N2_DEVIATION: f64 = 1e-6;
const N2_NUMERIC_SYMMETRY: f64 = 1e-7;
const PSI_MINUS_DRIFT: f64 = 1e-12;
const SPHERE_VERIFY: f64 = 1e-9;
const SPHERE_MOMENTUM_DRIFT: f64 = 1e-9;
const SPHERE_GEODESIC: f64 = 1e-9;
const LEIBNIZ: f64 = 1e-12;
const LIFT_BRACKET: f64 = 1e-9;
const RK4_FACTOR: (f64, f64) = (12.0, 20.0);
const EMBEDDING: f64 = 1e-12;
const SUITE_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model(name: &str) -> ModelFile {
    let text = std::fs::read_to_string(root().join("models").join(name)).unwrap();
    parse_model(&text).unwrap()
}

fn lagrangian(m: &ModelFile, constrained: bool) -> LagrangianSystem {
    let sys = LagrangianSystem::new(m.table.clone(), m.lagrangian.clone().unwrap()).unwrap();
    if constrained {
        sys.with_constraint(&m.constraint).unwrap()
    } else {
        sys
    }
}

fn components(m: &ModelFile, sys: &LagrangianSystem, q: u32) -> ComponentSystem {
    let nf = normal_form(&sys.euler_lagrange().unwrap(), &m.table);
    expand_system(&nf, &m.table, &m.params, q).unwrap()
}

fn g(q: u32, terms: &[(u32, f64)]) -> Grassmann {
    GrassmannElement::from_terms(q, terms.iter().map(|(b, c)| (Blade(*b), *c))).unwrap()
}

fn state(m: &ModelFile, values: &[(&str, Grassmann)]) -> InitialState<f64> {
    values.iter().map(|(n, v)| (m.table.lookup(n).unwrap(), v.clone())).collect()
}

fn constants(m: &ModelFile, values: &[(&str, Grassmann)]) -> BTreeMap<smech_core::SymbolId, Grassmann> {
    values.iter().map(|(n, v)| (m.table.lookup(n).unwrap(), v.clone())).collect()
}

/// Closed-form samples at the trajectory's own times.
fn closed_form(m: &ModelFile, consts: &[(&str, Grassmann)], q: u32, orders: &[u8], times: &[f64]) -> Trajectory {
    sample_solution(m.solution.as_ref().unwrap(), &m.table, &m.params, &constants(m, consts), q, orders, times).unwrap()
}

// 1 ─ symbolic dumps

/// Pullback lines as printed in the source, transcribed into the renderer's
/// canonical term order.
const DIRAC_LINES: [&str; 4] =
    ["p_psi_p = -0.5*psi_p", "p_psi_m = -0.5*psi_m", "dp_psi_p = 0.5*dpsi_p - m*psi_m", "dp_psi_m = 0.5*dpsi_m + m*psi_p"];
const N2_LINES: [&str; 6] = [
    "p_x = dx",
    "p_psi_p = 0.5*psi_p",
    "p_psi_m = -0.5*psi_m",
    "dp_x = U(x)*U1(x) + U2(x)*psi_p*psi_m",
    "dp_psi_p = -0.5*dpsi_p + U1(x)*psi_m",
    "dp_psi_m = 0.5*dpsi_m - U1(x)*psi_p",
];
const CONSTRAINED_LINES: [&str; 4] =
    ["p_x = dx", "p_psi_p = 0.5*psi_p", "dp_x = -U1(x)*psi_p*psi_m", "dp_psi_p = -0.5*dpsi_p - U(x)*psi_m"];
/// `p_psi_m` carries the computed sign (the printed block has the opposite
/// one); the remaining lines are as printed.
const SPHERE_LINES: [&str; 8] = [
    "p_theta = dtheta",
    "p_phi = sin(theta)^2*dphi",
    "p_psi_p = -dpsi_m",
    "p_psi_m = dpsi_p",
    "dp_theta = cos(theta)*sin(theta)*dphi^2",
    "dp_phi = 0",
    "dp_psi_p = 0",
    "dp_psi_m = 0",
];

fn tulczyjew_section(dump: &str) -> Vec<&str> {
    dump.lines().skip_while(|l| *l != "[tulczyjew]").skip(1).take_while(|l| !l.starts_with('[')).collect()
}

fn criterion_1() -> Outcome {
    let cases: [(&str, bool, &str, &[&str]); 4] = [
        ("dirac.sm", false, "dirac.tulczyjew", &DIRAC_LINES),
        ("n2.sm", false, "n2.tulczyjew", &N2_LINES),
        ("constrained.sm", true, "constrained.tulczyjew", &CONSTRAINED_LINES),
        ("supersphere.sm", false, "supersphere.tulczyjew", &SPHERE_LINES),
    ];
    let mut slowest = Duration::ZERO;
    for (m, constrained, fixture, lines) in cases {
        let path = root().join("models").join(m);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_smech"));
        cmd.arg("tulczyjew").arg(&path);
        if constrained {
            cmd.arg("--constrained");
        }
        let start = Instant::now();
        let out = cmd.output().map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        check(out.status.success(), format!("{m}: exit {:?}", out.status.code()))?;
        let dump = String::from_utf8(out.stdout).unwrap();
        let expected = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(fixture)).unwrap();
        check(dump == expected, format!("{m}: dump differs from {fixture}"))?;
        check(tulczyjew_section(&dump) == lines, format!("{m}: pullbacks {:?}", tulczyjew_section(&dump)))?;
    }
    check(slowest < DUMP_BUDGET, format!("slowest dump {slowest:?}"))?;
    Ok(format!("4 models match fixtures and transcribed pullbacks; slowest dump {:.0} ms", slowest.as_secs_f64() * 1e3))
}

// 2 ─ Dirac

fn dirac_run(dt: f64) -> (ModelFile, Trajectory) {
    let m = model("dirac.sm");
    let sys = lagrangian(&m, false);
    let init = state(&m, &[("psi_p", g(2, &[(1, 1.0)])), ("psi_m", g(2, &[(2, 1.0)]))]);
    let traj = integrate(&components(&m, &sys, 2), &init, 0.0, 10.0, dt).unwrap();
    (m, traj)
}

fn dirac_deviation(m: &ModelFile, traj: &Trajectory) -> f64 {
    let exact = closed_form(m, &[("A", g(2, &[(1, 1.0)])), ("B", g(2, &[(2, 1.0)]))], 2, &[1, 1], traj.times());
    traj.max_deviation(&exact).unwrap()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (m, traj) = dirac_run(1e-3);
    let deviation = dirac_deviation(&m, &traj);
    let sys = lagrangian(&m, false);
    let report = verify_solution(&SolutionEquations::euler_lagrange(&sys, &m.params).unwrap(), &traj, DIRAC_RESIDUAL).unwrap();
    let ctx = PhaseContext::new(&sys, &m.params).unwrap();
    let charge = check_constant(&m.parse_expr("psi_p*psi_m").unwrap(), &ctx, &traj, DIRAC_CHARGE_DRIFT).unwrap();
    let elapsed = start.elapsed();
    check(deviation <= DIRAC_DEVIATION, format!("deviation {deviation:e}"))?;
    check(report.passed, format!("residual {:e}, defect {:e}", report.max_residual, report.prolongation_defect))?;
    check(charge.passed, format!("charge drift {:e}", charge.drift))?;
    check(elapsed < DIRAC_BUDGET, format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "deviation {deviation:.1e}, residual {:.1e}, prolongation defect {:.1e}, charge drift {:.1e}, {:.2} s",
        report.max_residual,
        report.prolongation_defect,
        charge.drift,
        elapsed.as_secs_f64()
    ))
}

// 3 ─ rotation

fn rotation_run(q: u32, a: &[f64; 4], b: &[f64; 4]) -> Trajectory {
    let m = model("rotation.sm");
    let decl = m.field("X").unwrap();
    let field = SuperVectorField::new(&m.table, decl.parity, decl.components.clone()).unwrap();
    let sys = ComponentSystem::from_field(&field, &m.table, &m.params, q).unwrap();
    let blades = Blade::all_with_parity(q, Parity::Odd);
    let odd = |c: &[f64; 4]| {
        // ζ1, ζ2, ζ3, ζ1ζ2ζ3 in that order, truncated to Λ_q
        let wanted = [0b001u32, 0b010, 0b100, 0b111];
        GrassmannElement::from_terms(
            q,
            wanted.iter().zip(c).filter(|(w, _)| blades.contains(&Blade(**w))).map(|(w, v)| (Blade(*w), *v)),
        )
        .unwrap()
    };
    integrate(&sys, &state(&m, &[("th_p", odd(a)), ("th_m", odd(b))]), 0.0, 10.0, 1e-3).unwrap()
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut draw = || -> [f64; 4] { std::array::from_fn(|_| rng.gen_range(-1.0..1.0)) };
    let (a, b) = (draw(), draw());
    let traj = rotation_run(3, &a, &b);
    let last = traj.len() - 1;
    let t = traj.times()[last];
    let (p, mi) = (traj.channel_index("th_p").unwrap(), traj.channel_index("th_m").unwrap());
    let mut worst = 0.0f64;
    for (k, blade) in [0b001u32, 0b010, 0b100, 0b111].into_iter().enumerate() {
        let plus = a[k] * t.cos() + b[k] * t.sin();
        let minus = b[k] * t.cos() - a[k] * t.sin();
        worst = worst.max((traj.value(last, p).component(Blade(blade)) - plus).abs());
        worst = worst.max((traj.value(last, mi).component(Blade(blade)) - minus).abs());
    }
    check(worst <= ROTATION_DEVIATION, format!("expansion deviation {worst:e} at t = {t}"))?;
    let projected = reparametrise(&traj, &Reparametrisation::projection(3, 2).unwrap()).unwrap();
    let reduced = rotation_run(2, &[a[0], a[1], 0.0, 0.0], &[b[0], b[1], 0.0, 0.0]);
    let gap = projected.max_deviation(&reduced).unwrap();
    check(gap <= PROJECTION_DEVIATION, format!("projection gap {gap:e}"))?;
    Ok(format!("expansion deviation {worst:.1e} at t = {t}, projection gap {gap:.1e}"))
}

// 4 ─ N=2 harmonic

fn criterion_4() -> Outcome {
    let m = model("n2_harmonic.sm");
    let sys = lagrangian(&m, false);
    let (a, b) = (g(2, &[(0, 0.8), (3, 0.3)]), g(2, &[(0, -0.4), (3, 0.1)]));
    let (sa, sb) = (g(2, &[(1, 0.5), (2, -0.2)]), g(2, &[(1, 0.1), (2, 0.7)]));
    let init = state(&m, &[("x", a.clone()), ("dx", b.clone()), ("psi_p", sa.clone()), ("psi_m", sb.clone())]);
    let traj = integrate(&components(&m, &sys, 2), &init, 0.0, 3.0, 1e-4).unwrap();
    let exact = closed_form(&m, &[("a", a), ("b", b), ("A", sa), ("B", sb)], 2, &[2, 1, 1], traj.times());
    let deviation = traj.max_deviation(&exact).unwrap();
    check(deviation <= N2_DEVIATION, format!("deviation {deviation:e}"))?;
    let ctx = PhaseContext::new(&sys, &m.params).unwrap();
    let mut numeric = 0.0f64;
    for name in ["X1", "X2"] {
        let decl = m.field(name).unwrap();
        let x = SuperVectorField::new(&m.table, decl.parity, decl.components.clone()).unwrap();
        let sym = check_symmetry(&sys, &x).unwrap();
        check(sym.passed && sym.fully_reduced, format!("{name} symbolic: {:?}", sym.render_lines(&m.table)))?;
        let num = numeric_symmetry_check(&x, &sys, &ctx, &traj, N2_NUMERIC_SYMMETRY).unwrap();
        check(num.passed, format!("{name} numeric residual {:e}", num.max_residual))?;
        numeric = numeric.max(num.max_residual);
    }
    let decl = m.field("T").unwrap();
    let t = SuperVectorField::new(&m.table, decl.parity, decl.components.clone()).unwrap();
    let control = check_symmetry(&sys, &t).unwrap();
    check(!control.passed, "translation passed the symmetry check")?;
    Ok(format!("deviation {deviation:.1e}, X1/X2 symbolic zero, numeric {numeric:.1e}, translation rejected"))
}

// 5 ─ constrained model

fn criterion_5() -> Outcome {
    let formal = model("constrained.sm");
    let sys = lagrangian(&formal, true);
    let pulled = sys.momentum_pullbacks().unwrap().render_lines(&formal.table);
    check(pulled == CONSTRAINED_LINES, format!("constrained pullbacks {pulled:?}"))?;
    let nf = match normal_form(&sys.euler_lagrange().unwrap(), &formal.table) {
        NormalFormResult::Explicit(nf) => nf.render_lines(&formal.table),
        NormalFormResult::Implicit(r) => return Err(r.reason),
    };
    let printed = ["ddx = -U1(x)*psi_p*psi_m", "dpsi_p = -U(x)*psi_m", "dpsi_m = 0"];
    check(nf == printed, format!("normal form {nf:?}"))?;

    let m = model("constrained_linear.sm");
    let sys = lagrangian(&m, true);
    let init = state(
        &m,
        &[
            ("x", g(2, &[(0, 0.3)])),
            ("dx", g(2, &[(0, 0.5)])),
            ("psi_p", g(2, &[(1, 1.0)])),
            ("psi_m", g(2, &[(1, 0.4), (2, -0.6)])),
        ],
    );
    let traj = integrate(&components(&m, &sys, 2), &init, 0.0, 10.0, 1e-3).unwrap();
    let c = traj.channel_index("psi_m").unwrap();
    let mut drift = 0.0f64;
    for i in 0..traj.len() {
        drift = drift.max(traj.value(i, c).try_sub(traj.value(0, c)).unwrap().max_abs());
    }
    check(drift <= PSI_MINUS_DRIFT, format!("psi_m drift {drift:e}"))?;
    Ok(format!("pullbacks and 3 equations match; psi_m drift {drift:.1e}"))
}

// 6 ─ super-sphere

fn criterion_6() -> Outcome {
    let m = model("supersphere.sm");
    let sys = lagrangian(&m, false);
    let l = g(2, &[(0, 0.7), (3, 0.2)]);
    let times = uniform_times(0.0, 10.0, 1000);
    let particular = closed_form(&m, &[("l", l), ("A", g(2, &[(1, 1.0)])), ("B", g(2, &[(2, 1.0)]))], 2, &[2, 2, 2, 2], &times);
    let report =
        verify_solution(&SolutionEquations::euler_lagrange(&sys, &m.params).unwrap(), &particular, SPHERE_VERIFY).unwrap();
    check(
        report.passed,
        format!("particular solution: residual {:e}, defect {:e}", report.max_residual, report.prolongation_defect),
    )?;
    let ctx = PhaseContext::new(&sys, &m.params).unwrap();
    let p_phi = m.parse_expr("p_phi").unwrap();
    let on_particular = check_constant(&p_phi, &ctx, &particular, SPHERE_MOMENTUM_DRIFT).unwrap();
    check(on_particular.passed, format!("p_phi drift {:e} on the particular solution", on_particular.drift))?;

    let half_pi = std::f64::consts::FRAC_PI_2;
    let run =
        |q: u32, values: &[(&str, Grassmann)]| integrate(&components(&m, &sys, q), &state(&m, values), 0.0, 10.0, 1e-3).unwrap();
    let tilted = run(
        2,
        &[
            ("theta", g(2, &[(0, 1.0)])),
            ("dtheta", g(2, &[(0, 0.1)])),
            ("dphi", g(2, &[(0, 0.7), (3, 0.05)])),
            ("dpsi_p", g(2, &[(1, 1.0)])),
            ("dpsi_m", g(2, &[(2, -0.5)])),
        ],
    );
    let on_tilted = check_constant(&p_phi, &ctx, &tilted, SPHERE_MOMENTUM_DRIFT).unwrap();
    check(on_tilted.passed, format!("p_phi drift {:e} off the equator", on_tilted.drift))?;
    let odd = tilted.channel_index("psi_p").unwrap();
    let odd_size = tilted.value(tilted.len() - 1, odd).max_abs();
    check(odd_size > 1.0, format!("odd component stayed at {odd_size:e}"))?;

    let classical = run(0, &[("theta", g(0, &[(0, half_pi)])), ("dphi", g(0, &[(0, 0.7)]))]);
    let (th, ph) = (classical.channel_index("theta").unwrap(), classical.channel_index("phi").unwrap());
    let mut geodesic = 0.0f64;
    for i in 0..classical.len() {
        let t = classical.times()[i];
        geodesic = geodesic.max((classical.value(i, th).body() - half_pi).abs());
        geodesic = geodesic.max((classical.value(i, ph).body() - 0.7 * t).abs());
    }
    check(geodesic <= SPHERE_GEODESIC, format!("equator deviation {geodesic:e}"))?;
    Ok(format!(
        "particular residual {:.1e}, p_phi drift {:.1e} / {:.1e}, |psi_p(10)| = {odd_size:.2}, equator deviation {geodesic:.1e}",
        report.max_residual, on_particular.drift, on_tilted.drift
    ))
}

// 7 ─ property suites

type Exact = GrassmannElement<Ratio<i64>>;

fn exact(rng: &mut StdRng, q: u32, parity: Option<Parity>) -> Exact {
    let n = rng.gen_range(0..8);
    let terms: Vec<(Blade, Ratio<i64>)> =
        (0..n).map(|_| (Blade(rng.gen_range(0..1u32 << q)), Ratio::new(rng.gen_range(-6..=6), rng.gen_range(1..=4)))).collect();
    let e = Exact::from_terms(q, terms).unwrap();
    match parity {
        Some(p) => e.parity_part(p),
        None => e,
    }
}

fn grassmann_laws(rng: &mut StdRng) -> Result<(), String> {
    for case in 0..1000 {
        let q = rng.gen_range(0..=6);
        let (a, b, c) = (exact(rng, q, None), exact(rng, q, None), exact(rng, q, None));
        check(
            a.try_mul(&b).unwrap().try_mul(&c).unwrap() == a.try_mul(&b.try_mul(&c).unwrap()).unwrap(),
            format!("associativity, case {case}"),
        )?;
        let (pa, pb) = (if rng.gen() { Parity::Odd } else { Parity::Even }, if rng.gen() { Parity::Odd } else { Parity::Even });
        let (ha, hb) = (a.parity_part(pa), b.parity_part(pb));
        let ba = hb.try_mul(&ha).unwrap();
        let expected = if pa.is_odd() && pb.is_odd() { -ba } else { ba };
        check(ha.try_mul(&hb).unwrap() == expected, format!("graded commutativity, case {case}"))?;
        let odd = c.parity_part(Parity::Odd);
        check(odd.try_mul(&odd).unwrap().is_zero(), format!("odd square, case {case}"))?;
        check(a.soul().powi(q as i32 + 1).unwrap().is_zero(), format!("nilpotent soul, case {case}"))?;
    }
    Ok(())
}

const NAMES: [&str; 7] = ["x", "y", "a", "b", "dx", "p_a", "k"];

fn expr_table() -> SymbolTable {
    let coords = [("x", Parity::Even), ("y", Parity::Even), ("a", Parity::Odd), ("b", Parity::Odd)];
    SymbolTable::for_chart(&coords.map(|(n, p)| (n.to_string(), p)), &["k".into()]).unwrap()
}

fn random_expr(rng: &mut StdRng, t: &SymbolTable, depth: u32) -> SuperExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.7) {
            SuperExpr::symbol(t, t.lookup(NAMES[rng.gen_range(0..NAMES.len())]).unwrap())
        } else {
            SuperExpr::constant(rng.gen_range(-3..=3) as f64)
        };
    }
    match rng.gen_range(0..3) {
        0 => &random_expr(rng, t, depth - 1) + &random_expr(rng, t, depth - 1),
        1 => &random_expr(rng, t, depth - 1) * &random_expr(rng, t, depth - 1),
        _ => {
            let kind = FuncKind::from_builtin(["sin", "cos", "exp"][rng.gen_range(0..3)]).unwrap();
            let arg = random_expr(rng, t, depth - 1).parity_part(Parity::Even).scale(0.5);
            SuperExpr::func(kind, arg).unwrap()
        }
    }
}

fn random_point(rng: &mut StdRng, t: &SymbolTable, q: u32) -> Bindings<f64> {
    let mut b = Bindings::new(q);
    for id in t.ids() {
        let blades = Blade::all_with_parity(q, t.parity(id));
        b.bind(id, GrassmannElement::from_terms(q, blades.into_iter().map(|bl| (bl, rng.gen_range(-1.0..1.0)))).unwrap());
    }
    b
}

fn gap(t: &SymbolTable, at: &Bindings<f64>, l: &SuperExpr, r: &SuperExpr) -> f64 {
    let (lv, rv) = (eval_at(l, at, t).unwrap(), eval_at(r, at, t).unwrap());
    lv.try_sub(&rv).unwrap().max_abs() / 1.0f64.max(lv.max_abs()).max(rv.max_abs())
}

fn superexpr_laws(rng: &mut StdRng) -> Result<f64, String> {
    let t = expr_table();
    let (alpha, alpha_back) = (alpha_map(&t), alpha_inv(&t));
    let mut worst = 0.0f64;
    for case in 0..200 {
        let (f, h) = (random_expr(rng, &t, 4), random_expr(rng, &t, 4));
        let at = random_point(rng, &t, 3);
        let s = t.lookup(NAMES[rng.gen_range(0..NAMES.len())]).unwrap();
        let ps = t.parity(s);
        for pf in [Parity::Even, Parity::Odd] {
            let fp = f.parity_part(pf);
            let lhs = (&fp * &h).partial(s, ps);
            let rhs = &(&fp.partial(s, ps) * &h) + &(&fp * &h.partial(s, ps)).scale(ps.koszul_sign(pf));
            worst = worst.max(gap(&t, &at, &lhs, &rhs));
        }
        for odd in ["a", "b", "p_a"] {
            let o = t.lookup(odd).unwrap();
            let twice = f.partial(o, Parity::Odd).partial(o, Parity::Odd);
            worst = worst.max(gap(&t, &at, &twice, &SuperExpr::zero()));
        }
        check(f.subst(&alpha_back).unwrap().subst(&alpha).unwrap() == f, format!("alpha round trip, case {case}"))?;
    }
    check(worst <= LEIBNIZ, format!("Leibniz / dodd² gap {worst:e}"))?;
    Ok(worst)
}

fn random_field(rng: &mut StdRng, t: &SymbolTable) -> SuperVectorField {
    let parity = if rng.gen() { Parity::Odd } else { Parity::Even };
    let poly = |rng: &mut StdRng, p: Parity| {
        let mut out = SuperExpr::zero();
        for _ in 0..rng.gen_range(0..4) {
            let mut term = SuperExpr::constant(rng.gen_range(-3..=3) as f64);
            term = &term * &SuperExpr::symbol(t, t.lookup("x").unwrap()).powi(rng.gen_range(0..3)).unwrap();
            for odd in ["a", "b"] {
                if rng.gen() {
                    term = &term * &SuperExpr::symbol(t, t.lookup(odd).unwrap());
                }
            }
            out = &out + &term;
        }
        out.parity_part(p)
    };
    let comps: Vec<_> = ["x", "a", "b"]
        .into_iter()
        .map(|n| {
            let s = t.lookup(n).unwrap();
            let p = if t.parity(s) == parity { Parity::Even } else { Parity::Odd };
            (s, poly(rng, p))
        })
        .collect();
    SuperVectorField::new(t, parity, comps).unwrap()
}

fn lift_brackets(rng: &mut StdRng) -> Result<f64, String> {
    let t = expr_table();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (x, y) = (random_field(rng, &t), random_field(rng, &t));
        let lhs = tangent_lift(&x.bracket(&y, &t).unwrap(), &t).unwrap();
        let rhs = tangent_lift(&x, &t).unwrap().bracket(&tangent_lift(&y, &t).unwrap(), &t).unwrap();
        let at = random_point(rng, &t, 2);
        let targets: std::collections::BTreeSet<_> = lhs.components().chain(rhs.components()).map(|(s, _)| s).collect();
        for s in targets {
            worst = worst.max(gap(&t, &at, &lhs.component(s), &rhs.component(s)));
        }
    }
    check(worst <= LIFT_BRACKET, format!("lift bracket gap {worst:e}"))?;
    Ok(worst)
}

fn embedding(rng: &mut StdRng) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let q = rng.gen_range(0..=6);
        let q2 = q + rng.gen_range(0..=3);
        let float = |e: &Exact| {
            GrassmannElement::from_terms(q, e.terms().map(|(b, c)| (b, *c.numer() as f64 / *c.denom() as f64))).unwrap()
        };
        let (a, b) = (float(&exact(rng, q, None)), float(&exact(rng, q, None)));
        let l = a.try_mul(&b).unwrap().embed(q2).unwrap();
        let r = a.embed(q2).unwrap().try_mul(&b.embed(q2).unwrap()).unwrap();
        worst = worst.max(l.try_sub(&r).unwrap().max_abs());
    }
    check(worst <= EMBEDDING, format!("embedding gap {worst:e}"))?;
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    grassmann_laws(&mut rng)?;
    let leibniz = superexpr_laws(&mut rng)?;
    let lift = lift_brackets(&mut rng)?;
    let (m, coarse) = dirac_run(0.1);
    let (_, fine) = dirac_run(0.05);
    let factor = dirac_deviation(&m, &coarse) / dirac_deviation(&m, &fine);
    check((RK4_FACTOR.0..=RK4_FACTOR.1).contains(&factor), format!("RK4 order factor {factor}"))?;
    let embed = embedding(&mut rng)?;
    Ok(format!(
        "1000 exact Grassmann cases, Leibniz/dodd² {leibniz:.1e}, alpha round trip, lift bracket {lift:.1e}, RK4 factor {factor:.2}, embedding {embed:.1e}"
    ))
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let criteria: [Criterion; 7] = [
        ("symbolic dumps", criterion_1),
        ("Dirac dynamics", criterion_2),
        ("rotation and projection", criterion_3),
        ("N=2 harmonic", criterion_4),
        ("constrained model", criterion_5),
        ("super-sphere", criterion_6),
        ("property suites", criterion_7),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (verdict, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed.push(i + 1);
                ("FAIL", d)
            }
        };
        let _ = writeln!(out, "acceptance {} {name}: {verdict} ({detail})", i + 1);
    }
    let elapsed = start.elapsed();
    let _ = writeln!(out, "acceptance suite: {:.2} s (budget {} s)", elapsed.as_secs_f64(), SUITE_BUDGET.as_secs());
    assert!(elapsed < SUITE_BUDGET, "suite took {elapsed:?}");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
