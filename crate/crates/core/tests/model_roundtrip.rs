use proptest::prelude::*;
use smech_core::modelio::{
    parse_model, read_trajectory_csv, read_trajectory_json, render_model, write_trajectory_csv, write_trajectory_json,
};
use smech_core::scurves::{Channel, Trajectory};
use smech_core::superexpr::{render, FuncKind};
use smech_core::{Blade, GrassmannElement, Parity, SuperExpr, SymbolTable};

const MODELS: [&str; 8] = [
    "dirac.sm",
    "n2.sm",
    "n2_harmonic.sm",
    "constrained.sm",
    "constrained_linear.sm",
    "supersphere.sm",
    "rotation.sm",
    "free.sm",
];

#[test]
fn shipped_models_round_trip() {
    for name in MODELS {
        let path = format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"));
        let m = parse_model(&std::fs::read_to_string(path).unwrap()).unwrap();
        let text = render_model(&m);
        let again = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(again, m, "{name}");
        assert_eq!(render_model(&again), text, "{name}");
    }
}

const HEADER: &str = "model random\ncoords { x: even, th: odd, y: even, et: odd }\nparams { k = 1 }\n";
const SYMBOLS: [&str; 9] = ["x", "y", "th", "et", "dx", "dy", "dth", "det", "k"];

fn table() -> SymbolTable {
    parse_model(HEADER).unwrap().table
}

#[derive(Debug, Clone)]
enum Node {
    Sym(usize),
    Num(f64),
    Add(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Func(u8, Box<Node>),
}

fn node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (0..SYMBOLS.len()).prop_map(Node::Sym),
        (-4.0f64..4.0).prop_map(Node::Num),
        (-5i32..=5).prop_map(|n| Node::Num(n as f64)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::Add(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Node::Mul(Box::new(l), Box::new(r))),
            (0u8..4, inner).prop_map(|(f, a)| Node::Func(f, Box::new(a))),
        ]
    })
}

fn build(t: &SymbolTable, n: &Node) -> SuperExpr {
    match n {
        Node::Sym(i) => SuperExpr::symbol(t, t.lookup(SYMBOLS[*i]).unwrap()),
        Node::Num(c) => SuperExpr::constant(*c),
        Node::Add(l, r) => &build(t, l) + &build(t, r),
        Node::Mul(l, r) => &build(t, l) * &build(t, r),
        Node::Func(f, a) => {
            let kind = FuncKind::from_builtin(["sin", "cos", "exp", "sinh"][*f as usize]).unwrap();
            SuperExpr::func(kind, build(t, a).parity_part(Parity::Even)).unwrap()
        }
    }
}

fn element(q: u32) -> impl Strategy<Value = GrassmannElement<f64>> {
    prop::collection::vec((0u32..(1 << q), prop_oneof![-1e3f64..1e3, -1e-9f64..1e-9]), 0..6)
        .prop_map(move |terms| GrassmannElement::from_terms(q, terms.into_iter().map(|(b, c)| (Blade(b), c))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rendered_lagrangians_parse_back(n in node(), k in -10.0f64..10.0) {
        let t = table();
        let l = build(&t, &n).parity_part(Parity::Even);
        prop_assume!(!l.is_zero() && l.max_abs_coefficient() < 1e12);
        let text = format!("{}lagrangian: {}\n", HEADER.replace("k = 1", &format!("k = {k}")), render(&l, &t));
        let m = parse_model(&text).unwrap();
        prop_assert_eq!(m.lagrangian.as_ref().unwrap(), &l);
        prop_assert_eq!(&parse_model(&render_model(&m)).unwrap(), &m);
    }

    #[test]
    fn trajectories_round_trip(
        (q, rows) in (0u32..=3).prop_flat_map(|q| (Just(q), prop::collection::vec((element(q), element(q)), 1..6)))
    ) {
        let mut traj = Trajectory::new(q, vec![Channel::new("x", Parity::Even), Channel::new("th", Parity::Odd)]);
        for (i, (x, th)) in rows.into_iter().enumerate() {
            traj.push(0.1 * i as f64, vec![x.parity_part(Parity::Even), th.parity_part(Parity::Odd)]).unwrap();
        }
        traj.meta.dt = Some(0.1);
        traj.meta.model_hash = Some("abc".into());
        prop_assert_eq!(&read_trajectory_csv(&write_trajectory_csv(&traj)).unwrap(), &traj);
        prop_assert_eq!(&read_trajectory_json(&write_trajectory_json(&traj)).unwrap(), &traj);
    }
}
