//! Evaluation of superfunctions at Grassmann-valued points (pullback to
//! S = ℝ^{0|q}).

use std::collections::BTreeMap;

use crate::grassmann::{GrassmannElement, Parity};
use crate::scalar::{lit, Real};
use crate::superexpr::expr::{Atom, FuncKind, SuperExpr};
use crate::superexpr::subst::{check_image_parity, FunctionDefs};
use crate::superexpr::symbols::{SymbolId, SymbolTable};
use crate::superexpr::ExprError;

/// Values of symbols at an S-point.
pub trait Env<T> {
    fn q(&self) -> u32;
    fn value(&self, id: SymbolId) -> Option<&GrassmannElement<T>>;
}

/// Symbol bindings for [`eval_at`]: even symbols bind to even elements (real
/// numbers are embedded as bodies), odd symbols to odd elements.
#[derive(Clone)]
pub struct Bindings<T> {
    q: u32,
    values: BTreeMap<SymbolId, GrassmannElement<T>>,
    functions: FunctionDefs,
}

impl<T: Real> Bindings<T> {
    pub fn new(q: u32) -> Self {
        Bindings { q, values: BTreeMap::new(), functions: FunctionDefs::new() }
    }

    pub fn bind(&mut self, id: SymbolId, value: GrassmannElement<T>) -> &mut Self {
        self.values.insert(id, value);
        self
    }

    pub fn bind_real(&mut self, id: SymbolId, value: T) -> Result<&mut Self, ExprError> {
        let v = GrassmannElement::scalar(self.q, value)?;
        self.values.insert(id, v);
        Ok(self)
    }

    pub fn with_functions(&mut self, defs: FunctionDefs) -> &mut Self {
        self.functions = defs;
        self
    }
}

impl<T: Real> Env<T> for Bindings<T> {
    fn q(&self) -> u32 {
        self.q
    }

    fn value(&self, id: SymbolId) -> Option<&GrassmannElement<T>> {
        self.values.get(&id)
    }
}

/// Dense environment indexed by symbol id; used on hot paths.
#[derive(Clone)]
pub struct DenseEnv<T> {
    q: u32,
    values: Vec<Option<GrassmannElement<T>>>,
}

impl<T: Real> DenseEnv<T> {
    pub fn new(q: u32, symbols: usize) -> Self {
        DenseEnv { q, values: vec![None; symbols] }
    }

    pub fn set(&mut self, id: SymbolId, value: GrassmannElement<T>) {
        self.values[id.index()] = Some(value);
    }

    pub fn clear(&mut self, id: SymbolId) {
        self.values[id.index()] = None;
    }
}

impl<T: Real> Env<T> for DenseEnv<T> {
    fn q(&self) -> u32 {
        self.q
    }

    fn value(&self, id: SymbolId) -> Option<&GrassmannElement<T>> {
        self.values.get(id.index()).and_then(|v| v.as_ref())
    }
}

/// Evaluates `f` with every free symbol bound. Odd symbols must be bound to
/// odd elements and even symbols to even ones.
pub fn eval_at<T: Real>(f: &SuperExpr, bindings: &Bindings<T>, table: &SymbolTable) -> Result<GrassmannElement<T>, ExprError> {
    for (id, v) in &bindings.values {
        let info = table.get(*id).ok_or(ExprError::UnknownSymbolId(id.0))?;
        if v.q() != bindings.q {
            return Err(ExprError::Grassmann(crate::grassmann::GrassmannError::DimensionMismatch {
                left: bindings.q,
                right: v.q(),
            }));
        }
        check_image_parity(&info.name, info.parity, v.grading())?;
    }
    let expanded;
    let f = if bindings.functions.is_empty() {
        f
    } else {
        expanded = f.expand_functions(&bindings.functions)?;
        &expanded
    };
    eval_env(f, bindings).map_err(|e| match e {
        ExprError::MissingBinding(name) => {
            let id: Option<u32> = name.strip_prefix('#').and_then(|n| n.parse().ok());
            match id.and_then(|i| table.get(SymbolId(i))) {
                Some(info) => ExprError::MissingBinding(info.name.clone()),
                None => ExprError::MissingBinding(name),
            }
        }
        other => other,
    })
}

/// Evaluation against any environment; no parity validation. Missing
/// symbols are reported as `#<id>`.
pub fn eval_env<T: Real, E: Env<T>>(f: &SuperExpr, env: &E) -> Result<GrassmannElement<T>, ExprError> {
    let q = env.q();
    let mut out = GrassmannElement::zero(q)?;
    for (key, c) in f.terms() {
        let mut term = GrassmannElement::scalar(q, lit::<T>(c))?;
        for (atom, n) in &key.even {
            let v = eval_atom(atom, env)?;
            term = term.try_mul(&v.powi(*n)?)?;
            if term.is_zero() {
                break;
            }
        }
        for id in &key.odd {
            if term.is_zero() {
                break;
            }
            let v = env.value(*id).ok_or_else(|| ExprError::MissingBinding(format!("#{}", id.0)))?;
            term = term.try_mul(v)?;
        }
        out = out.try_add(&term)?;
    }
    Ok(out)
}

fn eval_atom<T: Real, E: Env<T>>(atom: &Atom, env: &E) -> Result<GrassmannElement<T>, ExprError> {
    match atom {
        Atom::Sym(id) => env.value(*id).cloned().ok_or_else(|| ExprError::MissingBinding(format!("#{}", id.0))),
        Atom::Func(FuncKind::Formal { name, order }, _) => {
            Err(ExprError::MissingFunction(if *order == 0 { name.clone() } else { format!("{name}{order}") }))
        }
        Atom::Func(kind, arg) => {
            let v = eval_env(arg, env)?;
            let body = v.body();
            Ok(v.apply_analytic(|k| kind.eval_derivative(k, body).expect("library function"))?)
        }
    }
}

/// Parity of an expression grading, `None` when inhomogeneous.
pub fn binding_parity<T: Real>(v: &GrassmannElement<T>) -> Option<Parity> {
    v.grading().parity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superexpr::subst::FunctionDef;

    type G = GrassmannElement<f64>;

    fn table() -> SymbolTable {
        SymbolTable::for_chart(
            &[("x".into(), Parity::Even), ("psi_p".into(), Parity::Odd), ("psi_m".into(), Parity::Odd)],
            &["k".into()],
        )
        .unwrap()
    }

    fn s(t: &SymbolTable, n: &str) -> SuperExpr {
        SuperExpr::symbol(t, t.lookup(n).unwrap())
    }

    #[test]
    fn eval_examples() {
        let t = table();
        let q = 3;
        let z = |i| G::generator(q, i).unwrap();
        let mut b = Bindings::new(q);
        b.bind(t.lookup("psi_p").unwrap(), z(1));
        b.bind(t.lookup("psi_m").unwrap(), z(2));
        b.bind_real(t.lookup("x").unwrap(), 2.0).unwrap();
        let pp_pm = &s(&t, "psi_p") * &s(&t, "psi_m");
        assert_eq!(eval_at(&pp_pm, &b, &t).unwrap(), &z(1) * &z(2));
        let x_pp = &s(&t, "x") * &s(&t, "psi_p");
        assert_eq!(eval_at(&x_pp, &b, &t).unwrap(), z(1).scale(&2.0));
    }

    #[test]
    fn eval_formal_function_with_definition() {
        // U(x) ψ₊ψ₋ with U = k x, k = 1, x = 3 → 3 ζ¹ζ²
        let t = table();
        let q = 2;
        let u = SuperExpr::func(FuncKind::Formal { name: "U".into(), order: 0 }, s(&t, "x")).unwrap();
        let f = &(&u * &s(&t, "psi_p")) * &s(&t, "psi_m");
        let mut defs = FunctionDefs::new();
        defs.insert("U".into(), FunctionDef { name: "U".into(), var: t.lookup("x").unwrap(), body: &s(&t, "k") * &s(&t, "x") });
        let mut b = Bindings::new(q);
        b.bind(t.lookup("psi_p").unwrap(), G::generator(q, 1).unwrap());
        b.bind(t.lookup("psi_m").unwrap(), G::generator(q, 2).unwrap());
        b.bind_real(t.lookup("x").unwrap(), 3.0).unwrap();
        b.bind_real(t.lookup("k").unwrap(), 1.0).unwrap();
        assert!(matches!(eval_at(&f, &b, &t), Err(ExprError::MissingFunction(_))));
        b.with_functions(defs);
        let expected = G::from_terms(q, [(crate::grassmann::Blade(0b11), 3.0)]).unwrap();
        assert_eq!(eval_at(&f, &b, &t).unwrap(), expected);
    }

    #[test]
    fn eval_rejects_bad_bindings() {
        let t = table();
        let q = 2;
        let mut b = Bindings::new(q);
        b.bind(t.lookup("psi_p").unwrap(), G::one(q).unwrap());
        assert!(matches!(eval_at(&s(&t, "psi_p"), &b, &t), Err(ExprError::ParityMismatch { .. })));

        let mut b = Bindings::<f64>::new(q);
        b.bind(t.lookup("psi_p").unwrap(), G::generator(q, 1).unwrap());
        let err = eval_at(&(&s(&t, "psi_p") * &s(&t, "psi_m")), &b, &t).unwrap_err();
        assert_eq!(err, ExprError::MissingBinding("psi_m".into()));
    }

    #[test]
    fn library_functions_of_nilpotent_even_points() {
        // sin(x) at x = 0.3 + ζ¹ζ² is sin(0.3) + cos(0.3) ζ¹ζ²
        let t = table();
        let q = 2;
        let x = G::from_terms(q, [(crate::grassmann::Blade(0), 0.3), (crate::grassmann::Blade(0b11), 1.0)]).unwrap();
        let mut b = Bindings::new(q);
        b.bind(t.lookup("x").unwrap(), x);
        let f = SuperExpr::func(FuncKind::Sin, s(&t, "x")).unwrap();
        let v = eval_at(&f, &b, &t).unwrap();
        assert_eq!(v.body(), 0.3f64.sin());
        assert_eq!(v.component(crate::grassmann::Blade(0b11)), 0.3f64.cos());
    }
}
