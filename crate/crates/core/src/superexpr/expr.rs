//! Canonical superfunctions.
//!
//! A [`SuperExpr`] is an expanded sum of terms `c · E · θ_{i₁}⋯θ_{iₖ}` where
//! `E` is a product of integer powers of even atoms (even symbols and library
//! functions of odd-free even arguments) and the odd monomial is strictly
//! sorted by symbol id. Sorting signs are absorbed into `c`, repeated odd
//! symbols annihilate, and zero coefficients are dropped, so structural
//! equality is equality of superfunctions over the supported library.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::grassmann::{Grading, Parity};
use crate::superexpr::symbols::{SymbolId, SymbolTable};
use crate::superexpr::ExprError;

/// Even-function library.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncKind {
    Exp,
    Cos,
    Sin,
    Cosh,
    Sinh,
    /// Formal function `name` differentiated `order` times.
    Formal {
        name: String,
        order: u32,
    },
}

impl FuncKind {
    pub fn from_builtin(name: &str) -> Option<FuncKind> {
        Some(match name {
            "exp" => FuncKind::Exp,
            "cos" => FuncKind::Cos,
            "sin" => FuncKind::Sin,
            "cosh" => FuncKind::Cosh,
            "sinh" => FuncKind::Sinh,
            _ => return None,
        })
    }

    pub fn name(&self) -> String {
        match self {
            FuncKind::Exp => "exp".into(),
            FuncKind::Cos => "cos".into(),
            FuncKind::Sin => "sin".into(),
            FuncKind::Cosh => "cosh".into(),
            FuncKind::Sinh => "sinh".into(),
            FuncKind::Formal { name, order: 0 } => name.clone(),
            FuncKind::Formal { name, order } => format!("{name}{order}"),
        }
    }

    /// `(sign, kind)` such that `f' = sign · kind`.
    pub fn derivative(&self) -> (f64, FuncKind) {
        match self {
            FuncKind::Exp => (1.0, FuncKind::Exp),
            FuncKind::Cos => (-1.0, FuncKind::Sin),
            FuncKind::Sin => (1.0, FuncKind::Cos),
            FuncKind::Cosh => (1.0, FuncKind::Sinh),
            FuncKind::Sinh => (1.0, FuncKind::Cosh),
            FuncKind::Formal { name, order } => (1.0, FuncKind::Formal { name: name.clone(), order: order + 1 }),
        }
    }

    /// `k`-th derivative of a library function at a real point.
    pub fn eval_derivative<T: num_traits::Float>(&self, k: u32, x: T) -> Option<T> {
        let v = match self {
            FuncKind::Exp => x.exp(),
            FuncKind::Sin => match k % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            FuncKind::Cos => match k % 4 {
                0 => x.cos(),
                1 => -x.sin(),
                2 => -x.cos(),
                _ => x.sin(),
            },
            FuncKind::Sinh => {
                if k.is_multiple_of(2) {
                    x.sinh()
                } else {
                    x.cosh()
                }
            }
            FuncKind::Cosh => {
                if k.is_multiple_of(2) {
                    x.cosh()
                } else {
                    x.sinh()
                }
            }
            FuncKind::Formal { .. } => return None,
        };
        Some(v)
    }
}

/// An even factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    /// Library function of an odd-free even argument.
    Func(FuncKind, Box<SuperExpr>),
    /// An even symbol.
    Sym(SymbolId),
}

/// Sorted atoms with nonzero integer exponents.
pub type EvenMono = Vec<(Atom, i32)>;
/// Strictly ascending odd symbols.
pub type OddMono = Vec<SymbolId>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermKey {
    pub even: EvenMono,
    pub odd: OddMono,
}

impl TermKey {
    pub fn one() -> TermKey {
        TermKey { even: Vec::new(), odd: Vec::new() }
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.odd.len() as u32)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuperExpr {
    terms: BTreeMap<TermKey, f64>,
}

impl Eq for SuperExpr {}

impl PartialOrd for SuperExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SuperExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter();
        let mut b = other.terms.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ka, ca)), Some((kb, cb))) => {
                    let ord = ka.cmp(kb).then_with(|| ca.total_cmp(cb));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }
}

impl SuperExpr {
    pub fn zero() -> SuperExpr {
        SuperExpr::default()
    }

    pub fn constant(c: f64) -> SuperExpr {
        SuperExpr::from_term(c, TermKey::one())
    }

    pub fn from_term(c: f64, key: TermKey) -> SuperExpr {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(key, c);
        }
        SuperExpr { terms }
    }

    /// The symbol as an expression, placed by its parity in `table`.
    pub fn symbol(table: &SymbolTable, id: SymbolId) -> SuperExpr {
        match table.parity(id) {
            Parity::Even => SuperExpr::even_symbol(id),
            Parity::Odd => SuperExpr::odd_symbol(id),
        }
    }

    pub fn even_symbol(id: SymbolId) -> SuperExpr {
        SuperExpr::from_term(1.0, TermKey { even: vec![(Atom::Sym(id), 1)], odd: Vec::new() })
    }

    pub fn odd_symbol(id: SymbolId) -> SuperExpr {
        SuperExpr::from_term(1.0, TermKey { even: Vec::new(), odd: vec![id] })
    }

    /// `kind(arg)`, with constant folding for library functions of numbers
    /// and Taylor expansion of the nilpotent (odd-containing) part of `arg`.
    pub fn func(kind: FuncKind, arg: SuperExpr) -> Result<SuperExpr, ExprError> {
        if arg.grading() != Grading::Homogeneous(Parity::Even) {
            return Err(ExprError::OddFunctionArgument);
        }
        let (body, nil) = arg.split_nilpotent();
        let mut out = SuperExpr::func_of_body(&kind, 0, &body);
        if nil.is_zero() {
            return Ok(out);
        }
        // f(b + n) = Σ f^(k)(b) n^k / k!
        let mut power = SuperExpr::constant(1.0);
        let mut factorial = 1.0;
        let mut k = 0u32;
        loop {
            power = &power * &nil;
            if power.is_zero() {
                break;
            }
            k += 1;
            factorial *= k as f64;
            let deriv = SuperExpr::func_of_body(&kind, k, &body);
            out = &out + &(&deriv * &power).scale(1.0 / factorial);
        }
        Ok(out)
    }

    /// `kind^(k)(body)` for an odd-free argument.
    fn func_of_body(kind: &FuncKind, k: u32, body: &SuperExpr) -> SuperExpr {
        if let Some(c) = body.as_constant() {
            if let Some(v) = kind.eval_derivative(k, c) {
                return SuperExpr::constant(v);
            }
        }
        let (sign, kind_k) = match kind {
            FuncKind::Formal { name, order } => (1.0, FuncKind::Formal { name: name.clone(), order: order + k }),
            other => {
                let mut sign = 1.0;
                let mut kind = other.clone();
                for _ in 0..k {
                    let (s, next) = kind.derivative();
                    sign *= s;
                    kind = next;
                }
                (sign, kind)
            }
        };
        SuperExpr::from_term(sign, TermKey { even: vec![(Atom::Func(kind_k, Box::new(body.clone())), 1)], odd: Vec::new() })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, f64)> {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    /// The value when the expression is a pure number.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => {
                let (k, c) = self.terms.iter().next()?;
                (k.even.is_empty() && k.odd.is_empty()).then_some(*c)
            }
            _ => None,
        }
    }

    pub fn grading(&self) -> Grading {
        let mut seen = None;
        for key in self.terms.keys() {
            let p = key.parity();
            match seen {
                None => seen = Some(p),
                Some(s) if s != p => return Grading::Inhomogeneous,
                _ => {}
            }
        }
        Grading::Homogeneous(seen.unwrap_or(Parity::Even))
    }

    /// Terms of the given parity.
    pub fn parity_part(&self, parity: Parity) -> SuperExpr {
        SuperExpr { terms: self.terms.iter().filter(|(k, _)| k.parity() == parity).map(|(k, c)| (k.clone(), *c)).collect() }
    }

    /// Splits into the odd-free part and the part whose terms contain odd
    /// symbols (which is nilpotent).
    pub fn split_nilpotent(&self) -> (SuperExpr, SuperExpr) {
        let mut body = SuperExpr::zero();
        let mut nil = SuperExpr::zero();
        for (k, c) in &self.terms {
            if k.odd.is_empty() {
                body.terms.insert(k.clone(), *c);
            } else {
                nil.terms.insert(k.clone(), *c);
            }
        }
        (body, nil)
    }

    pub fn scale(&self, factor: f64) -> SuperExpr {
        if factor == 0.0 {
            return SuperExpr::zero();
        }
        let mut out = SuperExpr::zero();
        for (k, c) in &self.terms {
            let v = c * factor;
            if v != 0.0 {
                out.terms.insert(k.clone(), v);
            }
        }
        out
    }

    pub(crate) fn add_term(&mut self, key: TermKey, c: f64) {
        use std::collections::btree_map::Entry;
        if c == 0.0 {
            return;
        }
        match self.terms.entry(key) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// Integer power; negative exponents use [`inverse`](Self::inverse).
    pub fn powi(&self, n: i32) -> Result<SuperExpr, ExprError> {
        if n < 0 {
            return self.inverse()?.powi(-n);
        }
        // a single even monomial raises exponent-wise, keeping atoms intact
        if self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().expect("one term");
            if k.odd.is_empty() {
                let even = k.even.iter().map(|(a, e)| (a.clone(), e * n)).filter(|(_, e)| *e != 0).collect();
                return Ok(SuperExpr::from_term(c.powi(n), TermKey { even, odd: Vec::new() }));
            }
        }
        let mut out = SuperExpr::constant(1.0);
        for _ in 0..n {
            out = &out * self;
        }
        Ok(out)
    }

    /// Multiplicative inverse. The odd-free part must be a single nonzero
    /// term; the nilpotent remainder is inverted by a terminating series.
    pub fn inverse(&self) -> Result<SuperExpr, ExprError> {
        let (body, nil) = self.split_nilpotent();
        if body.terms.len() != 1 {
            return Err(ExprError::NotInvertible(if body.is_zero() {
                "zero body".to_string()
            } else {
                "body is not a single monomial".to_string()
            }));
        }
        let (k, c) = body.terms.iter().next().expect("one term");
        let inv_body = SuperExpr::from_term(
            1.0 / c,
            TermKey { even: k.even.iter().map(|(a, e)| (a.clone(), -e)).collect(), odd: Vec::new() },
        );
        let minus_m = -&(&nil * &inv_body);
        let mut sum = SuperExpr::constant(1.0);
        let mut power = SuperExpr::constant(1.0);
        loop {
            power = &power * &minus_m;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(&inv_body * &sum)
    }

    /// Symbols occurring anywhere in the expression, including function
    /// arguments.
    pub fn free_symbols(&self) -> std::collections::BTreeSet<SymbolId> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut std::collections::BTreeSet<SymbolId>) {
        for key in self.terms.keys() {
            out.extend(key.odd.iter().copied());
            for (atom, _) in &key.even {
                match atom {
                    Atom::Sym(id) => {
                        out.insert(*id);
                    }
                    Atom::Func(_, arg) => arg.collect_symbols(out),
                }
            }
        }
    }

    /// True when the expression contains any formal function application.
    pub fn has_formal_functions(&self) -> bool {
        self.terms.keys().any(|k| {
            k.even.iter().any(|(a, _)| match a {
                Atom::Func(FuncKind::Formal { .. }, _) => true,
                Atom::Func(_, arg) => arg.has_formal_functions(),
                Atom::Sym(_) => false,
            })
        })
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn mul_even(a: &EvenMono, b: &EvenMono) -> EvenMono {
    let mut out: EvenMono = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            (None, _) => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Concatenates and sorts two odd monomials; `None` on a repeated symbol,
/// otherwise the sorted monomial and whether the permutation was odd.
pub fn mul_odd(a: &[SymbolId], b: &[SymbolId]) -> Option<(OddMono, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut swaps = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => return None,
            (Some(x), Some(y)) if y < x => {
                // y jumps over the remaining a[i..]
                swaps += a.len() - i;
                out.push(*y);
                j += 1;
            }
            (Some(x), _) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Some((out, swaps % 2 == 1))
}

impl Add for &SuperExpr {
    type Output = SuperExpr;
    fn add(self, rhs: &SuperExpr) -> SuperExpr {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }
}

impl Sub for &SuperExpr {
    type Output = SuperExpr;
    fn sub(self, rhs: &SuperExpr) -> SuperExpr {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Neg for &SuperExpr {
    type Output = SuperExpr;
    fn neg(self) -> SuperExpr {
        self.scale(-1.0)
    }
}

impl Mul for &SuperExpr {
    type Output = SuperExpr;
    fn mul(self, rhs: &SuperExpr) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let Some((odd, negative)) = mul_odd(&ka.odd, &kb.odd) else {
                    continue;
                };
                let even = mul_even(&ka.even, &kb.even);
                let c = ca * cb;
                out.add_term(TermKey { even, odd }, if negative { -c } else { c });
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for SuperExpr {
            type Output = SuperExpr;
            fn $m(self, rhs: SuperExpr) -> SuperExpr {
                $tr::$m(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for SuperExpr {
    type Output = SuperExpr;
    fn neg(self) -> SuperExpr {
        self.scale(-1.0)
    }
}
