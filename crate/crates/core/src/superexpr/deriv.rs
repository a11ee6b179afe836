//! Partial derivatives, derivations and the formal total time derivative.
//!
//! Odd derivatives are *left* derivatives: the symbol is anticommuted to the
//! front of the monomial and then removed. With this convention a vector
//! field `X = Xᵃ ∂ₐ` acts as `X(f) = Σ Xᵃ · ∂ₐf` with the component on the
//! left.

use crate::grassmann::Parity;
use crate::superexpr::expr::{Atom, SuperExpr, TermKey};
use crate::superexpr::symbols::{SymbolId, SymbolTable, TimeDerivative};
use crate::superexpr::ExprError;

impl SuperExpr {
    /// Derivative by an even symbol.
    pub(crate) fn d_even(&self, x: SymbolId) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (key, c) in self.terms() {
            for (i, (atom, n)) in key.even.iter().enumerate() {
                let datom = match atom {
                    Atom::Sym(id) if *id == x => SuperExpr::constant(1.0),
                    Atom::Sym(_) => continue,
                    Atom::Func(kind, arg) => {
                        let darg = arg.d_even(x);
                        if darg.is_zero() {
                            continue;
                        }
                        let (sign, dkind) = kind.derivative();
                        let outer = SuperExpr::func(dkind, (**arg).clone()).expect("argument already canonical").scale(sign);
                        &outer * &darg
                    }
                };
                let mut even = key.even.clone();
                if *n == 1 {
                    even.remove(i);
                } else {
                    even[i].1 -= 1;
                }
                let rest = SuperExpr::from_term(c * *n as f64, TermKey { even, odd: key.odd.clone() });
                out = &out + &(&datom * &rest);
            }
        }
        out
    }

    /// Left derivative by an odd symbol. Function arguments are odd-free,
    /// so only the odd monomial contributes.
    pub(crate) fn d_odd_left(&self, theta: SymbolId) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (key, c) in self.terms() {
            if let Some(pos) = key.odd.iter().position(|s| *s == theta) {
                let mut odd = key.odd.clone();
                odd.remove(pos);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.add_term(TermKey { even: key.even.clone(), odd }, sign * c);
            }
        }
        out
    }

    /// Derivative by a symbol of the given parity (left derivative if odd).
    pub fn partial(&self, sym: SymbolId, parity: Parity) -> SuperExpr {
        match parity {
            Parity::Even => self.d_even(sym),
            Parity::Odd => self.d_odd_left(sym),
        }
    }

    /// Applies the derivation `Σ_s component(s) · ∂_s` over the symbols of
    /// the expression. `component` returns `None` for symbols the derivation
    /// does not touch.
    pub fn apply_derivation<F>(&self, table: &SymbolTable, mut component: F) -> Result<SuperExpr, ExprError>
    where
        F: FnMut(SymbolId) -> Result<Option<SuperExpr>, ExprError>,
    {
        let mut out = SuperExpr::zero();
        for s in self.free_symbols() {
            let Some(comp) = component(s)? else { continue };
            if comp.is_zero() {
                continue;
            }
            let d = self.partial(s, table.parity(s));
            out = &out + &(&comp * &d);
        }
        Ok(out)
    }

    /// Formal total time derivative along a curve: jets advance one order
    /// (`x ↦ dx`, `p_x ↦ dp_x`), parameters and constants are constant.
    pub fn total_time_derivative(&self, table: &SymbolTable) -> Result<SuperExpr, ExprError> {
        self.apply_derivation(table, |s| match table.time_derivative(s) {
            TimeDerivative::Zero => Ok(None),
            TimeDerivative::Symbol(next) => Ok(Some(SuperExpr::symbol(table, next))),
            TimeDerivative::Unavailable => Err(ExprError::NoTimeDerivative(table.name(s).to_string())),
        })
    }
}

/// ∂f/∂x for an even symbol `x`.
pub fn deven(f: &SuperExpr, x: SymbolId, table: &SymbolTable) -> Result<SuperExpr, ExprError> {
    let info = table.get(x).ok_or(ExprError::UnknownSymbolId(x.0))?;
    if info.parity != Parity::Even {
        return Err(ExprError::ParityMismatch { symbol: info.name.clone(), expected: Parity::Even });
    }
    Ok(f.d_even(x))
}

/// Left derivative ∂f/∂θ for an odd symbol `θ`.
pub fn dodd_left(f: &SuperExpr, theta: SymbolId, table: &SymbolTable) -> Result<SuperExpr, ExprError> {
    let info = table.get(theta).ok_or(ExprError::UnknownSymbolId(theta.0))?;
    if info.parity != Parity::Odd {
        return Err(ExprError::ParityMismatch { symbol: info.name.clone(), expected: Parity::Odd });
    }
    Ok(f.d_odd_left(theta))
}

/// Derivative by any symbol of `table`, dispatching on its parity.
pub fn partial(f: &SuperExpr, sym: SymbolId, table: &SymbolTable) -> Result<SuperExpr, ExprError> {
    let info = table.get(sym).ok_or(ExprError::UnknownSymbolId(sym.0))?;
    Ok(f.partial(sym, info.parity))
}
