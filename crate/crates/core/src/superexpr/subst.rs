//! Simultaneous substitution and formal-function expansion.

use std::collections::BTreeMap;

use crate::grassmann::{Grading, Parity};
use crate::superexpr::expr::{Atom, FuncKind, SuperExpr};
use crate::superexpr::symbols::{SymbolId, SymbolTable};
use crate::superexpr::ExprError;

pub type Substitution = BTreeMap<SymbolId, SuperExpr>;

/// Definition `name(var) = body` of a formal function.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub var: SymbolId,
    pub body: SuperExpr,
}

pub type FunctionDefs = BTreeMap<String, FunctionDef>;

impl SuperExpr {
    /// Substitution without parity checks; images of odd symbols must be odd
    /// for the result to be meaningful.
    pub fn subst(&self, map: &Substitution) -> Result<SuperExpr, ExprError> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let mut out = SuperExpr::zero();
        for (key, c) in self.terms() {
            let mut term = SuperExpr::constant(c);
            for (atom, n) in &key.even {
                let base = match atom {
                    Atom::Sym(id) => match map.get(id) {
                        Some(img) => img.clone(),
                        None => SuperExpr::even_symbol(*id),
                    },
                    Atom::Func(kind, arg) => SuperExpr::func(kind.clone(), arg.subst(map)?)?,
                };
                term = &term * &base.powi(*n)?;
                if term.is_zero() {
                    break;
                }
            }
            for id in &key.odd {
                if term.is_zero() {
                    break;
                }
                let img = match map.get(id) {
                    Some(img) => img.clone(),
                    None => SuperExpr::odd_symbol(*id),
                };
                term = &term * &img;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Replaces every formal function with a definition by the corresponding
    /// derivative of its body.
    pub fn expand_functions(&self, defs: &FunctionDefs) -> Result<SuperExpr, ExprError> {
        if defs.is_empty() || !self.has_formal_functions() {
            return Ok(self.clone());
        }
        let mut out = SuperExpr::zero();
        for (key, c) in self.terms() {
            let mut term = SuperExpr::constant(c);
            for (atom, n) in &key.even {
                let base = match atom {
                    Atom::Sym(id) => SuperExpr::even_symbol(*id),
                    Atom::Func(FuncKind::Formal { name, order }, arg) if defs.contains_key(name) => {
                        let def = &defs[name];
                        let arg = arg.expand_functions(defs)?;
                        let mut body = def.body.expand_functions(defs)?;
                        for _ in 0..*order {
                            body = body.d_even(def.var);
                        }
                        let mut map = Substitution::new();
                        map.insert(def.var, arg);
                        body.subst(&map)?
                    }
                    Atom::Func(kind, arg) => SuperExpr::func(kind.clone(), arg.expand_functions(defs)?)?,
                };
                term = &term * &base.powi(*n)?;
            }
            for id in &key.odd {
                term = &term * &SuperExpr::odd_symbol(*id);
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

/// Simultaneous substitution `f[s ↦ map[s]]`; each image must have the
/// parity of the symbol it replaces (zero is allowed for either).
pub fn substitute(f: &SuperExpr, map: &Substitution, table: &SymbolTable) -> Result<SuperExpr, ExprError> {
    for (id, img) in map {
        let info = table.get(*id).ok_or(ExprError::UnknownSymbolId(id.0))?;
        check_image_parity(&info.name, info.parity, img.grading())?;
    }
    f.subst(map)
}

pub(crate) fn check_image_parity(name: &str, expected: Parity, grading: Grading) -> Result<(), ExprError> {
    match grading {
        Grading::Homogeneous(p) if p == expected => Ok(()),
        _ => Err(ExprError::ParityMismatch { symbol: name.to_string(), expected }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::for_chart(
            &[("x".into(), Parity::Even), ("th".into(), Parity::Odd), ("tp".into(), Parity::Odd), ("tm".into(), Parity::Odd)],
            &["k".into()],
        )
        .unwrap()
    }

    fn s(t: &SymbolTable, n: &str) -> SuperExpr {
        SuperExpr::symbol(t, t.lookup(n).unwrap())
    }

    #[test]
    fn substitution_examples() {
        let t = table();
        let mut map = Substitution::new();
        map.insert(t.lookup("p_x").unwrap(), s(&t, "dx"));
        let f = &s(&t, "p_x") - &s(&t, "dx");
        assert!(substitute(&f, &map, &t).unwrap().is_zero());

        let mut map = Substitution::new();
        map.insert(t.lookup("tp").unwrap(), s(&t, "tm"));
        assert!(substitute(&(&s(&t, "tp") * &s(&t, "tm")), &map, &t).unwrap().is_zero());

        // x·θ with x ↦ x², θ ↦ x·θ' gives x³θ'
        let mut map = Substitution::new();
        map.insert(t.lookup("x").unwrap(), s(&t, "x").powi(2).unwrap());
        map.insert(t.lookup("th").unwrap(), &s(&t, "x") * &s(&t, "tp"));
        let out = substitute(&(&s(&t, "x") * &s(&t, "th")), &map, &t).unwrap();
        assert_eq!(out, &s(&t, "x").powi(3).unwrap() * &s(&t, "tp"));
    }

    #[test]
    fn parity_violations_are_rejected() {
        let t = table();
        let mut map = Substitution::new();
        map.insert(t.lookup("th").unwrap(), s(&t, "x"));
        let err = substitute(&s(&t, "th"), &map, &t).unwrap_err();
        assert!(matches!(err, ExprError::ParityMismatch { .. }));
        let mut map = Substitution::new();
        map.insert(t.lookup("x").unwrap(), &s(&t, "x") + &s(&t, "th"));
        assert!(substitute(&s(&t, "x"), &map, &t).is_err());
    }

    #[test]
    fn formal_functions_expand_with_derivatives() {
        let t = table();
        let x = t.lookup("x").unwrap();
        let mut defs = FunctionDefs::new();
        defs.insert("U".into(), FunctionDef { name: "U".into(), var: x, body: &s(&t, "k") * &s(&t, "x").powi(2).unwrap() });
        let formal = |order| SuperExpr::func(FuncKind::Formal { name: "U".into(), order }, s(&t, "dx")).unwrap();
        // U(dx) = k dx², U1(dx) = 2 k dx, U2 = 2k, U3 = 0
        assert_eq!(formal(0).expand_functions(&defs).unwrap(), &s(&t, "k") * &s(&t, "dx").powi(2).unwrap());
        assert_eq!(formal(1).expand_functions(&defs).unwrap(), (&s(&t, "k") * &s(&t, "dx")).scale(2.0));
        assert_eq!(formal(2).expand_functions(&defs).unwrap(), s(&t, "k").scale(2.0));
        assert!(formal(3).expand_functions(&defs).unwrap().is_zero());
    }
}
