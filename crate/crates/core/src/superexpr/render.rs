//! Text rendering in the model-file expression grammar.

use std::fmt::{self, Write};

use crate::superexpr::expr::{Atom, SuperExpr, TermKey};
use crate::superexpr::symbols::SymbolTable;

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn render(f: &SuperExpr, table: &SymbolTable) -> String {
    let mut out = String::new();
    write_expr(&mut out, f, table).expect("writing to a String");
    out
}

/// Display adaptor pairing an expression with its symbol table.
pub struct Rendered<'a> {
    expr: &'a SuperExpr,
    table: &'a SymbolTable,
}

impl SuperExpr {
    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> Rendered<'a> {
        Rendered { expr: self, table }
    }
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.table)
    }
}

fn write_expr<W: Write>(w: &mut W, f: &SuperExpr, table: &SymbolTable) -> fmt::Result {
    if f.is_zero() {
        return w.write_str("0");
    }
    for (i, (key, c)) in f.terms().enumerate() {
        let mag = if i == 0 {
            if c < 0.0 {
                w.write_char('-')?;
            }
            c.abs()
        } else {
            w.write_str(if c < 0.0 { " - " } else { " + " })?;
            c.abs()
        };
        write_term(w, mag, key, table)?;
    }
    Ok(())
}

fn write_term<W: Write>(w: &mut W, c: f64, key: &TermKey, table: &SymbolTable) -> fmt::Result {
    let bare = key.even.is_empty() && key.odd.is_empty();
    if bare {
        return w.write_str(&format_number(c));
    }
    let mut first = true;
    if c != 1.0 {
        w.write_str(&format_number(c))?;
        first = false;
    }
    for (atom, n) in &key.even {
        if !first {
            w.write_char('*')?;
        }
        first = false;
        match atom {
            Atom::Sym(id) => w.write_str(table.name(*id))?,
            Atom::Func(kind, arg) => {
                write!(w, "{}(", kind.name())?;
                write_expr(w, arg, table)?;
                w.write_char(')')?;
            }
        }
        if *n != 1 {
            write!(w, "^{n}")?;
        }
    }
    for id in &key.odd {
        if !first {
            w.write_char('*')?;
        }
        first = false;
        w.write_str(table.name(*id))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Parity;
    use crate::superexpr::expr::FuncKind;

    #[test]
    fn renders_in_term_order() {
        let t = SymbolTable::for_chart(
            &[
                ("theta".into(), Parity::Even),
                ("phi".into(), Parity::Even),
                ("psi_p".into(), Parity::Odd),
                ("psi_m".into(), Parity::Odd),
            ],
            &["m".into()],
        )
        .unwrap();
        let s = |n: &str| SuperExpr::symbol(&t, t.lookup(n).unwrap());
        let e = &s("dpsi_p").scale(0.5) - &(&s("m") * &s("psi_m"));
        assert_eq!(render(&e, &t), "0.5*dpsi_p - m*psi_m");
        let sin = SuperExpr::func(FuncKind::Sin, s("theta")).unwrap();
        let e = &sin.powi(2).unwrap() * &s("dphi");
        assert_eq!(e.display(&t).to_string(), "sin(theta)^2*dphi");
        assert_eq!(render(&SuperExpr::zero(), &t), "0");
        assert_eq!(render(&s("psi_p").scale(-1.0), &t), "-psi_p");
        assert_eq!(render(&s("theta").powi(-1).unwrap().scale(-2.0), &t), "-2*theta^-1");
        assert_eq!(render(&SuperExpr::constant(0.1), &t), "0.1");
    }
}
