//! Solving Euler–Lagrange equations for their highest derivatives.
//!
//! Each equation is written `E_a = Σ_c u_c · D_ac + r_a` where `u_c` is the
//! highest derivative of coordinate `c` and `D_ac = ∂E_a/∂u_c` (left
//! derivative). Moving `u_c` to the right of its coefficient gives the
//! linear system `Σ_c A_ac u_c = −r_a` with `A_ac = (−1)^{|u_c||D_ac|} D_ac`,
//! which is solved by Gauss–Jordan elimination using left multiplication
//! only. A pivot must be invertible as a superfunction: its odd-free part a
//! single nonzero monomial.

use crate::grassmann::Parity;
use crate::superexpr::{render, Substitution, SuperExpr, SymbolId, SymbolKind, SymbolTable};

/// Explicit equations `u_a = rhs_a` for the highest derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    /// Order of the highest derivative of each coordinate.
    pub orders: Vec<u8>,
    /// `(u_a, rhs_a)` per coordinate; `rhs_a` involves lower jets only.
    pub rhs: Vec<(SymbolId, SuperExpr)>,
}

impl NormalForm {
    pub fn substitution(&self) -> Substitution {
        self.rhs.iter().cloned().collect()
    }

    pub fn render_lines(&self, table: &SymbolTable) -> Vec<String> {
        self.rhs.iter().map(|(u, e)| format!("{} = {}", table.name(*u), render(e, table))).collect()
    }
}

/// Why a system could not be put in explicit form.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitReport {
    /// Indices of the equations left unsolved.
    pub equations: Vec<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormalFormResult {
    Explicit(NormalForm),
    Implicit(ImplicitReport),
}

impl NormalFormResult {
    pub fn explicit(&self) -> Option<&NormalForm> {
        match self {
            NormalFormResult::Explicit(nf) => Some(nf),
            NormalFormResult::Implicit(_) => None,
        }
    }
}

fn implicit(equations: Vec<usize>, reason: impl Into<String>) -> NormalFormResult {
    NormalFormResult::Implicit(ImplicitReport { equations, reason: reason.into() })
}

/// Highest jet order of each coordinate appearing in `equations`.
fn highest_orders(equations: &[SuperExpr], table: &SymbolTable) -> Vec<u8> {
    let mut orders = vec![0u8; table.coordinate_count()];
    for e in equations {
        for s in e.free_symbols() {
            if let SymbolKind::Coordinate { coord, order } = table.info(s).kind {
                orders[coord] = orders[coord].max(order);
            }
        }
    }
    orders
}

/// Puts one equation per coordinate into explicit form.
#[allow(clippy::needless_range_loop)]
pub fn normal_form(equations: &[SuperExpr], table: &SymbolTable) -> NormalFormResult {
    let n = table.coordinate_count();
    if equations.len() != n {
        return implicit((0..equations.len()).collect(), "one equation per coordinate is required");
    }
    let orders = highest_orders(equations, table);
    if let Some(a) = orders.iter().position(|&k| k == 0) {
        return implicit((0..n).collect(), format!("no derivative of '{}' appears in the equations", table.coordinates()[a].0));
    }
    let unknowns: Vec<SymbolId> = (0..n).map(|a| table.coord(a, orders[a])).collect();
    let to_zero: Substitution = unknowns.iter().map(|u| (*u, SuperExpr::zero())).collect();

    let mut a_mat: Vec<Vec<SuperExpr>> = Vec::with_capacity(n);
    let mut b: Vec<SuperExpr> = Vec::with_capacity(n);
    for (i, e) in equations.iter().enumerate() {
        let Ok(r) = e.subst(&to_zero) else {
            return implicit(vec![i], "equation could not be split");
        };
        let mut row = Vec::with_capacity(n);
        let mut rebuilt = r.clone();
        for &u in &unknowns {
            let up = table.parity(u);
            let d = e.partial(u, up);
            if d.free_symbols().iter().any(|s| unknowns.contains(s)) {
                return implicit(vec![i], "equation is not linear in the highest derivatives");
            }
            rebuilt = &rebuilt + &(&SuperExpr::symbol(table, u) * &d);
            let sign = match (up, d.grading().parity()) {
                (Parity::Odd, Some(Parity::Odd)) => -1.0,
                (Parity::Odd, None) => {
                    return implicit(vec![i], "coefficient of an odd derivative is inhomogeneous");
                }
                _ => 1.0,
            };
            row.push(d.scale(sign));
        }
        if rebuilt != *e {
            return implicit(vec![i], "equation is not linear in the highest derivatives");
        }
        a_mat.push(row);
        b.push(-r);
    }

    // Gauss–Jordan with row pivoting, left multiplication only
    for k in 0..n {
        let pivot = (k..n).find_map(|i| a_mat[i][k].inverse().ok().map(|inv| (i, inv)));
        let Some((p, inv)) = pivot else {
            let rows = (k..n).collect();
            return implicit(rows, format!("coefficient of '{}' is not invertible", table.name(unknowns[k])));
        };
        a_mat.swap(k, p);
        b.swap(k, p);
        for c in 0..n {
            a_mat[k][c] = if c == k { SuperExpr::constant(1.0) } else { &inv * &a_mat[k][c] };
        }
        b[k] = &inv * &b[k];
        for i in 0..n {
            if i == k || a_mat[i][k].is_zero() {
                continue;
            }
            let factor = a_mat[i][k].clone();
            for c in 0..n {
                a_mat[i][c] = if c == k { SuperExpr::zero() } else { &a_mat[i][c] - &(&factor * &a_mat[k][c]) };
            }
            b[i] = &b[i] - &(&factor * &b[k]);
        }
    }
    NormalFormResult::Explicit(NormalForm { orders, rhs: unknowns.into_iter().zip(b).collect() })
}
