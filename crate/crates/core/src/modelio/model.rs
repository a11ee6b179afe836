//! Resolution of parsed models against their symbol table, and rendering
//! back to text.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::grassmann::{Grading, Parity};
use crate::modelio::parser::{parse_raw, RawBlock, RawExpr, SolutionItem};
use crate::modelio::{ModelError, ModelErrorKind, Span};
use crate::superexpr::{
    format_number, render, ExprError, FuncKind, FunctionDef, FunctionDefs, SuperExpr, SymbolId, SymbolKind, SymbolTable,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub var: SymbolId,
    pub body: SuperExpr,
}

/// A vector field on T*M: components on base coordinates and momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub parity: Parity,
    pub components: Vec<(SymbolId, SuperExpr)>,
}

/// Closed-form S-curve `coordinate = f(t, constants, params)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionDecl {
    pub constants: Vec<SymbolId>,
    pub components: Vec<(usize, SuperExpr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub table: SymbolTable,
    pub params: Vec<(SymbolId, f64)>,
    pub functions: Vec<FunctionDecl>,
    /// Stored with every defined function expanded.
    pub lagrangian: Option<SuperExpr>,
    /// Coordinates whose velocity is constrained to zero.
    pub constraint: Vec<usize>,
    pub fields: Vec<FieldDecl>,
    pub solution: Option<SolutionDecl>,
}

impl ModelFile {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn param_value(&self, id: SymbolId) -> Option<f64> {
        self.params.iter().find(|(p, _)| *p == id).map(|(_, v)| *v)
    }

    pub fn function_defs(&self) -> FunctionDefs {
        self.functions
            .iter()
            .map(|f| (f.name.clone(), FunctionDef { name: f.name.clone(), var: f.var, body: f.body.clone() }))
            .collect()
    }

    /// Parses `text` as an expression over this model's symbols, with
    /// defined functions expanded.
    pub fn parse_expr(&self, text: &str) -> Result<SuperExpr, ModelError> {
        let mut p = crate::modelio::parser::Parser::new(text)?;
        let raw = p.expr()?;
        if !p.at_eof() {
            return Err(p.unexpected("end of expression"));
        }
        let ctx = Ctx { table: &self.table, allowed: &|_| true, what: "expression" };
        let e = resolve(&raw, &ctx)?;
        e.expand_functions(&self.function_defs()).map_err(|err| expr_error(raw.span(), err))
    }
}

struct Ctx<'a> {
    table: &'a SymbolTable,
    allowed: &'a dyn Fn(SymbolKind) -> bool,
    what: &'a str,
}

fn expr_error(span: Span, err: ExprError) -> ModelError {
    let kind = match err {
        ExprError::ParityMismatch { .. } | ExprError::OddFunctionArgument => ModelErrorKind::Parity,
        _ => ModelErrorKind::Invalid,
    };
    ModelError::new(kind, span, err.to_string())
}

fn resolve(e: &RawExpr, ctx: &Ctx) -> Result<SuperExpr, ModelError> {
    Ok(match e {
        RawExpr::Num(v, _) => SuperExpr::constant(*v),
        RawExpr::Ident(name, span) => {
            if name == "pi" {
                return Ok(SuperExpr::constant(std::f64::consts::PI));
            }
            let id = ctx
                .table
                .lookup(name)
                .ok_or_else(|| ModelError::new(ModelErrorKind::Undeclared, *span, format!("undeclared symbol '{name}'")))?;
            let kind = ctx.table.info(id).kind;
            if !(ctx.allowed)(kind) {
                return Err(ModelError::invalid(*span, format!("{} may not use '{name}' ({kind})", ctx.what)));
            }
            SuperExpr::symbol(ctx.table, id)
        }
        RawExpr::Call(name, arg, span) => {
            let kind = match FuncKind::from_builtin(name) {
                Some(k) => k,
                None => {
                    if ctx.table.lookup(name).is_some() {
                        return Err(ModelError::invalid(*span, format!("'{name}' is not a function")));
                    }
                    formal_kind(name)
                }
            };
            let a = resolve(arg, ctx)?;
            SuperExpr::func(kind, a).map_err(|err| expr_error(*span, err))?
        }
        RawExpr::Neg(a, _) => -resolve(a, ctx)?,
        RawExpr::Add(a, b) => resolve(a, ctx)? + resolve(b, ctx)?,
        RawExpr::Sub(a, b) => resolve(a, ctx)? - resolve(b, ctx)?,
        RawExpr::Mul(a, b) => resolve(a, ctx)? * resolve(b, ctx)?,
        RawExpr::Div(a, b, span) => {
            let d = resolve(b, ctx)?;
            match d.as_constant() {
                Some(c) if c != 0.0 => resolve(a, ctx)?.scale(1.0 / c),
                Some(_) => return Err(ModelError::invalid(*span, "division by zero")),
                None => return Err(ModelError::invalid(*span, "division is only allowed by numbers")),
            }
        }
        RawExpr::Pow(a, n, span) => resolve(a, ctx)?.powi(*n).map_err(|err| expr_error(*span, err))?,
    })
}

/// `U` is the formal function itself, `U2` its second derivative.
fn formal_kind(name: &str) -> FuncKind {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 && digits < name.len() {
        let (base, order) = name.split_at(name.len() - digits);
        if let Ok(order) = order.parse() {
            return FuncKind::Formal { name: base.to_string(), order };
        }
    }
    FuncKind::Formal { name: name.to_string(), order: 0 }
}

fn once<T>(slot: &mut Option<T>, value: T, span: Span, what: &str) -> Result<(), ModelError> {
    if slot.is_some() {
        return Err(ModelError::invalid(span, format!("duplicate {what} block")));
    }
    *slot = Some(value);
    Ok(())
}

pub fn parse_model(text: &str) -> Result<ModelFile, ModelError> {
    let raw = parse_raw(text)?;

    let mut coords = None;
    let mut params = None;
    let mut lagrangian = None;
    let mut constraint = None;
    let mut solution = None;
    let mut functions = Vec::new();
    let mut fields = Vec::new();
    for block in &raw.blocks {
        match block {
            RawBlock::Coords(items, span) => once(&mut coords, (items, *span), *span, "coords")?,
            RawBlock::Params(items, span) => once(&mut params, items, *span, "params")?,
            RawBlock::Lagrangian(e, span) => once(&mut lagrangian, (e, *span), *span, "lagrangian")?,
            RawBlock::Constraint(items, span) => once(&mut constraint, items, *span, "constraint")?,
            RawBlock::Solution(items, span) => once(&mut solution, (items, *span), *span, "solution")?,
            RawBlock::Function { name, var, body } => functions.push((name, var, body)),
            RawBlock::Field(name, items) => fields.push((name, items)),
        }
    }
    let Some((coord_items, _)) = coords else {
        return Err(ModelError::syntax(raw.name.1, "model has no coords block"));
    };

    let chart: Vec<(String, Parity)> = coord_items.iter().map(|((n, _), p)| (n.clone(), *p)).collect();
    let param_items: Vec<_> = params.map(|v| v.to_vec()).unwrap_or_default();
    let param_names: Vec<String> = param_items.iter().map(|((n, _), _)| n.clone()).collect();
    let mut table = SymbolTable::for_chart(&chart, &param_names).map_err(|e| {
        let span = coord_items
            .iter()
            .map(|((_, s), _)| *s)
            .chain(param_items.iter().map(|((_, s), _)| *s))
            .find(|_| true)
            .unwrap_or_default();
        ModelError::invalid(span, e.to_string())
    })?;
    if let Some((items, _)) = &solution {
        for item in items.iter() {
            if let SolutionItem::Constant((name, span), parity) = item {
                table.add_constant(name, *parity).map_err(|e| ModelError::invalid(*span, e.to_string()))?;
            }
        }
        table.add_time().map_err(|e| ModelError::invalid(raw.name.1, e.to_string()))?;
    }
    let params: Vec<(SymbolId, f64)> =
        param_items.iter().map(|((n, _), v)| (table.lookup(n).expect("declared parameter"), *v)).collect();

    // functions: bodies in parameters and one even variable
    let mut decls = Vec::new();
    let mut seen_fn = BTreeSet::new();
    for ((name, span), (var, var_span), body) in functions {
        if FuncKind::from_builtin(name).is_some() || table.lookup(name).is_some() || !seen_fn.insert(name.clone()) {
            return Err(ModelError::invalid(*span, format!("cannot define function '{name}'")));
        }
        if let FuncKind::Formal { order, .. } = formal_kind(name) {
            if order != 0 {
                return Err(ModelError::invalid(*span, format!("function name '{name}' may not end in digits")));
            }
        }
        let var_id = table
            .lookup(var)
            .filter(|id| table.parity(*id) == Parity::Even)
            .ok_or_else(|| ModelError::invalid(*var_span, format!("'{var}' is not a declared even symbol")))?;
        let allowed = move |k: SymbolKind| matches!(k, SymbolKind::Parameter | SymbolKind::Coordinate { order: 0, .. });
        let ctx = Ctx { table: &table, allowed: &allowed, what: "a function body" };
        let body_expr = resolve(body, &ctx)?;
        if body_expr.has_formal_functions() {
            return Err(ModelError::invalid(body.span(), "function bodies may not call formal functions"));
        }
        if let Some(other) =
            body_expr.free_symbols().into_iter().find(|s| *s != var_id && table.info(*s).kind != SymbolKind::Parameter)
        {
            return Err(ModelError::invalid(
                body.span(),
                format!("function body may only use '{var}' and parameters, found '{}'", table.name(other)),
            ));
        }
        decls.push(FunctionDecl { name: name.clone(), var: var_id, body: body_expr });
    }
    let mut model = ModelFile {
        name: raw.name.0.clone(),
        table,
        params,
        functions: decls,
        lagrangian: None,
        constraint: Vec::new(),
        fields: Vec::new(),
        solution: None,
    };
    let defs = model.function_defs();
    let table = &model.table;

    if let Some((expr, span)) = lagrangian {
        let allowed = |k: SymbolKind| {
            matches!(k, SymbolKind::Parameter | SymbolKind::Coordinate { order: 0, .. } | SymbolKind::Coordinate { order: 1, .. })
        };
        let ctx = Ctx { table, allowed: &allowed, what: "the lagrangian" };
        let l = resolve(expr, &ctx)?.expand_functions(&defs).map_err(|e| expr_error(span, e))?;
        if let Some((key, c)) = l.terms().find(|(k, _)| k.parity() == Parity::Odd) {
            let term = SuperExpr::from_term(c, key.clone());
            return Err(ModelError::new(ModelErrorKind::Parity, expr.span(), format!("term '{}' is odd", render(&term, table))));
        }
        model.lagrangian = Some(l);
    }

    if let Some(items) = constraint {
        let mut out = Vec::new();
        for (name, span) in items.iter() {
            let coord = match table.lookup(name).map(|id| table.info(id).kind) {
                Some(SymbolKind::Coordinate { coord, order: 1 }) => coord,
                Some(_) => {
                    return Err(ModelError::invalid(*span, format!("'{name}' is not a velocity")));
                }
                None => return Err(ModelError::new(ModelErrorKind::Undeclared, *span, format!("undeclared velocity '{name}'"))),
            };
            if out.contains(&coord) {
                return Err(ModelError::invalid(*span, format!("'{name}' constrained twice")));
            }
            out.push(coord);
        }
        model.constraint = out;
    }

    let mut field_decls = Vec::new();
    for ((name, span), items) in fields {
        if field_decls.iter().any(|f: &FieldDecl| &f.name == name) {
            return Err(ModelError::invalid(*span, format!("duplicate field '{name}'")));
        }
        let allowed = |k: SymbolKind| {
            matches!(k, SymbolKind::Parameter | SymbolKind::Coordinate { order: 0, .. } | SymbolKind::Momentum { order: 0, .. })
        };
        let ctx = Ctx { table, allowed: &allowed, what: "a vector field" };
        let mut components: Vec<(SymbolId, SuperExpr)> = Vec::new();
        let mut parity: Option<Parity> = None;
        for ((target, tspan), expr) in items.iter() {
            let id = match table.lookup(target) {
                Some(id)
                    if matches!(
                        table.info(id).kind,
                        SymbolKind::Coordinate { order: 0, .. } | SymbolKind::Momentum { order: 0, .. }
                    ) =>
                {
                    id
                }
                Some(_) => {
                    return Err(ModelError::invalid(
                        *tspan,
                        format!("field components target coordinates or momenta, not '{target}'"),
                    ))
                }
                None => return Err(ModelError::new(ModelErrorKind::Undeclared, *tspan, format!("undeclared symbol '{target}'"))),
            };
            if components.iter().any(|(c, _)| *c == id) {
                return Err(ModelError::invalid(*tspan, format!("duplicate component '{target}'")));
            }
            let value = resolve(expr, &ctx)?.expand_functions(&defs).map_err(|e| expr_error(expr.span(), e))?;
            if !value.is_zero() {
                let p = match value.grading() {
                    Grading::Homogeneous(p) => p + table.parity(id),
                    Grading::Inhomogeneous => {
                        return Err(ModelError::new(
                            ModelErrorKind::Parity,
                            expr.span(),
                            format!("component '{target}' of field '{name}' is inhomogeneous"),
                        ))
                    }
                };
                if parity.is_some_and(|q| q != p) {
                    return Err(ModelError::new(
                        ModelErrorKind::Parity,
                        expr.span(),
                        format!("field '{name}' mixes even and odd components"),
                    ));
                }
                parity = Some(p);
            }
            components.push((id, value));
        }
        field_decls.push(FieldDecl { name: name.clone(), parity: parity.unwrap_or(Parity::Even), components });
    }
    model.fields = field_decls;

    if let Some((items, span)) = solution {
        let allowed = |k: SymbolKind| matches!(k, SymbolKind::Parameter | SymbolKind::Constant | SymbolKind::Time);
        let ctx = Ctx { table, allowed: &allowed, what: "a solution" };
        let mut constants = Vec::new();
        let mut components: Vec<(usize, SuperExpr)> = Vec::new();
        for item in items.iter() {
            match item {
                SolutionItem::Constant((name, _), _) => constants.push(table.lookup(name).expect("added above")),
                SolutionItem::Assign((name, nspan), expr) => {
                    let coord = match table.lookup(name).map(|id| table.info(id).kind) {
                        Some(SymbolKind::Coordinate { coord, order: 0 }) => coord,
                        _ => return Err(ModelError::invalid(*nspan, format!("'{name}' is not a coordinate"))),
                    };
                    if components.iter().any(|(c, _)| *c == coord) {
                        return Err(ModelError::invalid(*nspan, format!("duplicate solution for '{name}'")));
                    }
                    let value = resolve(expr, &ctx)?.expand_functions(&defs).map_err(|e| expr_error(expr.span(), e))?;
                    let parity = table.coordinate_parity(coord);
                    if !value.is_zero() && value.grading() != Grading::Homogeneous(parity) {
                        return Err(ModelError::new(
                            ModelErrorKind::Parity,
                            expr.span(),
                            format!("solution for '{name}' must be {parity}"),
                        ));
                    }
                    components.push((coord, value));
                }
            }
        }
        if components.len() != table.coordinate_count() {
            return Err(ModelError::invalid(span, "solution block must assign every coordinate"));
        }
        components.sort_by_key(|(c, _)| *c);
        model.solution = Some(SolutionDecl { constants, components });
    }
    Ok(model)
}

/// Canonical text of a model; `parse_model(render_model(m)) == m`.
pub fn render_model(m: &ModelFile) -> String {
    let t = &m.table;
    let mut out = String::new();
    let _ = writeln!(out, "model {}", m.name);
    out.push_str("\ncoords {\n");
    for (name, parity) in t.coordinates() {
        let _ = writeln!(out, "  {name}: {parity}");
    }
    out.push_str("}\n");
    if !m.params.is_empty() {
        out.push_str("\nparams {\n");
        for (id, v) in &m.params {
            let _ = writeln!(out, "  {} = {}", t.name(*id), format_number(*v));
        }
        out.push_str("}\n");
    }
    for f in &m.functions {
        let _ = writeln!(out, "\nfunction {}({}) = {}", f.name, t.name(f.var), render(&f.body, t));
    }
    if let Some(l) = &m.lagrangian {
        let _ = writeln!(out, "\nlagrangian: {}", render(l, t));
    }
    if !m.constraint.is_empty() {
        out.push_str("\nconstraint {\n");
        for c in &m.constraint {
            let _ = writeln!(out, "  {} = 0", t.name(t.coord(*c, 1)));
        }
        out.push_str("}\n");
    }
    for f in &m.fields {
        let _ = writeln!(out, "\nfield {} {{", f.name);
        for (id, e) in &f.components {
            let _ = writeln!(out, "  {} = {}", t.name(*id), render(e, t));
        }
        out.push_str("}\n");
    }
    if let Some(s) = &m.solution {
        out.push_str("\nsolution {\n");
        for id in &s.constants {
            let _ = writeln!(out, "  {}: {}", t.name(*id), t.parity(*id));
        }
        for (c, e) in &s.components {
            let _ = writeln!(out, "  {} = {}", t.name(t.coord(*c, 0)), render(e, t));
        }
        out.push_str("}\n");
    }
    out
}
