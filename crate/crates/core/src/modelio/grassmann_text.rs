//! Grassmann literals (`1 + 0.5*z1^z2`) and reparametrisation blocks
//! (`reparam { z1 = z1, z2 = z2, z3 = 0 }`).

use crate::grassmann::{Blade, GrassmannElement};
use crate::modelio::lexer::Tok;
use crate::modelio::parser::Parser;
use crate::modelio::{ModelError, Span};
use crate::superexpr::format_number;

type G = GrassmannElement<f64>;

enum Lit {
    Num(f64),
    Gen(Vec<u32>, Span),
    Neg(Box<Lit>),
    Sum(Box<Lit>, Box<Lit>),
    Prod(Box<Lit>, Box<Lit>),
}

impl Lit {
    fn max_generator(&self) -> u32 {
        match self {
            Lit::Num(_) => 0,
            Lit::Gen(g, _) => g.iter().copied().max().unwrap_or(0),
            Lit::Neg(a) => a.max_generator(),
            Lit::Sum(a, b) | Lit::Prod(a, b) => a.max_generator().max(b.max_generator()),
        }
    }

    fn eval(&self, q: u32) -> Result<G, ModelError> {
        let wrap = |span: Span| move |e: crate::grassmann::GrassmannError| ModelError::invalid(span, e.to_string());
        Ok(match self {
            Lit::Num(v) => G::scalar(q, *v).map_err(wrap(Span::default()))?,
            Lit::Gen(gens, span) => {
                let mut out = G::one(q).map_err(wrap(*span))?;
                for g in gens {
                    out = out.try_mul(&G::generator(q, *g).map_err(wrap(*span))?).map_err(wrap(*span))?;
                }
                out
            }
            Lit::Neg(a) => -a.eval(q)?,
            Lit::Sum(a, b) => &a.eval(q)? + &b.eval(q)?,
            Lit::Prod(a, b) => &a.eval(q)? * &b.eval(q)?,
        })
    }
}

/// Generator word `z1`, `z12` or the concatenated label form `z1z3`.
fn generator_word(word: &str, span: Span) -> Result<Vec<u32>, ModelError> {
    let bad = || ModelError::syntax(span, format!("'{word}' is not a generator (z1, z2, ...)"));
    if !word.starts_with('z') {
        return Err(bad());
    }
    word.split('z').skip(1).map(|d| d.parse::<u32>().ok().filter(|g| *g >= 1).ok_or_else(bad)).collect()
}

fn sum(p: &mut Parser) -> Result<Lit, ModelError> {
    let mut lhs = signed(p)?;
    loop {
        match p.peek() {
            Tok::Plus => {
                p.bump();
                lhs = Lit::Sum(Box::new(lhs), Box::new(signed(p)?));
            }
            Tok::Minus => {
                p.bump();
                lhs = Lit::Sum(Box::new(lhs), Box::new(Lit::Neg(Box::new(signed(p)?))));
            }
            _ => return Ok(lhs),
        }
    }
}

fn signed(p: &mut Parser) -> Result<Lit, ModelError> {
    match p.peek() {
        Tok::Minus => {
            p.bump();
            Ok(Lit::Neg(Box::new(signed(p)?)))
        }
        Tok::Plus => {
            p.bump();
            signed(p)
        }
        _ => product(p),
    }
}

fn product(p: &mut Parser) -> Result<Lit, ModelError> {
    let mut lhs = factor(p)?;
    while matches!(p.peek(), Tok::Star | Tok::Caret) {
        p.bump();
        lhs = Lit::Prod(Box::new(lhs), Box::new(factor(p)?));
    }
    Ok(lhs)
}

fn factor(p: &mut Parser) -> Result<Lit, ModelError> {
    let span = p.span();
    match p.peek().clone() {
        Tok::Number(v) => {
            p.bump();
            Ok(Lit::Num(v))
        }
        Tok::Ident(w) => {
            p.bump();
            Ok(Lit::Gen(generator_word(&w, span)?, span))
        }
        Tok::LParen => {
            p.bump();
            let e = sum(p)?;
            p.expect(Tok::RParen)?;
            Ok(e)
        }
        _ => Err(p.unexpected("number or generator")),
    }
}

/// Parses a Grassmann literal. With `q = None` the generator count is the
/// largest generator index used.
pub fn parse_grassmann(text: &str, q: Option<u32>) -> Result<G, ModelError> {
    let mut p = Parser::new(text)?;
    let lit = sum(&mut p)?;
    if !p.at_eof() {
        return Err(p.unexpected("end of literal"));
    }
    let needed = lit.max_generator();
    let q = q.unwrap_or(needed);
    if needed > q {
        return Err(ModelError::invalid(Span { line: 1, col: 1 }, format!("literal uses z{needed} but q = {q}")));
    }
    lit.eval(q)
}

/// Text form with shortest round-trip coefficients, `0` for zero.
pub fn render_grassmann(g: &G) -> String {
    if g.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (blade, c)) in g.terms().enumerate() {
        let c = *c;
        if i == 0 {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
        }
        out.push_str(&format_number(c.abs()));
        if blade != Blade::ONE {
            let wedge: Vec<String> = blade.generators().map(|g| format!("z{g}")).collect();
            out.push('*');
            out.push_str(&wedge.join("^"));
        }
    }
    out
}

/// A `reparam { z1 = ..., ... }` block: the images of the source generators
/// in Λ_{target_q}. Returns `(images, target_q)`; the source `q` is
/// `images.len()`. `reparam 3 { ... }` fixes the target generator count.
pub fn parse_reparam(text: &str) -> Result<(Vec<G>, u32), ModelError> {
    let mut p = Parser::new(text)?;
    p.keyword("reparam")?;
    let explicit_q = match *p.peek() {
        Tok::Number(v) if v >= 0.0 && v.fract() == 0.0 => {
            p.bump();
            Some(v as u32)
        }
        _ => None,
    };
    let mut entries: Vec<(u32, Lit, Span)> = Vec::new();
    p.braced(|p| {
        let (name, span) = p.ident()?;
        let gens = generator_word(&name, span)?;
        if gens.len() != 1 {
            return Err(ModelError::syntax(span, "left-hand sides are single generators"));
        }
        p.expect(Tok::Eq)?;
        let rhs_span = p.span();
        let image = sum(p)?;
        if entries.iter().any(|(g, _, _)| *g == gens[0]) {
            return Err(ModelError::invalid(span, format!("z{} mapped twice", gens[0])));
        }
        entries.push((gens[0], image, rhs_span));
        Ok(())
    })?;
    p.skip_separators();
    if !p.at_eof() {
        return Err(p.unexpected("end of input"));
    }
    entries.sort_by_key(|(g, _, _)| *g);
    for (i, (g, _, span)) in entries.iter().enumerate() {
        if *g != i as u32 + 1 {
            return Err(ModelError::invalid(*span, format!("missing image for z{}", i + 1)));
        }
    }
    let needed = entries.iter().map(|(_, l, _)| l.max_generator()).max().unwrap_or(0);
    let target_q = explicit_q.unwrap_or(needed);
    if needed > target_q {
        return Err(ModelError::invalid(
            Span { line: 1, col: 1 },
            format!("images use z{needed} but the target has q = {target_q}"),
        ));
    }
    let mut images = Vec::with_capacity(entries.len());
    for (g, lit, span) in &entries {
        let image = lit.eval(target_q)?;
        if !image.is_zero() && image.grading() != crate::grassmann::Grading::Homogeneous(crate::grassmann::Parity::Odd) {
            return Err(ModelError::new(crate::modelio::ModelErrorKind::Parity, *span, format!("image of z{g} must be odd")));
        }
        images.push(image);
    }
    Ok((images, target_q))
}
