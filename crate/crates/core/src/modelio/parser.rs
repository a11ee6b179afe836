//! Recursive-descent parser producing an unresolved model AST.

use crate::grassmann::Parity;
use crate::modelio::lexer::{tokenize, Tok, Token};
use crate::modelio::{ModelError, Span};

pub type Ident = (String, Span);

#[derive(Debug, Clone, PartialEq)]
pub enum RawExpr {
    Num(f64, Span),
    Ident(String, Span),
    Call(String, Box<RawExpr>, Span),
    Neg(Box<RawExpr>, Span),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>, Span),
    Pow(Box<RawExpr>, i32, Span),
}

impl RawExpr {
    pub fn span(&self) -> Span {
        match self {
            RawExpr::Num(_, s) | RawExpr::Ident(_, s) | RawExpr::Call(_, _, s) | RawExpr::Neg(_, s) => *s,
            RawExpr::Add(a, _) | RawExpr::Sub(a, _) | RawExpr::Mul(a, _) => a.span(),
            RawExpr::Div(a, _, _) | RawExpr::Pow(a, _, _) => a.span(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionItem {
    Constant(Ident, Parity),
    Assign(Ident, RawExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawBlock {
    Coords(Vec<(Ident, Parity)>, Span),
    Params(Vec<(Ident, f64)>, Span),
    Function { name: Ident, var: Ident, body: RawExpr },
    Lagrangian(RawExpr, Span),
    Constraint(Vec<Ident>, Span),
    Field(Ident, Vec<(Ident, RawExpr)>),
    Solution(Vec<SolutionItem>, Span),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawModel {
    pub name: Ident,
    pub blocks: Vec<RawBlock>,
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ModelError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn expect(&mut self, want: Tok) -> Result<Span, ModelError> {
        if *self.peek() == want {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ModelError {
        ModelError::syntax(self.span(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn ident(&mut self) -> Result<Ident, ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<Span, ModelError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => Ok(self.bump().span),
            _ => Err(self.unexpected(&format!("'{kw}'"))),
        }
    }

    pub fn skip_separators(&mut self) {
        while *self.peek() == Tok::Sep {
            self.bump();
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn parity(&mut self) -> Result<Parity, ModelError> {
        match self.peek() {
            Tok::Ident(s) if s == "even" => {
                self.bump();
                Ok(Parity::Even)
            }
            Tok::Ident(s) if s == "odd" => {
                self.bump();
                Ok(Parity::Odd)
            }
            _ => Err(self.unexpected("'even' or 'odd'")),
        }
    }

    pub fn signed_number(&mut self) -> Result<f64, ModelError> {
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        match *self.peek() {
            Tok::Number(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected("number")),
        }
    }

    pub fn model(&mut self) -> Result<RawModel, ModelError> {
        self.keyword("model")?;
        let name = self.ident()?;
        let mut blocks = Vec::new();
        loop {
            self.skip_separators();
            if self.at_eof() {
                break;
            }
            blocks.push(self.block()?);
        }
        Ok(RawModel { name, blocks })
    }

    fn block(&mut self) -> Result<RawBlock, ModelError> {
        let span = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("block keyword")),
        };
        match kw.as_str() {
            "coords" => {
                self.bump();
                let mut items = Vec::new();
                self.braced(|p| {
                    let name = p.ident()?;
                    p.expect(Tok::Colon)?;
                    items.push((name, p.parity()?));
                    Ok(())
                })?;
                if items.is_empty() {
                    return Err(ModelError::syntax(span, "coordinate block is empty"));
                }
                Ok(RawBlock::Coords(items, span))
            }
            "params" => {
                self.bump();
                let mut items = Vec::new();
                self.braced(|p| {
                    let name = p.ident()?;
                    p.expect(Tok::Eq)?;
                    items.push((name, p.signed_number()?));
                    Ok(())
                })?;
                Ok(RawBlock::Params(items, span))
            }
            "function" => {
                self.bump();
                let name = self.ident()?;
                self.expect(Tok::LParen)?;
                let var = self.ident()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                let body = self.expr()?;
                Ok(RawBlock::Function { name, var, body })
            }
            "lagrangian" => {
                self.bump();
                self.expect(Tok::Colon)?;
                Ok(RawBlock::Lagrangian(self.expr()?, span))
            }
            "constraint" => {
                self.bump();
                let mut items = Vec::new();
                self.braced(|p| {
                    let name = p.ident()?;
                    p.expect(Tok::Eq)?;
                    let zero_span = p.span();
                    if p.signed_number()? != 0.0 {
                        return Err(ModelError::syntax(zero_span, "constraints set velocities to 0"));
                    }
                    items.push(name);
                    Ok(())
                })?;
                Ok(RawBlock::Constraint(items, span))
            }
            "field" => {
                self.bump();
                let name = self.ident()?;
                let mut items = Vec::new();
                self.braced(|p| {
                    let target = p.ident()?;
                    p.expect(Tok::Eq)?;
                    items.push((target, p.expr()?));
                    Ok(())
                })?;
                if items.is_empty() {
                    return Err(ModelError::syntax(span, "field block is empty"));
                }
                Ok(RawBlock::Field(name, items))
            }
            "solution" => {
                self.bump();
                let mut items = Vec::new();
                self.braced(|p| {
                    let name = p.ident()?;
                    if *p.peek() == Tok::Colon {
                        p.bump();
                        items.push(SolutionItem::Constant(name, p.parity()?));
                    } else {
                        p.expect(Tok::Eq)?;
                        items.push(SolutionItem::Assign(name, p.expr()?));
                    }
                    Ok(())
                })?;
                Ok(RawBlock::Solution(items, span))
            }
            other => Err(ModelError::syntax(span, format!("unknown block '{other}'"))),
        }
    }

    /// `{ item (sep? item)* }`
    pub fn braced<F>(&mut self, mut item: F) -> Result<(), ModelError>
    where
        F: FnMut(&mut Parser) -> Result<(), ModelError>,
    {
        self.expect(Tok::LBrace)?;
        loop {
            self.skip_separators();
            if *self.peek() == Tok::RBrace {
                self.bump();
                return Ok(());
            }
            if self.at_eof() {
                return Err(self.unexpected("'}'"));
            }
            item(self)?;
        }
    }

    pub fn expr(&mut self) -> Result<RawExpr, ModelError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = RawExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = RawExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RawExpr, ModelError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = RawExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let span = self.bump().span;
                    lhs = RawExpr::Div(Box::new(lhs), Box::new(self.unary()?), span);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<RawExpr, ModelError> {
        match self.peek() {
            Tok::Minus => {
                let span = self.bump().span;
                Ok(RawExpr::Neg(Box::new(self.unary()?), span))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RawExpr, ModelError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let span = self.bump().span;
        let exp_span = self.span();
        let e = self.signed_number()?;
        if e.fract() != 0.0 || e.abs() > i32::MAX as f64 {
            return Err(ModelError::syntax(exp_span, "exponents must be integers"));
        }
        if *self.peek() == Tok::Caret {
            return Err(ModelError::syntax(self.span(), "chained powers need parentheses"));
        }
        Ok(RawExpr::Pow(Box::new(base), e as i32, span))
    }

    fn atom(&mut self) -> Result<RawExpr, ModelError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok(RawExpr::Num(v, span))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(RawExpr::Call(name, Box::new(arg), span))
                } else {
                    Ok(RawExpr::Ident(name, span))
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

pub fn parse_raw(src: &str) -> Result<RawModel, ModelError> {
    Parser::new(src)?.model()
}
