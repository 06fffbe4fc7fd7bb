//! Text syntax for necklace sums and height sums.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := "-"* joined ("*" joined)*
//! joined := atom ("&" atom)*
//! atom   := rational | "hbar" ("^" int)? | "cyc(" arrows ")" | "e(" vertex ")"
//!         | "h[" "(" arrow "," height ")" ("," ...)* "]" | "(" expr ")"
//! ```
//!
//! `&` places monomial atoms side by side: explicit heights are kept and
//! must be distinct, while `cyc` and `e` atoms are stacked above them in
//! order. Between two height sums `*` is the star product.
//!
//! ```
//! use quiver_quant::expr::parse_necklace;
//! use quiver_quant::Quiver;
//!
//! let q = Quiver::jordan().double().unwrap();
//! assert!(parse_necklace("cyc(a,a*) - cyc(a*,a)", &q).unwrap().is_zero());
//! ```

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::hpoly::HPoly;
use crate::necklace::{Necklace, NecklaceSum};
use crate::quiver::{ArrowId, Quiver, VertexId};
use crate::schedler::{HeightMonomial, HeightSum, Schedler, Slot};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
            }
            Tok::Num(s.parse().expect("digits"))
        } else if c.is_alphanumeric() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
            }
            Tok::Ident(s)
        } else if "+-*&^/(),[]".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Parse { line, column, message: format!("unexpected character `{c}`") });
        };
        column += chars_consumed(&tok);
        out.push(Token { tok, line: start.0, column: start.1 });
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

fn chars_consumed(t: &Tok) -> usize {
    match t {
        Tok::Num(n) => n.to_string().len(),
        Tok::Ident(s) => s.chars().count(),
        Tok::Sym(_) => 1,
        Tok::End => 0,
    }
}

/// Target of a parse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Necklace,
    Height,
}

/// A parsed element.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Necklace(NecklaceSum),
    Height(HeightSum),
}

#[derive(Clone, Debug)]
enum Val {
    Scalar(HPoly),
    Neck(NecklaceSum),
    Height(HeightSum),
}

/// One factor of an `&` group before heights are assigned.
enum Piece {
    Explicit(Vec<Slot>),
    Cyclic(Necklace),
    Idem(VertexId),
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    q: &'a Quiver,
    kind: ExprKind,
    alg: Option<&'a Schedler>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err_at<T>(&self, t: &Token, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: t.line, column: t.column, message: message.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.err_at(&t, format!("expected `{c}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => self.err_at(&t, format!("expected {what}")),
        }
    }

    /// Arrow names may end in a `*` written directly after them.
    fn arrow(&mut self) -> Result<ArrowId> {
        let (mut name, t) = self.ident("an arrow name")?;
        let star = self.peek();
        if star.tok == Tok::Sym('*') && star.line == t.line && star.column == t.column + name.chars().count() {
            self.next();
            name.push('*');
        }
        match self.q.arrow_by_name(&name) {
            Ok(a) => Ok(a),
            Err(_) => self.err_at(&t, format!("unknown arrow `{name}`")),
        }
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        loop {
            let t = self.peek().clone();
            let sign = match t.tok {
                Tok::Sym('+') => 1,
                Tok::Sym('-') => -1,
                _ => return Ok(acc),
            };
            self.next();
            let rhs = self.term()?;
            let rhs = if sign < 0 { self.negate(rhs) } else { rhs };
            acc = self.add(acc, rhs, &t)?;
        }
    }

    fn term(&mut self) -> Result<Val> {
        let mut neg = false;
        while self.is_sym('-') {
            self.next();
            neg = !neg;
        }
        let mut acc = self.joined()?;
        while self.is_sym('*') {
            let t = self.next();
            let rhs = self.joined()?;
            acc = self.mul(acc, rhs, &t)?;
        }
        Ok(if neg { self.negate(acc) } else { acc })
    }

    fn joined(&mut self) -> Result<Val> {
        if !self.starts_piece() {
            return self.atom();
        }
        let first = self.peek().clone();
        let mut pieces = vec![self.piece()?];
        while self.is_sym('&') {
            self.next();
            if !self.starts_piece() {
                let t = self.peek().clone();
                return self.err_at(&t, "`&` joins only h[...], cyc(...) and e(...) atoms");
            }
            pieces.push(self.piece()?);
        }
        if pieces.len() == 1 && self.kind == ExprKind::Necklace {
            return match pieces.pop().expect("one") {
                Piece::Cyclic(n) => Ok(Val::Neck(n.into())),
                Piece::Idem(v) => Ok(Val::Neck(Necklace::idempotent(v).into())),
                Piece::Explicit(_) => self.err_at(&first, "height words are not necklaces"),
            };
        }
        if self.kind == ExprKind::Necklace {
            return self.err_at(&first, "`&` is only available for height sums");
        }
        let m = self.assemble(pieces)?;
        Ok(Val::Height(m.into()))
    }

    fn starts_piece(&self) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == "cyc" || s == "e" || s == "h")
            && self.toks.get(self.pos + 1).is_some_and(|t| t.tok == Tok::Sym('(') || t.tok == Tok::Sym('['))
    }

    fn piece(&mut self) -> Result<Piece> {
        let (name, t) = self.ident("an atom")?;
        match name.as_str() {
            "cyc" => {
                self.expect('(')?;
                let mut word = vec![self.arrow()?];
                while self.is_sym(',') {
                    self.next();
                    word.push(self.arrow()?);
                }
                self.expect(')')?;
                Ok(Piece::Cyclic(Necklace::new(self.q, &word)?))
            }
            "e" => {
                self.expect('(')?;
                let (v, vt) = self.ident("a vertex name")?;
                self.expect(')')?;
                match self.q.vertex_by_name(&v) {
                    Ok(id) => Ok(Piece::Idem(id)),
                    Err(_) => self.err_at(&vt, format!("unknown vertex `{v}`")),
                }
            }
            "h" => {
                if self.kind == ExprKind::Necklace {
                    return self.err_at(&t, "height words are not necklaces");
                }
                self.expect('[')?;
                let mut slots = Vec::new();
                loop {
                    self.expect('(')?;
                    let a = self.arrow()?;
                    self.expect(',')?;
                    let ht = self.next();
                    let h = match &ht.tok {
                        Tok::Num(n) => match u32::try_from(n) {
                            Ok(h) if h > 0 => h,
                            _ => return self.err_at(&ht, "heights are positive integers"),
                        },
                        _ => return self.err_at(&ht, "expected a height"),
                    };
                    self.expect(')')?;
                    slots.push((a, h));
                    if self.is_sym(',') {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(']')?;
                Ok(Piece::Explicit(slots))
            }
            _ => unreachable!("checked by starts_piece"),
        }
    }

    fn assemble(&self, pieces: Vec<Piece>) -> Result<HeightMonomial> {
        let mut top = pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Explicit(s) => s.iter().map(|x| x.1).max(),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut comps = Vec::new();
        let mut idem = Vec::new();
        for p in pieces {
            match p {
                Piece::Explicit(s) => comps.push(s),
                Piece::Cyclic(n) => comps.push(
                    n.word()
                        .iter()
                        .map(|&a| {
                            top += 1;
                            (a, top)
                        })
                        .collect(),
                ),
                Piece::Idem(v) => idem.push(v),
            }
        }
        HeightMonomial::new(self.q, comps, idem)
    }

    fn atom(&mut self) -> Result<Val> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => {
                let mut r = Rational::from_integer(n.clone());
                if self.is_sym('/') {
                    self.next();
                    let d = self.next();
                    match &d.tok {
                        Tok::Num(m) if !m.is_zero() => r = Rational::new(n.clone(), m.clone()),
                        _ => return self.err_at(&d, "expected a nonzero denominator"),
                    }
                }
                Ok(Val::Scalar(HPoly::constant(r)))
            }
            Tok::Ident(s) if s == "hbar" => {
                if self.kind == ExprKind::Necklace {
                    return self.err_at(&t, "necklace sums have rational coefficients");
                }
                let mut k = 1;
                if self.is_sym('^') {
                    self.next();
                    let e = self.next();
                    k = match &e.tok {
                        Tok::Num(n) => match usize::try_from(n) {
                            Ok(k) => k,
                            Err(_) => return self.err_at(&e, "exponent too large"),
                        },
                        _ => return self.err_at(&e, "expected an exponent"),
                    };
                }
                Ok(Val::Scalar(HPoly::monomial(Rational::one(), k)))
            }
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::End => self.err_at(&t, "unexpected end of input"),
            _ => self.err_at(&t, "expected a term"),
        }
    }

    fn negate(&self, v: Val) -> Val {
        match v {
            Val::Scalar(c) => Val::Scalar(-c),
            Val::Neck(n) => Val::Neck(n.scale(&-Rational::one())),
            Val::Height(h) => Val::Height(h.scale(&HPoly::from_int(-1))),
        }
    }

    fn lift_scalar(&self, c: HPoly, at: &Token) -> Result<Val> {
        match self.kind {
            ExprKind::Height => Ok(Val::Height(HeightSum::one().scale(&c))),
            ExprKind::Necklace => self.err_at(at, "a bare scalar is not a necklace sum"),
        }
    }

    fn add(&self, x: Val, y: Val, at: &Token) -> Result<Val> {
        match (x, y) {
            (Val::Scalar(a), Val::Scalar(b)) => Ok(Val::Scalar(&a + &b)),
            (Val::Neck(a), Val::Neck(b)) => Ok(Val::Neck(a.add(&b))),
            (Val::Height(a), Val::Height(b)) => Ok(Val::Height(a.add(&b))),
            (Val::Scalar(a), h @ Val::Height(_)) => {
                let a = self.lift_scalar(a, at)?;
                self.add(a, h, at)
            }
            (h @ Val::Height(_), Val::Scalar(b)) => {
                let b = self.lift_scalar(b, at)?;
                self.add(h, b, at)
            }
            _ => self.err_at(at, "cannot add a scalar to a necklace sum"),
        }
    }

    fn mul(&self, x: Val, y: Val, at: &Token) -> Result<Val> {
        match (x, y) {
            (Val::Scalar(a), Val::Scalar(b)) => Ok(Val::Scalar(&a * &b)),
            (Val::Scalar(a), Val::Neck(n)) | (Val::Neck(n), Val::Scalar(a)) => {
                if !a.is_constant() {
                    return self.err_at(at, "necklace sums have rational coefficients");
                }
                Ok(Val::Neck(n.scale(&a.coeff(0))))
            }
            (Val::Scalar(a), Val::Height(h)) | (Val::Height(h), Val::Scalar(a)) => Ok(Val::Height(h.scale(&a))),
            (Val::Height(a), Val::Height(b)) => match self.alg {
                Some(alg) => Ok(Val::Height(alg.star(&a, &b))),
                None => self.err_at(at, "the star product needs a skein convention"),
            },
            (Val::Neck(_), Val::Neck(_)) => self.err_at(at, "necklaces have no product; use the bracket"),
            _ => self.err_at(at, "cannot multiply these operands"),
        }
    }
}

fn run(text: &str, q: &Quiver, kind: ExprKind, alg: Option<&Schedler>) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, pos: 0, q, kind, alg };
    if p.peek().tok == Tok::End {
        let t = p.peek().clone();
        return p.err_at(&t, "empty expression");
    }
    let v = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err_at(&t, "unexpected trailing input");
    }
    match (kind, v) {
        (ExprKind::Necklace, Val::Neck(n)) => Ok(Expr::Necklace(n)),
        (ExprKind::Necklace, Val::Scalar(c)) if c.is_zero() => Ok(Expr::Necklace(NecklaceSum::zero())),
        (ExprKind::Height, Val::Height(h)) => Ok(Expr::Height(h)),
        (ExprKind::Height, Val::Scalar(c)) => Ok(Expr::Height(HeightSum::one().scale(&c))),
        _ => Err(Error::Parse { line: 1, column: 1, message: "expression has the wrong kind".into() }),
    }
}

/// Parse either kind. `alg` enables `*` between height sums.
pub fn parse_expression(text: &str, q: &Quiver, kind: ExprKind, alg: Option<&Schedler>) -> Result<Expr> {
    run(text, q, kind, alg)
}

pub fn parse_necklace(text: &str, q: &Quiver) -> Result<NecklaceSum> {
    match run(text, q, ExprKind::Necklace, None)? {
        Expr::Necklace(n) => Ok(n),
        Expr::Height(_) => unreachable!("kind is fixed"),
    }
}

/// Height sums are returned as written, without rewriting to normal form.
pub fn parse_height(text: &str, q: &Quiver, alg: Option<&Schedler>) -> Result<HeightSum> {
    match run(text, q, ExprKind::Height, alg)? {
        Expr::Height(h) => Ok(h),
        Expr::Necklace(_) => unreachable!("kind is fixed"),
    }
}
