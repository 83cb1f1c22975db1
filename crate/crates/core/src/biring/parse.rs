//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! variable := z | X0' | X1' | X<i>
//! ```
//!
//! Division is only allowed by nonzero constants. `z` never mixes with `X0'`, `X1'` or `X0`.

use num_bigint::BigInt;

use super::poly::{AffinePolynomial, BiPolynomial};
use super::sparse::SparsePoly;
use crate::error::{Error, Result};
use crate::exactalg::{Field, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Z,
    XPrime(usize),
    X(usize),
}

#[derive(Debug, Clone)]
enum Ast {
    Int(BigInt),
    Var(Var, usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, u32),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(Var),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Int(text.parse().expect("digits")), start));
        } else if c == 'z' {
            out.push((Tok::Var(Var::Z), i));
            i += 1;
        } else if c == 'X' {
            let start = i;
            i += 1;
            let ds = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if ds == i {
                return Err(Error::Parse { pos: start, msg: "expected index after X".into() });
            }
            let idx: usize = chars[ds..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse { pos: ds, msg: "variable index too large".into() })?;
            if i < chars.len() && (chars[i] == '\'' || chars[i] == '′') {
                i += 1;
                if idx > 1 {
                    return Err(Error::Parse { pos: start, msg: format!("unknown variable X{idx}'") });
                }
                out.push((Tok::Var(Var::XPrime(idx)), start));
            } else {
                out.push((Tok::Var(Var::X(idx)), start));
            }
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let at = self.here();
                self.pos += 1;
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), at);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            Ok(Ast::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            let at = self.here();
            match self.peek().cloned() {
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    let k: u32 = k
                        .try_into()
                        .map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
                    Ok(Ast::Pow(Box::new(base), k))
                }
                _ => Err(Error::Parse { pos: at, msg: "expected integer exponent".into() }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Ast::Int(k))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Ast::Var(v, at))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse { pos: self.here(), msg: "expected ')'".into() });
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse { pos: at, msg: format!("unexpected token {t:?}") }),
            None => Err(Error::Parse { pos: at, msg: "unexpected end of input".into() }),
        }
    }
}

fn parse_ast(s: &str) -> Result<Ast> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks, pos: 0, end: s.chars().count() };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse { pos: p.here(), msg: "trailing input".into() });
    }
    Ok(ast)
}

fn collect_vars(ast: &Ast, out: &mut Vec<(Var, usize)>) {
    match ast {
        Ast::Int(_) => {}
        Ast::Var(v, at) => out.push((*v, *at)),
        Ast::Neg(a) | Ast::Pow(a, _) => collect_vars(a, out),
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b, _) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Affine,
    Bi,
}

fn lower(ast: &Ast, field: Field, n: usize, mode: Mode) -> Result<SparsePoly> {
    let nvars = match mode {
        Mode::Affine => n + 1,
        Mode::Bi => n + 3,
    };
    Ok(match ast {
        Ast::Int(k) => SparsePoly::constant(Scalar::from_bigint(field, k), nvars),
        Ast::Var(v, _) => {
            let slot = match (mode, *v) {
                (Mode::Affine, Var::Z) => 0,
                (Mode::Affine, Var::X(i)) if (1..=n).contains(&i) => i,
                (Mode::Bi, Var::XPrime(i)) => i,
                (Mode::Bi, Var::X(i)) if i <= n => i + 2,
                (_, Var::X(i)) if i > n => {
                    return Err(Error::ArityMismatch { expected: n, found: i });
                }
                _ => {
                    return Err(Error::MixedVariables);
                }
            };
            let mut e = vec![0; nvars];
            e[slot] = 1;
            SparsePoly::from_terms(field, nvars, [(e, Scalar::one(field))])?
        }
        Ast::Neg(a) => lower(a, field, n, mode)?.neg(),
        Ast::Add(a, b) => lower(a, field, n, mode)?.add(&lower(b, field, n, mode)?)?,
        Ast::Sub(a, b) => lower(a, field, n, mode)?.sub(&lower(b, field, n, mode)?)?,
        Ast::Mul(a, b) => lower(a, field, n, mode)?.mul(&lower(b, field, n, mode)?)?,
        Ast::Pow(a, k) => lower(a, field, n, mode)?.pow(*k),
        Ast::Div(a, b, at) => {
            let den = lower(b, field, n, mode)?;
            let c = match den.terms.iter().next() {
                Some((e, c)) if den.terms.len() == 1 && e.iter().all(|&x| x == 0) => c.clone(),
                None => return Err(Error::Parse { pos: *at, msg: "division by zero".into() }),
                _ => {
                    return Err(Error::Parse {
                        pos: *at,
                        msg: "division only by nonzero constants".into(),
                    })
                }
            };
            let inv = c.inv().map_err(|_| Error::Parse { pos: *at, msg: "division by zero".into() })?;
            lower(a, field, n, mode)?.scale(&inv)?
        }
    })
}

fn detect(ast: &Ast) -> Result<Option<Mode>> {
    let mut vars = Vec::new();
    collect_vars(ast, &mut vars);
    let affine = vars.iter().any(|(v, _)| *v == Var::Z);
    let bi = vars.iter().any(|(v, _)| matches!(v, Var::XPrime(_) | Var::X(0)));
    match (affine, bi) {
        (true, true) => Err(Error::MixedVariables),
        (true, false) => Ok(Some(Mode::Affine)),
        (false, true) => Ok(Some(Mode::Bi)),
        (false, false) => Ok(None),
    }
}

/// Parses a polynomial of `k[z][X1..Xn]`.
pub fn parse_affine(s: &str, field: Field, n: usize) -> Result<AffinePolynomial> {
    let ast = parse_ast(s)?;
    if detect(&ast)? == Some(Mode::Bi) {
        return Err(Error::MixedVariables);
    }
    Ok(AffinePolynomial::from_sparse(n, lower(&ast, field, n, Mode::Affine)?))
}

/// Parses a polynomial of `k[X0',X1'][X0..Xn]`.
pub fn parse_bi(s: &str, field: Field, n: usize) -> Result<BiPolynomial> {
    let ast = parse_ast(s)?;
    if detect(&ast)? == Some(Mode::Affine) {
        return Err(Error::MixedVariables);
    }
    Ok(BiPolynomial::from_sparse(n, lower(&ast, field, n, Mode::Bi)?))
}

/// Either representation, chosen from the variables used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyPolynomial {
    Affine(AffinePolynomial),
    Bi(BiPolynomial),
}

impl AnyPolynomial {
    pub fn to_affine(&self) -> AffinePolynomial {
        match self {
            AnyPolynomial::Affine(p) => p.clone(),
            AnyPolynomial::Bi(p) => p.dehomogenize(),
        }
    }

    pub fn to_bi(&self) -> BiPolynomial {
        match self {
            AnyPolynomial::Affine(p) => p.bihomogenize(),
            AnyPolynomial::Bi(p) => p.clone(),
        }
    }
}

/// Parses either kind; polynomials in `X1..Xn` and constants only are read as affine.
pub fn parse_poly(s: &str, field: Field, n: usize) -> Result<AnyPolynomial> {
    let ast = parse_ast(s)?;
    match detect(&ast)? {
        Some(Mode::Bi) => Ok(AnyPolynomial::Bi(BiPolynomial::from_sparse(
            n,
            lower(&ast, field, n, Mode::Bi)?,
        ))),
        _ => Ok(AnyPolynomial::Affine(AffinePolynomial::from_sparse(
            n,
            lower(&ast, field, n, Mode::Affine)?,
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_roundtrip_text() {
        let p = parse_affine("z^2*X1 + X2^2 - 3/2", Field::Rational, 2).unwrap();
        assert_eq!(p.to_string(), "z^2*X1 + X2^2 - 3/2");
        let q = parse_affine(&p.to_string(), Field::Rational, 2).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn bi_text() {
        let p = parse_bi("X1*X0' - X1'*X0", Field::Rational, 1).unwrap();
        assert_eq!(p.bidegree(), Some((1, 1)));
        assert_eq!(p.to_string(), "X0'*X1 - X1'*X0");
    }

    #[test]
    fn mixed_rejected() {
        assert!(matches!(parse_poly("z*X0 + X1", Field::Rational, 1), Err(Error::MixedVariables)));
        assert!(matches!(parse_affine("X0'", Field::Rational, 1), Err(Error::MixedVariables)));
        assert!(matches!(parse_bi("z", Field::Rational, 1), Err(Error::MixedVariables)));
    }

    #[test]
    fn arity_and_syntax_errors() {
        assert!(matches!(parse_affine("X3", Field::Rational, 2), Err(Error::ArityMismatch { .. })));
        assert!(matches!(parse_affine("X1 +", Field::Rational, 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_affine("X1/z", Field::Rational, 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_affine("(X1", Field::Rational, 1), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_affine("X1 ? 2", Field::Rational, 1), Err(Error::Parse { pos: 3, .. })));
    }

    #[test]
    fn modular_literals() {
        let f = Field::prime(5).unwrap();
        let p = parse_affine("7*z - 1/2", f, 0).unwrap();
        assert_eq!(p.to_string(), "2*z + 2");
    }

    #[test]
    fn ambiguous_is_affine() {
        assert!(matches!(parse_poly("X1^2 - 1", Field::Rational, 1), Ok(AnyPolynomial::Affine(_))));
        assert!(matches!(parse_poly("X0*X1", Field::Rational, 1), Ok(AnyPolynomial::Bi(_))));
    }
}
