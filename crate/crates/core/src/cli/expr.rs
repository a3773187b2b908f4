//! Phase expression syntax.
//!
//! ZX: rational multiples of `pi` plus integer multiples of variables,
//! e.g. `pi/2 + 2*a1 - a2`. ZH/ZW: Laurent expressions over the declared
//! variables with Gaussian-rational literals, e.g. `(1 - 2*i)*a^2 + a^-1`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::diagram::{Angle, Language, PhaseExpr};
use crate::phasepoly::{Coeff, Exponents, LaurentPoly};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

/// `(column offset, message)`.
pub type ExprError = (usize, String);

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(k + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            out.push((start, Tok::Num(parse_decimal(&text).ok_or((start, format!("bad number `{text}`")))?)));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_alphanumeric() || "_@.'~".contains(chars[k])) {
                // a trailing '.' belongs to the identifier only if followed by a digit
                if chars[k] == '.' && !chars.get(k + 1).is_some_and(|d| d.is_ascii_digit()) {
                    break;
                }
                k += 1;
            }
            out.push((start, Tok::Ident(chars[start..k].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((k, Tok::Op(c)));
            k += 1;
        } else {
            return Err((k, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// Exact value of a decimal literal such as `0.125` or `1.5e-3`.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(p) => (&text[..p], text[p + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

#[derive(Clone, Debug)]
enum Ast {
    Num(BigRational),
    Ident(String),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Ast::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        let col = self.col();
        match self.toks.get(self.pos).map(|t| t.1.clone()) {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Ast::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Ast::Ident(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err((self.col(), "expected `)`".into())),
                }
            }
            Some(t) => Err((col, format!("unexpected `{}`", tok_text(&t)))),
            None => Err((col, "unexpected end of expression".into())),
        }
    }
}

fn tok_text(t: &Tok) -> String {
    match t {
        Tok::Num(n) => n.to_string(),
        Tok::Ident(s) => s.clone(),
        Tok::Op(c) => c.to_string(),
    }
}

fn parse_ast(s: &str) -> Result<Ast, ExprError> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: s.chars().count(),
    };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err((p.col(), format!("unexpected `{}`", tok_text(&p.toks[p.pos].1))));
    }
    Ok(ast)
}

/// ZX value during evaluation: `number + pi_part·π + Σ coeff·var`.
#[derive(Clone, Debug, Default)]
struct Linear {
    number: BigRational,
    pi: BigRational,
    vars: BTreeMap<String, BigRational>,
}

impl Linear {
    fn as_number(&self) -> Option<&BigRational> {
        (self.pi.is_zero() && self.vars.is_empty()).then_some(&self.number)
    }

    fn scale(mut self, k: &BigRational) -> Linear {
        self.number *= k;
        self.pi *= k;
        for v in self.vars.values_mut() {
            *v *= k;
        }
        self.vars.retain(|_, v| !v.is_zero());
        self
    }

    fn add(mut self, other: Linear, sign: i64) -> Linear {
        let s = BigRational::from_integer(BigInt::from(sign));
        self.number += &other.number * &s;
        self.pi += &other.pi * &s;
        for (k, v) in other.vars {
            *self.vars.entry(k).or_insert_with(BigRational::zero) += v * &s;
        }
        self.vars.retain(|_, v| !v.is_zero());
        self
    }
}

fn eval_linear(ast: &Ast, vars: &[String]) -> Result<Linear, String> {
    Ok(match ast {
        Ast::Num(n) => Linear {
            number: n.clone(),
            ..Linear::default()
        },
        Ast::Ident(s) if s == "pi" => Linear {
            pi: BigRational::one(),
            ..Linear::default()
        },
        Ast::Ident(s) if vars.contains(s) => {
            let mut l = Linear::default();
            l.vars.insert(s.clone(), BigRational::one());
            l
        }
        Ast::Ident(s) => return Err(format!("`{s}` is not a declared phase variable")),
        Ast::Neg(a) => eval_linear(a, vars)?.scale(&-BigRational::one()),
        Ast::Bin(op, a, b) => {
            let (x, y) = (eval_linear(a, vars)?, eval_linear(b, vars)?);
            match op {
                '+' => x.add(y, 1),
                '-' => x.add(y, -1),
                '*' => match (x.as_number().cloned(), y.as_number().cloned()) {
                    (Some(k), _) => y.scale(&k),
                    (_, Some(k)) => x.scale(&k),
                    _ => return Err("ZX phases must be linear in pi and the variables".into()),
                },
                '/' => match y.as_number() {
                    Some(k) if !k.is_zero() => x.scale(&k.recip()),
                    Some(_) => return Err("division by zero".into()),
                    None => return Err("ZX phases can only be divided by numbers".into()),
                },
                _ => match (x.as_number(), y.as_number()) {
                    (Some(b), Some(e)) if e.is_integer() => {
                        let e = e.to_integer().to_i32().ok_or("exponent too large")?;
                        if b.is_zero() && e < 0 {
                            return Err("division by zero".into());
                        }
                        Linear {
                            number: num_traits::pow::Pow::pow(b.clone(), e),
                            ..Linear::default()
                        }
                    }
                    _ => return Err("`^` in a ZX phase needs numeric operands and an integer exponent".into()),
                },
            }
        }
    })
}

fn eval_poly(ast: &Ast, vars: &[String]) -> Result<LaurentPoly, String> {
    Ok(match ast {
        Ast::Num(n) => LaurentPoly::constant(Coeff::from_rational(n.clone())),
        Ast::Ident(s) if s == "i" => LaurentPoly::constant(Coeff::i()),
        Ast::Ident(s) if vars.contains(s) => LaurentPoly::var(s),
        Ast::Ident(s) if s == "pi" => return Err("`pi` is only available in ZX phases".into()),
        Ast::Ident(s) => return Err(format!("`{s}` is not a declared phase variable")),
        Ast::Neg(a) => -eval_poly(a, vars)?,
        Ast::Bin(op, a, b) => {
            let (x, y) = (eval_poly(a, vars)?, eval_poly(b, vars)?);
            match op {
                '+' => &x + &y,
                '-' => &x - &y,
                '*' => &x * &y,
                '/' => &x * &invert(&y)?,
                _ => {
                    let e = y
                        .as_constant()
                        .and_then(|c| integer_of(&c))
                        .ok_or("exponent must be an integer")?;
                    let base = if e < 0 { invert(&x)? } else { x };
                    let mut acc = LaurentPoly::one();
                    for _ in 0..e.unsigned_abs() {
                        acc = &acc * &base;
                    }
                    acc
                }
            }
        }
    })
}

fn integer_of(c: &Coeff) -> Option<i32> {
    match c {
        Coeff::Exact(g) if g.im.is_zero() && g.re.is_integer() => g.re.to_integer().to_i32(),
        _ => None,
    }
}

/// Inverse of a single nonzero term.
fn invert(p: &LaurentPoly) -> Result<LaurentPoly, String> {
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((e, c)), None) => {
            let inv = c.inv().ok_or("division by zero")?;
            let neg = Exponents::from_pairs(e.iter().map(|(v, k)| (v, -k)));
            Ok(LaurentPoly::monomial(inv, neg))
        }
        (None, _) => Err("division by zero".into()),
        _ => Err("can only divide by a single term".into()),
    }
}

/// Parse `text` as a phase in `language` over the declared `vars`.
pub fn parse_phase(language: Language, text: &str, vars: &[String]) -> Result<PhaseExpr, ExprError> {
    let ast = parse_ast(text)?;
    match language {
        Language::Zx => {
            let l = eval_linear(&ast, vars).map_err(|m| (0, m))?;
            if !l.number.is_zero() {
                return Err((0, "ZX phase constants must be multiples of pi".into()));
            }
            let mut coeffs = Vec::new();
            for (v, k) in l.vars {
                if !k.is_integer() {
                    return Err((0, format!("coefficient of `{v}` must be an integer")));
                }
                let k = k.to_integer().to_i64().ok_or((0, "coefficient too large".to_string()))?;
                coeffs.push((v, k));
            }
            Ok(PhaseExpr::linear(Angle::from_pi_multiple(l.pi), coeffs))
        }
        Language::Zh | Language::Zw => eval_poly(&ast, vars).map(PhaseExpr::poly).map_err(|m| (0, m)),
    }
}

/// Parse a numeric value: an angle for ZX, a complex number otherwise.
pub fn parse_value(language: Language, text: &str) -> Result<crate::diagram::PhaseValue, ExprError> {
    use crate::diagram::PhaseValue;
    match parse_phase(language, text, &[])? {
        PhaseExpr::AngleLinear { constant, .. } => Ok(PhaseValue::Angle(constant)),
        PhaseExpr::PolyPhase(p) => Ok(PhaseValue::Complex(p.as_constant().unwrap_or_else(Coeff::zero))),
    }
}
