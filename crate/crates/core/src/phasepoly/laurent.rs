//! Multivariate Laurent polynomials over [`Coeff`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::coeff::Coeff;
use super::PolyError;

/// A degree in one variable: either `−∞` (the zero polynomial) or a
/// non-negative integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    /// `−∞` counts as zero.
    pub fn or_zero(self) -> u32 {
        match self {
            Degree::NegInfinity => 0,
            Degree::Finite(d) => d,
        }
    }

    pub fn is_neg_infinity(self) -> bool {
        self == Degree::NegInfinity
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Positive and negative degree of a polynomial (or matrix) in one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DegreePair {
    pub pos: Degree,
    pub neg: Degree,
}

impl DegreePair {
    pub const ZERO_POLY: DegreePair = DegreePair {
        pos: Degree::NegInfinity,
        neg: Degree::NegInfinity,
    };

    pub fn finite(pos: u32, neg: u32) -> Self {
        DegreePair {
            pos: Degree::Finite(pos),
            neg: Degree::Finite(neg),
        }
    }

    /// Componentwise maximum.
    pub fn join(self, other: DegreePair) -> DegreePair {
        DegreePair {
            pos: self.pos.max(other.pos),
            neg: self.neg.max(other.neg),
        }
    }

    /// Componentwise `≤`.
    pub fn le(&self, other: &DegreePair) -> bool {
        self.pos <= other.pos && self.neg <= other.neg
    }
}

impl Add for DegreePair {
    type Output = DegreePair;
    fn add(self, rhs: DegreePair) -> DegreePair {
        DegreePair {
            pos: self.pos + rhs.pos,
            neg: self.neg + rhs.neg,
        }
    }
}

impl fmt::Display for DegreePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(+{}, -{})", self.pos, self.neg)
    }
}

/// An exponent vector: variable names in ascending order, zero exponents
/// omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<(String, i32)>);

impl Exponents {
    pub fn one() -> Self {
        Exponents(Vec::new())
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, i32)>,
        S: Into<String>,
    {
        let mut acc: BTreeMap<String, i32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v.into()).or_insert(0) += e;
        }
        Exponents(acc.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn get(&self, var: &str) -> i32 {
        self.0
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32)> {
        self.0.iter().map(|(v, e)| (v.as_str(), *e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().map(|(_, e)| *e as i64).sum()
    }

    fn mul(&self, other: &Exponents) -> Exponents {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ord = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Exponents(out)
    }

    fn map_var(&self, var: &str, f: impl Fn(i32) -> i32) -> Exponents {
        Exponents::from_pairs(
            self.0
                .iter()
                .map(|(v, e)| (v.clone(), if v == var { f(*e) } else { *e })),
        )
    }

    fn without(&self, var: &str) -> Exponents {
        Exponents(self.0.iter().filter(|(v, _)| v != var).cloned().collect())
    }
}

impl Ord for Exponents {
    /// Graded, then lexicographic on (variable, exponent) pairs.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A single stored term.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub exponents: Exponents,
    pub coeff: Coeff,
}

/// A complex Laurent polynomial in any number of named variables, kept in
/// canonical form: no zero coefficients, one entry per exponent vector.
///
/// With exact coefficients, structural equality is mathematical equality.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    terms: BTreeMap<Exponents, Coeff>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        LaurentPoly::monomial(c, Exponents::one())
    }

    /// The polynomial `var`.
    pub fn var(name: &str) -> Self {
        LaurentPoly::monomial(Coeff::one(), Exponents::from_pairs([(name, 1)]))
    }

    pub fn monomial(c: Coeff, exps: Exponents) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = Monomial>>(terms: I) -> Self {
        let mut p = LaurentPoly::zero();
        for m in terms {
            p.add_term(m.exponents, m.coeff);
        }
        p
    }

    fn add_term(&mut self, exps: Exponents, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending term order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Coeff)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(e, c)| Monomial {
            exponents: e.clone(),
            coeff: c.clone(),
        })
    }

    pub fn coeff_of(&self, exps: &Exponents) -> Coeff {
        self.terms.get(exps).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coeff::is_exact)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|(v, _)| v.to_string()))
            .collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.terms.keys().any(|e| e.get(var) != 0)
    }

    /// The value if this polynomial has no variables.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Exponents::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Coeff) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, k) in &self.terms {
            out.add_term(e.clone(), k * c);
        }
        out
    }

    /// Positive and negative degree in `var`. A polynomial without `var`
    /// has degrees `(0, 0)`; the zero polynomial has `(−∞, −∞)`.
    pub fn degree(&self, var: &str) -> DegreePair {
        if self.is_zero() {
            return DegreePair::ZERO_POLY;
        }
        let (mut pos, mut neg) = (0u32, 0u32);
        for e in self.terms.keys() {
            let k = e.get(var);
            if k > 0 {
                pos = pos.max(k as u32);
            } else {
                neg = neg.max(k.unsigned_abs());
            }
        }
        DegreePair::finite(pos, neg)
    }

    /// Full evaluation.
    pub fn eval(&self, assignment: &BTreeMap<String, Coeff>) -> Result<Coeff, PolyError> {
        let mut acc = Coeff::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, k) in e.iter() {
                let value = assignment
                    .get(v)
                    .ok_or_else(|| PolyError::MissingAssignment(v.to_string()))?;
                let p = value
                    .powi(k)
                    .ok_or_else(|| PolyError::ZeroAtNegativePower(v.to_string()))?;
                term = &term * &p;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Substitute a value for one variable, leaving the others symbolic.
    pub fn substitute(&self, var: &str, value: &Coeff) -> Result<LaurentPoly, PolyError> {
        let mut out = LaurentPoly::zero();
        for (e, c) in &self.terms {
            let k = e.get(var);
            if k == 0 {
                out.add_term(e.clone(), c.clone());
                continue;
            }
            let p = value
                .powi(k)
                .ok_or_else(|| PolyError::ZeroAtNegativePower(var.to_string()))?;
            out.add_term(e.without(var), c * &p);
        }
        Ok(out)
    }

    /// Rename a variable (used when minting child parameters).
    pub fn rename_var(&self, from: &str, to: &str) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, c) in &self.terms {
            let renamed = Exponents::from_pairs(
                e.iter().map(|(v, k)| (if v == from { to } else { v }, k)),
            );
            out.add_term(renamed, c.clone());
        }
        out
    }

    /// Reduce modulo `var^order − 1`: every exponent of `var` lands in
    /// `0..order`.
    ///
    /// # Panics
    /// If `order == 0`.
    pub fn quotient_reduce(&self, var: &str, order: u32) -> LaurentPoly {
        assert!(order >= 1, "quotient order must be at least 1");
        let g = order as i32;
        let mut out = LaurentPoly::zero();
        for (e, c) in &self.terms {
            out.add_term(e.map_var(var, |k| k.rem_euclid(g)), c.clone());
        }
        out
    }

    /// Coefficientwise comparison; exact pairs compare exactly.
    pub fn approx_eq(&self, other: &LaurentPoly, tol: f64) -> bool {
        let keys: BTreeSet<&Exponents> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .all(|k| self.coeff_of(k).approx_eq(&other.coeff_of(k), tol))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.mul(eb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&Coeff::from_i64(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl From<Coeff> for LaurentPoly {
    fn from(c: Coeff) -> Self {
        LaurentPoly::constant(c)
    }
}

impl fmt::Display for LaurentPoly {
    /// Highest term first, in the syntax accepted by the equation parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if e.is_one() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{e}")?;
            } else {
                write!(f, "{mag}*{e}")?;
            }
        }
        Ok(())
    }
}
