//! Phase expressions carried by nodes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::phasepoly::{Coeff, LaurentPoly, PolyError};

use super::DiagramError;

/// An angle in `[0, 2π)`: an exact rational multiple of π where possible.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    /// `r·π` with `r ∈ [0, 2)`.
    PiMultiple(BigRational),
    /// Radians in `[0, 2π)`.
    Radians(f64),
}

impl Angle {
    pub fn zero() -> Self {
        Angle::PiMultiple(BigRational::zero())
    }

    pub fn pi() -> Self {
        Angle::pi_frac(1, 1)
    }

    /// `(p/q)·π`.
    pub fn pi_frac(p: i64, q: i64) -> Self {
        Angle::from_pi_multiple(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_pi_multiple(r: BigRational) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        let k = (&r / &two).floor();
        Angle::PiMultiple(r - k * two)
    }

    pub fn radians(x: f64) -> Self {
        Angle::Radians(x.rem_euclid(2.0 * PI))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Angle::PiMultiple(r) => r.is_zero(),
            Angle::Radians(x) => *x == 0.0,
        }
    }

    pub fn to_radians(&self) -> f64 {
        match self {
            Angle::PiMultiple(r) => r.to_f64().unwrap_or(f64::NAN) * PI,
            Angle::Radians(x) => *x,
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        match (self, other) {
            (Angle::PiMultiple(a), Angle::PiMultiple(b)) => Angle::from_pi_multiple(a + b),
            _ => Angle::radians(self.to_radians() + other.to_radians()),
        }
    }

    pub fn scale(&self, k: i64) -> Angle {
        match self {
            Angle::PiMultiple(a) => Angle::from_pi_multiple(a * BigRational::from_integer(BigInt::from(k))),
            Angle::Radians(x) => Angle::radians(x * k as f64),
        }
    }

    /// `e^{iθ}`, exact at multiples of π/2.
    pub fn to_coeff(&self) -> Coeff {
        if let Angle::PiMultiple(r) = self {
            let four_r = r * BigRational::from_integer(BigInt::from(2));
            if four_r.is_integer() {
                return match four_r.to_integer().to_i64() {
                    Some(0) => Coeff::one(),
                    Some(1) => Coeff::i(),
                    Some(2) => Coeff::from_i64(-1),
                    _ => -Coeff::i(),
                };
            }
        }
        let t = self.to_radians();
        Coeff::from_c64(Complex64::new(t.cos(), t.sin()))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiMultiple(r) => {
                if r.is_zero() {
                    return write!(f, "0");
                }
                let (n, d) = (r.numer(), r.denom());
                let num = if n.is_one() { "pi".to_string() } else { format!("{n}*pi") };
                if d.is_one() {
                    write!(f, "{num}")
                } else {
                    write!(f, "{num}/{d}")
                }
            }
            Angle::Radians(x) => write!(f, "{:?}*pi", x / PI),
        }
    }
}

/// A value that can be substituted for a phase variable.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseValue {
    /// ZX phase group element.
    Angle(Angle),
    /// ZH / ZW phase (any complex number).
    Complex(Coeff),
}

impl fmt::Display for PhaseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseValue::Angle(a) => write!(f, "{a}"),
            PhaseValue::Complex(c) => write!(f, "{c}"),
        }
    }
}

/// The phase on a node.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseExpr {
    /// ZX: `constant + Σ coeff·var` with integer coefficients.
    AngleLinear {
        constant: Angle,
        coeffs: BTreeMap<String, i64>,
    },
    /// ZH / ZW: a Laurent polynomial in the phase variables.
    PolyPhase(LaurentPoly),
}

impl PhaseExpr {
    pub fn angle(constant: Angle) -> Self {
        PhaseExpr::AngleLinear {
            constant,
            coeffs: BTreeMap::new(),
        }
    }

    /// `constant + Σ k·var`, dropping zero coefficients.
    pub fn linear<I, S>(constant: Angle, terms: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut coeffs = BTreeMap::new();
        for (v, k) in terms {
            *coeffs.entry(v.into()).or_insert(0) += k;
        }
        coeffs.retain(|_, k| *k != 0);
        PhaseExpr::AngleLinear { constant, coeffs }
    }

    pub fn poly(p: LaurentPoly) -> Self {
        PhaseExpr::PolyPhase(p)
    }

    pub fn variables(&self) -> Vec<String> {
        match self {
            PhaseExpr::AngleLinear { coeffs, .. } => coeffs.keys().cloned().collect(),
            PhaseExpr::PolyPhase(p) => p.variables().into_iter().collect(),
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            PhaseExpr::AngleLinear { coeffs, .. } => coeffs.contains_key(var),
            PhaseExpr::PolyPhase(p) => p.mentions(var),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            PhaseExpr::AngleLinear { coeffs, .. } => coeffs.is_empty(),
            PhaseExpr::PolyPhase(p) => p.variables().is_empty(),
        }
    }

    /// Substitute `value` for `var`.
    pub fn instantiate(&self, var: &str, value: &PhaseValue) -> Result<PhaseExpr, DiagramError> {
        if !self.mentions(var) {
            return Ok(self.clone());
        }
        match (self, value) {
            (PhaseExpr::AngleLinear { constant, coeffs }, PhaseValue::Angle(a)) => {
                let mut coeffs = coeffs.clone();
                let k = coeffs.remove(var).unwrap_or(0);
                Ok(PhaseExpr::AngleLinear {
                    constant: constant.add(&a.scale(k)),
                    coeffs,
                })
            }
            (PhaseExpr::PolyPhase(p), PhaseValue::Complex(c)) => p
                .substitute(var, c)
                .map(PhaseExpr::PolyPhase)
                .map_err(|e| match e {
                    PolyError::ZeroAtNegativePower(v) => DiagramError::ZeroAtNegativePower(v),
                    other => DiagramError::Poly(other),
                }),
            _ => Err(DiagramError::WrongValueKind(var.to_string())),
        }
    }

    pub fn rename_var(&self, from: &str, to: &str) -> PhaseExpr {
        match self {
            PhaseExpr::AngleLinear { constant, coeffs } => PhaseExpr::AngleLinear {
                constant: constant.clone(),
                coeffs: coeffs
                    .iter()
                    .map(|(v, k)| (if v == from { to.to_string() } else { v.clone() }, *k))
                    .collect(),
            },
            PhaseExpr::PolyPhase(p) => PhaseExpr::PolyPhase(p.rename_var(from, to)),
        }
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseExpr::AngleLinear { constant, coeffs } => {
                let mut first = true;
                if !constant.is_zero() || coeffs.is_empty() {
                    write!(f, "{constant}")?;
                    first = false;
                }
                for (v, k) in coeffs {
                    let mag = k.unsigned_abs();
                    let body = if mag == 1 { v.clone() } else { format!("{mag}*{v}") };
                    match (first, k.is_negative()) {
                        (true, true) => write!(f, "-{body}")?,
                        (true, false) => write!(f, "{body}")?,
                        (false, true) => write!(f, " - {body}")?,
                        (false, false) => write!(f, " + {body}")?,
                    }
                    first = false;
                }
                Ok(())
            }
            PhaseExpr::PolyPhase(p) => write!(f, "{p}"),
        }
    }
}
