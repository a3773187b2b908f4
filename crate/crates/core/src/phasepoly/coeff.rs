//! Complex coefficients: exact Gaussian rationals where possible, falling
//! back to double precision once an irrational value enters.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Float coefficients at or below this magnitude are treated as zero when
/// canonicalising polynomials.
pub const FLOAT_ZERO: f64 = 1e-12;

/// `re + im·i` with both parts exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// A complex scalar.
///
/// Arithmetic between two exact values stays exact; any operation involving a
/// float produces a float.
#[derive(Clone, Debug)]
pub enum Coeff {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::from_i64(0)
    }

    pub fn one() -> Self {
        Coeff::from_i64(1)
    }

    pub fn i() -> Self {
        Coeff::Exact(GaussianRational::new(BigRational::zero(), BigRational::one()))
    }

    pub fn from_i64(n: i64) -> Self {
        Coeff::Exact(GaussianRational::real(BigRational::from_integer(BigInt::from(n))))
    }

    /// The rational `p/q`. Panics if `q == 0`.
    pub fn rational(p: i64, q: i64) -> Self {
        Coeff::Exact(GaussianRational::real(BigRational::new(
            BigInt::from(p),
            BigInt::from(q),
        )))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coeff::Exact(GaussianRational::real(r))
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Coeff::Exact(GaussianRational::new(re, im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Coeff::Float(z)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(g) => g.is_zero(),
            Coeff::Float(z) => z.norm() <= FLOAT_ZERO,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Exact(g) => g.re.is_one() && g.im.is_zero(),
            Coeff::Float(z) => *z == Complex64::new(1.0, 0.0),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Coeff::Exact(g) => g.to_c64(),
            Coeff::Float(z) => *z,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Coeff> {
        match self {
            Coeff::Exact(g) => g.inv().map(Coeff::Exact),
            Coeff::Float(z) => {
                if *z == Complex64::new(0.0, 0.0) {
                    None
                } else {
                    Some(Coeff::Float(z.inv()))
                }
            }
        }
    }

    /// Integer power; `None` when raising zero to a negative power.
    pub fn powi(&self, exp: i32) -> Option<Coeff> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Coeff::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }

    /// `|self − other|`, computed exactly when both sides are exact.
    pub fn abs_diff(&self, other: &Coeff) -> f64 {
        (self - other).abs()
    }

    pub fn approx_eq(&self, other: &Coeff, tol: f64) -> bool {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a == b,
            _ => self.abs_diff(other) <= tol,
        }
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a == b,
            _ => self.to_c64() == other.to_c64(),
        }
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_i64(n)
    }
}

impl From<Complex64> for Coeff {
    fn from(z: Complex64) -> Self {
        Coeff::Float(z)
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => {
                Coeff::Exact(GaussianRational::new(&a.re + &b.re, &a.im + &b.im))
            }
            _ => Coeff::Float(self.to_c64() + rhs.to_c64()),
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => {
                Coeff::Exact(GaussianRational::new(&a.re - &b.re, &a.im - &b.im))
            }
            _ => Coeff::Float(self.to_c64() - rhs.to_c64()),
        }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(GaussianRational::new(
                &a.re * &b.re - &a.im * &b.im,
                &a.re * &b.im + &a.im * &b.re,
            )),
            _ => Coeff::Float(self.to_c64() * rhs.to_c64()),
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(GaussianRational::new(-&a.re, -&a.im)),
            Coeff::Float(z) => Coeff::Float(-z),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: Coeff) -> Coeff {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_float(x: f64) -> String {
    // `{:?}` always keeps a decimal point or exponent and round-trips.
    format!("{x:?}")
}

/// Sign and magnitude of one part, `None` when it is zero.
type Part = Option<(bool, String)>;

/// Parts of a coefficient as (real, imaginary) strings with their signs.
fn parts(c: &Coeff) -> (Part, Part) {
    match c {
        Coeff::Exact(g) => {
            let re = (!g.re.is_zero()).then(|| (g.re.is_negative(), fmt_rat(&g.re.abs())));
            let im = (!g.im.is_zero()).then(|| (g.im.is_negative(), fmt_rat(&g.im.abs())));
            (re, im)
        }
        Coeff::Float(z) => {
            let re = (z.re != 0.0).then(|| (z.re < 0.0, fmt_float(z.re.abs())));
            let im = (z.im != 0.0).then(|| (z.im < 0.0, fmt_float(z.im.abs())));
            (re, im)
        }
    }
}

fn imag_term(mag: &str) -> String {
    if mag == "1" {
        "i".to_string()
    } else {
        format!("{mag}*i")
    }
}

impl fmt::Display for Coeff {
    /// Prints in the expression syntax accepted by the equation file parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match parts(self) {
            (None, None) => write!(f, "0"),
            (Some((neg, re)), None) => write!(f, "{}{}", if neg { "-" } else { "" }, re),
            (None, Some((neg, im))) => {
                write!(f, "{}{}", if neg { "-" } else { "" }, imag_term(&im))
            }
            (Some((rneg, re)), Some((ineg, im))) => write!(
                f,
                "({}{} {} {})",
                if rneg { "-" } else { "" },
                re,
                if ineg { "-" } else { "+" },
                imag_term(&im)
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Coeff::rational(1, 2);
        let b = &Coeff::i() * &Coeff::from_i64(3);
        let s = &a + &b;
        assert!(s.is_exact());
        let p = &s * &s; // (1/2 + 3i)^2 = 1/4 - 9 + 3i
        assert_eq!(
            p,
            Coeff::gaussian(
                BigRational::new(BigInt::from(-35), BigInt::from(4)),
                BigRational::from_integer(BigInt::from(3))
            )
        );
    }

    #[test]
    fn inverse_and_powers() {
        let z = Coeff::gaussian(
            BigRational::from_integer(BigInt::from(1)),
            BigRational::from_integer(BigInt::from(1)),
        );
        let inv = z.inv().unwrap();
        assert_eq!(&z * &inv, Coeff::one());
        assert_eq!(Coeff::from_i64(2).powi(-3).unwrap(), Coeff::rational(1, 8));
        assert!(Coeff::zero().powi(-1).is_none());
        assert_eq!(Coeff::zero().powi(0).unwrap(), Coeff::one());
    }

    #[test]
    fn mixing_with_float_promotes() {
        let f = Coeff::from_c64(Complex64::new(0.5, 0.0));
        let s = &f + &Coeff::one();
        assert!(!s.is_exact());
        assert!((s.to_c64().re - 1.5).abs() < 1e-15);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coeff::rational(-3, 4).to_string(), "-3/4");
        assert_eq!(Coeff::i().to_string(), "i");
        assert_eq!((-&Coeff::i()).to_string(), "-i");
        let z = &Coeff::from_i64(1) - &(&Coeff::i() * &Coeff::from_i64(2));
        assert_eq!(z.to_string(), "(1 - 2*i)");
        assert_eq!(Coeff::zero().to_string(), "0");
    }
}
