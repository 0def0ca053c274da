//! Scalar fields used for filter values and matrix entries.
//!
//! Two implementations are provided. [`Complex64`] is the ordinary floating
//! point field used by random constructions and trigonometric filters.
//! [`Exact`] is the field `Q(i)(√r)` with exact rational coordinates, which is
//! closed under every operation the filter algebra performs (products,
//! conjugation, division by `N`, scaling by `√N`). Fixtures whose filter values
//! are rational multiples of `√N` are therefore verified with exact equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{GmraError, Result};
use crate::torus::{format_rational, parse_rational, Rational};

/// A field of filter values.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True when equality comparisons are exact rather than approximate.
    const EXACT: bool;
    /// Tag written into documents.
    const KIND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn from_c64(z: Complex64) -> Self;
    /// `√n` for a positive integer `n`.
    fn sqrt_int(n: u64) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    fn is_zero(&self) -> bool;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn from_int(k: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(k)))
    }

    /// `1/√n`.
    fn inv_sqrt_int(n: u64) -> Self {
        Self::sqrt_int(n) * Self::from_rational(&Rational::new(BigInt::one(), BigInt::from(n)))
    }

    fn norm_sqr(&self) -> Self {
        self.clone() * self.conj()
    }

    /// Modulus of the difference, as a float.
    fn distance(&self, other: &Self) -> f64 {
        (self.clone() - other.clone()).to_c64().norm()
    }

    /// Exact equality for exact fields, `|a − b| ≤ tol` otherwise.
    fn agrees(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            self.distance(other) <= tol
        }
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const KIND: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn sqrt_int(n: u64) -> Self {
        Complex64::new((n as f64).sqrt(), 0.0)
    }
    fn inv_sqrt_int(n: u64) -> Self {
        Complex64::new(1.0 / (n as f64).sqrt(), 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_json(&self) -> Value {
        serde_json::json!([self.re, self.im])
    }
    fn from_json(v: &Value) -> Result<Self> {
        let pair = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| GmraError::Parse(format!("expected [re, im], got {v}")))?;
        let part = |x: &Value| -> Result<f64> {
            match x {
                Value::Number(n) => n
                    .as_f64()
                    .ok_or_else(|| GmraError::Parse(format!("bad number {n}"))),
                Value::String(s) => Ok(QuadRational::from_str(s)?.to_f64()),
                _ => Err(GmraError::Parse(format!("bad complex component {x}"))),
            }
        };
        Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
    }
}

/// A real number `a + b·√r` with `a, b` rational.
///
/// Canonical form: `r` is square-free-tested only for perfect squares, which
/// are folded into `a`; `b == 0` implies `r == 0`.
#[derive(Clone, Debug)]
pub struct QuadRational {
    a: BigRational,
    b: BigRational,
    r: u64,
}

impl QuadRational {
    pub fn rational(a: BigRational) -> Self {
        QuadRational {
            a,
            b: BigRational::zero(),
            r: 0,
        }
    }

    pub fn new(a: BigRational, b: BigRational, r: u64) -> Self {
        let mut q = QuadRational { a, b, r };
        q.normalize();
        q
    }

    fn normalize(&mut self) {
        if self.r > 0 {
            let s = self.r.sqrt();
            if s * s == self.r {
                let fold = self.b.clone() * BigRational::from_integer(BigInt::from(s));
                self.a = &self.a + fold;
                self.b = BigRational::zero();
            }
        }
        if self.b.is_zero() {
            self.r = 0;
        }
    }

    fn radicand(&self, other: &Self) -> u64 {
        match (self.r, other.r) {
            (0, r) | (r, 0) => r,
            (r, s) if r == s => r,
            (r, s) => panic!("mixing incompatible radicals √{r} and √{s}"),
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> (&BigRational, u64) {
        (&self.b, self.r)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.r == 0 {
            a
        } else {
            a + self.b.to_f64().unwrap_or(f64::NAN) * (self.r as f64).sqrt()
        }
    }
}

impl PartialEq for QuadRational {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.r == other.r)
    }
}

impl Add for QuadRational {
    type Output = QuadRational;
    fn add(self, rhs: Self) -> Self {
        let r = self.radicand(&rhs);
        QuadRational::new(self.a + rhs.a, self.b + rhs.b, r)
    }
}

impl Sub for QuadRational {
    type Output = QuadRational;
    fn sub(self, rhs: Self) -> Self {
        let r = self.radicand(&rhs);
        QuadRational::new(self.a - rhs.a, self.b - rhs.b, r)
    }
}

impl Neg for QuadRational {
    type Output = QuadRational;
    fn neg(self) -> Self {
        QuadRational {
            a: -self.a,
            b: -self.b,
            r: self.r,
        }
    }
}

impl Mul for QuadRational {
    type Output = QuadRational;
    fn mul(self, rhs: Self) -> Self {
        let r = self.radicand(&rhs);
        if self.b.is_zero() || rhs.b.is_zero() {
            let (q, s) = if self.b.is_zero() { (self.a, rhs) } else { (rhs.a, self) };
            return QuadRational::new(&q * s.a, q * s.b, r);
        }
        let rr = BigRational::from_integer(BigInt::from(r));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * rr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadRational::new(a, b, r)
    }
}

impl fmt::Display for QuadRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", format_rational(&self.a));
        }
        if !self.a.is_zero() {
            write!(f, "{}", format_rational(&self.a))?;
            if self.b.is_positive() {
                write!(f, "+")?;
            }
        }
        write!(f, "{}*sqrt({})", format_rational(&self.b), self.r)
    }
}

impl FromStr for QuadRational {
    type Err = GmraError;

    /// Accepts `a`, `b*sqrt(r)`, `sqrt(r)`, `a+b*sqrt(r)` and `a-b*sqrt(r)`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(GmraError::Parse("empty scalar".into()));
        }
        let split = s
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && !s[..i].ends_with('/'))
            .map(|(i, _)| i);
        let (first, second) = match split {
            Some(i) => (&s[..i], Some(&s[i..])),
            None => (s.as_str(), None),
        };
        let mut acc = parse_term(first)?;
        if let Some(t) = second {
            acc = acc + parse_term(t)?;
        }
        Ok(acc)
    }
}

fn parse_term(t: &str) -> Result<QuadRational> {
    let (sign, body) = match t.as_bytes().first() {
        Some(b'+') => (1, &t[1..]),
        Some(b'-') => (-1, &t[1..]),
        _ => (1, t),
    };
    let signed = |q: BigRational| if sign < 0 { -q } else { q };
    if let Some(pos) = body.find("sqrt(") {
        let coef = match &body[..pos] {
            "" => BigRational::one(),
            c => parse_rational(c.strip_suffix('*').ok_or_else(|| {
                GmraError::Parse(format!("expected '*' before sqrt in {t:?}"))
            })?)?,
        };
        let inner = body[pos + 5..]
            .strip_suffix(')')
            .ok_or_else(|| GmraError::Parse(format!("unclosed sqrt in {t:?}")))?;
        let r: u64 = inner
            .parse()
            .map_err(|_| GmraError::Parse(format!("bad radicand in {t:?}")))?;
        Ok(QuadRational::new(BigRational::zero(), signed(coef), r))
    } else {
        Ok(QuadRational::rational(signed(parse_rational(body)?)))
    }
}

/// Exact complex scalar `re + i·im` with `re, im ∈ Q(√r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Exact {
    pub re: QuadRational,
    pub im: QuadRational,
}

impl Exact {
    pub fn new(re: QuadRational, im: QuadRational) -> Self {
        Exact { re, im }
    }

    pub fn real(re: QuadRational) -> Self {
        Exact {
            re,
            im: QuadRational::rational(BigRational::zero()),
        }
    }

    /// `q·√r` for rational `q`.
    pub fn scaled_sqrt(q: BigRational, r: u64) -> Self {
        Exact::real(QuadRational::new(BigRational::zero(), q, r))
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Self) -> Self {
        Exact::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Self) -> Self {
        Exact::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Self {
        Exact::new(-self.re, -self.im)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Self) -> Self {
        if self.im.is_zero() || rhs.im.is_zero() {
            let (q, s) = if self.im.is_zero() { (self.re, rhs) } else { (rhs.re, self) };
            return Exact::new(q.clone() * s.re, q * s.im);
        }
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Exact::new(re, im)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({})+i({})", self.re, self.im)
        }
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;
    const KIND: &'static str = "exact";

    fn zero() -> Self {
        Exact::real(QuadRational::rational(BigRational::zero()))
    }
    fn one() -> Self {
        Exact::real(QuadRational::rational(BigRational::one()))
    }
    fn from_rational(q: &Rational) -> Self {
        Exact::real(QuadRational::rational(q.clone()))
    }
    fn from_c64(z: Complex64) -> Self {
        let conv = |x: f64| {
            BigRational::from_float(x)
                .map(QuadRational::rational)
                .unwrap_or_else(|| panic!("non-finite value {x} has no exact representation"))
        };
        Exact::new(conv(z.re), conv(z.im))
    }
    fn sqrt_int(n: u64) -> Self {
        Exact::scaled_sqrt(BigRational::one(), n)
    }
    fn conj(&self) -> Self {
        Exact::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn to_json(&self) -> Value {
        serde_json::json!([self.re.to_string(), self.im.to_string()])
    }
    fn from_json(v: &Value) -> Result<Self> {
        let pair = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| GmraError::Parse(format!("expected [re, im], got {v}")))?;
        let part = |x: &Value| -> Result<QuadRational> {
            match x {
                Value::String(s) => QuadRational::from_str(s),
                Value::Number(n) if n.is_i64() => Ok(QuadRational::rational(
                    BigRational::from_integer(BigInt::from(n.as_i64().unwrap_or_default())),
                )),
                _ => Err(GmraError::Parse(format!(
                    "exact scalars are strings or integers, got {x}"
                ))),
            }
        };
        Ok(Exact::new(part(&pair[0])?, part(&pair[1])?))
    }
}
