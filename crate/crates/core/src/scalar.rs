//! Real scalars that are either exact rationals or high-precision floats.
//!
//! Arithmetic between two exact values stays exact; anything touching a float
//! is promoted to a float at the larger of the two precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Smallest mantissa width accepted for float mode.
pub const MIN_PRECISION: u32 = 100;

static DEFAULT_PRECISION: AtomicU32 = AtomicU32::new(128);

/// Mantissa bits used when a float has to be created from scratch.
pub fn default_precision() -> u32 {
    DEFAULT_PRECISION.load(AtomicOrdering::Relaxed)
}

/// Sets the process-wide default mantissa width (clamped to `MIN_PRECISION`).
pub fn set_default_precision(bits: u32) {
    DEFAULT_PRECISION.store(bits.max(MIN_PRECISION), AtomicOrdering::Relaxed);
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rational),
    Approx(Float),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::new())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(Rational::from(v))
    }

    pub fn from_integer(v: Integer) -> Self {
        Scalar::Exact(Rational::from(v))
    }

    /// `num/den` as an exact rational. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(Rational::from((num, den)))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::Exact(r)
    }

    pub fn from_float(f: Float) -> Self {
        Scalar::Approx(f)
    }

    /// Float at the default precision. Use only for genuinely inexact inputs.
    pub fn from_f64(v: f64) -> Self {
        Scalar::Approx(Float::with_val(default_precision(), v))
    }

    /// Named irrational constants at the given precision.
    pub fn named(name: &str, prec: u32) -> Option<Self> {
        let prec = prec.max(MIN_PRECISION);
        match name {
            "golden" | "phi" => {
                let s5 = Float::with_val(prec + 16, 5).sqrt();
                Some(Scalar::Approx(Float::with_val(prec, (s5 + 1u32) / 2u32)))
            }
            "sqrt2" => Some(Scalar::Approx(Float::with_val(prec, 2).sqrt())),
            "sqrt3" => Some(Scalar::Approx(Float::with_val(prec, 3).sqrt())),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx(f) => Some(f.prec()),
        }
    }

    /// Converts to a float with at least `prec` bits.
    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Scalar::Exact(r) => Float::with_val(prec, r),
            Scalar::Approx(f) => Float::with_val(prec.max(f.prec()), f),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Approx(f) => f.to_f64(),
        }
    }

    /// Absolute tolerance used when a float is compared against zero.
    ///
    /// Rationals compare exactly, so this is `0` for them.
    pub fn zero_tolerance(&self) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::zero(),
            Scalar::Approx(f) => {
                let bits = f.prec().saturating_sub(24) as i32;
                Scalar::Approx(Float::with_val(f.prec(), Float::i_exp(1, -bits)))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => *r == 0,
            Scalar::Approx(f) => {
                let tol = self.zero_tolerance();
                Scalar::Approx(Float::with_val(f.prec(), f.abs_ref())) <= tol
            }
        }
    }

    /// Equality with relative tolerance `rel` in float mode, exact otherwise.
    pub fn approx_eq(&self, other: &Scalar, rel: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            return self == other;
        }
        let diff = (self - other).abs();
        let scale = self.abs().max_of(&other.abs()).max_of(&Scalar::one());
        diff <= &scale * &Scalar::from_f64(rel)
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(Rational::from(r.abs_ref())),
            Scalar::Approx(f) => Scalar::Approx(Float::with_val(f.prec(), f.abs_ref())),
        }
    }

    pub fn signum(&self) -> i32 {
        match self.cmp_zero() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn cmp_zero(&self) -> Ordering {
        match self {
            Scalar::Exact(r) => r.cmp0(),
            Scalar::Approx(f) => f.cmp0().unwrap_or(Ordering::Equal),
        }
    }

    pub fn max_of(&self, other: &Scalar) -> Scalar {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min_of(&self, other: &Scalar) -> Scalar {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    pub fn recip(&self) -> Scalar {
        &Scalar::one() / self
    }

    pub fn pow(&self, e: i32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.clone().pow(e)),
            Scalar::Approx(f) => Scalar::Approx(f.clone().pow(e)),
        }
    }

    pub fn floor(&self) -> Integer {
        match self {
            Scalar::Exact(r) => Integer::from(r.floor_ref()),
            Scalar::Approx(f) => f.clone().floor().to_integer().expect("finite float"),
        }
    }

    pub fn ceil(&self) -> Integer {
        match self {
            Scalar::Exact(r) => Integer::from(r.ceil_ref()),
            Scalar::Approx(f) => f.clone().ceil().to_integer().expect("finite float"),
        }
    }

    /// Nearest integer, halves rounded up.
    pub fn round(&self) -> Integer {
        (self + &Scalar::ratio(1, 2)).floor()
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    pub fn dist_to_int(&self) -> Scalar {
        (self - &Scalar::from_integer(self.round())).abs()
    }

    /// Square root; exact when the rational is a perfect square.
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let (n, d) = (r.numer(), r.denom());
                if *n >= 0 && n.is_perfect_square() && d.is_perfect_square() {
                    let rn = Integer::from(n.sqrt_ref());
                    let rd = Integer::from(d.sqrt_ref());
                    Scalar::Exact(Rational::from((rn, rd)))
                } else {
                    Scalar::Approx(Float::with_val(default_precision(), r).sqrt())
                }
            }
            Scalar::Approx(f) => Scalar::Approx(f.clone().sqrt()),
        }
    }

    /// Exact `n`-th root of a positive rational, if it exists.
    pub fn exact_root(&self, n: u32) -> Option<Scalar> {
        let r = self.as_rational()?;
        if *r <= 0 || n == 0 {
            return None;
        }
        let root_of = |x: &Integer| -> Option<Integer> {
            let (root, rem) = x.clone().root_rem(Integer::new(), n);
            (rem == 0).then_some(root)
        };
        let num = root_of(r.numer())?;
        let den = root_of(r.denom())?;
        Some(Scalar::Exact(Rational::from((num, den))))
    }

    pub fn mul_int(&self, k: &Integer) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(Rational::from(r * k)),
            Scalar::Approx(f) => Scalar::Approx(Float::with_val(f.prec(), f * k)),
        }
    }

    /// Exact or float comparison (floats never hold NaN here).
    pub fn cmp_s(&self, other: &Scalar) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Canonical text form: `p/q` for rationals, `[-]0x<hex>p<exp>` for floats.
    pub fn to_canonical(&self) -> String {
        match self {
            Scalar::Exact(r) => {
                if *r.denom() == 1 {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(f) => match f.to_integer_exp() {
                Some((m, e)) => {
                    let sign = if m < 0 { "-" } else { "" };
                    let mag = Integer::from(m.abs_ref());
                    format!("{sign}0x{}p{e}@{}", mag.to_string_radix(16), f.prec())
                }
                None => format!("0x0p0@{}", f.prec()),
            },
        }
    }

    /// Parses `p/q`, integers, plain decimals, canonical hex floats and named constants.
    pub fn parse(s: &str) -> Result<Scalar> {
        let t = s.trim();
        if let Some(v) = Scalar::named(t, default_precision()) {
            return Ok(v);
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        if let Some(hex) = body.strip_prefix("0x") {
            return parse_hex_float(hex, neg);
        }
        if let Some((int_part, frac_part)) = body.split_once('.') {
            let digits = format!("{int_part}{frac_part}");
            let num = Integer::from_str(if digits.is_empty() { "0" } else { &digits })
                .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
            let den = Integer::from(10).pow(frac_part.len() as u32);
            let r = Rational::from((num, den));
            return Ok(Scalar::Exact(if neg { -r } else { r }));
        }
        let r = Rational::from_str(body).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        Ok(Scalar::Exact(if neg { -r } else { r }))
    }
}

fn parse_hex_float(hex: &str, neg: bool) -> Result<Scalar> {
    let bad = || Error::Parse(format!("malformed hex float: {hex}"));
    let (body, prec) = match hex.split_once('@') {
        Some((b, p)) => (b, Some(p.parse::<u32>().map_err(|_| bad())?)),
        None => (hex, None),
    };
    let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
    let m = Integer::from_str_radix(mant, 16).map_err(|_| bad())?;
    let e: i32 = exp.parse().map_err(|_| bad())?;
    let bits = prec
        .unwrap_or_else(default_precision)
        .max(m.significant_bits())
        .max(MIN_PRECISION);
    let mut f = Float::with_val(bits, &m);
    f <<= e;
    if neg {
        f = -f;
    }
    Ok(Scalar::Approx(f))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(_) => f.write_str(&self.to_canonical()),
            Scalar::Approx(v) => write!(f, "{}", v.to_f64()),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Integer> for Scalar {
    fn from(v: Integer) -> Self {
        Scalar::from_integer(v)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_canonical())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Approx(a), Scalar::Approx(b)) => a.partial_cmp(b),
            (Scalar::Approx(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Exact(a), Scalar::Approx(b)) => b.partial_cmp(a).map(Ordering::reverse),
        }
    }
}

fn prec2(a: &Float, b: &Float) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(Rational::from(a $op b)),
                    (Scalar::Approx(a), Scalar::Approx(b)) => {
                        Scalar::Approx(Float::with_val(prec2(a, b), a $op b))
                    }
                    (Scalar::Approx(a), Scalar::Exact(b)) => {
                        Scalar::Approx(Float::with_val(a.prec(), a $op b))
                    }
                    (Scalar::Exact(a), Scalar::Approx(b)) => {
                        let fa = Float::with_val(b.prec(), a);
                        Scalar::Approx(Float::with_val(b.prec(), &fa $op b))
                    }
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(Rational::from(-r)),
            Scalar::Approx(f) => Scalar::Approx(Float::with_val(f.prec(), -f)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}
