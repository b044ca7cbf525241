//! Exact scalar arithmetic: arbitrary-precision rationals, Gaussian binomial
//! coefficients, and numbers of the form a + b*sqrt(d) in a fixed quadratic
//! extension of Q.
//!
//! Every comparison and sign decision in this crate bottoms out here, so all
//! routines are exact; floating point appears only in diagnostic conversions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (maintained by `num_rational`).
pub type Rational = num_rational::BigRational;

/// q^e as an exact rational; negative exponents allowed.
pub fn pow_q(q: u64, e: i64) -> Rational {
    let base = BigInt::from(q);
    if e >= 0 {
        Rational::from_integer(base.pow(e as u32))
    } else {
        Rational::new(BigInt::one(), base.pow((-e) as u32))
    }
}

/// q^e as an exact integer, e >= 0.
pub fn pow_int(q: u64, e: u64) -> BigInt {
    BigInt::from(q).pow(e as u32)
}

/// Gaussian binomial coefficient as an integer.
///
/// Conventions: zero whenever a < 0, b < 0, or 0 <= a < b; one when b = 0;
/// otherwise the product of (q^(a-i) - 1) / (q^(b-i) - 1) over i = 0..b,
/// which is integral for a >= b >= 0.
pub fn gauss_int(a: i64, b: i64, q: u64) -> Result<BigInt> {
    if q < 2 {
        return Err(Error::invalid(format!("gauss requires q >= 2, got {q}")));
    }
    if a < 0 || b < 0 || a < b {
        return Ok(BigInt::zero());
    }
    if b == 0 {
        return Ok(BigInt::one());
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..b {
        num *= pow_int(q, (a - i) as u64) - 1;
        den *= pow_int(q, (b - i) as u64) - 1;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero(), "gauss({a},{b};{q}) must be integral");
    Ok(quot)
}

/// Gaussian binomial coefficient as a rational (integer-valued).
pub fn gauss(a: i64, b: i64, q: u64) -> Result<Rational> {
    Ok(Rational::from_integer(gauss_int(a, b, q)?))
}

/// Sign of a rational as -1 / 0 / +1.
pub fn rat_sign(r: &Rational) -> i32 {
    match r.numer().sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Render as "numer/denom", denominator always present.
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse "p/q" or a bare integer "p".
pub fn rat_from_str(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den_s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Parse a decimal integer string.
pub fn int_from_str(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Rational to f64 for diagnostics; scales down huge operands first so the
/// quotient stays finite whenever the true value is representable.
pub fn rat_to_f64(r: &Rational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    let bits = n.bits().max(d.bits());
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN);
    }
    let shift = (bits - 100) as usize;
    let ns = n >> shift;
    let ds = d >> shift;
    ns.to_f64().unwrap_or(f64::NAN) / ds.to_f64().unwrap_or(f64::NAN)
}

/// Element a + b*sqrt(d) of Q(sqrt(d)) with d a fixed integer radicand >= 1.
///
/// The radicand is kept verbatim: it is not reduced to a squarefree core, and
/// perfect squares are legal. Value-level predicates (`sign`, `is_zero_value`)
/// therefore never inspect the coefficient pair alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticNumber {
    d: BigInt,
    a: Rational,
    b: Rational,
}

impl QuadraticNumber {
    pub fn new(d: BigInt, a: Rational, b: Rational) -> Result<Self> {
        if d < BigInt::one() {
            return Err(Error::invalid(format!("radicand must be >= 1, got {d}")));
        }
        Ok(QuadraticNumber { d, a, b })
    }

    /// Purely rational element a + 0*sqrt(d).
    pub fn rational(d: BigInt, a: Rational) -> Self {
        QuadraticNumber { d, a, b: Rational::zero() }
    }

    /// Purely radical element 0 + b*sqrt(d).
    pub fn radical_multiple(d: BigInt, b: Rational) -> Self {
        QuadraticNumber { d, a: Rational::zero(), b }
    }

    pub fn zero(d: BigInt) -> Self {
        QuadraticNumber { d, a: Rational::zero(), b: Rational::zero() }
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &Rational {
        &self.b
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::RadicandMismatch {
                left: self.d.clone(),
                right: other.d.clone(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        Ok(QuadraticNumber {
            d: self.d.clone(),
            a: &self.a + &other.a,
            b: &self.b + &other.b,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        Ok(QuadraticNumber {
            d: self.d.clone(),
            a: &self.a - &other.a,
            b: &self.b - &other.b,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let d_rat = Rational::from_integer(self.d.clone());
        Ok(QuadraticNumber {
            d: self.d.clone(),
            a: &self.a * &other.a + &self.b * &other.b * &d_rat,
            b: &self.a * &other.b + &self.b * &other.a,
        })
    }

    /// Exact division. When the divisor's norm c^2 - e^2 d vanishes but the
    /// divisor itself is nonzero, d is a perfect square (c/e)^2 and the whole
    /// field collapses to Q; the quotient is then computed rationally.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let d_rat = Rational::from_integer(self.d.clone());
        let norm = &other.a * &other.a - &other.b * &other.b * &d_rat;
        if norm.is_zero() {
            if other.b.is_zero() {
                // c^2 = 0 as well, so the divisor is literally zero.
                return Err(Error::DivisionByZero);
            }
            let m = &other.a / &other.b;
            if rat_sign(&m) <= 0 {
                // c + e*sqrt(d) = c + e*|c/e| = 0 when c/e <= 0.
                return Err(Error::DivisionByZero);
            }
            // Divisor value is 2c and sqrt(d) = m, so the quotient is rational.
            let value = (&self.a + &self.b * &m) / (&other.a + &other.a);
            return Ok(QuadraticNumber::rational(self.d.clone(), value));
        }
        let conj_a = (&self.a * &other.a - &self.b * &other.b * &d_rat) / &norm;
        let conj_b = (&self.b * &other.a - &self.a * &other.b) / &norm;
        Ok(QuadraticNumber { d: self.d.clone(), a: conj_a, b: conj_b })
    }

    pub fn add_rat(&self, r: &Rational) -> Self {
        QuadraticNumber { d: self.d.clone(), a: &self.a + r, b: self.b.clone() }
    }

    pub fn sub_rat(&self, r: &Rational) -> Self {
        QuadraticNumber { d: self.d.clone(), a: &self.a - r, b: self.b.clone() }
    }

    pub fn mul_rat(&self, r: &Rational) -> Self {
        QuadraticNumber { d: self.d.clone(), a: &self.a * r, b: &self.b * r }
    }

    pub fn neg(&self) -> Self {
        QuadraticNumber { d: self.d.clone(), a: -self.a.clone(), b: -self.b.clone() }
    }

    pub fn square(&self) -> Self {
        self.try_mul(self).expect("same radicand")
    }

    /// Exact sign of the real value a + b*sqrt(d), as -1 / 0 / +1.
    ///
    /// With mixed signs the comparison |a| vs |b|sqrt(d) is decided by
    /// squaring, which is exact and also detects hidden zeros when d is a
    /// perfect square.
    pub fn sign(&self) -> i32 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_integer(self.d.clone());
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_zero_value(&self) -> bool {
        self.sign() == 0
    }

    pub fn is_nonneg(&self) -> bool {
        self.sign() >= 0
    }

    /// Exact comparison of values in the same field.
    pub fn value_cmp(&self, other: &Self) -> Result<Ordering> {
        let diff = self.try_sub(other)?;
        Ok(match diff.sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

#[derive(Serialize, Deserialize)]
struct QnRepr {
    d: String,
    a: String,
    b: String,
}

impl Serialize for QuadraticNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        QnRepr {
            d: self.d.to_string(),
            a: rat_to_string(&self.a),
            b: rat_to_string(&self.b),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuadraticNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = QnRepr::deserialize(deserializer)?;
        let d = int_from_str(&repr.d).map_err(D::Error::custom)?;
        let a = rat_from_str(&repr.a).map_err(D::Error::custom)?;
        let b = rat_from_str(&repr.b).map_err(D::Error::custom)?;
        QuadraticNumber::new(d, a, b).map_err(D::Error::custom)
    }
}

/// Serde adapters for big integers and rationals as decimal strings.
pub mod serde_str {
    use super::*;

    pub mod bigint {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &BigInt,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<BigInt, D::Error> {
            let raw = String::deserialize(d)?;
            int_from_str(&raw).map_err(D::Error::custom)
        }
    }

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &Rational,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&rat_to_string(v))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Rational, D::Error> {
            let raw = String::deserialize(d)?;
            rat_from_str(&raw).map_err(D::Error::custom)
        }
    }
}
