//! Exact rational coordinates.
//!
//! Depth `t` in a tree is stored as its level `u = e^{-t}` in `(0, 1]`, and a
//! tree distance `s` as `q = e^{s} >= 1`. Sums of distances become products of
//! `q` values, so every construction in the kernel stays inside the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let trimmed = s.trim();
    Rational::from_str(trimmed)
        .map_err(|_| Error::Malformed(format!("`{s}` is not a rational of the form p/q")))
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(f) = n.to_f64() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational, stable for huge numerators and
/// denominators.
pub fn ln_rational(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    match r.to_f64() {
        Some(f) if f.is_finite() => f,
        _ => ln_rational(r).exp(),
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A level `u = e^{-t}` in `(0, 1]`: the exact coordinate of depth `t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(Rational);

impl Level {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_positive() && value <= Rational::one() {
            Ok(Level(value))
        } else {
            Err(Error::LevelOutOfRange(format!("{value} is not in (0,1]")))
        }
    }

    pub fn one() -> Self {
        Level(Rational::one())
    }

    pub fn parse(s: &str) -> Result<Self> {
        Level::new(parse_rational(s)?)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_one()
    }

    /// Depth `t = -ln(u)`; for display only.
    pub fn depth(&self) -> f64 {
        // Subtraction keeps the root at +0 rather than -0.
        0.0 - ln_rational(&self.0)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Level::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// An ultrametric distance value in `{0} ∪ (0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UDistance(Rational);

impl UDistance {
    pub fn new(value: Rational) -> Result<Self> {
        if !value.is_negative() && value <= Rational::one() {
            Ok(UDistance(value))
        } else {
            Err(Error::LevelOutOfRange(format!(
                "distance {value} is not in [0,1]"
            )))
        }
    }

    pub fn zero() -> Self {
        UDistance(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// A positive distance is the level at which the two ends separate.
    pub fn as_level(&self) -> Option<Level> {
        Level::new(self.0.clone()).ok()
    }
}

impl From<Level> for UDistance {
    fn from(l: Level) -> Self {
        UDistance(l.0)
    }
}

impl fmt::Display for UDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A tree distance `s`, stored exactly as `q = e^{s} >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeDistance(Rational);

impl TreeDistance {
    pub fn from_q(q: Rational) -> Result<Self> {
        if q >= Rational::one() {
            Ok(TreeDistance(q))
        } else {
            Err(Error::LevelOutOfRange(format!("distance ratio {q} < 1")))
        }
    }

    pub fn zero() -> Self {
        TreeDistance(Rational::one())
    }

    /// The distance from the root to a point at `level`.
    pub fn from_level(level: &Level) -> Self {
        TreeDistance(level.value().recip())
    }

    pub fn q(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_one()
    }

    /// The real distance `ln q`.
    pub fn value(&self) -> f64 {
        ln_rational(&self.0)
    }
}

// Distances add; their stored exponentials multiply.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for TreeDistance {
    type Output = TreeDistance;
    fn add(self, rhs: TreeDistance) -> TreeDistance {
        TreeDistance(self.0 * rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Add<&'a TreeDistance> for &'a TreeDistance {
    type Output = TreeDistance;
    fn add(self, rhs: &TreeDistance) -> TreeDistance {
        TreeDistance(&self.0 * &rhs.0)
    }
}

impl PartialOrd for TreeDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TreeDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for TreeDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ln({})", self.0)
    }
}

impl Serialize for TreeDistance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn level_bounds() {
        assert!(Level::new(rat(1, 1)).is_ok());
        assert!(Level::new(rat(0, 1)).is_err());
        assert!(Level::new(rat(5, 4)).is_err());
        assert!(Level::parse("-1/2").is_err());
        assert!((Level::parse("1/4").unwrap().depth() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn distance_addition_multiplies_ratios() {
        let a = TreeDistance::from_q(rat(4, 1)).unwrap();
        let b = TreeDistance::from_q(rat(3, 2)).unwrap();
        let s = &a + &b;
        assert_eq!(s.q(), &rat(6, 1));
        assert!((s.value() - (a.value() + b.value())).abs() < 1e-12);
        assert!(TreeDistance::from_q(rat(1, 2)).is_err());
    }

    #[test]
    fn ln_of_huge_rationals() {
        let big = Rational::new(BigInt::from(1u8) << 3000usize, BigInt::from(3));
        let expected = 3000.0 * std::f64::consts::LN_2 - 3f64.ln();
        assert!((ln_rational(&big) - expected).abs() < 1e-9);
    }
}
