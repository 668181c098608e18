//! Exact rational exponents and extended filtration levels.
//!
//! Every action, area, and exponent in this crate is an [`Exponent`]: an
//! arbitrary-precision rational in lowest terms. Comparisons are exact;
//! there is no floating point anywhere in the arithmetic core.
//!
//! [`Level`] adjoins the two sentinels `-inf` and `+inf` used by the
//! filtration: the level of the zero chain is `-inf`, the valuation of the
//! zero scalar is `+inf`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// An exact rational exponent (units: action / symplectic area).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn zero() -> Self {
        Exponent(BigRational::zero())
    }

    pub fn one() -> Self {
        Exponent(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Exponent(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` with `q != 0`; reduced to lowest terms by construction.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Exponent(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Exponent {
        Exponent(self.0.abs())
    }

    pub fn min(self, other: Exponent) -> Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Exponent) -> Exponent {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub(crate) fn rational(&self) -> &BigRational {
        &self.0
    }

    /// Largest lattice point `step * k <= self` (floor division).
    pub fn floor_to_step(&self, step: &Exponent) -> Exponent {
        assert!(step.is_positive(), "lattice step must be positive");
        let q = (&self.0 / &step.0).floor();
        Exponent(q * &step.0)
    }
}

impl fmt::Display for Exponent {
    /// Prints `p/q` in lowest terms, or just `p` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Error parsing an exponent or scalar from text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error: {0}")]
pub struct ParseError(pub String);

impl FromStr for Exponent {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| ParseError(format!("bad numerator in {s:?}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| ParseError(format!("bad denominator in {s:?}")))?;
            if q.is_zero() {
                return Err(ParseError(format!("zero denominator in {s:?}")));
            }
            Ok(Exponent(BigRational::new(p, q)))
        } else {
            let p: BigInt = s
                .parse()
                .map_err(|_| ParseError(format!("bad integer in {s:?}")))?;
            Ok(Exponent(BigRational::from_integer(p)))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Exponent {
            type Output = Exponent;
            fn $method(self, rhs: Exponent) -> Exponent {
                Exponent((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Exponent> for &'a Exponent {
            type Output = Exponent;
            fn $method(self, rhs: &'a Exponent) -> Exponent {
                Exponent((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Exponent {
    type Output = Exponent;
    fn div(self, rhs: Exponent) -> Exponent {
        assert!(!rhs.is_zero(), "division by zero exponent");
        Exponent(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn div(self, rhs: &'a Exponent) -> Exponent {
        assert!(!rhs.is_zero(), "division by zero exponent");
        Exponent(&self.0 / &rhs.0)
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-self.0)
    }
}

impl<'a> Neg for &'a Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-&self.0)
    }
}

/// A filtration level or valuation with first-class `-inf` / `+inf`
/// sentinels. The derived order puts `NegInf < Finite(_) < PosInf`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Level {
    NegInf,
    Finite(Exponent),
    PosInf,
}

impl Level {
    pub fn finite(e: Exponent) -> Self {
        Level::Finite(e)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Level::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Exponent> {
        match self {
            Level::Finite(e) => Some(e),
            _ => None,
        }
    }

    pub fn expect_finite(self, what: &str) -> Exponent {
        match self {
            Level::Finite(e) => e,
            other => panic!("expected finite {what}, got {other}"),
        }
    }

    /// Level of `tau^a x` given the level of `x`: subtracting an exponent
    /// lowers a finite level and fixes the sentinels.
    pub fn sub_exponent(&self, a: &Exponent) -> Level {
        match self {
            Level::Finite(e) => Level::Finite(e - a),
            other => other.clone(),
        }
    }

    pub fn add_exponent(&self, a: &Exponent) -> Level {
        match self {
            Level::Finite(e) => Level::Finite(e + a),
            other => other.clone(),
        }
    }

    /// Sum with the convention `(+inf) + finite = +inf`; panics on
    /// `(-inf) + (+inf)`, which never arises from valuation arithmetic.
    pub fn plus(&self, other: &Level) -> Level {
        match (self, other) {
            (Level::Finite(a), Level::Finite(b)) => Level::Finite(a + b),
            (Level::PosInf, Level::NegInf) | (Level::NegInf, Level::PosInf) => {
                panic!("indeterminate level sum")
            }
            (Level::PosInf, _) | (_, Level::PosInf) => Level::PosInf,
            (Level::NegInf, _) | (_, Level::NegInf) => Level::NegInf,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::NegInf => write!(f, "-inf"),
            Level::Finite(e) => write!(f, "{e}"),
            Level::PosInf => write!(f, "+inf"),
        }
    }
}

impl From<Exponent> for Level {
    fn from(e: Exponent) -> Self {
        Level::Finite(e)
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        match s.as_str() {
            "-inf" => Ok(Level::NegInf),
            "+inf" | "inf" => Ok(Level::PosInf),
            other => Ok(Level::Finite(other.parse().map_err(serde::de::Error::custom)?)),
        }
    }
}

/// A truncated exponent lattice `{ step * k : min <= step * k <= max }`,
/// the search space for brute-force representative enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentLattice {
    pub step: Exponent,
    pub min: Exponent,
    pub max: Exponent,
}

impl ExponentLattice {
    pub fn new(step: Exponent, min: Exponent, max: Exponent) -> Self {
        assert!(step.is_positive(), "lattice step must be positive");
        ExponentLattice { step, min, max }
    }

    /// Smallest lattice containing every listed exponent, padded by
    /// `padding` on both sides. The step is `1 / lcm` of denominators.
    pub fn from_data<'a, I>(data: I, padding: &Exponent) -> Self
    where
        I: IntoIterator<Item = &'a Exponent>,
    {
        use num_integer::Integer;
        let mut lcm = BigInt::from(1);
        let mut lo: Option<Exponent> = None;
        let mut hi: Option<Exponent> = None;
        for e in data {
            lcm = lcm.lcm(e.denom());
            lo = Some(match lo {
                None => e.clone(),
                Some(l) => l.min(e.clone()),
            });
            hi = Some(match hi {
                None => e.clone(),
                Some(h) => h.max(e.clone()),
            });
        }
        let step = Exponent(BigRational::new(BigInt::from(1), lcm));
        let lo = lo.unwrap_or_else(Exponent::zero);
        let hi = hi.unwrap_or_else(Exponent::zero);
        ExponentLattice::new(step, &lo - padding, &hi + padding)
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        if *e < self.min || *e > self.max {
            return false;
        }
        let q = e.rational() / self.step.rational();
        q.is_integer()
    }

    pub fn len(&self) -> usize {
        use num_traits::ToPrimitive;
        let span = (self.max.rational() - self.min.rational()) / self.step.rational();
        span.floor().to_integer().to_usize().map_or(0, |n| n + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.min > self.max
    }

    /// All lattice points, ascending.
    pub fn points(&self) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut p = self.min.floor_to_step(&self.step);
        if p < self.min {
            p = &p + &self.step;
        }
        while p <= self.max {
            out.push(p.clone());
            p = &p + &self.step;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "1", "-3", "1/2", "-7/4", "10/4"] {
            let e: Exponent = s.parse().unwrap();
            let back: Exponent = e.to_string().parse().unwrap();
            assert_eq!(e, back);
        }
        // reduced to lowest terms
        assert_eq!("10/4".parse::<Exponent>().unwrap().to_string(), "5/2");
    }

    #[test]
    fn ordering_is_exact() {
        let a = Exponent::ratio(1, 3);
        let b = Exponent::ratio(333_333_333, 1_000_000_000);
        assert!(b < a);
    }

    #[test]
    fn level_order_and_sentinels() {
        let f = Level::finite(Exponent::from_int(5));
        assert!(Level::NegInf < f);
        assert!(f < Level::PosInf);
        assert_eq!(Level::PosInf.sub_exponent(&Exponent::one()), Level::PosInf);
    }

    #[test]
    fn floor_to_step() {
        let q = Exponent::ratio(7, 8);
        let step = Exponent::ratio(1, 4);
        assert_eq!(q.floor_to_step(&step), Exponent::ratio(3, 4));
        let neg = Exponent::ratio(-7, 8);
        assert_eq!(neg.floor_to_step(&step), Exponent::from_int(-1));
    }

    #[test]
    fn lattice_from_data() {
        let data = [Exponent::ratio(1, 2), Exponent::ratio(2, 3), Exponent::zero()];
        let lat = ExponentLattice::from_data(data.iter(), &Exponent::one());
        assert_eq!(lat.step, Exponent::ratio(1, 6));
        assert_eq!(lat.min, Exponent::from_int(-1));
        assert_eq!(lat.max, Exponent::ratio(5, 3));
        assert!(lat.contains(&Exponent::ratio(1, 3)));
        assert!(!lat.contains(&Exponent::ratio(1, 4)));
        assert_eq!(lat.points().len(), lat.len());
        assert_eq!(lat.len(), 17);
    }
}
