//! The universal Novikov field over the two-element field, at desk scale.
//!
//! An element is a formal sum of powers `t^a` with exact rational exponents
//! and mod-2 coefficients. True Novikov series are semi-infinite; here an
//! element is either a finite sum (exact) or a finite sum together with a
//! truncation *window* `w`: the value is specified only for exponents
//! strictly below `w`, and everything at or above `w` is unknown.
//!
//! Invariants:
//! - `terms` is strictly increasing with no duplicates (mod-2 canonical form)
//! - if a window is present, all stored terms lie strictly below it
//! - zero is the empty term list with no window
//!
//! Every operation propagates the tightest provable window, so windows
//! certify exactly which digits of a result are meaningful.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::exponent::{Exponent, Level, ParseError};

/// A field element: finite mod-2 sum of `t^a`, optionally windowed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct NovikovScalar {
    terms: BTreeSet<Exponent>,
    window: Option<Exponent>,
}

/// Division by (exact) zero.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("division by zero in the Novikov field")]
pub struct DivisionByZero;

impl NovikovScalar {
    pub fn zero() -> Self {
        NovikovScalar::default()
    }

    pub fn one() -> Self {
        NovikovScalar::monomial(Exponent::zero())
    }

    /// The monomial `t^a`.
    pub fn monomial(a: Exponent) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(a);
        NovikovScalar {
            terms,
            window: None,
        }
    }

    /// Builds a scalar from arbitrary exponents, cancelling duplicates mod 2.
    pub fn from_exponents<I: IntoIterator<Item = Exponent>>(exps: I) -> Self {
        let mut s = NovikovScalar::zero();
        for e in exps {
            s.toggle(e);
        }
        s
    }

    fn toggle(&mut self, e: Exponent) {
        if !self.terms.remove(&e) {
            self.terms.insert(e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn window(&self) -> Option<&Exponent> {
        self.window.as_ref()
    }

    /// True when no terms are stored. A windowed scalar with no visible
    /// terms may still hide terms at or above its window.
    pub fn is_visibly_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the genuine zero: no terms and no window.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.window.is_none()
    }

    pub fn is_exact(&self) -> bool {
        self.window.is_none()
    }

    pub fn is_one(&self) -> bool {
        self.window.is_none() && self.terms.len() == 1 && self.terms.iter().next().unwrap().is_zero()
    }

    /// Minimal visible exponent; `+inf` for a scalar with no visible terms.
    pub fn valuation(&self) -> Level {
        match self.terms.iter().next() {
            Some(e) => Level::Finite(e.clone()),
            None => Level::PosInf,
        }
    }

    /// Certified lower bound for the valuation, window-aware: hidden terms
    /// can only sit at or above the window.
    pub fn valuation_lower_bound(&self) -> Level {
        match (self.terms.iter().next(), &self.window) {
            (Some(e), _) => Level::Finite(e.clone()),
            (None, Some(w)) => Level::Finite(w.clone()),
            (None, None) => Level::PosInf,
        }
    }

    /// Drops all terms at or above `at` and tightens the window to `at`.
    pub fn truncated(&self, at: &Exponent) -> Self {
        let terms: BTreeSet<_> = self.terms.iter().filter(|e| *e < at).cloned().collect();
        let window = match &self.window {
            Some(w) if w < at => Some(w.clone()),
            _ => Some(at.clone()),
        };
        NovikovScalar { terms, window }
    }

    fn clamp_to_window(&mut self) {
        if let Some(w) = self.window.clone() {
            self.terms = self.terms.iter().filter(|e| **e < w).cloned().collect();
        }
    }

    /// Mod-2 sum: symmetric difference of term sets. The result window is
    /// the smaller of the input windows (absent counts as `+inf`).
    pub fn add(&self, other: &NovikovScalar) -> NovikovScalar {
        let window = match (&self.window, &other.window) {
            (None, None) => None,
            (Some(w), None) | (None, Some(w)) => Some(w.clone()),
            (Some(a), Some(b)) => Some(a.clone().min(b.clone())),
        };
        let mut out = NovikovScalar {
            terms: self.terms.symmetric_difference(&other.terms).cloned().collect(),
            window,
        };
        out.clamp_to_window();
        out
    }

    /// Multiplication by discrete convolution of the exponent sets.
    ///
    /// Window rule: hidden terms of one factor at or above its window meet
    /// the other factor no lower than `window + valuation(other)`, so the
    /// product window is the minimum of the two such bounds.
    pub fn mul(&self, other: &NovikovScalar) -> NovikovScalar {
        if self.is_exact_zero() || other.is_exact_zero() {
            return NovikovScalar::zero();
        }
        let bound = |w: &Option<Exponent>, other: &NovikovScalar| -> Level {
            match w {
                None => Level::PosInf,
                Some(w) => Level::Finite(w.clone()).plus(&other.valuation_lower_bound()),
            }
        };
        let window = match bound(&self.window, other).min(bound(&other.window, self)) {
            Level::Finite(w) => Some(w),
            Level::PosInf => None,
            Level::NegInf => unreachable!("window bounds are never -inf"),
        };
        let mut out = NovikovScalar {
            terms: BTreeSet::new(),
            window,
        };
        for a in &self.terms {
            for b in &other.terms {
                let e = a + b;
                if out.window.as_ref().map_or(true, |w| &e < w) {
                    out.toggle(e);
                }
            }
        }
        out
    }

    /// Multiplication by the monomial `t^a`.
    pub fn shifted(&self, a: &Exponent) -> NovikovScalar {
        NovikovScalar {
            terms: self.terms.iter().map(|e| e + a).collect(),
            window: self.window.as_ref().map(|w| w + a),
        }
    }

    /// Multiplicative inverse, truncated so that `self * inverse` agrees
    /// with 1 below `window`. Monomials invert exactly; otherwise the tail
    /// is a geometric series in characteristic 2 and the result is windowed.
    pub fn inverse(&self, window: &Exponent) -> Result<NovikovScalar, DivisionByZero> {
        let e0 = match self.valuation() {
            Level::Finite(e) => e,
            _ => return Err(DivisionByZero),
        };
        // u := t^{-e0} * self - 1, the tail above the leading term
        let unit = self.shifted(&-&e0);
        let mut tail = unit.add(&NovikovScalar::one());
        let series_cut = &(window + &e0.abs()) + &Exponent::one();
        tail = tail.truncated(&series_cut);

        // sum of tail^k, truncated; (1 + u)(1 + u + ... + u^K) = 1 + u^{K+1}
        let mut acc = NovikovScalar::one();
        let mut pow = tail.clone();
        while !pow.is_visibly_zero() {
            acc = acc.add(&pow);
            pow = pow.mul(&tail).truncated(&series_cut);
        }

        let mut out = acc.shifted(&-&e0);
        let w_y = window - &e0;
        let w_y = match &self.window {
            // a perturbation of self at or above w_x moves the inverse at
            // or above w_x - 2 e0
            Some(w_x) => w_y.min(&(w_x - &e0) - &e0),
            None => w_y,
        };
        if unit.is_one() && self.window.is_none() {
            // exact monomial: the inverse is exact
            out.window = None;
        } else {
            out.window = Some(match &out.window {
                Some(w) => w.clone().min(w_y),
                None => w_y,
            });
        }
        out.clamp_to_window();
        Ok(out)
    }

    /// True when the two scalars agree on all terms strictly below `level`,
    /// treating unknown (at-or-above-window) regions as agreeing.
    pub fn agrees_below(&self, other: &NovikovScalar, level: &Exponent) -> bool {
        let cut = |s: &NovikovScalar| -> Exponent {
            match &s.window {
                Some(w) => w.clone().min(level.clone()),
                None => level.clone(),
            }
        };
        let horizon = cut(self).min(cut(other));
        let a: BTreeSet<_> = self.terms.iter().filter(|e| **e < horizon).collect();
        let b: BTreeSet<_> = other.terms.iter().filter(|e| **e < horizon).collect();
        a == b
    }
}

impl fmt::Display for NovikovScalar {
    /// Canonical textual form: `t^{p/q}` tokens joined by `+`, with `1`
    /// for `t^0` and `t` for `t^1`; `0` for zero; windowed scalars carry a
    /// trailing `O(t^{p/q})` marker.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for e in &self.terms {
            if wrote {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "1")?;
            } else if *e == Exponent::one() {
                write!(f, "t")?;
            } else {
                write!(f, "t^{{{e}}}")?;
            }
            wrote = true;
        }
        if let Some(w) = &self.window {
            if wrote {
                write!(f, "+")?;
            }
            write!(f, "O(t^{{{w}}})")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FromStr for NovikovScalar {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(NovikovScalar::zero());
        }
        let mut out = NovikovScalar::zero();
        for tok in s.split('+') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(ParseError(format!("empty term in {s:?}")));
            }
            if let Some(rest) = tok.strip_prefix("O(") {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| ParseError(format!("unclosed window in {tok:?}")))?;
                let e = parse_power(inner)?;
                out.window = Some(match out.window.take() {
                    Some(w) => w.min(e),
                    None => e,
                });
            } else {
                out.toggle(parse_power(tok)?);
            }
        }
        out.clamp_to_window();
        Ok(out)
    }
}

fn parse_power(tok: &str) -> Result<Exponent, ParseError> {
    let tok = tok.trim();
    if tok == "1" {
        return Ok(Exponent::zero());
    }
    if tok == "t" {
        return Ok(Exponent::one());
    }
    let rest = tok
        .strip_prefix("t^")
        .ok_or_else(|| ParseError(format!("expected a t-power, got {tok:?}")))?;
    let inner = rest
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .unwrap_or(rest);
    inner.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(s: &str) -> NovikovScalar {
        s.parse().unwrap()
    }

    #[test]
    fn add_cancels_mod_two() {
        // {0, 1} + {1, 2} = {0, 2}
        assert_eq!(sc("1+t").add(&sc("t+t^{2}")), sc("1+t^{2}"));
        // x + x = 0
        let x = sc("1+t^{1/2}+t^{7/3}");
        assert!(x.add(&x).is_exact_zero());
        // identity
        assert_eq!(sc("t^{1/2}").add(&NovikovScalar::zero()), sc("t^{1/2}"));
    }

    #[test]
    fn mul_examples() {
        // square in characteristic 2
        let s = sc("1+t");
        assert_eq!(s.mul(&s), sc("1+t^{2}"));
        // exponent addition
        assert_eq!(sc("t^{1/2}").mul(&sc("t^{3/2}")), sc("t^{2}"));
        // absorbing zero
        assert!(NovikovScalar::zero().mul(&sc("1+t")).is_exact_zero());
    }

    #[test]
    fn inverse_of_monomial_is_exact() {
        let inv = sc("t").inverse(&Exponent::from_int(10)).unwrap();
        assert_eq!(inv, sc("t^{-1}"));
        assert!(inv.is_exact());
    }

    #[test]
    fn inverse_geometric_series() {
        // (1 + t^{1/2})^{-1} = 1 + t^{1/2} + t + t^{3/2} + O(t^2)
        let inv = sc("1+t^{1/2}").inverse(&Exponent::from_int(2)).unwrap();
        let expect = sc("1+t^{1/2}+t+t^{3/2}");
        assert!(inv.agrees_below(&expect, &Exponent::from_int(2)));
        assert_eq!(inv.window(), Some(&Exponent::from_int(2)));
    }

    #[test]
    fn inverse_times_self_is_one_below_window() {
        let w = Exponent::from_int(5);
        let x = sc("t^{-1}+1+t^{3/4}");
        let product = x.mul(&x.inverse(&w).unwrap());
        assert!(product.agrees_below(&NovikovScalar::one(), &w));
    }

    #[test]
    fn division_by_zero_is_signalled() {
        assert_eq!(
            NovikovScalar::zero().inverse(&Exponent::one()),
            Err(DivisionByZero)
        );
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(
            sc("t^{1/2}+t^{3}").valuation(),
            Level::Finite(Exponent::ratio(1, 2))
        );
        assert_eq!(NovikovScalar::zero().valuation(), Level::PosInf);
    }

    #[test]
    fn window_propagation_in_add() {
        let a = sc("1+O(t^{2})");
        let b = sc("t+t^{3}");
        let sum = a.add(&b);
        assert_eq!(sum, sc("1+t+O(t^{2})"));
    }

    #[test]
    fn window_propagation_in_mul() {
        // (1 + O(t^2)) * t^{-1} is known below 1
        let a = sc("1+O(t^{2})");
        let b = sc("t^{-1}");
        let prod = a.mul(&b);
        assert_eq!(prod, sc("t^{-1}+O(t^{1})"));
    }

    #[test]
    fn textual_round_trip() {
        for s in ["0", "1", "t", "1+t^{1/2}", "t^{-3/2}+t^{2}", "t^{1/2}+O(t^{9/4})", "O(t^{1})"] {
            let x = sc(s);
            assert_eq!(x.to_string(), s);
            assert_eq!(sc(&x.to_string()), x);
        }
    }
}
