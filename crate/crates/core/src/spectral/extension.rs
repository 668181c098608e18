//! Coefficient extension does not decrease the distance to the exact
//! subspace: the check pits two independent computations against each
//! other.
//!
//! For a capped chain `ζ` of pure degree `k`, the left route minimizes
//! `ℓ(ζ + dη)` over capped chains `η` of degree `k + 1` drawn from a
//! truncated recapping lattice, by mod-2 elimination on term classes. The
//! right route extends coefficients and computes the distance to the
//! exact subspace in the Novikov-coefficient view via the singular value
//! decomposition. The two infima must agree exactly.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{distance_to_exact, SvdError};
use crate::capped::{CappedChain, CappedComplex, CappedError};
use crate::exponent::{Exponent, Level};

#[derive(Debug, Clone, thiserror::Error)]
pub enum ExtensionError {
    #[error("{0}")]
    Capped(#[from] CappedError),
    #[error("{0}")]
    Svd(#[from] SvdError),
    #[error("chain is not homogeneous of degree {expected}: term {label}@{m} has degree {found}")]
    MixedDegree {
        expected: i64,
        label: String,
        m: i64,
        found: i64,
    },
    #[error("lattice search cannot bracket the infimum within window {window}")]
    WindowExhausted { window: Exponent },
}

/// Both infima and the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    pub left: Level,
    pub right: Level,
    pub equal: bool,
    pub window: Exponent,
}

/// Runs both routes and compares. `window` bounds how far below the level
/// of `ζ` the search certifies.
pub fn extension_distance_check(
    complex: &CappedComplex,
    k: i64,
    zeta: &CappedChain,
    window: &Exponent,
) -> Result<ExtensionReport, ExtensionError> {
    for (label, m) in zeta.terms() {
        let found = complex.degree(label, *m)?;
        if found != k {
            return Err(ExtensionError::MixedDegree {
                expected: k,
                label: label.clone(),
                m: *m,
                found,
            });
        }
    }

    let view = complex.lambda_view()?;
    let extended = complex.extend_chain(zeta)?;

    let right = distance_to_exact(&view, &extended, Some(window))?;
    let left = capped_lattice_distance(complex, k, zeta, window)?;

    Ok(ExtensionReport {
        equal: left == right,
        left,
        right,
        window: window.clone(),
    })
}

/// Minimizes `ℓ(ζ + dη)` over capped `η` of degree `k + 1` whose terms
/// have actions within `window` below the start level, by elimination over
/// term classes `(orbit, recapping)`.
fn capped_lattice_distance(
    complex: &CappedComplex,
    k: i64,
    zeta: &CappedChain,
    window: &Exponent,
) -> Result<Level, ExtensionError> {
    let view = complex.lambda_view()?;
    let extended = complex.extend_chain(zeta)?;
    let ceiling = match view.level(&extended).map_err(SvdError::from)? {
        Level::Finite(c) => c,
        Level::NegInf => return Ok(Level::NegInf),
        Level::PosInf => unreachable!("chain levels are never +inf"),
    };
    let floor = &ceiling - window;

    // perturbation universe: capped terms of degree k+1 with action inside
    // (floor, ceiling + window]. Terms below the floor cannot touch
    // anything above it; terms above the pad would need cancellation
    // cascades longer than the window certifies.
    let pad = &ceiling + window;
    let mut universe: Vec<(String, i64)> = Vec::new();
    for orbit in complex.orbits() {
        if complex.differential_of(&orbit.label).is_none() {
            continue;
        }
        if orbit.period.is_zero() {
            if complex.degree(&orbit.label, 0)? == k + 1
                && orbit.action(0) > floor
                && orbit.action(0) <= pad
            {
                universe.push((orbit.label.clone(), 0));
            }
            continue;
        }
        // action(m) = h - area_base - m * period is decreasing in m
        let offset = &orbit.h_integral - &orbit.area_base;
        let m_lo = rational_ceil(&(&(&offset - &pad) / &orbit.period));
        let m_hi = rational_floor(&(&(&offset - &floor) / &orbit.period));
        for m in m_lo..=m_hi {
            if orbit.action(m) > floor
                && orbit.action(m) <= pad
                && complex.degree(&orbit.label, m)? == k + 1
            {
                universe.push((orbit.label.clone(), m));
            }
        }
    }

    // term classes: capped terms reachable from zeta or from d(universe)
    let mut classes: BTreeMap<(String, i64), usize> = BTreeMap::new();
    let mut class_actions: Vec<Exponent> = Vec::new();
    let intern = |label: &str, m: i64,
                      classes: &mut BTreeMap<(String, i64), usize>,
                      actions: &mut Vec<Exponent>,
                      complex: &CappedComplex|
     -> Result<usize, ExtensionError> {
        let key = (label.to_string(), m);
        if let Some(&i) = classes.get(&key) {
            return Ok(i);
        }
        let orbit = complex.orbit(label)?;
        let i = actions.len();
        actions.push(orbit.action(m));
        classes.insert(key, i);
        Ok(i)
    };

    let mut rhs: Vec<bool> = Vec::new();
    let ensure_len = |rhs: &mut Vec<bool>, n: usize| {
        if rhs.len() < n {
            rhs.resize(n, false);
        }
    };
    for (label, m) in zeta.terms() {
        let i = intern(label, *m, &mut classes, &mut class_actions, complex)?;
        ensure_len(&mut rhs, class_actions.len());
        rhs[i] ^= true;
    }

    let mut columns: Vec<Vec<usize>> = Vec::new();
    for (label, m) in &universe {
        let image = complex
            .boundary(&CappedChain::term(label.clone(), *m))
            .map_err(ExtensionError::from)?;
        let mut col = Vec::new();
        for (to, mm) in image.terms() {
            let i = intern(to, *mm, &mut classes, &mut class_actions, complex)?;
            col.push(i);
        }
        columns.push(col);
    }
    ensure_len(&mut rhs, class_actions.len());

    // candidate levels, ascending; the infimum is the smallest achievable
    let mut candidates: Vec<Exponent> = class_actions.clone();
    candidates.sort();
    candidates.dedup();

    // exact-cancellation test first: distance -inf
    if solvable(&columns, &rhs, &class_actions, None) {
        return Ok(Level::NegInf);
    }
    for t in &candidates {
        if solvable(&columns, &rhs, &class_actions, Some(t)) {
            return Ok(Level::Finite(t.clone()));
        }
    }
    Err(ExtensionError::WindowExhausted {
        window: window.clone(),
    })
}

fn rational_floor(e: &Exponent) -> i64 {
    use num_traits::ToPrimitive;
    e.rational().floor().to_integer().to_i64().expect("small recap range")
}

fn rational_ceil(e: &Exponent) -> i64 {
    use num_traits::ToPrimitive;
    e.rational().ceil().to_integer().to_i64().expect("small recap range")
}

/// Can the right-hand side be cancelled on all classes with action
/// strictly above `t` (all classes when `t` is `None`) using mod-2
/// combinations of the columns?
fn solvable(
    columns: &[Vec<usize>],
    rhs: &[bool],
    class_actions: &[Exponent],
    t: Option<&Exponent>,
) -> bool {
    let keep: Vec<bool> = class_actions
        .iter()
        .map(|a| t.map_or(true, |t| a > t))
        .collect();
    let n_classes = class_actions.len();
    let n_words = n_classes.div_ceil(64);
    let project = |entries: &[usize]| -> Vec<u64> {
        let mut row = vec![0u64; n_words];
        for &i in entries {
            if keep[i] {
                row[i / 64] ^= 1 << (i % 64);
            }
        }
        row
    };
    let mut echelon: Vec<Vec<u64>> = Vec::new();
    let leading = |row: &[u64]| -> Option<usize> {
        row.iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(w, word)| w * 64 + word.trailing_zeros() as usize)
    };
    let reduce = |mut row: Vec<u64>, echelon: &mut Vec<Vec<u64>>, insert: bool| -> bool {
        loop {
            let lead = match leading(&row) {
                None => return true,
                Some(l) => l,
            };
            match echelon.iter().find(|r| leading(r) == Some(lead)) {
                Some(r) => {
                    let r = r.clone();
                    for (d, s) in row.iter_mut().zip(&r) {
                        *d ^= s;
                    }
                }
                None => {
                    if insert {
                        echelon.push(row);
                    }
                    return false;
                }
            }
        }
    };
    for col in columns {
        reduce(project(col), &mut echelon, true);
    }
    let rhs_entries: Vec<usize> = rhs
        .iter()
        .enumerate()
        .filter_map(|(i, b)| if *b { Some(i) } else { None })
        .collect();
    reduce(project(&rhs_entries), &mut echelon, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capped::CappedGenerator;

    fn orbit(label: &str, h: i64, cz: i64, period: i64) -> CappedGenerator {
        CappedGenerator {
            label: label.into(),
            h_integral: Exponent::from_int(h),
            cz,
            kappa0: 0,
            chern_step: 0,
            area_base: Exponent::zero(),
            period: Exponent::from_int(period),
            half_dim: 2,
        }
    }

    #[test]
    fn zero_differential_gives_the_level_on_both_sides() {
        let c = CappedComplex::new(vec![orbit("g", 3, 1, 0)], vec![]).unwrap();
        let report = extension_distance_check(
            &c,
            1,
            &CappedChain::term("g", 0),
            &Exponent::from_int(5),
        )
        .unwrap();
        assert!(report.equal);
        assert_eq!(report.left, Level::Finite(Exponent::from_int(3)));
    }

    #[test]
    fn unique_cappings_agree_by_construction() {
        // d(x) = y with unique cappings; zeta = y is exact
        let x = CappedGenerator {
            cz: 0,
            ..orbit("x", 3, 0, 0)
        };
        let y = CappedGenerator {
            cz: 1,
            ..orbit("y", 1, 0, 0)
        };
        let c = CappedComplex::new(
            vec![x, y],
            vec![("x".into(), CappedChain::term("y", 0))],
        )
        .unwrap();
        let k = c.degree("y", 0).unwrap();
        let report = extension_distance_check(
            &c,
            k,
            &CappedChain::term("y", 0),
            &Exponent::from_int(6),
        )
        .unwrap();
        assert!(report.equal);
        assert_eq!(report.left, Level::NegInf);
    }

    #[test]
    fn recapped_differential_with_period_one() {
        // d(x) = (y, m=1): strictly action-decreasing via the recapping
        let x = CappedGenerator {
            cz: 0,
            ..orbit("x", 2, 0, 1)
        };
        let y = CappedGenerator {
            cz: 1,
            ..orbit("y", 2, 0, 1)
        };
        let c = CappedComplex::new(
            vec![x, y],
            vec![("x".into(), CappedChain::term("y", 1))],
        )
        .unwrap();
        assert!(c.lambda_view().unwrap().validate().is_valid());
        let k = c.degree("x", 0).unwrap();
        let report = extension_distance_check(
            &c,
            k,
            &CappedChain::term("x", 0),
            &Exponent::from_int(8),
        )
        .unwrap();
        assert!(report.equal);
        // x is an S direction; nothing of degree k+1 maps onto it
        assert_eq!(report.left, Level::Finite(Exponent::from_int(2)));
    }
}
