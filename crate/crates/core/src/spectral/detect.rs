//! Detection functionals and the spectral lower bound they force.
//!
//! A detection functional is a mod-2 chain functional defined on the
//! subcomplex of chains below an action threshold. When it evaluates to 1
//! on a cycle, and the threshold clears the boundary depth by enough
//! margin, every low-action representative of the class is detected, so
//! the spectral invariant is bounded below by the lowest level in the
//! functional's support. This module verifies that chain of reasoning on
//! an explicitly truncated representative lattice.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{boundary_depth, SvdError};
use crate::complex::{Chain, FilteredComplex};
use crate::exponent::{Exponent, ExponentLattice, Level};
use crate::novikov::NovikovScalar;

/// A mod-2 functional supported on finitely many terms `t^a γ`, defined on
/// generators of action below `threshold` and vanishing on boundaries
/// there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionFunctional {
    pub threshold: Exponent,
    /// Terms `(label, exponent)` on which the functional evaluates to 1.
    pub support: BTreeSet<(String, Exponent)>,
}

impl DetectionFunctional {
    pub fn new(threshold: Exponent, support: impl IntoIterator<Item = (String, Exponent)>) -> Self {
        DetectionFunctional {
            threshold,
            support: support.into_iter().collect(),
        }
    }

    /// Evaluates on a chain by counting support hits mod 2.
    pub fn evaluate(&self, chain: &Chain) -> u8 {
        let mut parity = 0u8;
        for (label, coeff) in chain.iter() {
            for e in coeff.terms() {
                if self.support.contains(&(label.clone(), e.clone())) {
                    parity ^= 1;
                }
            }
        }
        parity
    }

    /// Lowest level among the supported terms; the bound the functional
    /// can certify. `None` for an empty support.
    pub fn min_support_level(&self, complex: &FilteredComplex) -> Option<Exponent> {
        let mut best: Option<Exponent> = None;
        for (label, e) in &self.support {
            let level = &complex.generator(label).ok()?.level - e;
            best = Some(match best {
                None => level,
                Some(b) => b.min(level),
            });
        }
        best
    }

    /// Checks the chain-functional property on the subcomplex below the
    /// threshold: `e(d(t^a γ)) = 0` for every term of action < threshold.
    /// Only finitely many shifts `a` can hit the support, so the check is
    /// exact. Returns the first violating `(generator, shift)`.
    pub fn chain_property_violation(
        &self,
        complex: &FilteredComplex,
    ) -> Option<(String, Exponent)> {
        for g in complex.generators() {
            let image = match complex.differential_of(&g.label) {
                Some(d) => d,
                None => continue,
            };
            // critical shifts: a = s - p for a support entry (to, s) and a
            // differential term t^p to
            let mut critical: BTreeSet<Exponent> = BTreeSet::new();
            for (to, coeff) in image.iter() {
                for p in coeff.terms() {
                    for (slabel, s) in &self.support {
                        if slabel == to {
                            critical.insert(s - p);
                        }
                    }
                }
            }
            for a in critical {
                // t^a γ must lie below the threshold to be in the domain
                if &g.level - &a >= self.threshold {
                    continue;
                }
                let shifted = image.scaled(&NovikovScalar::monomial(a.clone()));
                if self.evaluate(&shifted) == 1 {
                    return Some((g.label.clone(), a));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum DetectError {
    #[error("hypothesis failure ({which}): {witness}")]
    Hypothesis { which: String, witness: String },
    #[error("detection failure: representative {representative} evaluates to 0")]
    DetectionFailure { representative: String },
    #[error("representative universe too large: {terms} candidate terms")]
    UniverseTooLarge { terms: usize },
    #[error("{0}")]
    Svd(#[from] SvdError),
}

/// A certified spectral lower bound, with the family that witnessed it.
#[derive(Clone, Debug, Serialize)]
pub struct DetectionBound {
    pub bound: Exponent,
    pub representatives_checked: usize,
    pub lattice: ExponentLattice,
    pub boundary_depth: Exponent,
}

/// Verifies the hypotheses of the detection argument and sweeps every
/// representative `ζ + dμ` with `ℓ < eplus + margin`, `μ` drawn from the
/// declared lattice, checking each is detected. Returns the certified
/// lower bound, the minimum level in the functional's support.
///
/// Hypotheses checked, each failing with its own witness:
/// - the functional is a chain functional below its threshold,
/// - `e(ζ) = 1`,
/// - `ℓ(ζ) < eplus + margin`,
/// - `threshold >= boundary_depth + eplus + 2 margin`.
pub fn detection_bound(
    complex: &FilteredComplex,
    zeta: &Chain,
    functional: &DetectionFunctional,
    eplus: &Exponent,
    margin: &Exponent,
    lattice: Option<ExponentLattice>,
) -> Result<DetectionBound, DetectError> {
    let report = complex.validate();
    if !report.is_valid() {
        return Err(DetectError::Hypothesis {
            which: "complex validates".into(),
            witness: format!("{:?}", report.violations.first()),
        });
    }
    if let Some((label, shift)) = functional.chain_property_violation(complex) {
        return Err(DetectError::Hypothesis {
            which: "chain functional below threshold".into(),
            witness: format!("e(d(t^{{{shift}}}{label})) = 1"),
        });
    }
    if functional.evaluate(zeta) != 1 {
        return Err(DetectError::Hypothesis {
            which: "e(zeta) = 1".into(),
            witness: format!("e({zeta}) = 0"),
        });
    }
    let bound_level = &(eplus + margin);
    let zeta_level = complex.level(zeta).map_err(SvdError::from)?;
    if zeta_level >= Level::Finite((*bound_level).clone()) {
        return Err(DetectError::Hypothesis {
            which: "l(zeta) < eplus + margin".into(),
            witness: format!("l(zeta) = {zeta_level}"),
        });
    }
    let beta = boundary_depth(complex)?;
    let needed = &(&beta + eplus) + &(&(margin + margin));
    if functional.threshold < needed {
        return Err(DetectError::Hypothesis {
            which: "threshold >= depth + eplus + 2 margin".into(),
            witness: format!("threshold {} < {}", functional.threshold, needed),
        });
    }

    // representative universe: lattice shifts of the perturbation
    // generators one degree above zeta
    let lattice = lattice.unwrap_or_else(|| default_lattice(complex, zeta, functional));
    let degrees: BTreeSet<i64> = zeta
        .labels()
        .filter_map(|l| complex.generator(l).ok().map(|g| g.degree))
        .collect();
    let mu_degree = degrees.iter().max().map(|d| d + 1);
    let mut universe: Vec<(String, Exponent)> = Vec::new();
    for g in complex.generators() {
        if complex.differential_of(&g.label).is_none() {
            continue;
        }
        if let Some(k) = mu_degree {
            if degrees.len() == 1 && g.degree != k {
                continue;
            }
        }
        for a in lattice.points() {
            universe.push((g.label.clone(), a));
        }
    }
    if universe.len() > 20 {
        return Err(DetectError::UniverseTooLarge {
            terms: universe.len(),
        });
    }

    let mut checked = 0usize;
    for mask in 0u64..(1u64 << universe.len()) {
        let mut mu = Chain::zero();
        for (bit, (label, a)) in universe.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                mu.add_scaled_generator(label, &NovikovScalar::monomial(a.clone()));
            }
        }
        let rep = zeta.add(&complex.boundary(&mu).map_err(SvdError::from)?);
        let level = complex.level(&rep).map_err(SvdError::from)?;
        if level < Level::Finite((*bound_level).clone()) {
            checked += 1;
            if functional.evaluate(&rep) != 1 {
                let mut display = String::new();
                let _ = write!(display, "{rep}");
                return Err(DetectError::DetectionFailure {
                    representative: display,
                });
            }
        }
    }

    let bound = functional
        .min_support_level(complex)
        .ok_or_else(|| DetectError::Hypothesis {
            which: "nonempty support".into(),
            witness: "functional support is empty".into(),
        })?;
    Ok(DetectionBound {
        bound,
        representatives_checked: checked,
        lattice,
        boundary_depth: beta,
    })
}

// The default perturbation lattice spans the critical shifts: exponents
// `a = s - p` whose boundary terms land on a support entry. Perturbations
// off these shifts never change a detection value.
fn default_lattice(
    complex: &FilteredComplex,
    zeta: &Chain,
    functional: &DetectionFunctional,
) -> ExponentLattice {
    let mut critical: Vec<Exponent> = Vec::new();
    for g in complex.generators() {
        if let Some(d) = complex.differential_of(&g.label) {
            for (to, coeff) in d.iter() {
                for p in coeff.terms() {
                    for (slabel, s) in &functional.support {
                        if slabel == to {
                            critical.push(s - p);
                        }
                    }
                }
            }
        }
    }
    for (_, coeff) in zeta.iter() {
        critical.extend(coeff.terms().cloned());
    }
    if critical.is_empty() {
        critical.push(Exponent::zero());
    }
    ExponentLattice::from_data(critical.iter(), &Exponent::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;

    fn gen(label: &str, level: i64, degree: i64) -> Generator {
        Generator {
            label: label.into(),
            level: Exponent::from_int(level),
            degree,
        }
    }

    fn three_gen() -> FilteredComplex {
        // d(x) = y only; z is a d-closed third generator
        FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0), gen("z", 2, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap()
    }

    #[test]
    fn unique_representative_detects_at_its_level() {
        let c = three_gen();
        let e = DetectionFunctional::new(
            Exponent::from_int(100),
            [("z".to_string(), Exponent::zero())],
        );
        let bound = detection_bound(
            &c,
            &Chain::generator("z"),
            &e,
            &Exponent::from_int(3),
            &Exponent::one(),
            None,
        )
        .unwrap();
        assert_eq!(bound.bound, Exponent::from_int(2));
    }

    #[test]
    fn zero_functional_fails_the_detection_hypothesis() {
        let c = three_gen();
        let e = DetectionFunctional::new(Exponent::from_int(100), []);
        let err = detection_bound(
            &c,
            &Chain::generator("z"),
            &e,
            &Exponent::from_int(3),
            &Exponent::one(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, DetectError::Hypothesis { ref which, .. } if which.contains("e(zeta)")));
    }

    #[test]
    fn chain_property_violation_is_caught() {
        let c = three_gen();
        // supported on y, which is a boundary of low-action chains
        let e = DetectionFunctional::new(
            Exponent::from_int(100),
            [("y".to_string(), Exponent::zero())],
        );
        assert!(e.chain_property_violation(&c).is_some());
    }
}
