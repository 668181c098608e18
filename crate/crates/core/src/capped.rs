//! Capped orbits: the graded model that feeds the Novikov-coefficient
//! complex through the coefficient-extension map.
//!
//! A capped generator is a periodic orbit together with a rank-one lattice
//! of capping classes: class `m ∈ ℤ` has symplectic area
//! `area_base + m * period` and Chern pairing `kappa0 + m * chern_step`.
//! A period of zero means the capping class is unique (`m` must be 0).
//!
//! The degree of a capped orbit is
//! `half_dim - cz - 2 (kappa0 + m * chern_step)`,
//! and the differential lowers it by one. Coefficient extension sends the
//! capped term `(γ, m)` to `t^{area(γ, m)} γ`; pulling the filtration back
//! gives `action(γ, m) = h_integral - area(γ, m)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{Chain, FilteredComplex, Generator};
use crate::exponent::Exponent;

/// An orbit with its capping lattice, index data, and Hamiltonian integral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CappedGenerator {
    pub label: String,
    /// Integral of the Hamiltonian over the orbit (its level upstairs).
    pub h_integral: Exponent,
    /// Conley–Zehnder index.
    pub cz: i64,
    /// Chern pairing of the base capping.
    pub kappa0: i64,
    /// Chern pairing change per recapping step.
    pub chern_step: i64,
    /// Symplectic area of the base capping.
    pub area_base: Exponent,
    /// Generator of the area lattice; zero means a unique capping class.
    pub period: Exponent,
    /// Half the ambient dimension.
    pub half_dim: i64,
}

impl CappedGenerator {
    /// Area of the capping class `m`.
    pub fn area(&self, m: i64) -> Exponent {
        &self.area_base + &(&Exponent::from_int(m) * &self.period)
    }

    /// Action of `(γ, m)` in the pulled-back filtration.
    pub fn action(&self, m: i64) -> Exponent {
        &self.h_integral - &self.area(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CappedError {
    #[error("duplicate orbit label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown orbit label {0:?}")]
    UnknownLabel(String),
    #[error("orbit {label:?} has negative capping period")]
    NegativePeriod { label: String },
    #[error("recapping m={m} of {label:?} is invalid: the capping class is unique")]
    InvalidRecapping { label: String, m: i64 },
    #[error("orbits disagree on the ambient lattice field {field:?}")]
    MixedLattice { field: &'static str },
}

/// A mod-2 sum of capped terms `(label, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CappedChain {
    terms: BTreeSet<(String, i64)>,
}

impl CappedChain {
    pub fn zero() -> Self {
        CappedChain::default()
    }

    pub fn term(label: impl Into<String>, m: i64) -> Self {
        let mut c = CappedChain::zero();
        c.toggle(label.into(), m);
        c
    }

    pub fn from_terms<I: IntoIterator<Item = (String, i64)>>(terms: I) -> Self {
        let mut c = CappedChain::zero();
        for (label, m) in terms {
            c.toggle(label, m);
        }
        c
    }

    pub fn toggle(&mut self, label: String, m: i64) {
        let key = (label, m);
        if !self.terms.remove(&key) {
            self.terms.insert(key);
        }
    }

    pub fn add(&self, other: &CappedChain) -> CappedChain {
        let mut out = self.clone();
        for (label, m) in &other.terms {
            out.toggle(label.clone(), *m);
        }
        out
    }

    /// Recaps every term by `shift` lattice steps.
    pub fn recapped(&self, shift: i64) -> CappedChain {
        CappedChain {
            terms: self
                .terms
                .iter()
                .map(|(l, m)| (l.clone(), m + shift))
                .collect(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &(String, i64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for CappedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (label, m) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{label}@{m}")?;
            first = false;
        }
        Ok(())
    }
}

/// A complex of capped orbits. The differential is stored on base cappings
/// (`m = 0`) and extends equivariantly to all recappings, so the lattice
/// data (`period`, `chern_step`, `half_dim`) must agree across orbits.
#[derive(Clone, Debug)]
pub struct CappedComplex {
    orbits: Vec<CappedGenerator>,
    differential: Vec<(String, CappedChain)>,
}

impl CappedComplex {
    pub fn new(
        orbits: Vec<CappedGenerator>,
        differential: Vec<(String, CappedChain)>,
    ) -> Result<Self, CappedError> {
        let mut seen = BTreeSet::new();
        for orbit in &orbits {
            if !seen.insert(orbit.label.clone()) {
                return Err(CappedError::DuplicateLabel(orbit.label.clone()));
            }
            if orbit.period.is_negative() {
                return Err(CappedError::NegativePeriod {
                    label: orbit.label.clone(),
                });
            }
        }
        if let Some(first) = orbits.first() {
            for orbit in &orbits[1..] {
                if orbit.period != first.period {
                    return Err(CappedError::MixedLattice { field: "period" });
                }
                if orbit.chern_step != first.chern_step {
                    return Err(CappedError::MixedLattice {
                        field: "chern_step",
                    });
                }
                if orbit.half_dim != first.half_dim {
                    return Err(CappedError::MixedLattice { field: "half_dim" });
                }
            }
        }
        let complex = CappedComplex {
            orbits,
            differential,
        };
        for (from, image) in &complex.differential {
            complex.orbit(from)?;
            for (to, m) in image.terms() {
                let target = complex.orbit(to)?;
                if target.period.is_zero() && *m != 0 {
                    return Err(CappedError::InvalidRecapping {
                        label: to.clone(),
                        m: *m,
                    });
                }
            }
        }
        Ok(complex)
    }

    pub fn orbits(&self) -> &[CappedGenerator] {
        &self.orbits
    }

    pub fn orbit(&self, label: &str) -> Result<&CappedGenerator, CappedError> {
        self.orbits
            .iter()
            .find(|o| o.label == label)
            .ok_or_else(|| CappedError::UnknownLabel(label.to_string()))
    }

    /// Degree of the capped orbit `(label, m)`.
    pub fn degree(&self, label: &str, m: i64) -> Result<i64, CappedError> {
        let orbit = self.orbit(label)?;
        degree_of(orbit, m)
    }

    /// Recapping index realizing a given area, if the lattice contains it.
    pub fn recap_index(&self, label: &str, area: &Exponent) -> Result<Option<i64>, CappedError> {
        let orbit = self.orbit(label)?;
        let offset = area - &orbit.area_base;
        if orbit.period.is_zero() {
            return Ok(if offset.is_zero() { Some(0) } else { None });
        }
        let ratio = &offset / &orbit.period;
        if ratio.denom() == &num_bigint::BigInt::from(1) {
            use num_traits::ToPrimitive;
            Ok(ratio.numer().to_i64())
        } else {
            Ok(None)
        }
    }

    /// True when no capping class of `label` has area `a` and degree `k`;
    /// such terms span the orthogonal complement of the graded image of
    /// coefficient extension.
    pub fn avoids_capping_areas(
        &self,
        label: &str,
        a: &Exponent,
        k: i64,
    ) -> Result<bool, CappedError> {
        match self.recap_index(label, a)? {
            None => Ok(true),
            Some(m) => Ok(self.degree(label, m)? != k),
        }
    }

    /// The differential of a base capping, as stored.
    pub fn differential_of(&self, label: &str) -> Option<&CappedChain> {
        self.differential
            .iter()
            .find(|(from, _)| from == label)
            .map(|(_, chain)| chain)
    }

    /// Boundary of a capped chain, using equivariance under recapping.
    pub fn boundary(&self, chain: &CappedChain) -> Result<CappedChain, CappedError> {
        let mut out = CappedChain::zero();
        for (label, m) in chain.terms() {
            self.orbit(label)?;
            if let Some(image) = self.differential_of(label) {
                out = out.add(&image.recapped(*m));
            }
        }
        Ok(out)
    }

    /// Coefficient extension of a capped chain: `(γ, m) ↦ t^{area(γ,m)} γ`.
    /// Terms with equal label and area merge mod 2.
    pub fn extend_chain(&self, chain: &CappedChain) -> Result<Chain, CappedError> {
        let mut out = Chain::zero();
        for (label, m) in chain.terms() {
            let orbit = self.orbit(label)?;
            if orbit.period.is_zero() && *m != 0 {
                return Err(CappedError::InvalidRecapping {
                    label: label.clone(),
                    m: *m,
                });
            }
            out.add_scaled_generator(
                label,
                &crate::novikov::NovikovScalar::monomial(orbit.area(*m)),
            );
        }
        Ok(out)
    }

    /// Reads a Novikov-coefficient chain back as a capped chain, when every
    /// term exponent lies on the capping lattice of its orbit.
    pub fn restrict_chain(&self, chain: &Chain) -> Result<Option<CappedChain>, CappedError> {
        let mut out = CappedChain::zero();
        for (label, coeff) in chain.iter() {
            for e in coeff.terms() {
                match self.recap_index(label, e)? {
                    Some(m) => out.toggle(label.clone(), m),
                    None => return Ok(None),
                }
            }
        }
        Ok(Some(out))
    }

    /// The Novikov-coefficient view: orbit `γ` becomes a generator at level
    /// `h_integral` with the degree of its base capping, and the stored
    /// differential is pushed through coefficient extension.
    pub fn lambda_view(&self) -> Result<FilteredComplex, CappedError> {
        let generators = self
            .orbits
            .iter()
            .map(|o| {
                Ok(Generator {
                    label: o.label.clone(),
                    level: o.h_integral.clone(),
                    degree: degree_of(o, 0)?,
                })
            })
            .collect::<Result<Vec<_>, CappedError>>()?;
        let mut differential = Vec::new();
        for (from, image) in &self.differential {
            let source = self.orbit(from)?;
            let mut chain = Chain::zero();
            for (to, m) in image.terms() {
                let target = self.orbit(to)?;
                let exponent = &target.area(*m) - &source.area_base;
                chain.add_scaled_generator(to, &crate::novikov::NovikovScalar::monomial(exponent));
            }
            differential.push((from.clone(), chain));
        }
        FilteredComplex::new(generators, differential)
            .map_err(|e| CappedError::UnknownLabel(e.to_string()))
    }
}

fn degree_of(orbit: &CappedGenerator, m: i64) -> Result<i64, CappedError> {
    if orbit.period.is_zero() && m != 0 {
        return Err(CappedError::InvalidRecapping {
            label: orbit.label.clone(),
            m,
        });
    }
    Ok(orbit.half_dim - orbit.cz - 2 * (orbit.kappa0 + m * orbit.chern_step))
}

// --- JSON document schema ------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CappedArrowDoc {
    pub from: String,
    pub to: String,
    /// Recapping indices of the target terms, one per mod-2 term.
    pub recappings: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CappedComplexDoc {
    pub orbits: Vec<CappedGenerator>,
    pub differential: Vec<CappedArrowDoc>,
}

impl CappedComplexDoc {
    pub fn to_complex(&self) -> Result<CappedComplex, CappedError> {
        let mut by_from: Vec<(String, CappedChain)> = Vec::new();
        for arrow in &self.differential {
            let slot = match by_from.iter_mut().find(|(from, _)| from == &arrow.from) {
                Some((_, chain)) => chain,
                None => {
                    by_from.push((arrow.from.clone(), CappedChain::zero()));
                    &mut by_from.last_mut().unwrap().1
                }
            };
            for m in &arrow.recappings {
                slot.toggle(arrow.to.clone(), *m);
            }
        }
        CappedComplex::new(self.orbits.clone(), by_from)
    }

    pub fn from_complex(complex: &CappedComplex) -> Self {
        let mut differential = Vec::new();
        for (from, chain) in &complex.differential {
            let mut by_to: BTreeSet<&String> = BTreeSet::new();
            for (to, _) in chain.terms() {
                by_to.insert(to);
            }
            for to in by_to {
                differential.push(CappedArrowDoc {
                    from: from.clone(),
                    to: to.clone(),
                    recappings: chain
                        .terms()
                        .filter(|(l, _)| l == to)
                        .map(|(_, m)| *m)
                        .collect(),
                });
            }
        }
        differential.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        CappedComplexDoc {
            orbits: complex.orbits.clone(),
            differential,
        }
    }
}

/// Serialized capped chain: mod-2 terms grouped by orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CappedChainDoc {
    pub terms: Vec<CappedTermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CappedTermDoc {
    pub label: String,
    pub recappings: Vec<i64>,
}

impl CappedChainDoc {
    pub fn to_chain(&self) -> CappedChain {
        let mut chain = CappedChain::zero();
        for term in &self.terms {
            for m in &term.recappings {
                chain.toggle(term.label.clone(), *m);
            }
        }
        chain
    }

    pub fn from_chain(chain: &CappedChain) -> Self {
        let mut by_label: std::collections::BTreeMap<String, Vec<i64>> =
            std::collections::BTreeMap::new();
        for (label, m) in chain.terms() {
            by_label.entry(label.clone()).or_default().push(*m);
        }
        CappedChainDoc {
            terms: by_label
                .into_iter()
                .map(|(label, recappings)| CappedTermDoc { label, recappings })
                .collect(),
        }
    }
}
