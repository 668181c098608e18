//! Filtered, integer-graded chain complexes over the Novikov field.
//!
//! A complex is a finite set of generators, each carrying an action level
//! and a degree, together with a differential matrix over the field. The
//! three axioms checked by [`FilteredComplex::validate`]:
//!
//! - `d ∘ d = 0`, exactly;
//! - the differential lowers degree by one;
//! - strict filtration: every term `t^b γ'` of `d(γ)` satisfies
//!   `level(γ') - b < level(γ)`.
//!
//! The filtration extends to chains by `ℓ(t^a γ) = level(γ) - a`, taking
//! the maximum over stored terms; the generator basis is orthogonal for ℓ.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exponent::{Exponent, Level};
use crate::novikov::NovikovScalar;

/// A basis element with its action level and integer degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    pub level: Exponent,
    pub degree: i64,
}

/// Hard errors in complex construction and lookups. Degenerate input such
/// as a duplicated label is rejected rather than merged.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("duplicate generator label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown generator label {0:?}")]
    UnknownLabel(String),
    #[error("differential coefficient {from:?} -> {to:?} must be exact (no window)")]
    WindowedCoefficient { from: String, to: String },
}

/// A finite formal combination of generators with field coefficients.
/// Exact zero coefficients are never stored; a visibly-zero coefficient
/// with a window is kept, since it may hide deep terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    coefficients: BTreeMap<String, NovikovScalar>,
}

impl Chain {
    pub fn zero() -> Self {
        Chain::default()
    }

    /// The single term `t^a γ`.
    pub fn term(label: impl Into<String>, exponent: Exponent) -> Self {
        let mut c = Chain::zero();
        c.coefficients
            .insert(label.into(), NovikovScalar::monomial(exponent));
        c
    }

    pub fn generator(label: impl Into<String>) -> Self {
        Chain::term(label, Exponent::zero())
    }

    pub fn from_coefficients<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (String, NovikovScalar)>,
    {
        let mut c = Chain::zero();
        for (label, scalar) in entries {
            c.add_scaled_generator(&label, &scalar);
        }
        c
    }

    pub fn coefficient(&self, label: &str) -> Option<&NovikovScalar> {
        self.coefficients.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &NovikovScalar)> {
        self.coefficients.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.coefficients.keys()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// No visible terms anywhere; windows may remain.
    pub fn is_visibly_zero(&self) -> bool {
        self.coefficients.values().all(|c| c.is_visibly_zero())
    }

    pub fn is_exact(&self) -> bool {
        self.coefficients.values().all(|c| c.is_exact())
    }

    fn set(&mut self, label: String, value: NovikovScalar) {
        if value.is_exact_zero() {
            self.coefficients.remove(&label);
        } else {
            self.coefficients.insert(label, value);
        }
    }

    pub fn add_scaled_generator(&mut self, label: &str, scalar: &NovikovScalar) {
        let current = self.coefficients.remove(label).unwrap_or_default();
        self.set(label.to_string(), current.add(scalar));
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (label, scalar) in &other.coefficients {
            out.add_scaled_generator(label, scalar);
        }
        out
    }

    pub fn scaled(&self, scalar: &NovikovScalar) -> Chain {
        let mut out = Chain::zero();
        for (label, coeff) in &self.coefficients {
            out.set(label.clone(), coeff.mul(scalar));
        }
        out
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (label, scalar) in &self.coefficients {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({scalar}){label}")?;
            first = false;
        }
        Ok(())
    }
}

/// A violation found by [`FilteredComplex::validate`], with a witness term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Grading {
        from: String,
        to: String,
        expected_degree: i64,
        found_degree: i64,
    },
    Filtration {
        from: String,
        to: String,
        exponent: Exponent,
        source_level: Exponent,
        term_level: Exponent,
    },
    DifferentialSquare {
        from: String,
        witness: String,
        coefficient: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Grading {
                from,
                to,
                expected_degree,
                found_degree,
            } => write!(
                f,
                "grading: d({from}) hits {to} of degree {found_degree}, expected {expected_degree}"
            ),
            Violation::Filtration {
                from,
                to,
                exponent,
                source_level,
                term_level,
            } => write!(
                f,
                "filtration: term t^{{{exponent}}}{to} of d({from}) has level {term_level} >= {source_level}"
            ),
            Violation::DifferentialSquare {
                from,
                witness,
                coefficient,
            } => write!(f, "d^2: d(d({from})) has ({coefficient}){witness}"),
        }
    }
}

/// Outcome of validation: empty means the complex satisfies all axioms.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A filtered complex: generators plus a strictly action-decreasing
/// differential. Immutable after construction; all queries are pure.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    generators: Vec<Generator>,
    index: BTreeMap<String, usize>,
    differential: BTreeMap<String, Chain>,
}

impl FilteredComplex {
    pub fn new(
        generators: Vec<Generator>,
        differential: Vec<(String, Chain)>,
    ) -> Result<Self, ComplexError> {
        let mut index = BTreeMap::new();
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.label.clone(), i).is_some() {
                return Err(ComplexError::DuplicateLabel(g.label.clone()));
            }
        }
        let mut diff = BTreeMap::new();
        for (from, chain) in differential {
            if !index.contains_key(&from) {
                return Err(ComplexError::UnknownLabel(from));
            }
            for (to, coeff) in chain.iter() {
                if !index.contains_key(to) {
                    return Err(ComplexError::UnknownLabel(to.clone()));
                }
                if !coeff.is_exact() {
                    return Err(ComplexError::WindowedCoefficient {
                        from: from.clone(),
                        to: to.clone(),
                    });
                }
            }
            if !chain.is_exact_zero() {
                if diff.insert(from.clone(), chain).is_some() {
                    return Err(ComplexError::DuplicateLabel(from));
                }
            }
        }
        Ok(FilteredComplex {
            generators,
            index,
            differential: diff,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, label: &str) -> Result<&Generator, ComplexError> {
        self.index
            .get(label)
            .map(|&i| &self.generators[i])
            .ok_or_else(|| ComplexError::UnknownLabel(label.to_string()))
    }

    pub fn generator_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// `d` of a single generator; zero chains are not stored.
    pub fn differential_of(&self, label: &str) -> Option<&Chain> {
        self.differential.get(label)
    }

    /// Extends `d` linearly over the field to a chain.
    pub fn boundary(&self, chain: &Chain) -> Result<Chain, ComplexError> {
        let mut out = Chain::zero();
        for (label, scalar) in chain.iter() {
            self.generator(label)?;
            if let Some(image) = self.differential.get(label) {
                out = out.add(&image.scaled(scalar));
            }
        }
        Ok(out)
    }

    /// The filtration level `ℓ` of a chain: the maximum of
    /// `level(γ) - a` over stored visible terms `t^a γ`; `-inf` for zero.
    pub fn level(&self, chain: &Chain) -> Result<Level, ComplexError> {
        let mut best = Level::NegInf;
        for (label, scalar) in chain.iter() {
            let g = self.generator(label)?;
            if let Level::Finite(v) = scalar.valuation() {
                best = best.max(Level::Finite(&g.level - &v));
            }
        }
        Ok(best)
    }

    /// Range of generator levels, `None` for the empty complex.
    pub fn level_span(&self) -> Option<(Exponent, Exponent)> {
        let mut it = self.generators.iter().map(|g| g.level.clone());
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first;
        for l in it {
            lo = lo.min(l.clone());
            hi = hi.max(l);
        }
        Some((lo, hi))
    }

    /// Checks the three axioms, returning every violation with a witness.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (from, image) in &self.differential {
            let source = &self.generators[self.index[from]];
            for (to, coeff) in image.iter() {
                let target = &self.generators[self.index[to]];
                if target.degree != source.degree - 1 {
                    report.violations.push(Violation::Grading {
                        from: from.clone(),
                        to: to.clone(),
                        expected_degree: source.degree - 1,
                        found_degree: target.degree,
                    });
                }
                for b in coeff.terms() {
                    let term_level = &target.level - b;
                    if term_level >= source.level {
                        report.violations.push(Violation::Filtration {
                            from: from.clone(),
                            to: to.clone(),
                            exponent: b.clone(),
                            source_level: source.level.clone(),
                            term_level,
                        });
                    }
                }
            }
            // d^2 = 0, checked exactly over the field
            let twice = self
                .boundary(image)
                .expect("differential references known labels");
            if !twice.is_exact_zero() {
                if let Some((witness, coefficient)) = twice.iter().next() {
                    report.violations.push(Violation::DifferentialSquare {
                        from: from.clone(),
                        witness: witness.clone(),
                        coefficient: coefficient.to_string(),
                    });
                }
            }
        }
        report
    }
}

// --- JSON document schema ------------------------------------------------

/// One differential entry: the coefficient of `to` in `d(from)`, stored as
/// the list of its exponents (each term has mod-2 coefficient 1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowDoc {
    pub from: String,
    pub to: String,
    pub exponents: Vec<Exponent>,
}

/// Serialized form of a filtered complex. Round trips are bit-exact:
/// generators keep their order, arrows are sorted by `(from, to)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub generators: Vec<Generator>,
    pub differential: Vec<ArrowDoc>,
}

impl ComplexDoc {
    pub fn to_complex(&self) -> Result<FilteredComplex, ComplexError> {
        let mut by_from: BTreeMap<String, Chain> = BTreeMap::new();
        for arrow in &self.differential {
            let chain = by_from.entry(arrow.from.clone()).or_default();
            chain.add_scaled_generator(
                &arrow.to,
                &NovikovScalar::from_exponents(arrow.exponents.iter().cloned()),
            );
        }
        FilteredComplex::new(self.generators.clone(), by_from.into_iter().collect())
    }

    pub fn from_complex(complex: &FilteredComplex) -> Self {
        let mut differential = Vec::new();
        for (from, chain) in &complex.differential {
            for (to, coeff) in chain.iter() {
                differential.push(ArrowDoc {
                    from: from.clone(),
                    to: to.clone(),
                    exponents: coeff.terms().cloned().collect(),
                });
            }
        }
        differential.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        ComplexDoc {
            generators: complex.generators.clone(),
            differential,
        }
    }
}

/// Serialized chain: a list of `(label, exponents)` terms, mirroring the
/// differential entry format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainDoc {
    pub terms: Vec<ChainTermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainTermDoc {
    pub label: String,
    pub exponents: Vec<Exponent>,
}

impl ChainDoc {
    pub fn to_chain(&self) -> Chain {
        Chain::from_coefficients(self.terms.iter().map(|t| {
            (
                t.label.clone(),
                NovikovScalar::from_exponents(t.exponents.iter().cloned()),
            )
        }))
    }

    pub fn from_chain(chain: &Chain) -> Self {
        ChainDoc {
            terms: chain
                .iter()
                .map(|(label, coeff)| ChainTermDoc {
                    label: label.clone(),
                    exponents: coeff.terms().cloned().collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_generator(level_x: i64, level_y: i64, exponent: (i64, i64)) -> FilteredComplex {
        // d(x) = t^{p/q} y, d(y) = 0
        FilteredComplex::new(
            vec![
                Generator {
                    label: "x".into(),
                    level: Exponent::from_int(level_x),
                    degree: 1,
                },
                Generator {
                    label: "y".into(),
                    level: Exponent::from_int(level_y),
                    degree: 0,
                },
            ],
            vec![(
                "x".into(),
                Chain::term("y", Exponent::ratio(exponent.0, exponent.1)),
            )],
        )
        .unwrap()
    }

    #[test]
    fn single_arrow_validates() {
        // level y - 1/2 = 1/2 < 3
        let c = two_generator(3, 1, (1, 2));
        assert!(c.validate().is_valid());
    }

    #[test]
    fn filtration_violation_is_reported_with_witness() {
        // 4 - 1/2 = 7/2 >= 3
        let c = two_generator(3, 4, (1, 2));
        let report = c.validate();
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::Filtration { from, to, .. } => {
                assert_eq!(from, "x");
                assert_eq!(to, "y");
            }
            other => panic!("unexpected violation {other:?}"),
        }
    }

    #[test]
    fn d_square_violation_names_the_witness() {
        // x -> y -> z with a single (odd) composite path
        let c = FilteredComplex::new(
            vec![
                Generator {
                    label: "x".into(),
                    level: Exponent::from_int(3),
                    degree: 2,
                },
                Generator {
                    label: "y".into(),
                    level: Exponent::from_int(2),
                    degree: 1,
                },
                Generator {
                    label: "z".into(),
                    level: Exponent::from_int(1),
                    degree: 0,
                },
            ],
            vec![
                ("x".into(), Chain::term("y", Exponent::zero())),
                ("y".into(), Chain::term("z", Exponent::zero())),
            ],
        )
        .unwrap();
        let report = c.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DifferentialSquare { from, witness, .. }
                if from == "x" && witness == "z")));
    }

    #[test]
    fn level_of_chains() {
        let c = two_generator(3, 1, (1, 2));
        // ℓ(t^{1/2} x) = 3 - 1/2
        assert_eq!(
            c.level(&Chain::term("x", Exponent::ratio(1, 2))).unwrap(),
            Level::Finite(Exponent::ratio(5, 2))
        );
        assert_eq!(c.level(&Chain::zero()).unwrap(), Level::NegInf);
    }

    #[test]
    fn level_takes_the_orthogonal_max() {
        let c = FilteredComplex::new(
            vec![
                Generator {
                    label: "x".into(),
                    level: Exponent::one(),
                    degree: 0,
                },
                Generator {
                    label: "y".into(),
                    level: Exponent::one(),
                    degree: 0,
                },
            ],
            vec![],
        )
        .unwrap();
        // ℓ(x + t^{-1} y) = max(1, 2) = 2
        let chain = Chain::generator("x").add(&Chain::term("y", Exponent::from_int(-1)));
        assert_eq!(
            c.level(&chain).unwrap(),
            Level::Finite(Exponent::from_int(2))
        );
    }

    #[test]
    fn duplicate_labels_are_a_hard_error() {
        let result = FilteredComplex::new(
            vec![
                Generator {
                    label: "x".into(),
                    level: Exponent::zero(),
                    degree: 0,
                },
                Generator {
                    label: "x".into(),
                    level: Exponent::one(),
                    degree: 0,
                },
            ],
            vec![],
        );
        assert_eq!(result.unwrap_err(), ComplexError::DuplicateLabel("x".into()));
    }

    #[test]
    fn unknown_label_in_level_is_an_error() {
        let c = two_generator(3, 1, (1, 2));
        assert!(c.level(&Chain::generator("ghost")).is_err());
    }

    #[test]
    fn document_round_trip_is_bit_exact() {
        let c = two_generator(3, 1, (1, 2));
        let doc = ComplexDoc::from_complex(&c);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ComplexDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert!(back.to_complex().unwrap().validate().is_valid());
    }
}
