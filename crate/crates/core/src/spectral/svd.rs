//! Nonarchimedean singular value decomposition of a filtered complex.
//!
//! The output is an orthogonal basis `{Z_1..; (S_1, T_1), ..}` with
//! `d S_i = T_i`, the `T_i` a basis of the image of `d`, and the `Z_j`
//! cycles projecting to a basis of homology. Orthogonality means the
//! filtration level of any field combination of basis vectors is the
//! maximum of the levels of its parts; equivalently, the mod-2 indicator
//! vectors of the carrier sets (the generators attaining each vector's
//! level) are linearly independent.
//!
//! The elimination is valuation-greedy: at each step the active column
//! with the smallest level drop `ℓ(V) - ℓ(dV)` is paired, the carrier row
//! of its image is claimed, and that row is eliminated from every other
//! active column; the claimed row's own slot leaves the basis in exchange
//! for `T`. Each row is claimed at most once, so the run is finite.
//! Divisions truncate at a cutoff derived from the requested window; the
//! basis is certified exact only when
//!
//! - no finite bar length reaches the window,
//! - every declared cycle has image hidden below the certification floor,
//! - the carrier indicators of the full basis have full mod-2 rank.
//!
//! Any basis passing the final check is a genuine orthogonal
//! decomposition, and its bar-length multiset is canonical, so
//! certification does not depend on pivot tie-breaks.

use std::fmt;

use serde::Serialize;

use super::f2;
use crate::complex::{Chain, ComplexError, FilteredComplex, ValidationReport};
use crate::exponent::{Exponent, Level};
use crate::novikov::NovikovScalar;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SvdError {
    #[error("complex fails validation: {0:?}")]
    InvalidComplex(ValidationReport),
    #[error("window {window} must exceed the level span {span}")]
    WindowTooSmall { window: Exponent, span: Exponent },
    #[error("{0}")]
    Complex(#[from] ComplexError),
    #[error("chain is not a cycle; d(chain) has witness term ({coefficient}){witness}")]
    NonCycle { witness: String, coefficient: String },
    #[error("result not certified at window {window}: {caveat}")]
    NotCertified { window: Exponent, caveat: String },
}

/// One finite bar: `d S = T` with `ℓ(S) > ℓ(T)`.
#[derive(Clone, Debug)]
pub struct SvdPair {
    pub s: Chain,
    pub t: Chain,
    pub s_level: Exponent,
    pub t_level: Exponent,
    /// Degree of the cycle `T`.
    pub degree: i64,
}

impl SvdPair {
    pub fn bar_length(&self) -> Exponent {
        &self.s_level - &self.t_level
    }
}

/// One infinite bar: a cycle surviving to homology.
#[derive(Clone, Debug)]
pub struct SvdCycle {
    pub z: Chain,
    pub level: Exponent,
    pub degree: i64,
}

/// The orthogonal decomposition, with its certification status.
#[derive(Clone, Debug)]
pub struct SvdBasis {
    pub pairs: Vec<SvdPair>,
    pub cycles: Vec<SvdCycle>,
    pub certified: bool,
    pub caveats: Vec<String>,
    pub window: Exponent,
}

/// Barcode view of an [`SvdBasis`]. The finite bar-length multiset and the
/// per-degree bar counts are canonical; endpoint pairs shift together
/// under the field action, so they are reported as computed.
#[derive(Clone, Debug, Serialize)]
pub struct Barcode {
    pub finite: Vec<FiniteBar>,
    pub infinite: Vec<InfiniteBar>,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteBar {
    pub birth: Exponent,
    pub death: Exponent,
    pub length: Exponent,
    pub degree: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InfiniteBar {
    pub level: Exponent,
    pub degree: i64,
}

impl SvdBasis {
    pub fn barcode(&self) -> Barcode {
        let mut finite: Vec<FiniteBar> = self
            .pairs
            .iter()
            .map(|p| FiniteBar {
                birth: p.t_level.clone(),
                death: p.s_level.clone(),
                length: p.bar_length(),
                degree: p.degree,
            })
            .collect();
        finite.sort_by(|a, b| (&a.length, &a.birth).cmp(&(&b.length, &b.birth)));
        let mut infinite: Vec<InfiniteBar> = self
            .cycles
            .iter()
            .map(|c| InfiniteBar {
                level: c.level.clone(),
                degree: c.degree,
            })
            .collect();
        infinite.sort_by(|a, b| (&a.level, a.degree).cmp(&(&b.level, b.degree)));
        Barcode {
            finite,
            infinite,
            certified: self.certified,
        }
    }

    /// Boundary depth: the maximal finite bar length, zero without pairs.
    pub fn boundary_depth(&self) -> Exponent {
        self.pairs
            .iter()
            .map(|p| p.bar_length())
            .max()
            .unwrap_or_else(Exponent::zero)
    }

    /// Multiset of finite bar lengths, sorted ascending.
    pub fn bar_lengths(&self) -> Vec<Exponent> {
        let mut v: Vec<Exponent> = self.pairs.iter().map(|p| p.bar_length()).collect();
        v.sort();
        v
    }
}

// Dense working vector over the generator basis.
#[derive(Clone, Debug)]
pub(super) struct Coeffs(pub(super) Vec<NovikovScalar>);

impl Coeffs {
    pub(super) fn zero(n: usize) -> Self {
        Coeffs(vec![NovikovScalar::zero(); n])
    }

    fn basis(n: usize, j: usize) -> Self {
        let mut c = Coeffs::zero(n);
        c.0[j] = NovikovScalar::one();
        c
    }

    pub(super) fn add_scaled(&mut self, other: &Coeffs, q: &NovikovScalar) {
        for (mine, theirs) in self.0.iter_mut().zip(&other.0) {
            if !theirs.is_exact_zero() {
                *mine = mine.add(&theirs.mul(q));
            }
        }
    }

    /// `(level, carrier)` of the visible terms: the maximal term level and
    /// the generator indices attaining it.
    pub(super) fn top(&self, levels: &[Exponent]) -> Option<(Exponent, Vec<usize>)> {
        let mut best: Option<Exponent> = None;
        for (i, c) in self.0.iter().enumerate() {
            if let Level::Finite(v) = c.valuation() {
                let lvl = &levels[i] - &v;
                if best.as_ref().map_or(true, |b| lvl > *b) {
                    best = Some(lvl);
                }
            }
        }
        let best = best?;
        let carrier = self
            .0
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c.valuation() {
                Level::Finite(v) if &levels[i] - &v == best => Some(i),
                _ => None,
            })
            .collect();
        Some((best, carrier))
    }

    /// Highest level at which window-hidden terms could sit.
    pub(super) fn hidden_level_bound(&self, levels: &[Exponent]) -> Level {
        let mut bound = Level::NegInf;
        for (i, c) in self.0.iter().enumerate() {
            if let Some(w) = c.window() {
                bound = bound.max(Level::Finite(&levels[i] - w));
            }
        }
        bound
    }

    pub(super) fn to_chain(&self, complex: &FilteredComplex) -> Chain {
        Chain::from_coefficients(self.0.iter().enumerate().filter_map(|(i, c)| {
            if c.is_exact_zero() {
                None
            } else {
                Some((complex.generators()[i].label.clone(), c.clone()))
            }
        }))
    }

    pub(super) fn from_chain(
        complex: &FilteredComplex,
        chain: &Chain,
    ) -> Result<Coeffs, ComplexError> {
        let mut v = Coeffs::zero(complex.generators().len());
        for (label, coeff) in chain.iter() {
            let i = complex
                .generator_index(label)
                .ok_or_else(|| ComplexError::UnknownLabel(label.clone()))?;
            v.0[i] = coeff.clone();
        }
        Ok(v)
    }
}

/// Computes the decomposition. Preconditions: the complex validates and
/// `window` exceeds its level span. A result that cannot be certified at
/// this window is returned with `certified = false` and caveats naming the
/// offending bar or chain.
pub fn svd(complex: &FilteredComplex, window: &Exponent) -> Result<SvdBasis, SvdError> {
    let report = complex.validate();
    if !report.is_valid() {
        return Err(SvdError::InvalidComplex(report));
    }
    svd_unvalidated(complex, window)
}

/// Same elimination without the validation precondition; used on views
/// whose integer grading is only defined modulo recapping.
pub fn svd_unvalidated(complex: &FilteredComplex, window: &Exponent) -> Result<SvdBasis, SvdError> {
    let n = complex.generators().len();
    let levels: Vec<Exponent> = complex
        .generators()
        .iter()
        .map(|g| g.level.clone())
        .collect();
    let span = match complex.level_span() {
        Some((lo, hi)) => &hi - &lo,
        None => Exponent::zero(),
    };
    if *window <= span {
        return Err(SvdError::WindowTooSmall {
            window: window.clone(),
            span,
        });
    }

    // absolute truncation cutoff for divisions: deep enough that anything
    // a window hides sits below the certification floor, allowing the
    // window of a coefficient to degrade by two data exponents per
    // cascaded pivot
    let mut exp_bound = Exponent::zero();
    for g in complex.generators() {
        if let Some(d) = complex.differential_of(&g.label) {
            for (_, coeff) in d.iter() {
                for e in coeff.terms() {
                    exp_bound = exp_bound.max(e.abs());
                }
            }
        }
        exp_bound = exp_bound.max(g.level.abs());
    }
    let cut = &(&(&span + window) + &Exponent::one())
        + &(&exp_bound * &Exponent::from_int(2 * (n as i64) + 2));

    struct Slot {
        id: usize,
        v: Coeffs,
        r: Coeffs,
    }

    let mut active: Vec<Slot> = (0..n)
        .map(|j| {
            let v = Coeffs::basis(n, j);
            let mut r = Coeffs::zero(n);
            if let Some(d) = complex.differential_of(&complex.generators()[j].label) {
                for (to, coeff) in d.iter() {
                    let i = complex.generator_index(to).expect("validated label");
                    r.0[i] = coeff.clone();
                }
            }
            Slot { id: j, v, r }
        })
        .collect();

    let mut raw_pairs: Vec<(Coeffs, Coeffs, Exponent, Exponent, i64)> = Vec::new();
    let mut caveats: Vec<String> = Vec::new();

    loop {
        // smallest drop ℓ(V) - ℓ(R) wins; ties break on (degree, maximal
        // source level, label order)
        let mut pick: Option<(usize, Exponent, Exponent, Exponent, Vec<usize>)> = None;
        for (pos, slot) in active.iter().enumerate() {
            let (r_level, carrier) = match slot.r.top(&levels) {
                Some(x) => x,
                None => continue,
            };
            let (v_level, _) = slot
                .v
                .top(&levels)
                .expect("working vector keeps its unit term");
            let drop = &v_level - &r_level;
            let better = match &pick {
                None => true,
                Some((best_pos, best_drop, best_v, _, _)) => {
                    let g = &complex.generators()[slot.id];
                    let bg = &complex.generators()[active[*best_pos].id];
                    (&drop, g.degree, std::cmp::Reverse(&v_level), &g.label)
                        < (best_drop, bg.degree, std::cmp::Reverse(best_v), &bg.label)
                }
            };
            if better {
                pick = Some((pos, drop, v_level, r_level, carrier));
            }
        }
        let (pos, _drop, v_level, r_level, carrier) = match pick {
            Some(p) => p,
            None => break,
        };

        // claim a pivot row among the carrier: highest level first, then
        // label; the row's slot must still be active so T can take it over
        let active_ids: Vec<usize> = active.iter().map(|s| s.id).collect();
        let mut pivot: Option<usize> = None;
        let mut best_key: Option<(Exponent, std::cmp::Reverse<String>)> = None;
        for &i in &carrier {
            if !active_ids.contains(&i) || i == active[pos].id {
                continue;
            }
            let key = (
                levels[i].clone(),
                std::cmp::Reverse(complex.generators()[i].label.clone()),
            );
            if best_key.as_ref().map_or(true, |b| key > *b) {
                best_key = Some(key);
                pivot = Some(i);
            }
        }
        let pivot = match pivot {
            Some(i) => i,
            None => {
                caveats.push(format!(
                    "no exchangeable pivot row for column {}",
                    complex.generators()[active[pos].id].label
                ));
                let slot = active.remove(pos);
                let degree = complex.generators()[slot.id].degree - 1;
                raw_pairs.push((slot.v, slot.r, v_level, r_level, degree));
                continue;
            }
        };

        let slot = active.remove(pos);
        let degree = complex.generators()[slot.id].degree - 1;

        // eliminate the claimed row from every other active column
        let t_coeff = slot.r.0[pivot].clone();
        let t_inv = t_coeff.inverse(&cut).expect("pivot coefficient is nonzero");
        for other in active.iter_mut() {
            if other.r.0[pivot].is_visibly_zero() {
                continue;
            }
            let q = other.r.0[pivot].mul(&t_inv);
            other.v.add_scaled(&slot.v, &q);
            other.r.add_scaled(&slot.r, &q);
            debug_assert!(other.r.0[pivot].is_visibly_zero());
        }

        // the claimed row's column is dependent on the remaining ones;
        // its slot is exchanged for T
        active.retain(|s| s.id != pivot);

        raw_pairs.push((slot.v, slot.r, v_level, r_level, degree));
    }

    // remaining slots are cycles; their images must be hidden below the
    // certification floor ℓ_min - window
    let floor = match complex.level_span() {
        Some((lo, _)) => Level::Finite(&lo - window),
        None => Level::NegInf,
    };
    let mut cycles = Vec::new();
    for slot in &active {
        let hidden = slot.r.hidden_level_bound(&levels);
        if hidden > floor {
            caveats.push(format!(
                "cycle for {} has unknown image terms possibly at level {hidden}, above the floor {floor}",
                complex.generators()[slot.id].label,
            ));
        }
        let (level, _) = slot.v.top(&levels).expect("cycle vector is visible");
        cycles.push(SvdCycle {
            z: slot.v.to_chain(complex),
            level,
            degree: complex.generators()[slot.id].degree,
        });
    }

    let mut pairs = Vec::new();
    for (v, r, v_level, r_level, degree) in &raw_pairs {
        let length = v_level - r_level;
        if length >= *window {
            caveats.push(format!(
                "bar of length {length} dying at level {v_level} reaches the window {window}"
            ));
        }
        pairs.push(SvdPair {
            s: v.to_chain(complex),
            t: r.to_chain(complex),
            s_level: v_level.clone(),
            t_level: r_level.clone(),
            degree: *degree,
        });
    }

    // orthogonality post-check: full mod-2 rank of the carrier indicators
    let n_words = n.div_ceil(64);
    let mut echelon = f2::Echelon::new();
    let mut vectors = 0usize;
    {
        let mut id = 0;
        let mut push = |coeffs: &Coeffs, echelon: &mut f2::Echelon| {
            let carrier = coeffs.top(&levels).expect("basis vector visible").1;
            echelon.insert(f2::indicator(n_words, &carrier), id);
            id += 1;
        };
        for (v, r, ..) in &raw_pairs {
            push(v, &mut echelon);
            push(r, &mut echelon);
            vectors += 2;
        }
        for slot in &active {
            push(&slot.v, &mut echelon);
            vectors += 1;
        }
    }
    if echelon.rank() != n || vectors != n {
        caveats.push(format!(
            "carrier indicators span rank {} of {n}: basis is not orthogonal",
            echelon.rank()
        ));
    }

    Ok(SvdBasis {
        pairs,
        cycles,
        certified: caveats.is_empty(),
        caveats,
        window: window.clone(),
    })
}

/// Runs [`svd`] with an automatically chosen window, widening it a few
/// times if certification fails.
pub fn svd_auto(complex: &FilteredComplex) -> Result<SvdBasis, SvdError> {
    let mut window = default_window(complex);
    let mut last_caveat = String::new();
    for _ in 0..4 {
        let basis = svd(complex, &window)?;
        if basis.certified {
            return Ok(basis);
        }
        last_caveat = basis.caveats.join("; ");
        window = &window * &Exponent::from_int(4);
    }
    Err(SvdError::NotCertified {
        window,
        caveat: last_caveat,
    })
}

/// Level span plus differential exponent span plus one: comfortably above
/// the level span, and deep enough for desk-scale bars.
pub fn default_window(complex: &FilteredComplex) -> Exponent {
    let span = match complex.level_span() {
        Some((lo, hi)) => &hi - &lo,
        None => Exponent::zero(),
    };
    let mut exp_span = Exponent::zero();
    for g in complex.generators() {
        if let Some(d) = complex.differential_of(&g.label) {
            for (_, coeff) in d.iter() {
                for e in coeff.terms() {
                    exp_span = exp_span.max(e.abs());
                }
            }
        }
    }
    &(&span + &exp_span) + &Exponent::one()
}

impl fmt::Display for SvdBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "svd: {} pairs, {} cycles, certified: {}",
            self.pairs.len(),
            self.cycles.len(),
            self.certified
        )?;
        for p in &self.pairs {
            writeln!(
                f,
                "  pair deg {}: l(S)={} l(T)={} bar={}  S={}  T={}",
                p.degree,
                p.s_level,
                p.t_level,
                p.bar_length(),
                p.s,
                p.t
            )?;
        }
        for c in &self.cycles {
            writeln!(f, "  cycle deg {}: l(Z)={}  Z={}", c.degree, c.level, c.z)?;
        }
        Ok(())
    }
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

    #[test]
    fn rank_one_pair() {
        // d(x) = y, levels 3 and 1: one pair with l(S)=3, l(T)=1, no cycles
        let c = FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap();
        let basis = svd(&c, &Exponent::from_int(5)).unwrap();
        assert!(basis.certified);
        assert_eq!(basis.pairs.len(), 1);
        assert!(basis.cycles.is_empty());
        assert_eq!(basis.pairs[0].s_level, Exponent::from_int(3));
        assert_eq!(basis.pairs[0].t_level, Exponent::from_int(1));
        assert_eq!(basis.boundary_depth(), Exponent::from_int(2));
    }

    #[test]
    fn zero_differential_gives_cycles() {
        let c = FilteredComplex::new(vec![gen("a", 0, 0), gen("b", 2, 1)], vec![]).unwrap();
        let basis = svd(&c, &Exponent::from_int(3)).unwrap();
        assert!(basis.certified);
        assert!(basis.pairs.is_empty());
        assert_eq!(basis.cycles.len(), 2);
        assert_eq!(basis.boundary_depth(), Exponent::zero());
    }

    #[test]
    fn window_must_exceed_span() {
        let c = FilteredComplex::new(vec![gen("a", 0, 0), gen("b", 2, 1)], vec![]).unwrap();
        assert!(matches!(
            svd(&c, &Exponent::one()),
            Err(SvdError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn competing_columns_pair_by_smaller_drop() {
        // d(b) = a at drop 1/2, d(c) = t^{-3/5} a at drop 2/5: the pair
        // must take the smaller bar 2/5 and leave a cycle through b
        let c = FilteredComplex::new(
            vec![
                gen("a", 0, 0),
                Generator {
                    label: "b".into(),
                    level: Exponent::ratio(1, 2),
                    degree: 1,
                },
                gen("c", 1, 1),
            ],
            vec![
                ("b".into(), Chain::generator("a")),
                ("c".into(), Chain::term("a", Exponent::ratio(-3, 5))),
            ],
        )
        .unwrap();
        let basis = svd(&c, &Exponent::from_int(3)).unwrap();
        assert!(basis.certified, "caveats: {:?}", basis.caveats);
        assert_eq!(basis.pairs.len(), 1);
        assert_eq!(basis.pairs[0].bar_length(), Exponent::ratio(2, 5));
        assert_eq!(basis.cycles.len(), 1);
        // the kernel line through b + t^{3/5} c, normalized with a unit
        // coefficient on b, tops out at level(b) = 1/2
        assert_eq!(basis.cycles[0].level, Exponent::ratio(1, 2));
    }

    #[test]
    fn multi_term_coefficient_cascade() {
        // d(x1) = y1 + y2, d(x2) = y1 + (1 + t) y2: reduction leaves the
        // cascade bar x2 -> t y2 of length 2 - (-1) = 3
        let c = FilteredComplex::new(
            vec![gen("x1", 2, 1), gen("x2", 2, 1), gen("y1", 0, 0), gen("y2", 0, 0)],
            vec![
                (
                    "x1".into(),
                    Chain::generator("y1").add(&Chain::generator("y2")),
                ),
                (
                    "x2".into(),
                    Chain::generator("y1").add(&Chain::from_coefficients([(
                        "y2".to_string(),
                        NovikovScalar::from_exponents([Exponent::zero(), Exponent::one()]),
                    )])),
                ),
            ],
        )
        .unwrap();
        let basis = svd(&c, &Exponent::from_int(8)).unwrap();
        assert!(basis.certified, "caveats: {:?}", basis.caveats);
        assert_eq!(basis.pairs.len(), 2);
        let mut lengths = basis.bar_lengths();
        lengths.sort();
        assert_eq!(
            lengths,
            vec![Exponent::from_int(2), Exponent::from_int(3)]
        );
    }
}
