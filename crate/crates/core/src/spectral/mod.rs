//! Spectral algebra over the Novikov field: singular value decomposition,
//! barcodes, spectral invariants, boundary depth, detection functionals,
//! and the coefficient-extension distance check.

mod detect;
mod extension;
mod f2;
mod stability;
mod svd;

pub use detect::{detection_bound, DetectError, DetectionBound, DetectionFunctional};
pub use extension::{extension_distance_check, ExtensionError, ExtensionReport};
pub use stability::{stability_check, StabilityVerdict};
pub use svd::{
    default_window, svd, svd_auto, svd_unvalidated, Barcode, FiniteBar, InfiniteBar, SvdBasis,
    SvdCycle, SvdError, SvdPair,
};

use crate::complex::{Chain, FilteredComplex};
use crate::exponent::{Exponent, Level};
use crate::novikov::NovikovScalar;
use svd::Coeffs;

/// Spectral invariant of a cycle: writing `ζ = ξ + dβ` with `ξ` in the
/// span of the basis cycles, returns `ℓ(ξ)`; `-inf` when the class is
/// exact. Equals the min-max `inf { ℓ(ζ + dβ) }` over representatives.
pub fn spectral_invariant(complex: &FilteredComplex, zeta: &Chain) -> Result<Level, SvdError> {
    let boundary = complex.boundary(zeta)?;
    if !boundary.is_visibly_zero() {
        let (witness, coefficient) = boundary
            .iter()
            .find(|(_, c)| !c.is_visibly_zero())
            .expect("visibly nonzero chain has a visible term");
        return Err(SvdError::NonCycle {
            witness: witness.clone(),
            coefficient: coefficient.to_string(),
        });
    }
    let basis = svd_auto(complex)?;
    spectral_invariant_in(complex, &basis, zeta)
}

/// Spectral invariant against an already-computed basis.
pub fn spectral_invariant_in(
    complex: &FilteredComplex,
    basis: &SvdBasis,
    zeta: &Chain,
) -> Result<Level, SvdError> {
    let parts = decompose(complex, basis, zeta)?;
    if parts.s_top.is_finite() {
        return Err(SvdError::NotCertified {
            window: basis.window.clone(),
            caveat: "cycle decomposed with a non-cycle component".into(),
        });
    }
    Ok(parts.z_top)
}

/// Distance from a chain to the subspace of exact chains:
/// `inf { ℓ(chain + dβ) }` over all field chains `β`. Unlike the spectral
/// invariant this does not require a cycle.
pub fn distance_to_exact(
    complex: &FilteredComplex,
    chain: &Chain,
    window: Option<&Exponent>,
) -> Result<Level, SvdError> {
    let basis = match window {
        Some(w) => svd_unvalidated(complex, w)?,
        None => auto_unvalidated(complex)?,
    };
    if !basis.certified {
        return Err(SvdError::NotCertified {
            window: basis.window.clone(),
            caveat: basis.caveats.join("; "),
        });
    }
    let parts = decompose(complex, &basis, chain)?;
    Ok(parts.z_top.max(parts.s_top))
}

fn auto_unvalidated(complex: &FilteredComplex) -> Result<SvdBasis, SvdError> {
    let mut window = default_window(complex);
    let mut last = String::new();
    for _ in 0..4 {
        let basis = svd_unvalidated(complex, &window)?;
        if basis.certified {
            return Ok(basis);
        }
        last = basis.caveats.join("; ");
        window = &window * &Exponent::from_int(4);
    }
    Err(SvdError::NotCertified {
        window,
        caveat: last,
    })
}

/// Boundary depth: the maximal finite bar length; zero for a complex with
/// no pairs. Equals the sup over exact chains `x` of
/// `inf { ℓ(y) : dy = x } - ℓ(x)`.
pub fn boundary_depth(complex: &FilteredComplex) -> Result<Exponent, SvdError> {
    Ok(svd_auto(complex)?.boundary_depth())
}

struct DecompositionTops {
    z_top: Level,
    s_top: Level,
}

// Expresses a chain over the orthogonal basis by cancelling its carrier
// top-down, recording the levels at which Z and S directions enter. At a
// fixed level the graded piece is canonically F2^(generators), so carrier
// indicators decide cancellation exactly.
fn decompose(
    complex: &FilteredComplex,
    basis: &SvdBasis,
    chain: &Chain,
) -> Result<DecompositionTops, SvdError> {
    let n = complex.generators().len();
    let levels: Vec<Exponent> = complex
        .generators()
        .iter()
        .map(|g| g.level.clone())
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Z,
        S,
        T,
    }
    let mut members: Vec<(Kind, Coeffs, Exponent)> = Vec::new();
    for p in &basis.pairs {
        members.push((Kind::S, Coeffs::from_chain(complex, &p.s)?, p.s_level.clone()));
        members.push((Kind::T, Coeffs::from_chain(complex, &p.t)?, p.t_level.clone()));
    }
    for c in &basis.cycles {
        members.push((Kind::Z, Coeffs::from_chain(complex, &c.z)?, c.level.clone()));
    }

    let n_words = n.div_ceil(64);
    let mut echelon = f2::Echelon::new();
    for (id, (_, coeffs, _)) in members.iter().enumerate() {
        if let Some((_, carrier)) = coeffs.top(&levels) {
            echelon.insert(f2::indicator(n_words, &carrier), id);
        }
    }

    let mut residual = Coeffs::from_chain(complex, chain)?;
    let mut z_top = Level::NegInf;
    let mut s_top = Level::NegInf;

    // the top-down cancellation is unique (the carrier indicators form a
    // basis), so the first level using a Z or S direction is the answer;
    // anything after is strictly lower. All-T descents burn through
    // truncation junk; once they pass the certification floor the chain is
    // exact to within the window and reports as such.
    let floor = match complex.level_span() {
        Some((lo, _)) => Level::Finite(&lo - &(&basis.window * &Exponent::from_int(4))),
        None => Level::NegInf,
    };
    let mut steps = 0usize;
    loop {
        let (m, carrier) = match residual.top(&levels) {
            None => break,
            Some(t) => t,
        };
        if Level::Finite(m.clone()) < floor {
            break;
        }
        steps += 1;
        if steps > 100_000 {
            return Err(SvdError::NotCertified {
                window: basis.window.clone(),
                caveat: "decomposition did not terminate; data may be off-lattice".into(),
            });
        }
        let combo = echelon
            .solve(f2::indicator(n_words, &carrier))
            .ok_or_else(|| SvdError::NotCertified {
                window: basis.window.clone(),
                caveat: "carrier outside the span of the basis indicators".into(),
            })?;
        debug_assert!(!combo.is_empty());
        let mut used_non_t = false;
        for id in combo {
            let (kind, coeffs, level) = &members[id];
            let q = NovikovScalar::monomial(level - &m);
            residual.add_scaled(coeffs, &q);
            match kind {
                Kind::Z => {
                    z_top = z_top.clone().max(Level::Finite(m.clone()));
                    used_non_t = true;
                }
                Kind::S => {
                    s_top = s_top.clone().max(Level::Finite(m.clone()));
                    used_non_t = true;
                }
                Kind::T => {}
            }
        }
        if used_non_t {
            // hidden terms above the answer would make it ambiguous
            let hidden = residual.hidden_level_bound(&levels);
            if hidden > Level::Finite(m) {
                return Err(SvdError::NotCertified {
                    window: basis.window.clone(),
                    caveat: format!("window-hidden terms at level {hidden} above the answer"),
                });
            }
            return Ok(DecompositionTops { z_top, s_top });
        }
    }

    // cancelled to (or below) the floor without touching Z or S: the chain
    // is exact to within the certification window
    Ok(DecompositionTops { z_top, s_top })
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
    fn spectral_invariant_with_zero_differential() {
        let c = FilteredComplex::new(vec![gen("g", 2, 0)], vec![]).unwrap();
        assert_eq!(
            spectral_invariant(&c, &Chain::generator("g")).unwrap(),
            Level::Finite(Exponent::from_int(2))
        );
    }

    #[test]
    fn exact_cycle_has_sentinel_invariant() {
        let c = FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap();
        assert_eq!(
            spectral_invariant(&c, &Chain::generator("y")).unwrap(),
            Level::NegInf
        );
    }

    #[test]
    fn non_cycle_is_rejected() {
        let c = FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap();
        assert!(matches!(
            spectral_invariant(&c, &Chain::generator("x")),
            Err(SvdError::NonCycle { .. })
        ));
    }

    #[test]
    fn representative_independence() {
        // c(zeta + d beta) = c(zeta)
        let c = FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0), gen("z", 2, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap();
        let zeta = Chain::generator("z");
        let base = spectral_invariant(&c, &zeta).unwrap();
        assert_eq!(base, Level::Finite(Exponent::from_int(2)));
        let perturbed = zeta.add(
            &c.boundary(&Chain::term("x", Exponent::ratio(1, 4)))
                .unwrap(),
        );
        assert_eq!(spectral_invariant(&c, &perturbed).unwrap(), base);
    }

    #[test]
    fn boundary_depth_examples() {
        let c = FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap();
        assert_eq!(boundary_depth(&c).unwrap(), Exponent::from_int(2));
        let z = FilteredComplex::new(vec![gen("a", 0, 0)], vec![]).unwrap();
        assert_eq!(boundary_depth(&z).unwrap(), Exponent::zero());
    }

    #[test]
    fn distance_to_exact_mixes_s_and_z_parts() {
        let c = FilteredComplex::new(
            vec![gen("x", 3, 1), gen("y", 1, 0)],
            vec![("x".into(), Chain::generator("y"))],
        )
        .unwrap();
        // x is an S direction: its distance to the exact subspace is l(x)
        assert_eq!(
            distance_to_exact(&c, &Chain::generator("x"), None).unwrap(),
            Level::Finite(Exponent::from_int(3))
        );
        // y is exact
        assert_eq!(
            distance_to_exact(&c, &Chain::generator("y"), None).unwrap(),
            Level::NegInf
        );
    }
}
