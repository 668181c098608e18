//! The torus-stabilized deformation: a base system crossed with a torus
//! `R/Z × R/2aZ`, perturbed by `k cos(π y / a)`.
//!
//! For `k` above a certified threshold, the only contractible orbits sit
//! over `y ∈ {0, a}`, where the profile `ρ` is identically 1, so the
//! action spectrum is independent of the deformation parameter. The
//! threshold comes from bounding `|ρ'(y)| h_sup` against
//! `(π/a) k |sin(π y / a)|` with exact rational arithmetic: on `[0, π]`
//! the sine is concave, so the chord bound
//! `|sin(π y / a)| >= 2 d(y) / a` holds with `d(y)` the distance from `y`
//! to the nearest multiple of `a`, and `π` itself is replaced by rational
//! bounds on the safe side of each inequality.

use serde::{Deserialize, Serialize};

use super::pl::PiecewiseLinear;
use super::ModelError;
use crate::capped::CappedGenerator;
use crate::exponent::Exponent;

/// Rational bounds `π_low < π < π_up`.
fn pi_low() -> Exponent {
    Exponent::ratio(314_159, 100_000)
}

fn pi_up() -> Exponent {
    Exponent::ratio(355, 113)
}

/// The deformation data. The deformation parameter is called `t_def`; it
/// scales the non-constant part of the profile and never mixes with the
/// Novikov variable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusDeformation {
    /// Orbits of the base system, with their capping data.
    pub orbits: Vec<CappedGenerator>,
    /// Torus half-period: the second factor is `R/2aZ`.
    pub a: Exponent,
    /// Profile `ρ` on `[0, 2a]`, equal to 1 near `y = 0` and `y = a`.
    pub rho: PiecewiseLinear,
    /// Bound on the magnitude of the base Hamiltonian.
    pub h_sup: Exponent,
    /// Strength of the cosine stabilizer.
    pub k: Exponent,
}

impl TorusDeformation {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.a.is_positive() {
            return Err(ModelError::InvalidDeformation("a must be positive".into()));
        }
        if self.h_sup.is_negative() {
            return Err(ModelError::InvalidDeformation(
                "h_sup must be nonnegative".into(),
            ));
        }
        let two_a = &self.a + &self.a;
        let (lo, hi) = self.rho.domain();
        if !lo.is_zero() || *hi != two_a {
            return Err(ModelError::InvalidDeformation(format!(
                "profile domain must be [0, 2a] = [0, {two_a}], got [{lo}, {hi}]"
            )));
        }
        let first = &self.rho.breakpoints.first().unwrap().1;
        let last = &self.rho.breakpoints.last().unwrap().1;
        if first != last {
            return Err(ModelError::InvalidDeformation(
                "profile must be periodic: value at 0 differs from value at 2a".into(),
            ));
        }
        // flat value-1 pieces must contain open neighborhoods of 0 and a
        self.check_flat_one_around_zero()?;
        self.check_flat_one_around_a()?;
        // and no sloped piece may touch {0, a, 2a}
        for piece in self.rho.pieces() {
            if piece.slope.is_zero() {
                continue;
            }
            for y in [&piece.x0, &piece.x1] {
                if y.is_zero() || *y == self.a || *y == two_a {
                    return Err(ModelError::InvalidDeformation(format!(
                        "a sloped piece touches y = {y}"
                    )));
                }
            }
            if piece.x0 < self.a && self.a < piece.x1 {
                return Err(ModelError::InvalidDeformation(
                    "a sloped piece crosses y = a".into(),
                ));
            }
        }
        Ok(())
    }

    fn check_flat_one_around_zero(&self) -> Result<(), ModelError> {
        let one = Exponent::one();
        let first = self.rho.pieces().next().unwrap();
        let last = self.rho.pieces().last().unwrap();
        let ok = first.slope.is_zero()
            && first.y0 == one
            && last.slope.is_zero()
            && last.y0 == one;
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidDeformation(
                "profile must be identically 1 on neighborhoods of y = 0 (mod 2a)".into(),
            ))
        }
    }

    fn check_flat_one_around_a(&self) -> Result<(), ModelError> {
        let one = Exponent::one();
        for piece in self.rho.pieces() {
            if piece.x0 < self.a && self.a < piece.x1 {
                if piece.slope.is_zero() && piece.y0 == one {
                    return Ok(());
                }
                return Err(ModelError::InvalidDeformation(
                    "the piece containing y = a must be flat with value 1".into(),
                ));
            }
            if piece.x1 == self.a || piece.x0 == self.a {
                // a lies on a breakpoint: both sides must be flat at 1
                continue;
            }
        }
        // a is a breakpoint: check the two adjacent pieces
        let mut left_ok = false;
        let mut right_ok = false;
        for piece in self.rho.pieces() {
            if piece.x1 == self.a {
                left_ok = piece.slope.is_zero() && piece.y0 == one;
            }
            if piece.x0 == self.a {
                right_ok = piece.slope.is_zero() && piece.y0 == one;
            }
        }
        if left_ok && right_ok {
            Ok(())
        } else {
            Err(ModelError::InvalidDeformation(
                "profile must be identically 1 on a neighborhood of y = a".into(),
            ))
        }
    }

    /// Distance of `y` to the nearest of `{0, a, 2a}`.
    fn wall_distance(&self, y: &Exponent) -> Exponent {
        let two_a = &self.a + &self.a;
        y.abs()
            .min((y - &self.a).abs())
            .min((y - &two_a).abs())
    }
}

/// Certified threshold `k*`: for all `k > k*`, the `y`-derivative
/// `t ρ'(y) H - (π/a) k sin(π y / a)` vanishes only at `y ∈ {0, a}`.
///
/// Per sloped piece the bound is `|ρ'| h_sup a² / (2 π_low d_min)` with
/// `d_min` the smaller endpoint distance to `{0, a, 2a}`; flat pieces
/// need nothing. The result is a safe upper bound for the true threshold,
/// not its infimum.
pub fn k_threshold(td: &TorusDeformation) -> Result<Exponent, ModelError> {
    td.validate()?;
    let mut k_star = Exponent::zero();
    let two = Exponent::from_int(2);
    for piece in td.rho.pieces() {
        if piece.slope.is_zero() {
            continue;
        }
        let d_min = td.wall_distance(&piece.x0).min(td.wall_distance(&piece.x1));
        debug_assert!(d_min.is_positive(), "validated pieces avoid the walls");
        let numerator = &(&piece.slope.abs() * &td.h_sup) * &(&td.a * &td.a);
        let denominator = &(&two * &pi_low()) * &d_min;
        k_star = k_star.max(&numerator / &denominator);
    }
    Ok(k_star)
}

/// The action spectrum of the deformed system: every base orbit appears
/// once over `y = 0` with action shifted by `+k` (where `cos = 1`) and
/// once over `y = a` with `-k` (where `cos = -1`). Orbit actions use the
/// base capping. The result is independent of `t_def`, which is accepted
/// only to make that checkable.
pub fn deformed_spectrum(
    td: &TorusDeformation,
    t_def: &Exponent,
) -> Result<Vec<Exponent>, ModelError> {
    td.validate()?;
    if t_def.is_negative() || *t_def > Exponent::one() {
        return Err(ModelError::InvalidDeformation(format!(
            "t_def = {t_def} outside [0, 1]"
        )));
    }
    let k_star = k_threshold(td)?;
    if td.k <= k_star {
        return Err(ModelError::ThresholdNotMet {
            k: td.k.clone(),
            k_star,
        });
    }
    let mut spectrum = Vec::with_capacity(2 * td.orbits.len());
    for orbit in &td.orbits {
        let action = orbit.action(0);
        spectrum.push(&action + &td.k);
        spectrum.push(&action - &td.k);
    }
    spectrum.sort();
    Ok(spectrum)
}

/// Searches a grid for a certified spurious zero at strength `k`: a point
/// `y` away from `{0, a}` where the sine term provably cannot dominate,
/// so the derivative can vanish there. Uses the upper bound
/// `|sin(π y / a)| <= min(1, π_up d(y) / a)`.
pub fn spurious_zero_search(
    td: &TorusDeformation,
    k: &Exponent,
    grid: usize,
) -> Result<Option<Exponent>, ModelError> {
    td.validate()?;
    let grid = grid.max(2) as i64;
    for piece in td.rho.pieces() {
        if piece.slope.is_zero() {
            continue;
        }
        let width = &piece.x1 - &piece.x0;
        for i in 1..grid {
            let y = &piece.x0 + &(&width * &Exponent::ratio(i, grid));
            let d = td.wall_distance(&y);
            let sin_up = Exponent::one().min(&(&pi_up() * &d) / &td.a);
            // (π/a) k |sin| <= (π_up/a) k sin_up; spurious zero certified
            // when this cannot exceed |ρ'| h_sup
            let lhs = &(&(&pi_up() / &td.a) * k) * &sin_up;
            let rhs = &piece.slope.abs() * &td.h_sup;
            if lhs <= rhs {
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

/// Certifies by subdivided chord bounds that no spurious zero exists at
/// strength `k`: on every sloped subinterval,
/// `(π_low/a) k (2 d_min / a) > |ρ'| h_sup`.
pub fn no_spurious_zero_certified(
    td: &TorusDeformation,
    k: &Exponent,
    grid: usize,
) -> Result<bool, ModelError> {
    td.validate()?;
    let grid = grid.max(1) as i64;
    let two = Exponent::from_int(2);
    for piece in td.rho.pieces() {
        if piece.slope.is_zero() {
            continue;
        }
        let width = &piece.x1 - &piece.x0;
        for i in 0..grid {
            let u0 = &piece.x0 + &(&width * &Exponent::ratio(i, grid));
            let u1 = &piece.x0 + &(&width * &Exponent::ratio(i + 1, grid));
            let d_min = td.wall_distance(&u0).min(td.wall_distance(&u1));
            let sin_low = &(&two * &d_min) / &td.a;
            let lhs = &(&(&pi_low() / &td.a) * k) * &sin_low;
            let rhs = &piece.slope.abs() * &td.h_sup;
            if lhs <= rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(label: &str, h: i64) -> CappedGenerator {
        CappedGenerator {
            label: label.into(),
            h_integral: Exponent::from_int(h),
            cz: 1,
            kappa0: 0,
            chern_step: 0,
            area_base: Exponent::zero(),
            period: Exponent::zero(),
            half_dim: 2,
        }
    }

    fn flat_profile(a: i64) -> PiecewiseLinear {
        PiecewiseLinear::new(vec![
            (Exponent::zero(), Exponent::one()),
            (Exponent::from_int(2 * a), Exponent::one()),
        ])
        .unwrap()
    }

    /// ρ dips from 1 to 0 between the flats around 0 and a.
    fn dip_profile(a: i64) -> PiecewiseLinear {
        let a = Exponent::from_int(a);
        let q = |n: i64, d: i64| &a * &Exponent::ratio(n, d);
        PiecewiseLinear::new(vec![
            (Exponent::zero(), Exponent::one()),
            (q(1, 4), Exponent::one()),
            (q(3, 8), Exponent::zero()),
            (q(5, 8), Exponent::zero()),
            (q(3, 4), Exponent::one()),
            (q(5, 4), Exponent::one()),
            (q(11, 8), Exponent::zero()),
            (q(13, 8), Exponent::zero()),
            (q(7, 4), Exponent::one()),
            (q(2, 1), Exponent::one()),
        ])
        .unwrap()
    }

    fn deformation(k: i64) -> TorusDeformation {
        TorusDeformation {
            orbits: vec![orbit("g", 0)],
            a: Exponent::one(),
            rho: dip_profile(1),
            h_sup: Exponent::one(),
            k: Exponent::from_int(k),
        }
    }

    #[test]
    fn flat_profile_has_zero_threshold() {
        let td = TorusDeformation {
            orbits: vec![orbit("g", 0)],
            a: Exponent::one(),
            rho: flat_profile(1),
            h_sup: Exponent::from_int(5),
            k: Exponent::one(),
        };
        assert_eq!(k_threshold(&td).unwrap(), Exponent::zero());
    }

    #[test]
    fn threshold_is_linear_in_h_sup() {
        let mut td = deformation(10);
        let base = k_threshold(&td).unwrap();
        td.h_sup = Exponent::from_int(2);
        assert_eq!(k_threshold(&td).unwrap(), &base * &Exponent::from_int(2));
    }

    #[test]
    fn spectrum_is_cosine_offsets() {
        let td = TorusDeformation {
            orbits: vec![orbit("g", 0)],
            a: Exponent::one(),
            rho: flat_profile(1),
            h_sup: Exponent::one(),
            k: Exponent::from_int(5),
        };
        let spectrum = deformed_spectrum(&td, &Exponent::zero()).unwrap();
        assert_eq!(spectrum, vec![Exponent::from_int(-5), Exponent::from_int(5)]);
    }

    #[test]
    fn below_threshold_is_rejected_with_the_threshold() {
        let mut td = deformation(10);
        let k_star = k_threshold(&td).unwrap();
        td.k = Exponent::zero();
        match deformed_spectrum(&td, &Exponent::zero()) {
            Err(ModelError::ThresholdNotMet { k_star: reported, .. }) => {
                assert_eq!(reported, k_star)
            }
            other => panic!("expected threshold error, got {other:?}"),
        }
    }

    #[test]
    fn grid_oracle_agrees_with_the_threshold() {
        let td = deformation(10);
        let k_star = k_threshold(&td).unwrap();
        // above the certified threshold: no spurious zero, certified
        let above = &k_star + &Exponent::one();
        let mut safe = td.clone();
        safe.k = above.clone();
        assert!(no_spurious_zero_certified(&safe, &above, 32).unwrap());
        assert!(spurious_zero_search(&safe, &above, 32).unwrap().is_none());
        // for tiny k the grid search certifies a spurious zero
        let tiny = Exponent::ratio(1, 100);
        assert!(spurious_zero_search(&td, &tiny, 32).unwrap().is_some());
    }

    #[test]
    fn sloped_piece_touching_a_wall_is_invalid() {
        let bad = TorusDeformation {
            orbits: vec![],
            a: Exponent::one(),
            rho: PiecewiseLinear::new(vec![
                (Exponent::zero(), Exponent::one()),
                (Exponent::one(), Exponent::zero()),
                (Exponent::from_int(2), Exponent::one()),
            ])
            .unwrap(),
            h_sup: Exponent::one(),
            k: Exponent::one(),
        };
        assert!(matches!(
            k_threshold(&bad),
            Err(ModelError::InvalidDeformation(_))
        ));
    }
}
