//! Contact-type bump profiles and their exact action spectra.
//!
//! A profile is a piecewise-linear bump `f` supported on `[r₋, r₊]` around
//! the unit level, with `max f = A`. Orbits wrap Reeb trajectories when
//! the slope equals a period, contributing the action `f(r) - r f'(r)`;
//! flat pieces carry constant orbits with action `f`. The slope condition
//! confines period slopes to the bands `f <= δ` and `f >= A - δ`, which
//! forces every positive action above
//! `min(A, r₋ T_min, A - δ + r₋ T_min)`.

use serde::{Deserialize, Serialize};

use super::pl::PiecewiseLinear;
use super::ModelError;
use crate::exponent::Exponent;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContactProfile {
    /// Breakpoints of the bump, from `(r₋, 0)` to `(r₊, 0)`.
    pub breakpoints: Vec<(Exponent, Exponent)>,
    /// Height `A` of the bump.
    pub amplitude: Exponent,
    /// Band width `δ` of the slope condition.
    pub delta: Exponent,
    /// Inner and outer support radii, with `r₋ < 1 < r₊`.
    pub r_minus: Exponent,
    pub r_plus: Exponent,
    /// Reeb periods, strictly increasing and positive, with a cutoff.
    pub periods: Vec<Exponent>,
}

impl ContactProfile {
    pub fn profile(&self) -> Result<PiecewiseLinear, ModelError> {
        PiecewiseLinear::new(self.breakpoints.clone()).map_err(ModelError::InvalidProfile)
    }

    pub fn min_period(&self) -> &Exponent {
        &self.periods[0]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let f = self.profile()?;
        let err = |msg: String| Err(ModelError::InvalidProfile(msg));
        if !(self.r_minus < Exponent::one() && Exponent::one() < self.r_plus) {
            return err(format!(
                "support radii must straddle 1: got [{}, {}]",
                self.r_minus, self.r_plus
            ));
        }
        let (lo, hi) = f.domain();
        if *lo != self.r_minus || *hi != self.r_plus {
            return err("breakpoints must span exactly [r_minus, r_plus]".into());
        }
        if !f.breakpoints.first().unwrap().1.is_zero() || !f.breakpoints.last().unwrap().1.is_zero()
        {
            return err("the bump must vanish at the support boundary".into());
        }
        if f.min_value().is_negative() {
            return err("the bump must be nonnegative".into());
        }
        if f.max_value() != self.amplitude {
            return err(format!(
                "max f = {} must equal the amplitude {}",
                f.max_value(),
                self.amplitude
            ));
        }
        if !self.delta.is_positive() {
            return err("delta must be positive".into());
        }
        if self.periods.is_empty() {
            return err("at least one Reeb period is required".into());
        }
        for w in self.periods.windows(2) {
            if w[0] >= w[1] {
                return err("periods must strictly increase".into());
            }
        }
        if !self.periods[0].is_positive() {
            return err("periods must be positive".into());
        }
        // slope condition: period slopes only in the low and high bands
        let low_band = &self.delta;
        let high_band = &(&self.amplitude - &self.delta);
        for (i, piece) in f.pieces().enumerate() {
            if !self.is_period_slope(&piece.slope) {
                continue;
            }
            let (min_f, max_f) = piece.value_range();
            if !(max_f <= *low_band || min_f >= *high_band) {
                return err(format!(
                    "piece {i} has period slope {} at heights [{min_f}, {max_f}] outside the bands",
                    piece.slope
                ));
            }
        }
        Ok(())
    }

    fn is_period_slope(&self, slope: &Exponent) -> bool {
        let magnitude = slope.abs();
        !slope.is_zero() && self.periods.contains(&magnitude)
    }
}

/// Where a spectrum element came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumProvenance {
    OutsideSupport,
    FlatPiece { piece: usize },
    PeriodPiece { piece: usize, period: Exponent },
}

/// A closed interval `[lo, hi]` of actions (a point when `lo = hi`),
/// tagged with its originating piece and period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumElement {
    pub lo: Exponent,
    pub hi: Exponent,
    pub provenance: SpectrumProvenance,
}

impl SpectrumElement {
    fn point(value: Exponent, provenance: SpectrumProvenance) -> Self {
        SpectrumElement {
            lo: value.clone(),
            hi: value,
            provenance,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// The exact action spectrum: the constant-orbit point 0 outside the
/// support, one point per flat piece, and one interval per period-slope
/// piece from the affine action `f(r) - r f'(r)` evaluated at the piece
/// endpoints.
pub fn contact_spectrum(p: &ContactProfile) -> Result<Vec<SpectrumElement>, ModelError> {
    p.validate()?;
    let f = p.profile()?;
    let mut out = vec![SpectrumElement::point(
        Exponent::zero(),
        SpectrumProvenance::OutsideSupport,
    )];
    for (i, piece) in f.pieces().enumerate() {
        if piece.slope.is_zero() {
            out.push(SpectrumElement::point(
                piece.y0.clone(),
                SpectrumProvenance::FlatPiece { piece: i },
            ));
            continue;
        }
        if p.is_period_slope(&piece.slope) {
            let action_at = |r: &Exponent, fr: &Exponent| fr - &(r * &piece.slope);
            let a0 = action_at(&piece.x0, &piece.y0);
            let a1 = action_at(&piece.x1, &piece.y1);
            let (lo, hi) = if a0 <= a1 { (a0, a1) } else { (a1, a0) };
            out.push(SpectrumElement {
                lo,
                hi,
                provenance: SpectrumProvenance::PeriodPiece {
                    piece: i,
                    period: piece.slope.abs(),
                },
            });
        }
    }
    Ok(out)
}

/// Verdict of the positive spectral gap check.
#[derive(Clone, Debug, Serialize)]
pub struct GapVerdict {
    pub pass: bool,
    /// Least positive spectrum value, when one exists.
    pub gap: Option<Exponent>,
    /// Element violating the gap, on failure.
    pub violating: Option<SpectrumElement>,
}

/// Certifies that the spectrum misses `(0, A)`: every positive element is
/// at least the amplitude. An interval straddling 0 from below fails
/// immediately (its positive part reaches arbitrarily small actions).
pub fn spectrum_gap(p: &ContactProfile) -> Result<GapVerdict, ModelError> {
    let spectrum = contact_spectrum(p)?;
    let mut gap: Option<Exponent> = None;
    for element in &spectrum {
        if element.hi.is_positive() && !element.lo.is_positive() && !element.hi.is_zero() {
            if element.is_point() && element.lo.is_zero() {
                continue;
            }
            if !element.is_point() {
                return Ok(GapVerdict {
                    pass: false,
                    gap: Some(Exponent::zero()),
                    violating: Some(element.clone()),
                });
            }
        }
        if element.lo.is_positive() {
            gap = Some(match gap {
                None => element.lo.clone(),
                Some(g) => g.min(element.lo.clone()),
            });
        }
    }
    match gap {
        Some(g) if g < p.amplitude => {
            let violating = spectrum
                .iter()
                .find(|e| e.lo.is_positive() && e.lo == g)
                .cloned();
            Ok(GapVerdict {
                pass: false,
                gap: Some(g),
                violating,
            })
        }
        other => Ok(GapVerdict {
            pass: true,
            gap: other,
            violating: None,
        }),
    }
}

/// Builds a standard bump: period-slope climbs inside the low and high
/// bands, a steep non-period middle, and a flat top, mirrored on the way
/// down. Fails when the gap hypothesis `r₋ T_min >= A` or the width
/// budget cannot be met.
pub fn bump_profile(
    periods: Vec<Exponent>,
    amplitude: Exponent,
    delta: Exponent,
    r_minus: Exponent,
    r_plus: Exponent,
) -> Result<ContactProfile, ModelError> {
    if periods.is_empty() || !periods[0].is_positive() {
        return Err(ModelError::Infeasible("need positive periods".into()));
    }
    let t_min = periods[0].clone();
    let t_climb = periods.last().unwrap().clone();
    if &r_minus * &t_min < amplitude {
        return Err(ModelError::Infeasible(format!(
            "slope condition cannot be met: r_minus * T_min = {} < amplitude {amplitude}",
            &r_minus * &t_min
        )));
    }
    if &r_minus * &t_min < delta {
        return Err(ModelError::Infeasible(
            "slope condition cannot be met: r_minus * T_min below delta".into(),
        ));
    }
    let two = Exponent::from_int(2);
    if amplitude <= &two * &delta {
        return Err(ModelError::Infeasible(
            "amplitude must exceed twice delta".into(),
        ));
    }
    let width = &r_plus - &r_minus;
    if !width.is_positive() {
        return Err(ModelError::Infeasible("empty support".into()));
    }
    // band climbs at the steepest period slope, high enough to exercise
    // the bands but never wider than a quarter of a side
    let mut plateau = &width / &Exponent::from_int(5);
    let side = &(&width - &plateau) / &two;
    let h = (&delta / &two).min(&(&t_climb * &side) / &Exponent::from_int(4));
    if !h.is_positive() {
        return Err(ModelError::Infeasible(
            "band climbs do not fit in the support width".into(),
        ));
    }
    let w_band = &h / &t_climb;
    let mut w_mid = &side - &(&two * &w_band);
    // the middle slope must avoid every period; nudge the plateau if not
    let mid_height = &amplitude - &(&two * &h);
    for _ in 0..200 {
        let sigma = &mid_height / &w_mid;
        if !periods.contains(&sigma) {
            break;
        }
        plateau = &plateau * &Exponent::ratio(99, 100);
        let side = &(&width - &plateau) / &two;
        w_mid = &side - &(&two * &w_band);
    }
    let sigma = &mid_height / &w_mid;
    if periods.contains(&sigma) {
        return Err(ModelError::Infeasible(
            "could not avoid a period slope in the middle".into(),
        ));
    }

    let x0 = r_minus.clone();
    let x1 = &x0 + &w_band;
    let x2 = &x1 + &w_mid;
    let x3 = &x2 + &w_band;
    let x4 = &r_plus - &(&(&two * &w_band) + &w_mid);
    let x5 = &r_plus - &(&w_band + &w_mid);
    let x6 = &r_plus - &w_band;
    let zero = Exponent::zero();
    let breakpoints = vec![
        (x0, zero.clone()),
        (x1, h.clone()),
        (x2, &amplitude - &h),
        (x3.clone(), amplitude.clone()),
        (x4, amplitude.clone()),
        (x5, &amplitude - &h),
        (x6, h.clone()),
        (r_plus.clone(), zero),
    ];
    let profile = ContactProfile {
        breakpoints,
        amplitude,
        delta,
        r_minus,
        r_plus,
        periods,
    };
    profile.validate()?;
    Ok(profile)
}

/// Scales heights and periods by `c > 0`, for the scaling property.
pub fn scaled_profile(p: &ContactProfile, c: &Exponent) -> ContactProfile {
    assert!(c.is_positive());
    ContactProfile {
        breakpoints: p
            .breakpoints
            .iter()
            .map(|(r, f)| (r.clone(), f * c))
            .collect(),
        amplitude: &p.amplitude * c,
        delta: &p.delta * c,
        r_minus: p.r_minus.clone(),
        r_plus: p.r_plus.clone(),
        periods: p.periods.iter().map(|t| t * c).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acceptance_profile() -> ContactProfile {
        // P = {1}, A = 9/10, δ = 1/100, support [99/100, 101/100]
        bump_profile(
            vec![Exponent::one()],
            Exponent::ratio(9, 10),
            Exponent::ratio(1, 100),
            Exponent::ratio(99, 100),
            Exponent::ratio(101, 100),
        )
        .unwrap()
    }

    #[test]
    fn flat_top_and_outside_points() {
        let p = acceptance_profile();
        let spectrum = contact_spectrum(&p).unwrap();
        let points: Vec<_> = spectrum
            .iter()
            .filter(|e| {
                matches!(
                    e.provenance,
                    SpectrumProvenance::OutsideSupport | SpectrumProvenance::FlatPiece { .. }
                )
            })
            .map(|e| e.lo.clone())
            .collect();
        assert_eq!(points, vec![Exponent::zero(), Exponent::ratio(9, 10)]);
    }

    #[test]
    fn positive_elements_obey_the_three_way_minimum() {
        let p = acceptance_profile();
        let spectrum = contact_spectrum(&p).unwrap();
        // min(A, r₋ T_min, A - δ + r₋ T_min) = A = 9/10
        let floor = Exponent::ratio(9, 10);
        for e in &spectrum {
            assert!(
                !e.hi.is_positive() || e.lo >= floor,
                "element [{}, {}] violates the gap",
                e.lo,
                e.hi
            );
        }
    }

    #[test]
    fn gap_passes_at_the_amplitude() {
        let p = acceptance_profile();
        let verdict = spectrum_gap(&p).unwrap();
        assert!(verdict.pass);
        assert_eq!(verdict.gap, Some(Exponent::ratio(9, 10)));
    }

    #[test]
    fn period_slope_at_mid_height_is_invalid_before_the_gap_check() {
        // a hand-built bump whose middle piece has slope exactly 1 (the
        // period) at heights around A/2
        let e = |n: i64, d: i64| Exponent::ratio(n, d);
        let p = ContactProfile {
            breakpoints: vec![
                (e(99, 100), e(0, 1)),
                (e(995, 1000), e(45, 100)),
                (e(1005, 1000), e(46, 100)),
                (e(1007, 1000), e(9, 10)),
                (e(101, 100), e(0, 1)),
            ],
            amplitude: e(9, 10),
            delta: e(1, 100),
            r_minus: e(99, 100),
            r_plus: e(101, 100),
            periods: vec![e(1, 1)],
        };
        let err = spectrum_gap(&p).unwrap_err();
        assert!(matches!(err, ModelError::InvalidProfile(_)), "{err}");
    }

    #[test]
    fn amplitude_above_the_minimal_period_is_infeasible() {
        let result = bump_profile(
            vec![Exponent::one()],
            Exponent::ratio(11, 10),
            Exponent::ratio(1, 100),
            Exponent::ratio(99, 100),
            Exponent::ratio(101, 100),
        );
        assert!(matches!(result, Err(ModelError::Infeasible(_))));
    }

    #[test]
    fn spectrum_scales_with_the_profile() {
        let p = acceptance_profile();
        let c = Exponent::ratio(3, 2);
        let scaled = scaled_profile(&p, &c);
        let base = contact_spectrum(&p).unwrap();
        let big = contact_spectrum(&scaled).unwrap();
        assert_eq!(base.len(), big.len());
        for (a, b) in base.iter().zip(&big) {
            assert_eq!(&a.lo * &c, b.lo);
            assert_eq!(&a.hi * &c, b.hi);
        }
    }
}
