//! Max-min bounds for toric sets under the standard moment map.

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::exponent::Exponent;

/// A finite set of moment values with positive coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToricWindow {
    pub points: Vec<Vec<Exponent>>,
}

impl ToricWindow {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.points.is_empty() {
            return Err(ModelError::InvalidProfile("no moment values given".into()));
        }
        let dim = self.points[0].len();
        for (i, p) in self.points.iter().enumerate() {
            if p.is_empty() || p.len() != dim {
                return Err(ModelError::InvalidProfile(format!(
                    "point {i} has dimension {} instead of {dim}",
                    p.len()
                )));
            }
            for c in p {
                if !c.is_positive() {
                    return Err(ModelError::InvalidProfile(format!(
                        "point {i} has a nonpositive coordinate {c}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Disk-area lower bound for a single toric fiber: the smallest
/// coordinate.
pub fn fiber_hbar_lower(point: &[Exponent]) -> Result<Exponent, ModelError> {
    if point.is_empty() {
        return Err(ModelError::InvalidProfile("empty moment value".into()));
    }
    for c in point {
        if !c.is_positive() {
            return Err(ModelError::InvalidProfile(format!(
                "nonpositive coordinate {c}"
            )));
        }
    }
    Ok(point.iter().cloned().min().expect("nonempty"))
}

/// Capacity lower bound for the toric set: the largest fiber bound over
/// the window.
pub fn toric_bound(window: &ToricWindow) -> Result<Exponent, ModelError> {
    window.validate()?;
    window
        .points
        .iter()
        .map(|p| fiber_hbar_lower(p))
        .try_fold(None::<Exponent>, |best, next| {
            let next = next?;
            Ok(Some(match best {
                None => next,
                Some(b) => b.max(next),
            }))
        })
        .map(|best| best.expect("validated nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(coords: &[(i64, i64)]) -> Vec<Exponent> {
        coords.iter().map(|&(n, d)| Exponent::ratio(n, d)).collect()
    }

    #[test]
    fn fiber_bound_is_the_min_coordinate() {
        assert_eq!(
            fiber_hbar_lower(&point(&[(1, 3), (1, 2)])).unwrap(),
            Exponent::ratio(1, 3)
        );
    }

    #[test]
    fn window_bound_is_the_max_min() {
        let w = ToricWindow {
            points: vec![point(&[(1, 3), (1, 2)]), point(&[(2, 5), (2, 5)])],
        };
        assert_eq!(toric_bound(&w).unwrap(), Exponent::ratio(2, 5));
    }

    #[test]
    fn permuting_coordinates_changes_nothing() {
        let a = fiber_hbar_lower(&point(&[(1, 3), (1, 2), (7, 4)])).unwrap();
        let b = fiber_hbar_lower(&point(&[(7, 4), (1, 2), (1, 3)])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nonpositive_coordinates_are_rejected() {
        assert!(fiber_hbar_lower(&point(&[(0, 1), (1, 2)])).is_err());
    }
}
