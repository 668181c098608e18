//! Piecewise-linear profiles with exact rational breakpoints.

use serde::{Deserialize, Serialize};

use crate::exponent::Exponent;

/// A continuous piecewise-linear function given by its breakpoints,
/// strictly increasing in the first coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub breakpoints: Vec<(Exponent, Exponent)>,
}

/// One maximal linear piece.
#[derive(Clone, Debug)]
pub struct Piece {
    pub x0: Exponent,
    pub y0: Exponent,
    pub x1: Exponent,
    pub y1: Exponent,
    pub slope: Exponent,
}

impl Piece {
    pub fn value_range(&self) -> (Exponent, Exponent) {
        if self.y0 <= self.y1 {
            (self.y0.clone(), self.y1.clone())
        } else {
            (self.y1.clone(), self.y0.clone())
        }
    }
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<(Exponent, Exponent)>) -> Result<Self, String> {
        if breakpoints.len() < 2 {
            return Err("need at least two breakpoints".into());
        }
        for w in breakpoints.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(format!(
                    "breakpoints must strictly increase: {} then {}",
                    w[0].0, w[1].0
                ));
            }
        }
        Ok(PiecewiseLinear { breakpoints })
    }

    pub fn domain(&self) -> (&Exponent, &Exponent) {
        (
            &self.breakpoints.first().unwrap().0,
            &self.breakpoints.last().unwrap().0,
        )
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.breakpoints.windows(2).map(|w| {
            let (x0, y0) = w[0].clone();
            let (x1, y1) = w[1].clone();
            let slope = &(&y1 - &y0) / &(&x1 - &x0);
            Piece {
                x0,
                y0,
                x1,
                y1,
                slope,
            }
        })
    }

    /// Exact value at `x`, which must lie inside the domain.
    pub fn value_at(&self, x: &Exponent) -> Option<Exponent> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        for piece in self.pieces() {
            if *x >= piece.x0 && *x <= piece.x1 {
                return Some(&piece.y0 + &(&piece.slope * &(x - &piece.x0)));
            }
        }
        None
    }

    pub fn max_value(&self) -> Exponent {
        self.breakpoints
            .iter()
            .map(|(_, y)| y.clone())
            .max()
            .expect("nonempty")
    }

    pub fn min_value(&self) -> Exponent {
        self.breakpoints
            .iter()
            .map(|(_, y)| y.clone())
            .min()
            .expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_pieces() {
        let f = PiecewiseLinear::new(vec![
            (Exponent::zero(), Exponent::zero()),
            (Exponent::one(), Exponent::from_int(2)),
            (Exponent::from_int(3), Exponent::from_int(2)),
        ])
        .unwrap();
        assert_eq!(
            f.value_at(&Exponent::ratio(1, 2)).unwrap(),
            Exponent::one()
        );
        assert_eq!(f.value_at(&Exponent::from_int(2)).unwrap(), Exponent::from_int(2));
        let slopes: Vec<_> = f.pieces().map(|p| p.slope).collect();
        assert_eq!(slopes, vec![Exponent::from_int(2), Exponent::zero()]);
    }

    #[test]
    fn rejects_non_monotone_breakpoints() {
        assert!(PiecewiseLinear::new(vec![
            (Exponent::one(), Exponent::zero()),
            (Exponent::one(), Exponent::one()),
        ])
        .is_err());
    }
}
