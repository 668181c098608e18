//! Multiset stability of action spectra across a deformation parameter.

use serde::Serialize;

use crate::exponent::Exponent;

/// Outcome of comparing spectra along a parameter family. On failure the
/// witness names the first diverging parameter and the symmetric
/// difference against the first sample, as multisets.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub pass: bool,
    pub samples: usize,
    pub witness: Option<StabilityWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityWitness {
    pub parameter: Exponent,
    pub missing: Vec<Exponent>,
    pub extra: Vec<Exponent>,
}

/// Checks that all sampled spectra are identical as multisets. Requires at
/// least two samples.
pub fn stability_check(spectra: &[(Exponent, Vec<Exponent>)]) -> StabilityVerdict {
    assert!(spectra.len() >= 2, "stability check needs at least 2 samples");
    let mut reference = spectra[0].1.clone();
    reference.sort();
    for (parameter, sample) in &spectra[1..] {
        let mut sorted = sample.clone();
        sorted.sort();
        if sorted != reference {
            let (missing, extra) = multiset_difference(&reference, &sorted);
            return StabilityVerdict {
                pass: false,
                samples: spectra.len(),
                witness: Some(StabilityWitness {
                    parameter: parameter.clone(),
                    missing,
                    extra,
                }),
            };
        }
    }
    StabilityVerdict {
        pass: true,
        samples: spectra.len(),
        witness: None,
    }
}

fn multiset_difference(a: &[Exponent], b: &[Exponent]) -> (Vec<Exponent>, Vec<Exponent>) {
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            missing.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j] < a[i] {
            extra.push(b[j].clone());
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    (missing, extra)
}
