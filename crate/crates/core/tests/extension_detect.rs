//! Coefficient-extension equality on random capped complexes, and the
//! detection bound against a test-local brute-force enumerator.

use novcap_core::capped::{CappedChain, CappedComplex};
use novcap_core::complex::{Chain, FilteredComplex, Generator};
use novcap_core::exponent::{Exponent, Level};
use novcap_core::novikov::NovikovScalar;
use novcap_core::spectral::{detection_bound, extension_distance_check, DetectError, DetectionFunctional};
use novcap_core::synth;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_capped_chain(
    rng: &mut impl Rng,
    complex: &CappedComplex,
    degree: i64,
    period: i64,
) -> CappedChain {
    let mut chain = CappedChain::zero();
    for orbit in complex.orbits() {
        if complex.degree(&orbit.label, 0).unwrap() != degree {
            continue;
        }
        if rng.gen_bool(0.6) {
            let m = if period == 0 { 0 } else { rng.gen_range(-1..=1) };
            chain.toggle(orbit.label.clone(), m);
        }
    }
    chain
}

#[test]
fn extension_preserves_the_distance_on_random_capped_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let window = Exponent::from_int(12);
    for period in [0i64, 1] {
        let mut checked = 0;
        while checked < 15 {
            let (complex, degree) = synth::random_capped_instance(&mut rng, 4, period);
            let zeta = random_capped_chain(&mut rng, &complex, degree, period);
            if zeta.is_zero() {
                continue;
            }
            let report = extension_distance_check(&complex, degree, &zeta, &window)
                .expect("desk-scale instances certify");
            assert!(
                report.equal,
                "period {period}: left {} != right {} for {zeta}",
                report.left, report.right
            );
            checked += 1;
        }
    }
}

#[test]
fn extension_rejects_mixed_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    let (complex, degree) = synth::random_capped_instance(&mut rng, 4, 0);
    // find one orbit of each layer degree
    let top = complex
        .orbits()
        .iter()
        .find(|o| complex.degree(&o.label, 0).unwrap() == degree)
        .unwrap();
    let bottom = complex
        .orbits()
        .iter()
        .find(|o| complex.degree(&o.label, 0).unwrap() == degree - 1)
        .unwrap();
    let mixed = CappedChain::term(top.label.clone(), 0)
        .add(&CappedChain::term(bottom.label.clone(), 0));
    assert!(extension_distance_check(&complex, degree, &mixed, &Exponent::from_int(8)).is_err());
}

/// A detection scenario: a pair s -> t (possibly with a two-term
/// coefficient), an isolated low cycle z carrying the functional, and a
/// spare cycle.
fn detection_instance(rng: &mut impl Rng) -> (FilteredComplex, Chain, DetectionFunctional) {
    let z_level = Exponent::ratio(rng.gen_range(0..=8), 4);
    let s_level = Exponent::ratio(rng.gen_range(8..=16), 4);
    let t_level = Exponent::ratio(rng.gen_range(0..=8), 4);
    let p1 = Exponent::ratio(rng.gen_range(1..=8), 4);
    let p2 = &p1 + &Exponent::ratio(rng.gen_range(1..=4), 4);
    let complex = FilteredComplex::new(
        vec![
            Generator {
                label: "s".into(),
                level: s_level,
                degree: 1,
            },
            Generator {
                label: "t".into(),
                level: t_level.clone(),
                degree: 0,
            },
            Generator {
                label: "z".into(),
                level: z_level.clone(),
                degree: 0,
            },
            Generator {
                label: "w".into(),
                level: Exponent::ratio(rng.gen_range(0..=16), 4),
                degree: 2,
            },
        ],
        vec![(
            "s".into(),
            Chain::from_coefficients([(
                "t".to_string(),
                NovikovScalar::from_exponents([p1, p2]),
            )]),
        )],
    )
    .unwrap();
    let functional = DetectionFunctional::new(
        Exponent::from_int(100),
        [("z".to_string(), Exponent::zero())],
    );
    (complex, Chain::generator("z"), functional)
}

/// Brute-force route: enumerate every representative over the lattice,
/// keep those below the level bound, check each is detected, and return
/// the minimum level among the support terms they hit.
fn brute_force_min_detected_level(
    complex: &FilteredComplex,
    zeta: &Chain,
    functional: &DetectionFunctional,
    bound_level: &Exponent,
    lattice: &novcap_core::exponent::ExponentLattice,
) -> Exponent {
    let universe: Vec<(String, Exponent)> = complex
        .generators()
        .iter()
        .filter(|g| complex.differential_of(&g.label).is_some())
        .flat_map(|g| lattice.points().into_iter().map(move |a| (g.label.clone(), a)))
        .collect();
    assert!(universe.len() <= 16, "test universe stays enumerable");
    let mut best: Option<Exponent> = None;
    for mask in 0u32..(1 << universe.len()) {
        let mut mu = Chain::zero();
        for (bit, (label, a)) in universe.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                mu.add_scaled_generator(label, &NovikovScalar::monomial(a.clone()));
            }
        }
        let rep = zeta.add(&complex.boundary(&mu).unwrap());
        if complex.level(&rep).unwrap() >= Level::Finite(bound_level.clone()) {
            continue;
        }
        let mut hits: Vec<Exponent> = Vec::new();
        for (label, coeff) in rep.iter() {
            for e in coeff.terms() {
                if functional.support.contains(&(label.clone(), e.clone())) {
                    hits.push(&complex.generator(label).unwrap().level - e);
                }
            }
        }
        assert!(!hits.is_empty(), "undetected representative {rep}");
        let low = hits.into_iter().min().unwrap();
        best = Some(match best {
            None => low,
            Some(b) => b.min(low),
        });
    }
    best.expect("zeta itself is a representative")
}

#[test]
fn detection_bound_matches_brute_force_on_planted_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for _ in 0..25 {
        let (complex, zeta, functional) = detection_instance(&mut rng);
        let eplus = Exponent::from_int(5);
        let margin = Exponent::one();
        let result = detection_bound(&complex, &zeta, &functional, &eplus, &margin, None)
            .expect("planted hypotheses hold");
        let brute = brute_force_min_detected_level(
            &complex,
            &zeta,
            &functional,
            &(&eplus + &margin),
            &result.lattice,
        );
        assert_eq!(result.bound, brute);
    }
}

#[test]
fn detection_hypothesis_failures_name_the_hypothesis() {
    let mut rng = ChaCha8Rng::seed_from_u64(58);
    let (complex, zeta, functional) = detection_instance(&mut rng);

    // e(zeta) = 0
    let zero_e = DetectionFunctional::new(Exponent::from_int(100), []);
    match detection_bound(&complex, &zeta, &zero_e, &Exponent::from_int(5), &Exponent::one(), None)
        .unwrap_err()
    {
        DetectError::Hypothesis { which, .. } => assert!(which.contains("e(zeta)")),
        other => panic!("unexpected {other}"),
    }

    // threshold below depth + eplus + 2 margin
    let thin = DetectionFunctional::new(Exponent::ratio(1, 4), functional.support.clone());
    match detection_bound(&complex, &zeta, &thin, &Exponent::from_int(5), &Exponent::one(), None)
        .unwrap_err()
    {
        DetectError::Hypothesis { which, .. } => assert!(which.contains("threshold")),
        other => panic!("unexpected {other}"),
    }

    // zeta too high for the window
    match detection_bound(
        &complex,
        &zeta,
        &functional,
        &Exponent::from_int(-50),
        &Exponent::one(),
        None,
    )
    .unwrap_err()
    {
        DetectError::Hypothesis { which, .. } => assert!(which.contains("l(zeta)")),
        other => panic!("unexpected {other}"),
    }

    // functional supported on a boundary target violates the chain law
    let bad = DetectionFunctional::new(
        Exponent::from_int(100),
        [("t".to_string(), Exponent::ratio(1, 4))],
    );
    match detection_bound(
        &complex,
        &Chain::generator("z"),
        &bad,
        &Exponent::from_int(5),
        &Exponent::one(),
        None,
    )
    .unwrap_err()
    {
        DetectError::Hypothesis { which, .. } => assert!(which.contains("chain functional")),
        other => panic!("unexpected {other}"),
    }
}
