//! Equivalence of the singular value decomposition against the
//! lattice-reduction oracle and against planted ground truth.

use novcap_core::complex::FilteredComplex;
use novcap_core::exponent::{Exponent, Level};
use novcap_core::oracle;
use novcap_core::spectral::{default_window, distance_to_exact, spectral_invariant, svd_auto};
use novcap_core::synth;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn step() -> Exponent {
    Exponent::ratio(1, 4)
}

/// Window for the decomposition route and the matching clamp floor used by
/// both routes: distances below the floor count as exact.
fn window_and_floor(complex: &FilteredComplex) -> (Exponent, Exponent) {
    let window = default_window(complex);
    let lo = complex.level_span().expect("nonempty").0;
    let floor = &lo - &(&window * &Exponent::from_int(4));
    (window, floor)
}

#[test]
fn planted_truth_three_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..40 {
        let inst = synth::planted_instance(&mut rng, 3 + round % 4);
        let basis = svd_auto(&inst.complex).expect("planted instances certify");
        assert_eq!(
            basis.bar_lengths(),
            inst.bar_lengths,
            "svd bars disagree with planted bars in round {round}:\n{basis}"
        );
        assert_eq!(basis.cycles.len(), inst.infinite_count, "round {round}");

        let oracle_barcode = oracle::lattice_barcode(&inst.complex, &step());
        assert_eq!(
            oracle_barcode.finite_lengths, inst.bar_lengths,
            "oracle bars disagree with planted bars in round {round}"
        );
        assert_eq!(oracle_barcode.infinite_count, inst.infinite_count);

        let (_, floor) = window_and_floor(&inst.complex);
        for (cycle, level) in &inst.cycles {
            let via_svd = spectral_invariant(&inst.complex, cycle).expect("planted cycle");
            assert_eq!(via_svd, Level::Finite(level.clone()), "round {round}");
            let via_lattice =
                oracle::lattice_distance_to_exact(&inst.complex, cycle, &step(), &floor);
            assert_eq!(via_lattice, via_svd, "round {round}");
        }
    }
}

#[test]
fn random_two_layer_svd_matches_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for round in 0..60 {
        let complex = synth::two_layer_instance(&mut rng, 3 + round % 4);
        let basis = svd_auto(&complex).expect("two-layer instances certify");
        let oracle_barcode = oracle::lattice_barcode(&complex, &step());
        assert_eq!(
            basis.bar_lengths(),
            oracle_barcode.finite_lengths,
            "bars disagree in round {round}:\n{basis}"
        );
        assert_eq!(basis.cycles.len(), oracle_barcode.infinite_count);
        assert_eq!(basis.boundary_depth(), oracle_barcode.boundary_depth());

        // distance of a random chain, both routes, same clamp floor
        let (window, floor) = window_and_floor(&complex);
        let chain = synth::random_chain(&mut rng, &complex, 3);
        let via_svd = distance_to_exact(&complex, &chain, Some(&window)).expect("certified");
        let via_lattice = oracle::lattice_distance_to_exact(&complex, &chain, &step(), &floor);
        assert_eq!(via_svd, via_lattice, "round {round}: chain {chain}");
    }
}

#[test]
fn planted_cycle_combinations_keep_the_max_level() {
    // spectral invariant of a combination of planted classes is the max of
    // the shifted levels, by orthogonality
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    for _ in 0..20 {
        let inst = synth::planted_instance(&mut rng, 6);
        if inst.cycles.len() < 2 {
            continue;
        }
        let (c0, l0) = &inst.cycles[0];
        let (c1, l1) = &inst.cycles[1];
        let combo = c0.add(c1);
        let expected = Level::Finite(l0.clone().max(l1.clone()));
        assert_eq!(
            spectral_invariant(&inst.complex, &combo).expect("cycle"),
            expected
        );
    }
}
