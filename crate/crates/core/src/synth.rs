//! Seeded random instances for oracle comparisons and stress suites.
//!
//! Two families:
//!
//! - *Planted*: a normal-form complex (`d S_i = t^{p_i} T_i`, isolated
//!   cycles elsewhere) conjugated by a random filtered isometry
//!   `g = 1 + N` with `N` strictly triangular, degree-preserving, and
//!   strictly level-decreasing. Conjugation by an isometry preserves bar
//!   lengths, homology rank, and spectral invariants, so the instance
//!   ships with its own ground truth.
//! - *Two-layer*: random strictly filtered differentials from a top layer
//!   to a bottom layer of cycles; `d² = 0` holds structurally and the
//!   truth is left to the oracles.
//!
//! All data lives on the lattice `(1/4)Z ∩ [0, 4]`.

use rand::Rng;

use crate::capped::{CappedChain, CappedComplex, CappedGenerator};
use crate::complex::{Chain, FilteredComplex, Generator};
use crate::exponent::Exponent;
use crate::novikov::NovikovScalar;

fn lattice_value(rng: &mut impl Rng, lo_quarters: i64, hi_quarters: i64) -> Exponent {
    Exponent::ratio(rng.gen_range(lo_quarters..=hi_quarters), 4)
}

/// Random scalar with term exponents in `(1/4)Z ∩ [0, 4]`.
pub fn random_scalar(rng: &mut impl Rng, max_terms: usize) -> NovikovScalar {
    let count = rng.gen_range(1..=max_terms.max(1));
    NovikovScalar::from_exponents((0..count).map(|_| lattice_value(rng, 0, 16)))
}

/// A planted instance with its exact invariants.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub complex: FilteredComplex,
    /// Finite bar lengths, sorted ascending.
    pub bar_lengths: Vec<Exponent>,
    pub infinite_count: usize,
    /// Cycles with their exact spectral invariants.
    pub cycles: Vec<(Chain, Exponent)>,
}

/// Builds a conjugated normal form with `size` generators (at least 2).
pub fn planted_instance(rng: &mut impl Rng, size: usize) -> PlantedInstance {
    let size = size.max(2);
    'retry: loop {
        let pair_count = rng.gen_range(1..=(size / 2));
        let cycle_count = size - 2 * pair_count;

        let mut generators = Vec::new();
        let mut diff_exponents: Vec<Exponent> = Vec::new();
        let mut bar_lengths = Vec::new();
        // pairs: s_i in degree k_i, t_i below it
        for i in 0..pair_count {
            let degree = rng.gen_range(1..=3);
            let s_level = lattice_value(rng, 4, 16);
            let t_level = lattice_value(rng, 0, 16);
            // strictness: t_level - p < s_level
            let min_p_quarters = {
                let gap = &t_level - &s_level;
                let q = gap.rational() * num_rational::BigRational::from_integer(4.into());
                use num_traits::ToPrimitive;
                let f = q.floor().to_integer().to_i64().unwrap();
                (f + 1).max(0)
            };
            if min_p_quarters > 8 {
                continue 'retry;
            }
            let p = Exponent::ratio(rng.gen_range(min_p_quarters..=8), 4);
            bar_lengths.push(&(&s_level - &t_level) + &p);
            diff_exponents.push(p);
            generators.push(Generator {
                label: format!("s{i}"),
                level: s_level,
                degree,
            });
            generators.push(Generator {
                label: format!("t{i}"),
                level: t_level,
                degree: degree - 1,
            });
        }
        for i in 0..cycle_count {
            generators.push(Generator {
                label: format!("z{i}"),
                level: lattice_value(rng, 0, 16),
                degree: rng.gen_range(0..=3),
            });
        }

        let n = generators.len();
        // strictly triangular, degree-preserving, level-decreasing N
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut nil = vec![vec![NovikovScalar::zero(); n]; n];
        for col in 0..n {
            for row in 0..n {
                if order[row] >= order[col]
                    || generators[row].degree != generators[col].degree
                    || !rng.gen_bool(0.35)
                {
                    continue;
                }
                // level(t^c row) < level(col)
                let gap = &generators[row].level - &generators[col].level;
                let min_c_quarters = {
                    let q = gap.rational() * num_rational::BigRational::from_integer(4.into());
                    use num_traits::ToPrimitive;
                    let f = q.floor().to_integer().to_i64().unwrap();
                    (f + 1).max(0)
                };
                if min_c_quarters > 6 {
                    continue;
                }
                let c = Exponent::ratio(rng.gen_range(min_c_quarters..=6), 4);
                nil[row][col] = NovikovScalar::monomial(c);
            }
        }

        // g = 1 + N, g^{-1} = 1 + N + N^2 + ... (nilpotent, exact)
        let identity = |n: usize| -> Vec<Vec<NovikovScalar>> {
            let mut m = vec![vec![NovikovScalar::zero(); n]; n];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = NovikovScalar::one();
            }
            m
        };
        let mat_mul = |a: &Vec<Vec<NovikovScalar>>, b: &Vec<Vec<NovikovScalar>>| {
            let mut out = vec![vec![NovikovScalar::zero(); n]; n];
            for i in 0..n {
                for k in 0..n {
                    if a[i][k].is_exact_zero() {
                        continue;
                    }
                    for (j, cell) in b[k].iter().enumerate() {
                        if !cell.is_exact_zero() {
                            out[i][j] = out[i][j].add(&a[i][k].mul(cell));
                        }
                    }
                }
            }
            out
        };
        let mat_add = |a: &Vec<Vec<NovikovScalar>>, b: &Vec<Vec<NovikovScalar>>| {
            let mut out = a.clone();
            for i in 0..n {
                for j in 0..n {
                    out[i][j] = out[i][j].add(&b[i][j]);
                }
            }
            out
        };

        let mut g = identity(n);
        g = mat_add(&g, &nil);
        let mut g_inv = identity(n);
        let mut power = nil.clone();
        loop {
            let zero = power
                .iter()
                .all(|row| row.iter().all(|c| c.is_exact_zero()));
            if zero {
                break;
            }
            g_inv = mat_add(&g_inv, &power);
            power = mat_mul(&power, &nil);
        }

        // normal-form differential matrix
        let index_of = |label: &str| generators.iter().position(|g| g.label == label).unwrap();
        let mut d0 = vec![vec![NovikovScalar::zero(); n]; n];
        for i in 0..pair_count {
            let s = index_of(&format!("s{i}"));
            let t = index_of(&format!("t{i}"));
            d0[t][s] = NovikovScalar::monomial(diff_exponents[i].clone());
        }

        let d1 = mat_mul(&g, &mat_mul(&d0, &g_inv));

        // keep the data inside the acceptance window [0, 4]
        let four = Exponent::from_int(4);
        for row in &d1 {
            for cell in row {
                for e in cell.terms() {
                    if e.is_negative() || *e > four {
                        continue 'retry;
                    }
                }
            }
        }

        let mut differential = Vec::new();
        for col in 0..n {
            let mut chain = Chain::zero();
            for (row, cell) in d1.iter().map(|r| &r[col]).enumerate() {
                if !cell.is_exact_zero() {
                    chain.add_scaled_generator(&generators[row].label, cell);
                }
            }
            if !chain.is_exact_zero() {
                differential.push((generators[col].label.clone(), chain));
            }
        }
        let complex = FilteredComplex::new(generators.clone(), differential)
            .expect("planted labels are unique");
        if !complex.validate().is_valid() {
            continue 'retry;
        }

        // planted cycles: images g(z_i) with invariant level(z_i)
        let mut cycles = Vec::new();
        for i in 0..cycle_count {
            let z = index_of(&format!("z{i}"));
            let mut chain = Chain::zero();
            for (row, grow) in g.iter().enumerate() {
                if !grow[z].is_exact_zero() {
                    chain.add_scaled_generator(&generators[row].label, &grow[z]);
                }
            }
            cycles.push((chain, generators[z].level.clone()));
        }

        bar_lengths.sort();
        return PlantedInstance {
            complex,
            bar_lengths,
            infinite_count: cycle_count,
            cycles,
        };
    }
}

/// Random two-layer complex: a top layer mapping into a bottom layer of
/// cycles, with multi-term coefficients; `d² = 0` structurally.
pub fn two_layer_instance(rng: &mut impl Rng, size: usize) -> FilteredComplex {
    let size = size.max(2);
    let top = rng.gen_range(1..size);
    let bottom = size - top;
    let degree = rng.gen_range(1..=3);
    let mut generators = Vec::new();
    for i in 0..top {
        generators.push(Generator {
            label: format!("a{i}"),
            level: lattice_value(rng, 4, 16),
            degree,
        });
    }
    for i in 0..bottom {
        generators.push(Generator {
            label: format!("b{i}"),
            level: lattice_value(rng, 0, 12),
            degree: degree - 1,
        });
    }
    let mut differential = Vec::new();
    for i in 0..top {
        let source_level = generators[i].level.clone();
        let mut chain = Chain::zero();
        for j in 0..bottom {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let target_level = generators[top + j].level.clone();
            // every term must satisfy target - p < source
            let min_p_quarters = {
                let gap = &target_level - &source_level;
                let q = gap.rational() * num_rational::BigRational::from_integer(4.into());
                use num_traits::ToPrimitive;
                (q.floor().to_integer().to_i64().unwrap() + 1).max(0)
            };
            if min_p_quarters > 16 {
                continue;
            }
            let terms = rng.gen_range(1..=2);
            let scalar = NovikovScalar::from_exponents(
                (0..terms).map(|_| Exponent::ratio(rng.gen_range(min_p_quarters..=16), 4)),
            );
            if !scalar.is_exact_zero() {
                chain.add_scaled_generator(&format!("b{j}"), &scalar);
            }
        }
        if !chain.is_exact_zero() {
            differential.push((format!("a{i}"), chain));
        }
    }
    let complex = FilteredComplex::new(generators, differential).expect("unique labels");
    debug_assert!(complex.validate().is_valid());
    complex
}

/// Random chain supported on the given complex with lattice exponents.
pub fn random_chain(rng: &mut impl Rng, complex: &FilteredComplex, max_terms: usize) -> Chain {
    let n = complex.generators().len();
    let mut chain = Chain::zero();
    for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
        let g = &complex.generators()[rng.gen_range(0..n)];
        chain.add_scaled_generator(&g.label, &NovikovScalar::monomial(lattice_value(rng, 0, 16)));
    }
    chain
}

/// Random two-layer capped complex with the given global period (0 or 1)
/// and at most `orbits` orbits. Chern steps vanish, so degrees are
/// recapping-invariant and the coefficient-extension view is fully graded.
pub fn random_capped_instance(
    rng: &mut impl Rng,
    orbits: usize,
    period: i64,
) -> (CappedComplex, i64) {
    let orbits = orbits.max(2);
    let top = rng.gen_range(1..orbits);
    let bottom = orbits - top;
    let degree = rng.gen_range(1..=2);
    let half_dim = 2;
    let make = |label: String, deg: i64, rng: &mut dyn rand::RngCore| CappedGenerator {
        label,
        h_integral: Exponent::ratio(rng.gen_range(0..=16), 4),
        cz: half_dim - deg,
        kappa0: 0,
        chern_step: 0,
        area_base: Exponent::ratio(rng.gen_range(0..=4), 4),
        period: Exponent::from_int(period),
        half_dim,
    };
    let mut orbits_vec = Vec::new();
    for i in 0..top {
        orbits_vec.push(make(format!("a{i}"), degree, rng));
    }
    for i in 0..bottom {
        orbits_vec.push(make(format!("b{i}"), degree - 1, rng));
    }
    let mut differential = Vec::new();
    for i in 0..top {
        let source_action = orbits_vec[i].action(0);
        let mut chain = CappedChain::zero();
        for j in 0..bottom {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let target = &orbits_vec[top + j];
            if period == 0 {
                // unique capping: need action(target) < action(source)
                if target.action(0) < source_action {
                    chain.toggle(target.label.clone(), 0);
                }
            } else {
                // action(m) = h - area - m decreases in m: pick m past the
                // strictness threshold
                let gap = &(&target.h_integral - &target.area_base) - &source_action;
                use num_traits::ToPrimitive;
                let min_m = gap.rational().floor().to_integer().to_i64().unwrap() + 1;
                for m in min_m..=(min_m + 1) {
                    if rng.gen_bool(0.7) {
                        chain.toggle(target.label.clone(), m);
                    }
                }
            }
        }
        if !chain.is_zero() {
            differential.push((format!("a{i}"), chain));
        }
    }
    let complex = CappedComplex::new(orbits_vec, differential).expect("uniform lattice");
    (complex, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_instances_validate_and_stay_on_the_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let inst = planted_instance(&mut rng, 6);
            assert!(inst.complex.validate().is_valid());
            assert_eq!(
                inst.complex.generators().len(),
                2 * inst.bar_lengths.len() + inst.infinite_count
            );
            for (cycle, _) in &inst.cycles {
                assert!(inst.complex.boundary(cycle).unwrap().is_exact_zero());
            }
        }
    }

    #[test]
    fn two_layer_instances_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let c = two_layer_instance(&mut rng, 6);
            assert!(c.validate().is_valid());
        }
    }

    #[test]
    fn capped_instances_have_valid_views() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for period in [0, 1] {
            for _ in 0..10 {
                let (c, _) = random_capped_instance(&mut rng, 4, period);
                assert!(c.lambda_view().unwrap().validate().is_valid());
            }
        }
    }
}
