//! Brute-force oracles over a truncated exponent lattice.
//!
//! A filtered complex over the Novikov field, restricted to exponents on a
//! lattice `step * Z`, is an ordinary mod-2 filtered complex with one cell
//! `(γ, e)` per generator and lattice exponent, filtration value
//! `level(γ) - e`, and the boundary read off the differential. The field
//! action is the lattice shift, so every field-level bar appears once per
//! shift; restricting births to a single central cell `[x0, x0 + step)`
//! picks each bar exactly once, and truncation artifacts stay near the
//! lattice edges, far from the central band.
//!
//! These routines share no code with the singular value decomposition:
//! they are plain left-to-right column reduction and mod-2 solvability
//! checks, and serve as the independent route in every equivalence test.
//! The truncation radius is doubled until the central answer stabilizes
//! across two consecutive rounds.

use std::collections::BTreeMap;

use crate::complex::{Chain, FilteredComplex};
use crate::exponent::{Exponent, Level};

/// Central-cell barcode extracted from the lattice model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBarcode {
    /// Finite bar lengths, sorted ascending.
    pub finite_lengths: Vec<Exponent>,
    /// Number of infinite bars (free homology rank).
    pub infinite_count: usize,
}

impl LatticeBarcode {
    pub fn boundary_depth(&self) -> Exponent {
        self.finite_lengths
            .last()
            .cloned()
            .unwrap_or_else(Exponent::zero)
    }
}

struct LatticeModel {
    /// Cells sorted by (filtration, generator, exponent); id = rank.
    filtration: Vec<Exponent>,
    generator: Vec<usize>,
    exponent: Vec<Exponent>,
    /// Boundary of each cell, as sorted cell ids; `None` when a boundary
    /// term fell outside the lattice window (edge-corrupted column).
    columns: Vec<Option<Vec<u32>>>,
}

fn build_model(complex: &FilteredComplex, step: &Exponent, radius: &Exponent) -> LatticeModel {
    let band = (
        match complex.level_span() {
            Some((lo, _)) => &lo - radius,
            None => -radius,
        },
        match complex.level_span() {
            Some((_, hi)) => &hi + radius,
            None => radius.clone(),
        },
    );
    build_model_band(complex, step, &band.0, &band.1, true)
}

/// Cells with filtration inside `[f_lo, f_hi]`. With `strict_columns`, a
/// column with any boundary term outside the band is dropped entirely
/// (edge corruption for the barcode); otherwise out-of-band terms are
/// silently omitted, which is sound for solvability questions that only
/// look above `f_lo`.
fn build_model_band(
    complex: &FilteredComplex,
    step: &Exponent,
    f_lo: &Exponent,
    f_hi: &Exponent,
    strict_columns: bool,
) -> LatticeModel {
    let n = complex.generators().len();
    // enumerate cells (gen, e) sorted by (filt, gen, e)
    let mut cells: Vec<(Exponent, usize, Exponent)> = Vec::new();
    for j in 0..n {
        let level = &complex.generators()[j].level;
        // filt = level - e in [f_lo, f_hi]
        let mut e = (level - f_hi).floor_to_step(step);
        if &e < &(level - f_hi) {
            e = &e + step;
        }
        while &e <= &(level - f_lo) {
            let filt = level - &e;
            cells.push((filt, j, e.clone()));
            e = &e + step;
        }
    }
    cells.sort_by(|a, b| (&a.0, a.1, &a.2).cmp(&(&b.0, b.1, &b.2)));
    let mut index: BTreeMap<(usize, Exponent), u32> = BTreeMap::new();
    for (id, (_, j, e)) in cells.iter().enumerate() {
        index.insert((*j, e.clone()), id as u32);
    }
    let mut columns = Vec::with_capacity(cells.len());
    for (_, j, e) in &cells {
        let image = complex.differential_of(&complex.generators()[*j].label);
        let mut col: Vec<u32> = Vec::new();
        let mut corrupted = false;
        if let Some(image) = image {
            'outer: for (to, coeff) in image.iter() {
                let i = complex.generator_index(to).expect("validated label");
                for p in coeff.terms() {
                    match index.get(&(i, e + p)) {
                        Some(&id) => col.push(id),
                        None if strict_columns => {
                            corrupted = true;
                            break 'outer;
                        }
                        None => {}
                    }
                }
            }
        }
        if corrupted {
            columns.push(None);
        } else {
            col.sort_unstable();
            columns.push(Some(col));
        }
    }
    LatticeModel {
        filtration: cells.iter().map(|c| c.0.clone()).collect(),
        generator: cells.iter().map(|c| c.1).collect(),
        exponent: cells.iter().map(|c| c.2.clone()).collect(),
        columns,
    }
}

fn xor_columns(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

struct Reduction {
    /// pivot row -> owning column
    owner: BTreeMap<u32, u32>,
    /// reduced columns
    reduced: Vec<Option<Vec<u32>>>,
}

fn reduce(model: &LatticeModel) -> Reduction {
    let mut owner: BTreeMap<u32, u32> = BTreeMap::new();
    let mut reduced: Vec<Option<Vec<u32>>> = model.columns.clone();
    for id in 0..reduced.len() {
        loop {
            let low = match &reduced[id] {
                None => break,
                Some(col) => match col.last() {
                    None => break,
                    Some(&low) => low,
                },
            };
            match owner.get(&low) {
                None => {
                    owner.insert(low, id as u32);
                    break;
                }
                Some(&prior) => {
                    let prior_col = reduced[prior as usize]
                        .clone()
                        .expect("owners have live columns");
                    let col = reduced[id].as_ref().expect("live column");
                    reduced[id] = Some(xor_columns(col, &prior_col));
                }
            }
        }
    }
    Reduction { owner, reduced }
}

/// Central-cell barcode at the given truncation radius.
fn barcode_at(complex: &FilteredComplex, step: &Exponent, radius: &Exponent) -> LatticeBarcode {
    let model = build_model(complex, step, radius);
    let reduction = reduce(&model);

    // central band: births in [0, step)
    let in_band = |f: &Exponent| -> bool { !f.is_negative() && f < step };

    let mut finite_lengths: Vec<Exponent> = Vec::new();
    for (&low, &col) in &reduction.owner {
        let birth = &model.filtration[low as usize];
        if !in_band(birth) {
            continue;
        }
        let death = &model.filtration[col as usize];
        finite_lengths.push(death - birth);
    }
    finite_lengths.sort();

    // unpaired cells with zero reduced column and birth in the band are
    // the infinite bars; edge-corrupted columns never have births there
    let mut infinite_count = 0usize;
    for id in 0..model.columns.len() {
        let birth = &model.filtration[id];
        if !in_band(birth) {
            continue;
        }
        let is_cycle = matches!(&reduction.reduced[id], Some(col) if col.is_empty());
        let is_paired_row = reduction.owner.contains_key(&(id as u32));
        if is_cycle && !is_paired_row {
            infinite_count += 1;
        }
    }

    LatticeBarcode {
        finite_lengths,
        infinite_count,
    }
}

fn data_profile(complex: &FilteredComplex) -> (Exponent, Exponent) {
    // (level span, largest differential exponent magnitude)
    let span = match complex.level_span() {
        Some((lo, hi)) => &hi - &lo,
        None => Exponent::zero(),
    };
    let mut p = Exponent::zero();
    for g in complex.generators() {
        if let Some(d) = complex.differential_of(&g.label) {
            for (_, coeff) in d.iter() {
                for e in coeff.terms() {
                    p = p.max(e.abs());
                }
            }
        }
        p = p.max(g.level.abs());
    }
    (span, p)
}

/// Barcode of the complex by lattice reduction, doubling the truncation
/// radius until two consecutive rounds agree.
pub fn lattice_barcode(complex: &FilteredComplex, step: &Exponent) -> LatticeBarcode {
    let (span, p) = data_profile(complex);
    let n = complex.generators().len() as i64;
    let mut radius = &(&(&span + &p) + &Exponent::one()) * &Exponent::from_int(2 * n.max(1));
    let mut last = barcode_at(complex, step, &radius);
    for _ in 0..3 {
        radius = &radius * &Exponent::from_int(2);
        let next = barcode_at(complex, step, &radius);
        if next == last {
            return next;
        }
        last = next;
    }
    panic!("lattice barcode did not stabilize; data may be off-lattice");
}

/// Boundary depth by lattice reduction.
pub fn lattice_boundary_depth(complex: &FilteredComplex, step: &Exponent) -> Exponent {
    lattice_barcode(complex, step).boundary_depth()
}

/// Distance from a chain to the exact subspace by lattice solvability:
/// the smallest candidate level `t >= floor` such that every term of the
/// chain above `t` is cancellable by boundaries, searched monotonically.
/// Distances below `floor` are reported as exact (`-inf`), mirroring the
/// certification floor of the decomposition route. For a cycle the result
/// is the spectral invariant of its class.
pub fn lattice_distance_to_exact(
    complex: &FilteredComplex,
    chain: &Chain,
    step: &Exponent,
    floor: &Exponent,
) -> Level {
    let (span, p) = data_profile(complex);
    let mut chain_top = floor.clone();
    for (label, coeff) in chain.iter() {
        let level = &complex.generator(label).expect("known label").level;
        for e in coeff.terms() {
            chain_top = chain_top.max(level - e);
        }
    }
    let n = complex.generators().len() as i64;
    let mut pad =
        &(&(&span + &p) + &Exponent::one()) * &Exponent::from_int(2 * n.max(1));
    let mut last = distance_at(complex, chain, step, floor, &chain_top, &pad);
    for _ in 0..3 {
        pad = &pad * &Exponent::from_int(2);
        let next = distance_at(complex, chain, step, floor, &chain_top, &pad);
        if next == last {
            return next;
        }
        last = next;
    }
    panic!("lattice distance did not stabilize; data may be off-lattice");
}

fn distance_at(
    complex: &FilteredComplex,
    chain: &Chain,
    step: &Exponent,
    floor: &Exponent,
    chain_top: &Exponent,
    pad: &Exponent,
) -> Level {
    let f_lo = &(floor - step);
    let f_hi = &(chain_top + pad);
    let model = build_model_band(complex, step, f_lo, f_hi, false);
    let n_cells = model.columns.len();

    // right-hand side: the chain in cell coordinates
    let mut index: BTreeMap<(usize, Exponent), u32> = BTreeMap::new();
    for id in 0..n_cells {
        index.insert((model.generator[id], model.exponent[id].clone()), id as u32);
    }
    let mut rhs: Vec<u32> = Vec::new();
    for (label, coeff) in chain.iter() {
        let j = complex.generator_index(label).expect("known label");
        for e in coeff.terms() {
            let id = *index
                .get(&(j, e.clone()))
                .expect("chain exponent on the lattice within the radius");
            rhs.push(id);
        }
    }
    rhs.sort_unstable();

    if rhs.is_empty() {
        return Level::NegInf;
    }

    // candidate levels at or above the floor, ascending and deduplicated
    let mut candidates: Vec<Exponent> = model
        .filtration
        .iter()
        .filter(|f| *f >= floor)
        .cloned()
        .collect();
    candidates.sort();
    candidates.dedup();

    // solvable(t): can all rhs terms with filtration > t be cancelled by
    // boundary columns, working only above t? Monotone in t, so binary
    // search for the smallest solvable candidate.
    let solvable_where = |keep: &dyn Fn(u32) -> bool| -> bool {
        let project = |col: &[u32]| -> Vec<u32> { col.iter().copied().filter(|&c| keep(c)).collect() };
        let mut echelon: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        let insert = |mut col: Vec<u32>, echelon: &mut BTreeMap<u32, Vec<u32>>| -> bool {
            loop {
                let low = match col.last() {
                    None => return true,
                    Some(&l) => l,
                };
                match echelon.get(&low) {
                    Some(other) => col = xor_columns(&col, other),
                    None => {
                        echelon.insert(low, col);
                        return false;
                    }
                }
            }
        };
        for col in model.columns.iter().flatten() {
            let projected = project(col);
            if !projected.is_empty() {
                insert(projected, &mut echelon);
            }
        }
        insert(project(&rhs), &mut echelon)
    };

    // cancellable down to the floor: exact to within the floor
    if solvable_where(&|id| model.filtration[id as usize] >= *floor) {
        return Level::NegInf;
    }
    let solvable_above = |t: &Exponent| -> bool {
        solvable_where(&|id| model.filtration[id as usize] > *t)
    };
    let mut lo = 0usize;
    let mut hi = candidates.len();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if solvable_above(&candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if lo >= candidates.len() {
        // nothing above the largest candidate, so the level is the top
        return Level::Finite(candidates.last().expect("nonempty").clone());
    }
    Level::Finite(candidates[lo].clone())
}
