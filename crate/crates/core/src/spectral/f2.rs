//! Tiny mod-2 linear algebra over bit rows, with composition memory: each
//! echelon row remembers which inserted members sum to it, so dependent
//! rows can be expressed as explicit member combinations.

#[derive(Clone, Default)]
pub struct Echelon {
    rows: Vec<(Vec<u64>, Vec<usize>)>,
}

pub fn indicator(n_words: usize, carrier: &[usize]) -> Vec<u64> {
    let mut row = vec![0u64; n_words];
    for &i in carrier {
        row[i / 64] |= 1 << (i % 64);
    }
    row
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    for (w, word) in row.iter().enumerate() {
        if *word != 0 {
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
    }
    None
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn toggle(set: &mut Vec<usize>, id: usize) {
    if let Some(pos) = set.iter().position(|&m| m == id) {
        set.remove(pos);
    } else {
        set.push(id);
    }
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts the row tagged `id`; returns true when it was independent.
    pub fn insert(&mut self, mut row: Vec<u64>, id: usize) -> bool {
        let mut members = vec![id];
        loop {
            let lead = match leading_bit(&row) {
                None => return false,
                Some(l) => l,
            };
            match self.rows.iter().find(|(r, _)| leading_bit(r) == Some(lead)) {
                Some((r, ids)) => {
                    let (r, ids) = (r.clone(), ids.clone());
                    xor_into(&mut row, &r);
                    for i in ids {
                        toggle(&mut members, i);
                    }
                }
                None => {
                    self.rows.push((row, members));
                    return true;
                }
            }
        }
    }

    /// Member ids whose original rows sum to `row`, if it lies in the span.
    pub fn solve(&self, mut row: Vec<u64>) -> Option<Vec<usize>> {
        let mut members = Vec::new();
        loop {
            let lead = match leading_bit(&row) {
                None => return Some(members),
                Some(l) => l,
            };
            let (r, ids) = self.rows.iter().find(|(r, _)| leading_bit(r) == Some(lead))?;
            xor_into(&mut row, r);
            for &i in ids {
                toggle(&mut members, i);
            }
        }
    }
}
