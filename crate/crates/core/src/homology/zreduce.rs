//! Integral column echelon form of a streamed boundary matrix.
//!
//! Columns are reduced one at a time against stored columns keyed by their
//! lowest row. A non-unit clash is resolved with a unimodular gcd step, so
//! the stored columns always span the same lattice as the columns seen so
//! far. Once the stored rank reaches a known upper bound with every pivot a
//! unit, the lattice is saturated and no later column can change it.

use num_bigint::BigInt;
use num_traits::One;

use super::complex::ColumnSource;
use super::sparse::{normalize_column, SparseBuilder};
use super::sparse_snf::invariant_factors;
use crate::error::Result;

type Column = Vec<(u32, i64)>;

/// `x·u + y·w`, `None` on overflow.
fn combine(x: i64, u: &Column, y: i64, w: &Column) -> Option<Column> {
    let mut out = Vec::with_capacity(u.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < w.len() {
        let (r, v) = if j == w.len() || (i < u.len() && u[i].0 < w[j].0) {
            i += 1;
            (u[i - 1].0, x.checked_mul(u[i - 1].1)?)
        } else if i == u.len() || w[j].0 < u[i].0 {
            j += 1;
            (w[j - 1].0, y.checked_mul(w[j - 1].1)?)
        } else {
            i += 1;
            j += 1;
            (u[i - 1].0, x.checked_mul(u[i - 1].1)?.checked_add(y.checked_mul(w[j - 1].1)?)?)
        };
        if v != 0 {
            out.push((r, v));
        }
    }
    Some(out)
}

/// `(g, s, t)` with `g = gcd(a, b) = s·a + t·b`, `g > 0`.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

struct Echelon {
    slot_of_row: Vec<u32>,
    store: Vec<Column>,
    nonunit: usize,
}

impl Echelon {
    fn is_unit(c: &Column) -> bool {
        c.last().is_some_and(|e| e.1 == 1 || e.1 == -1)
    }

    /// `None` on overflow.
    fn push(&mut self, mut v: Column) -> Option<()> {
        loop {
            let Some(&(low, a)) = v.last() else {
                return Some(());
            };
            let slot = self.slot_of_row[low as usize];
            if slot == u32::MAX {
                self.slot_of_row[low as usize] = self.store.len() as u32;
                self.nonunit += !Echelon::is_unit(&v) as usize;
                self.store.push(v);
                return Some(());
            }
            let p = &self.store[slot as usize];
            let b = p.last().expect("stored columns are non-zero").1;
            if a % b == 0 {
                v = combine(1, &v, -(a / b), p)?;
            } else {
                let (g, s, t) = egcd(a, b);
                let pivot = combine(s, &v, t, p)?;
                v = combine(b / g, &v, -(a / g), p)?;
                self.nonunit -= !Echelon::is_unit(p) as usize;
                self.nonunit += !Echelon::is_unit(&pivot) as usize;
                self.store[slot as usize] = pivot;
            }
        }
    }
}

/// Non-zero invariant factors of `∂_d`. `saturated_rank`, when known to be
/// the rational rank of `∂_d`, lets the scan stop early. Falls back to
/// sparse Smith elimination of the whole matrix if an entry overflows.
pub fn boundary_invariant_factors<S: ColumnSource + ?Sized>(
    src: &S,
    d: usize,
    saturated_rank: Option<usize>,
) -> Result<Vec<BigInt>> {
    let rows = src.dim(d - 1);
    let mut e = Echelon {
        slot_of_row: vec![u32::MAX; rows],
        store: Vec::new(),
        nonunit: 0,
    };
    let mut col = Vec::new();
    for j in 0..src.dim(d) {
        if e.nonunit == 0 && saturated_rank == Some(e.store.len()) {
            break;
        }
        col.clear();
        src.boundary_into(d, j, &mut col);
        normalize_column(&mut col);
        if e.push(std::mem::take(&mut col)).is_none() {
            return invariant_factors(&src.boundary_matrix(d));
        }
    }
    if e.nonunit == 0 {
        return Ok(vec![BigInt::one(); e.store.len()]);
    }
    let mut b = SparseBuilder::new(rows);
    for mut c in e.store {
        b.push_column(&mut c);
    }
    invariant_factors(&b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::complex::ChainComplex;
    use crate::homology::sparse::SparseMatrix;
    use rand::{Rng, SeedableRng};

    #[test]
    fn gcd_steps() {
        for (a, b) in [(4, 6), (-4, 6), (6, -4), (7, 3), (-9, -6)] {
            let (g, s, t) = egcd(a, b);
            assert!(g > 0 && s * a + t * b == g && a % g == 0 && b % g == 0);
        }
    }

    #[test]
    fn agrees_with_sparse_snf() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..12));
            let data: Vec<i64> = (0..r * c)
                .map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-6..=6) })
                .collect();
            let m = SparseMatrix::from_dense(r, c, &data);
            let cx = ChainComplex::new(vec![r, c], vec![m.clone()], false).unwrap();
            let expected = invariant_factors(&m).unwrap();
            assert_eq!(boundary_invariant_factors(&cx, 1, None).unwrap(), expected, "{data:?}");
        }
    }
}
