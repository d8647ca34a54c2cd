use serde::Serialize;

use super::{Elem, Matrix, Ring};
use crate::caps::Caps;
use crate::error::{Error, Result};

/// A free direct summand of `R^n` with free quotient, stored by its
/// canonical basis.
///
/// The canonical basis is the unit-pivot reduced echelon form: each row has a
/// pivot entry 1, pivot columns are zero in every other row, rows are ordered
/// by pivot column, and every entry left of a row's pivot is a non-unit.
/// Over a field this is the ordinary reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Summand {
    ambient: usize,
    basis: Matrix,
    #[serde(skip)]
    pivots: Vec<usize>,
}

/// Unit-pivot elimination. Returns the reduced pivot rows, their pivot
/// columns, and whether every non-pivot row reduced to zero.
fn reduce(ring: &Ring, gens: &Matrix) -> (Vec<Vec<Elem>>, Vec<usize>, bool) {
    let n = gens.cols();
    let mut rows: Vec<Vec<Elem>> = (0..gens.rows()).map(|i| gens.row(i).to_vec()).collect();
    let mut done = vec![false; rows.len()];
    let mut pivot_rows = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(r) = (0..rows.len()).find(|&r| !done[r] && ring.is_unit(rows[r][col])) else {
            continue;
        };
        done[r] = true;
        let s = ring.inv(rows[r][col]).expect("unit");
        for x in rows[r].iter_mut() {
            *x = ring.mul(s, *x);
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == Elem::ZERO {
                continue;
            }
            let f = row[col];
            for (x, &y) in row.iter_mut().zip(&prow) {
                *x = ring.sub(*x, ring.mul(f, y));
            }
        }
        pivot_rows.push(r);
        pivots.push(col);
    }
    let clean = rows
        .iter()
        .enumerate()
        .all(|(i, row)| done[i] || row.iter().all(|&x| x == Elem::ZERO));
    let basis = pivot_rows.iter().map(|&r| rows[r].clone()).collect();
    (basis, pivots, clean)
}

/// Canonical form of the row span of `gens`, or `None` when the span is not
/// a free direct summand with free quotient.
///
/// Over a local ring the span is such a summand exactly when unit-pivot
/// elimination leaves no non-zero remainder rows.
pub fn canonical_summand(ring: &Ring, gens: &Matrix) -> Option<Summand> {
    let (basis, pivots, clean) = reduce(ring, gens);
    clean.then(|| Summand {
        ambient: gens.cols(),
        basis: Matrix::from_rows(gens.cols(), &basis),
        pivots,
    })
}

/// Number of rank-`k` summands of `R^n`, computed from the canonical-form
/// parametrization (used for cap checks before enumerating).
pub fn summand_count(ring: &Ring, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let size = ring.size() as u128;
    let nonunits = ring.nonunit_count() as u128;
    let mut total = 0u128;
    for pivots in combinations(n, k) {
        let mut count = 1u128;
        for (i, &p) in pivots.iter().enumerate() {
            let left_free = p - i;
            let right_free = (n - p - 1) - (k - i - 1);
            count = count
                .saturating_mul(nonunits.saturating_pow(left_free as u32))
                .saturating_mul(size.saturating_pow(right_free as u32));
        }
        total = total.saturating_add(count);
    }
    total
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All rank-`k` free direct summands of `R^n`, enumerated directly in
/// canonical form (hence without duplicates), sorted by canonical basis.
pub fn enumerate_summands(ring: &Ring, n: usize, k: usize, caps: &Caps) -> Result<Vec<Summand>> {
    if k > n {
        return Err(Error::InvalidArgument(format!("rank {k} exceeds ambient rank {n}")));
    }
    let expected = summand_count(ring, n, k);
    if expected > caps.summands as u128 {
        return Err(Error::cap(
            format!("rank-{k} summands of {ring}^{n}"),
            expected.min(u64::MAX as u128) as u64,
            caps.summands,
        ));
    }
    let all: Vec<Elem> = ring.elements().collect();
    let nonunits: Vec<Elem> = all.iter().copied().filter(|&a| !ring.is_unit(a)).collect();
    let mut out = Vec::with_capacity(expected as usize);
    for pivots in combinations(n, k) {
        // free slots: (row, col, allowed values)
        let mut slots: Vec<(usize, usize, &[Elem])> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in 0..n {
                if pivots.contains(&c) {
                    continue;
                }
                slots.push((i, c, if c < p { &nonunits } else { &all }));
            }
        }
        let mut base = Matrix::zeros(k, n);
        for (i, &p) in pivots.iter().enumerate() {
            base[(i, p)] = ring.one();
        }
        let mut idx = vec![0usize; slots.len()];
        'odometer: loop {
            let mut m = base.clone();
            for (s, &(r, c, vals)) in slots.iter().enumerate() {
                m[(r, c)] = vals[idx[s]];
            }
            out.push(Summand {
                ambient: n,
                basis: m,
                pivots: pivots.clone(),
            });
            let mut s = slots.len();
            loop {
                if s == 0 {
                    break 'odometer;
                }
                s -= 1;
                idx[s] += 1;
                if idx[s] < slots[s].2.len() {
                    continue 'odometer;
                }
                idx[s] = 0;
            }
        }
    }
    out.sort();
    Ok(out)
}

impl Summand {
    /// The zero summand of `R^n`.
    pub fn zero(n: usize) -> Summand {
        Summand {
            ambient: n,
            basis: Matrix::zeros(0, n),
            pivots: Vec::new(),
        }
    }

    /// `R^k ⊆ R^n` spanned by the first `k` standard basis vectors.
    pub fn standard(ring: &Ring, n: usize, k: usize) -> Summand {
        let mut basis = Matrix::zeros(k, n);
        for i in 0..k {
            basis[(i, i)] = ring.one();
        }
        Summand {
            ambient: n,
            basis,
            pivots: (0..k).collect(),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Whether `v` lies in the summand.
    pub fn contains_vector(&self, ring: &Ring, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = w[p];
            if c == Elem::ZERO {
                continue;
            }
            for (x, &b) in w.iter_mut().zip(self.basis.row(i)) {
                *x = ring.sub(*x, ring.mul(c, b));
            }
        }
        w.iter().all(|&x| x == Elem::ZERO)
    }

    pub fn contains(&self, ring: &Ring, other: &Summand) -> bool {
        other.rank() <= self.rank()
            && (0..other.rank()).all(|i| self.contains_vector(ring, other.basis.row(i)))
    }

    /// Image under `g`, acting on row vectors by `v ↦ v gᵀ`.
    pub fn act(&self, ring: &Ring, g: &Matrix) -> Summand {
        let image = self.basis.mul(ring, &g.transpose());
        canonical_summand(ring, &image).expect("automorphisms preserve summands")
    }

    /// Image under an automorphism whose transpose is already available.
    pub fn act_transposed(&self, ring: &Ring, g_transposed: &Matrix) -> Summand {
        let image = self.basis.mul(ring, g_transposed);
        canonical_summand(ring, &image).expect("automorphisms preserve summands")
    }

    /// Extends the basis to an invertible `n×n` matrix by adding standard
    /// basis vectors at the non-pivot columns.
    pub fn complete_to_basis(&self, ring: &Ring) -> Matrix {
        let n = self.ambient;
        let mut rows: Vec<Vec<Elem>> = (0..self.rank()).map(|i| self.basis.row(i).to_vec()).collect();
        for c in 0..n {
            if !self.pivots.contains(&c) {
                let mut e = vec![Elem::ZERO; n];
                e[c] = ring.one();
                rows.push(e);
            }
        }
        Matrix::from_rows(n, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    /// Oracle: distinct row spans of all k-tuples of vectors whose span is a
    /// rank-k summand, compared as sets of vectors.
    fn brute_force_spans(r: &Ring, n: usize, k: usize) -> usize {
        let size = r.size() as usize;
        let vectors: Vec<Vec<Elem>> = (0..size.pow(n as u32))
            .map(|mut x| {
                let mut v = vec![Elem::ZERO; n];
                for c in v.iter_mut().rev() {
                    *c = Elem((x % size) as u32);
                    x /= size;
                }
                v
            })
            .collect();
        let mut spans: BTreeSet<BTreeSet<Vec<Elem>>> = BTreeSet::new();
        let mut tuple = vec![0usize; k];
        loop {
            let rows: Vec<Vec<Elem>> = tuple.iter().map(|&i| vectors[i].clone()).collect();
            let m = Matrix::from_rows(n, &rows);
            // a k-tuple is a basis of a summand iff it extends to an invertible matrix
            let extends = (0..vectors.len().pow((n - k) as u32)).any(|mut e| {
                let mut all = rows.clone();
                for _ in 0..n - k {
                    all.push(vectors[e % vectors.len()].clone());
                    e /= vectors.len();
                }
                Matrix::from_rows(n, &all).is_invertible(r)
            });
            if extends {
                // span as a set: all R-combinations
                let mut span = BTreeSet::new();
                for mut coeffs in 0..size.pow(k as u32) {
                    let mut v = vec![Elem::ZERO; n];
                    for i in 0..k {
                        let c = Elem((coeffs % size) as u32);
                        coeffs /= size;
                        for j in 0..n {
                            v[j] = r.add(v[j], r.mul(c, m[(i, j)]));
                        }
                    }
                    span.insert(v);
                }
                spans.insert(span);
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return spans.len();
                }
                i -= 1;
                tuple[i] += 1;
                if tuple[i] < vectors.len() {
                    break;
                }
                tuple[i] = 0;
                if i == 0 {
                    return spans.len();
                }
            }
        }
    }

    #[test]
    fn f2_line_is_its_own_canonical_form() {
        let r = ring("F2");
        let s = canonical_summand(&r, &Matrix::from_ints(&r, 1, 2, &[1, 1])).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.basis(), &Matrix::from_ints(&r, 1, 2, &[1, 1]));
    }

    #[test]
    fn z4_non_unit_row_is_not_a_summand() {
        let r = ring("Z4");
        assert!(canonical_summand(&r, &Matrix::from_ints(&r, 1, 2, &[2, 0])).is_none());
        assert!(canonical_summand(&r, &Matrix::from_ints(&r, 2, 2, &[1, 0, 0, 2])).is_none());
    }

    #[test]
    fn z4_unimodular_row_is_a_summand() {
        let r = ring("Z4");
        let s = canonical_summand(&r, &Matrix::from_ints(&r, 1, 2, &[1, 2])).unwrap();
        assert_eq!(s.rank(), 1);
        // brute force: (1,2) extends to an invertible matrix
        let extends = r.elements().any(|a| {
            r.elements()
                .any(|b| Matrix::new(2, 2, vec![Elem(1), Elem(2), a, b]).is_invertible(&r))
        });
        assert!(extends);
        let t = canonical_summand(&r, &Matrix::from_ints(&r, 2, 2, &[3, 2, 2, 0])).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn generating_sets_of_same_summand_agree() {
        let r = ring("F3");
        let a = canonical_summand(&r, &Matrix::from_ints(&r, 2, 3, &[1, 1, 0, 0, 1, 2])).unwrap();
        let b = canonical_summand(&r, &Matrix::from_ints(&r, 3, 3, &[1, 2, 2, 2, 2, 0, 1, 1, 0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn documented_counts() {
        let caps = Caps::default();
        assert_eq!(enumerate_summands(&ring("F2"), 2, 1, &caps).unwrap().len(), 3);
        assert_eq!(enumerate_summands(&ring("F2"), 3, 1, &caps).unwrap().len(), 7);
        assert_eq!(enumerate_summands(&ring("F2"), 3, 2, &caps).unwrap().len(), 7);
        assert_eq!(enumerate_summands(&ring("Z4"), 2, 1, &caps).unwrap().len(), 6);
    }

    #[test]
    fn z4_lines_are_unimodular_vectors_mod_units() {
        let r = ring("Z4");
        let unimodular = (0..16u32)
            .filter(|x| r.is_unit(Elem(x / 4)) || r.is_unit(Elem(x % 4)))
            .count();
        assert_eq!(unimodular, 12);
        assert_eq!(unimodular / r.units().len(), 6);
    }

    #[test]
    fn enumeration_matches_brute_force_spans() {
        for spec in ["F2", "F3", "Z4", "F4"] {
            let r = ring(spec);
            for n in 1..=3usize {
                for k in 0..=n {
                    if r.size() > 3 && n == 3 && k > 1 {
                        continue;
                    }
                    let got = enumerate_summands(&r, n, k, &Caps::default()).unwrap();
                    assert_eq!(got.len(), brute_force_spans(&r, n, k), "{spec} n={n} k={k}");
                    assert_eq!(got.len() as u128, summand_count(&r, n, k));
                }
            }
        }
    }

    #[test]
    fn gaussian_binomial_counts_over_fields() {
        // number of k-dim subspaces of F_q^n by counting ordered bases
        fn gaussian(q: u128, n: u32, k: u32) -> u128 {
            let num: u128 = (0..k).map(|i| q.pow(n) - q.pow(i)).product();
            let den: u128 = (0..k).map(|i| q.pow(k) - q.pow(i)).product();
            num / den
        }
        for (spec, q) in [("F2", 2), ("F3", 3), ("F4", 4)] {
            let r = ring(spec);
            for n in 1..=4u32 {
                for k in 0..=n {
                    assert_eq!(summand_count(&r, n as usize, k as usize), gaussian(q, n, k));
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let r = ring("Z8");
        for s in enumerate_summands(&r, 3, 2, &Caps::default()).unwrap() {
            assert_eq!(canonical_summand(&r, s.basis()).unwrap(), s);
            assert!(s.complete_to_basis(&r).is_invertible(&r));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps {
            summands: 5,
            ..Caps::default()
        };
        assert!(enumerate_summands(&ring("F2"), 3, 1, &caps).unwrap_err().is_cap_exceeded());
    }
}
