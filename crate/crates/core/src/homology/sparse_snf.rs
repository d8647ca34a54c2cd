//! Invariant factors of large sparse integer matrices.
//!
//! Unit entries are eliminated first with a Markowitz-style choice (fewest
//! expected fill-ins). What remains has no `±1` entries and is usually tiny;
//! it goes through the dense Smith normal form.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::One;

use super::snf::{invariant_factors_dense, IntMatrix};
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Largest remainder (rows × columns) handed to dense elimination.
const DENSE_LIMIT: usize = 16_000_000;

type Line = Vec<(u32, i64)>;

/// `row_i - f * row_r`, `None` on overflow.
fn axpy(row: &Line, f: i64, pivot: &Line) -> Option<Line> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        if j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0) {
            out.push(row[i]);
            i += 1;
        } else if i == row.len() || pivot[j].0 < row[i].0 {
            out.push((pivot[j].0, f.checked_mul(pivot[j].1)?.checked_neg()?));
            j += 1;
        } else {
            let v = row[i].1.checked_sub(f.checked_mul(pivot[j].1)?)?;
            if v != 0 {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Non-zero invariant factors `d_1 | d_2 | ...` of `a`.
pub fn invariant_factors(a: &SparseMatrix) -> Result<Vec<BigInt>> {
    // work on the orientation with fewer lines
    let m = if a.rows() <= a.cols() { a.transpose() } else { a.clone() };
    // columns of `m` are the lines we keep; entries index the other side
    let width = m.rows();
    let mut lines: Vec<Line> = (0..m.cols()).map(|j| m.column(j).collect()).collect();
    lines.retain(|l| !l.is_empty());
    let mut count = vec![0usize; width];
    for l in &lines {
        for &(c, _) in l {
            count[c as usize] += 1;
        }
    }
    // lines that contain (or once contained) each entry index
    let mut occ: Vec<Vec<u32>> = vec![Vec::new(); width];
    for (i, l) in lines.iter().enumerate() {
        for &(c, _) in l {
            occ[c as usize].push(i as u32);
        }
    }
    // candidate unit pivots by Markowitz cost, re-checked when popped
    let mut heap: BinaryHeap<Reverse<(usize, u32, u32)>> = BinaryHeap::new();
    let push_units = |heap: &mut BinaryHeap<Reverse<(usize, u32, u32)>>, count: &[usize], i: usize, l: &Line| {
        for &(c, v) in l {
            if v == 1 || v == -1 {
                heap.push(Reverse(((l.len() - 1) * (count[c as usize] - 1), i as u32, c)));
            }
        }
    };
    for (i, l) in lines.iter().enumerate() {
        push_units(&mut heap, &count, i, l);
    }
    let mut units = 0usize;
    let mut alive: Vec<bool> = vec![true; lines.len()];
    let mut overflowed = false;
    'outer: while let Some(Reverse((old, r, c))) = heap.pop() {
        let r = r as usize;
        if !alive[r] {
            continue;
        }
        let Ok(k) = lines[r].binary_search_by_key(&c, |e| e.0) else {
            continue;
        };
        let u = lines[r][k].1;
        if u != 1 && u != -1 {
            continue;
        }
        let now = (lines[r].len() - 1) * (count[c as usize] - 1);
        if now > old {
            heap.push(Reverse((now, r as u32, c)));
            continue;
        }
        let pivot = std::mem::take(&mut lines[r]);
        alive[r] = false;
        units += 1;
        for &(cc, _) in &pivot {
            count[cc as usize] -= 1;
        }
        let holders = std::mem::take(&mut occ[c as usize]);
        for (n, &i) in holders.iter().enumerate() {
            let i = i as usize;
            if !alive[i] {
                continue;
            }
            let Ok(pos) = lines[i].binary_search_by_key(&c, |e| e.0) else {
                continue;
            };
            let f = lines[i][pos].1 * u;
            let Some(new) = axpy(&lines[i], f, &pivot) else {
                // keep the pivot line so the remainder stays equivalent
                lines[r] = pivot;
                alive[r] = true;
                units -= 1;
                for &(cc, _) in &lines[r] {
                    count[cc as usize] += 1;
                }
                occ[c as usize] = holders[n..].to_vec();
                overflowed = true;
                break 'outer;
            };
            for &(cc, _) in &lines[i] {
                count[cc as usize] -= 1;
            }
            for &(cc, _) in &new {
                count[cc as usize] += 1;
                if lines[i].binary_search_by_key(&cc, |e| e.0).is_err() {
                    occ[cc as usize].push(i as u32);
                }
            }
            lines[i] = new;
            if lines[i].is_empty() {
                alive[i] = false;
            } else {
                push_units(&mut heap, &count, i, &lines[i]);
            }
        }
    }
    let rest: Vec<&Line> = lines.iter().zip(&alive).filter(|(l, &a)| a && !l.is_empty()).map(|(l, _)| l).collect();
    let mut out: Vec<BigInt> = vec![BigInt::one(); units];
    if rest.is_empty() {
        return Ok(out);
    }
    let mut cols: Vec<u32> = rest.iter().flat_map(|l| l.iter().map(|e| e.0)).collect();
    cols.sort_unstable();
    cols.dedup();
    if rest.len().saturating_mul(cols.len()) > DENSE_LIMIT {
        return Err(Error::cap(
            if overflowed { "dense SNF remainder after overflow" } else { "dense SNF remainder" },
            (rest.len() * cols.len()) as u64,
            DENSE_LIMIT as u64,
        ));
    }
    let mut dense = IntMatrix::zeros(rest.len(), cols.len());
    for (i, l) in rest.iter().enumerate() {
        for &(c, v) in l.iter() {
            let j = cols.binary_search(&c).unwrap();
            dense.set(i, j, BigInt::from(v));
        }
    }
    out.extend(invariant_factors_dense(&dense));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::snf::smith_normal_form;
    use rand::{Rng, SeedableRng};

    #[test]
    fn agrees_with_dense_snf() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..8));
            let data: Vec<i64> = (0..r * c)
                .map(|_| if rng.gen_bool(0.5) { rng.gen_range(-4..5) } else { 0 })
                .collect();
            let sparse = SparseMatrix::from_dense(r, c, &data);
            let dense = IntMatrix::from_i64(r, c, &data);
            assert_eq!(invariant_factors(&sparse).unwrap(), smith_normal_form(&dense).invariants(), "{data:?}");
        }
    }
}
