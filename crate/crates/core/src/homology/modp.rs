//! Rank of boundary matrices over `F_p` by streaming column reduction.
//!
//! Columns are generated in parallel batches and reduced one at a time
//! against stored pivot columns (pivot = largest row index).

use rayon::prelude::*;

use super::complex::ColumnSource;

const BATCH: usize = 4096;

/// Incremental column echelon form over `F_p`.
pub struct ModpReducer {
    p: u32,
    /// row -> slot of the stored column whose lowest entry is that row
    pivot_of_row: Vec<u32>,
    rows_store: Vec<Vec<u32>>,
    vals_store: Vec<Vec<u32>>,
    inv: Vec<u32>,
    scratch_rows: Vec<u32>,
    scratch_vals: Vec<u32>,
}

impl ModpReducer {
    pub fn new(p: u32, nrows: usize) -> ModpReducer {
        assert!(p >= 2 && p < 1 << 16, "prime out of supported range");
        let mut inv = vec![0u32; p as usize];
        for a in 1..p {
            inv[a as usize] = mod_pow(a, p - 2, p);
        }
        ModpReducer {
            p,
            pivot_of_row: vec![u32::MAX; nrows],
            rows_store: Vec::new(),
            vals_store: Vec::new(),
            inv,
            scratch_rows: Vec::new(),
            scratch_vals: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows_store.len()
    }

    /// Rows that are the lowest entry of some stored column.
    pub fn pivot_rows(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows_store.iter().map(|r| *r.last().expect("stored columns are non-zero"))
    }

    /// Reduces a column given by sorted distinct rows with values in
    /// `1..p`. Returns whether it was independent of earlier columns.
    pub fn push(&mut self, mut rows: Vec<u32>, mut vals: Vec<u32>) -> bool {
        let p = self.p;
        if p == 2 {
            return self.push_gf2(rows);
        }
        loop {
            let Some(&low) = rows.last() else {
                return false;
            };
            let slot = self.pivot_of_row[low as usize];
            if slot == u32::MAX {
                let lead_inv = self.inv[*vals.last().unwrap() as usize];
                for v in vals.iter_mut() {
                    *v = (*v as u64 * lead_inv as u64 % p as u64) as u32;
                }
                self.pivot_of_row[low as usize] = self.rows_store.len() as u32;
                self.rows_store.push(rows);
                self.vals_store.push(vals);
                return true;
            }
            // w -= w_low * pivot column (pivot column has 1 at `low`)
            let factor = p - *vals.last().unwrap();
            let (pr, pv) = (&self.rows_store[slot as usize], &self.vals_store[slot as usize]);
            let (out_r, out_v) = (&mut self.scratch_rows, &mut self.scratch_vals);
            out_r.clear();
            out_v.clear();
            let (mut i, mut j) = (0, 0);
            while i < rows.len() || j < pr.len() {
                if j == pr.len() || (i < rows.len() && rows[i] < pr[j]) {
                    out_r.push(rows[i]);
                    out_v.push(vals[i]);
                    i += 1;
                } else if i == rows.len() || pr[j] < rows[i] {
                    out_r.push(pr[j]);
                    out_v.push((pv[j] as u64 * factor as u64 % p as u64) as u32);
                    j += 1;
                } else {
                    let s = ((vals[i] as u64 + pv[j] as u64 * factor as u64) % p as u64) as u32;
                    if s != 0 {
                        out_r.push(rows[i]);
                        out_v.push(s);
                    }
                    i += 1;
                    j += 1;
                }
            }
            std::mem::swap(&mut rows, out_r);
            std::mem::swap(&mut vals, out_v);
        }
    }

    fn push_gf2(&mut self, mut rows: Vec<u32>) -> bool {
        loop {
            let Some(&low) = rows.last() else {
                return false;
            };
            let slot = self.pivot_of_row[low as usize];
            if slot == u32::MAX {
                self.pivot_of_row[low as usize] = self.rows_store.len() as u32;
                self.rows_store.push(rows);
                self.vals_store.push(Vec::new());
                return true;
            }
            let pr = &self.rows_store[slot as usize];
            let out = &mut self.scratch_rows;
            out.clear();
            let (mut i, mut j) = (0, 0);
            while i < rows.len() && j < pr.len() {
                match rows[i].cmp(&pr[j]) {
                    std::cmp::Ordering::Less => {
                        out.push(rows[i]);
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        out.push(pr[j]);
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                }
            }
            out.extend_from_slice(&rows[i..]);
            out.extend_from_slice(&pr[j..]);
            std::mem::swap(&mut rows, out);
        }
    }
}

fn mod_pow(a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Reduces a column with integer coefficients modulo `p` into sorted
/// `(rows, values)` form.
fn column_mod_p(entries: &mut Vec<(u32, i64)>, p: u32) -> (Vec<u32>, Vec<u32>) {
    entries.sort_unstable_by_key(|e| e.0);
    let mut rows = Vec::with_capacity(entries.len());
    let mut vals = Vec::with_capacity(entries.len());
    let mut i = 0;
    while i < entries.len() {
        let r = entries[i].0;
        let mut s: i64 = 0;
        while i < entries.len() && entries[i].0 == r {
            s = (s + entries[i].1.rem_euclid(p as i64)) % p as i64;
            i += 1;
        }
        if s != 0 {
            rows.push(r);
            vals.push(s as u32);
        }
    }
    (rows, vals)
}

/// Rank of `∂_d` over `F_p`. Stops early once `bound` is reached (a known
/// upper bound on the rank, such as `dim C_{d-1} - rank ∂_{d-1}`).
pub fn boundary_rank<S: ColumnSource + ?Sized>(src: &S, d: usize, p: u32, bound: Option<usize>) -> usize {
    let n = src.dim(d);
    let rows = src.dim(d - 1);
    let bound = bound.unwrap_or(usize::MAX).min(rows).min(n);
    if bound == 0 {
        return 0;
    }
    let mut red = ModpReducer::new(p, rows);
    let mut start = 0;
    while start < n {
        let end = (start + BATCH).min(n);
        let batch: Vec<(Vec<u32>, Vec<u32>)> = (start..end)
            .into_par_iter()
            .map_init(Vec::new, |buf, k| {
                buf.clear();
                src.boundary_into(d, k, buf);
                column_mod_p(buf, p)
            })
            .collect();
        for (r, v) in batch {
            red.push(r, v);
            if red.rank() >= bound {
                return red.rank();
            }
        }
        start = end;
    }
    red.rank()
}

/// `∂_d` mod `p` transposed: for every `(d-1)`-cell, the `d`-cells whose
/// boundary meets it, with coefficients. Built in two passes to avoid
/// holding the triplets.
struct Transposed {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<u32>,
}

fn transpose_mod_p<S: ColumnSource + ?Sized>(src: &S, d: usize, p: u32) -> Transposed {
    let n = src.dim(d);
    let rows = src.dim(d - 1);
    let columns = |range: std::ops::Range<usize>| -> Vec<(Vec<u32>, Vec<u32>)> {
        range
            .into_par_iter()
            .map_init(Vec::new, |buf, j| {
                buf.clear();
                src.boundary_into(d, j, buf);
                column_mod_p(buf, p)
            })
            .collect()
    };
    let mut offsets = vec![0usize; rows + 1];
    let mut start = 0;
    while start < n {
        let end = (start + BATCH).min(n);
        for (r, _) in columns(start..end) {
            for x in r {
                offsets[x as usize + 1] += 1;
            }
        }
        start = end;
    }
    for i in 0..rows {
        offsets[i + 1] += offsets[i];
    }
    let total = offsets[rows];
    let mut fill = offsets.clone();
    let mut cols = vec![0u32; total];
    let mut vals = vec![0u32; total];
    let mut start = 0;
    while start < n {
        let end = (start + BATCH).min(n);
        for (j, (r, v)) in (start..end).zip(columns(start..end)) {
            for (x, y) in r.into_iter().zip(v) {
                let slot = &mut fill[x as usize];
                cols[*slot] = j as u32;
                vals[*slot] = y;
                *slot += 1;
            }
        }
        start = end;
    }
    Transposed { offsets, cols, vals }
}

/// Ranks of `∂_1, ..., ∂_top` over `F_p` (index 0 holds 0), computed by
/// reducing the coboundary matrices `∂_d^T` in increasing degree. A
/// `(d-1)`-cell that is the pivot of a reduced coboundary column one degree
/// lower is a cocycle's lowest cell, so its column is dependent and skipped.
pub fn boundary_ranks<S: ColumnSource + ?Sized>(src: &S, p: u32) -> Vec<usize> {
    let top = src.top_degree();
    let mut ranks = vec![0usize; top + 1];
    let mut cleared: Vec<bool> = vec![false; src.dim(0)];
    for d in 1..=top {
        let t = transpose_mod_p(src, d, p);
        let rows = src.dim(d - 1);
        let mut red = ModpReducer::new(p, src.dim(d));
        let bound = rows - ranks[d - 1];
        for i in 0..rows {
            if red.rank() >= bound {
                break;
            }
            if cleared[i] {
                continue;
            }
            let range = t.offsets[i]..t.offsets[i + 1];
            // entries are in increasing column order by construction
            red.push(t.cols[range.clone()].to_vec(), t.vals[range].to_vec());
        }
        ranks[d] = red.rank();
        cleared = vec![false; src.dim(d)];
        for r in red.pivot_rows() {
            cleared[r as usize] = true;
        }
    }
    ranks
}
