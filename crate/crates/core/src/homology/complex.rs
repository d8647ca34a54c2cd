use serde::Serialize;

use super::sparse::{SparseBuilder, SparseMatrix};
use crate::error::{Error, Result};

/// A chain complex whose boundary columns can be produced on demand.
///
/// Degrees run `0..=top_degree()`. Basis elements of degree `d` are indexed
/// `0..dim(d)`. Nerves of large categories implement this directly so their
/// boundary matrices never have to be stored.
pub trait ColumnSource: Sync {
    fn top_degree(&self) -> usize;

    fn dim(&self, d: usize) -> usize;

    /// Whether the top degree is a hard cut of a longer complex.
    fn is_truncated(&self) -> bool;

    /// Appends the boundary of basis element `j` of degree `d >= 1` as
    /// `(row, coefficient)` pairs. Duplicate rows are allowed.
    fn boundary_into(&self, d: usize, j: usize, out: &mut Vec<(u32, i64)>);

    fn boundary_matrix(&self, d: usize) -> SparseMatrix {
        let mut b = SparseBuilder::new(self.dim(d - 1));
        let mut col = Vec::new();
        for j in 0..self.dim(d) {
            col.clear();
            self.boundary_into(d, j, &mut col);
            b.push_column(&mut col);
        }
        b.finish()
    }
}

/// Checks `∂_{d-1} ∘ ∂_d = 0` column by column without materializing
/// either matrix. Fails with the first offending degree.
pub fn check_boundary_square<S: ColumnSource + ?Sized>(src: &S) -> Result<()> {
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    let mut acc: Vec<(u32, i64)> = Vec::new();
    for d in 2..=src.top_degree() {
        for j in 0..src.dim(d) {
            outer.clear();
            src.boundary_into(d, j, &mut outer);
            acc.clear();
            for &(r, c) in &outer {
                inner.clear();
                src.boundary_into(d - 1, r as usize, &mut inner);
                for &(s, e) in &inner {
                    let v = c.checked_mul(e).ok_or_else(|| Error::InvalidComplex(format!("overflow checking ∂∂ in degree {d}")))?;
                    acc.push((s, v));
                }
            }
            super::sparse::normalize_column(&mut acc);
            if !acc.is_empty() {
                return Err(Error::BoundarySquare(d));
            }
        }
    }
    Ok(())
}

/// Materialized chain complex with `∂∘∂ = 0` checked at construction.
#[derive(Debug, Clone, Serialize)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[d - 1]` is `∂_d : C_d → C_{d-1}`.
    boundaries: Vec<SparseMatrix>,
    truncated: bool,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<SparseMatrix>, truncated: bool) -> Result<ChainComplex> {
        if dims.is_empty() {
            return Err(Error::InvalidComplex("a complex needs at least degree 0".into()));
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::InvalidComplex(format!(
                "{} degrees need {} boundary matrices, got {}",
                dims.len(),
                dims.len() - 1,
                boundaries.len()
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            let d = i + 1;
            if b.rows() != dims[d - 1] || b.cols() != dims[d] {
                return Err(Error::InvalidComplex(format!(
                    "boundary in degree {d} has shape {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    dims[d - 1],
                    dims[d]
                )));
            }
        }
        for d in 2..dims.len() {
            let prod = boundaries[d - 2]
                .checked_mul(&boundaries[d - 1])
                .ok_or_else(|| Error::InvalidComplex(format!("overflow checking ∂∂ in degree {d}")))?;
            if !prod.is_zero() {
                return Err(Error::BoundarySquare(d));
            }
        }
        Ok(ChainComplex {
            dims,
            boundaries,
            truncated,
        })
    }

    /// Materializes any column source (checking `∂∘∂ = 0`).
    pub fn from_source<S: ColumnSource + ?Sized>(src: &S) -> Result<ChainComplex> {
        let top = src.top_degree();
        let dims = (0..=top).map(|d| src.dim(d)).collect();
        let boundaries = (1..=top).map(|d| src.boundary_matrix(d)).collect();
        ChainComplex::new(dims, boundaries, src.is_truncated())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn boundary(&self, d: usize) -> &SparseMatrix {
        &self.boundaries[d - 1]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

impl ColumnSource for ChainComplex {
    fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    fn dim(&self, d: usize) -> usize {
        self.dims[d]
    }

    fn is_truncated(&self) -> bool {
        self.truncated
    }

    fn boundary_into(&self, d: usize, j: usize, out: &mut Vec<(u32, i64)>) {
        out.extend(self.boundaries[d - 1].column(j));
    }

    fn boundary_matrix(&self, d: usize) -> SparseMatrix {
        self.boundaries[d - 1].clone()
    }
}

/// The quotient `C / S` of a complex by a subcomplex spanned by selected
/// basis elements.
pub struct QuotientComplex<'a, S: ColumnSource + ?Sized> {
    inner: &'a S,
    /// per degree: new index -> old index
    kept: Vec<Vec<usize>>,
    /// per degree: old index -> new index or `u32::MAX` if quotiented out
    remap: Vec<Vec<u32>>,
}

impl<'a, S: ColumnSource + ?Sized> QuotientComplex<'a, S> {
    /// `sub[d]` lists the selected basis elements of degree `d`; degrees
    /// past the end of `sub` select nothing. Fails unless the selection is
    /// closed under the boundary.
    pub fn new(inner: &'a S, sub: &[Vec<usize>]) -> Result<Self> {
        let top = inner.top_degree();
        if sub.len() > top + 1 {
            return Err(Error::InvalidArgument(format!(
                "selection has {} degrees but the complex stops at {top}",
                sub.len()
            )));
        }
        let mut selected: Vec<Vec<bool>> = (0..=top).map(|d| vec![false; inner.dim(d)]).collect();
        for (d, cells) in sub.iter().enumerate() {
            for &c in cells {
                if c >= inner.dim(d) {
                    return Err(Error::InvalidArgument(format!("cell {c} out of range in degree {d}")));
                }
                selected[d][c] = true;
            }
        }
        let mut col = Vec::new();
        for (d, cells) in sub.iter().enumerate().skip(1) {
            for &c in cells {
                col.clear();
                inner.boundary_into(d, c, &mut col);
                super::sparse::normalize_column(&mut col);
                if col.iter().any(|&(r, _)| !selected[d - 1][r as usize]) {
                    return Err(Error::NotSubcomplex(d));
                }
            }
        }
        let mut kept = Vec::with_capacity(top + 1);
        let mut remap = Vec::with_capacity(top + 1);
        for sel in &selected {
            let mut k = Vec::new();
            let mut r = vec![u32::MAX; sel.len()];
            for (i, &s) in sel.iter().enumerate() {
                if !s {
                    r[i] = k.len() as u32;
                    k.push(i);
                }
            }
            kept.push(k);
            remap.push(r);
        }
        Ok(QuotientComplex { inner, kept, remap })
    }
}

impl<S: ColumnSource + ?Sized> ColumnSource for QuotientComplex<'_, S> {
    fn top_degree(&self) -> usize {
        self.inner.top_degree()
    }

    fn dim(&self, d: usize) -> usize {
        self.kept[d].len()
    }

    fn is_truncated(&self) -> bool {
        self.inner.is_truncated()
    }

    fn boundary_into(&self, d: usize, j: usize, out: &mut Vec<(u32, i64)>) {
        let start = out.len();
        self.inner.boundary_into(d, self.kept[d][j], out);
        let remap = &self.remap[d - 1];
        let mut w = start;
        for r in start..out.len() {
            let (row, v) = out[r];
            let new = remap[row as usize];
            if new != u32::MAX {
                out[w] = (new, v);
                w += 1;
            }
        }
        out.truncate(w);
    }
}

/// Cuts a complex at degree `top`; the result is marked truncated whenever
/// degrees were actually dropped.
pub struct Truncation<'a, S: ColumnSource + ?Sized> {
    inner: &'a S,
    top: usize,
}

impl<'a, S: ColumnSource + ?Sized> Truncation<'a, S> {
    pub fn new(inner: &'a S, top: usize) -> Self {
        Truncation {
            inner,
            top: top.min(inner.top_degree()),
        }
    }
}

impl<S: ColumnSource + ?Sized> ColumnSource for Truncation<'_, S> {
    fn top_degree(&self) -> usize {
        self.top
    }

    fn dim(&self, d: usize) -> usize {
        self.inner.dim(d)
    }

    fn is_truncated(&self) -> bool {
        self.inner.is_truncated() || self.top < self.inner.top_degree()
    }

    fn boundary_into(&self, d: usize, j: usize, out: &mut Vec<(u32, i64)>) {
        self.inner.boundary_into(d, j, out)
    }
}

/// A degree-wise map of chain complexes `A → B`, given by sparse matrices
/// `f_d` of shape `dim_B(d) x dim_A(d)` for `d` in `0..=top`.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub maps: Vec<SparseMatrix>,
}

impl ChainMap {
    /// Checks `∂^B_d f_d = f_{d-1} ∂^A_d` for every degree both complexes
    /// and the map cover.
    pub fn check<A, B>(&self, a: &A, b: &B) -> Result<()>
    where
        A: ColumnSource + ?Sized,
        B: ColumnSource + ?Sized,
    {
        let top = (self.maps.len().saturating_sub(1)).min(a.top_degree()).min(b.top_degree());
        for d in 0..=top {
            let f = &self.maps[d];
            if f.rows() != b.dim(d) || f.cols() != a.dim(d) {
                return Err(Error::InvalidFunctor(format!("chain map has wrong shape in degree {d}")));
            }
        }
        for d in 1..=top {
            let lhs = b.boundary_matrix(d).checked_mul(&self.maps[d]);
            let rhs = self.maps[d - 1].checked_mul(&a.boundary_matrix(d));
            if lhs.is_none() || lhs != rhs {
                return Err(Error::InvalidFunctor(format!("chain map does not commute with ∂ in degree {d}")));
            }
        }
        Ok(())
    }
}
