use std::fmt;

use serde::{Serialize, Serializer};

use super::{Elem, Ring};

/// Dense row-major matrix of ring elements.
///
/// Matrices do not carry their ring; every arithmetic method takes it.
/// Ordering is row-major lexicographic on element encodings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Elem>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        Matrix { rows, cols, data }
    }

    pub fn from_ints(ring: &Ring, rows: usize, cols: usize, ints: &[i64]) -> Matrix {
        Matrix::new(rows, cols, ints.iter().map(|&v| ring.from_int(v)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix::new(rows, cols, vec![Elem::ZERO; rows * cols])
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Elem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Elem>]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, ring: &Ring, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Elem::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = ring.mul(a, other[(k, j)]);
                    out[(i, j)] = ring.add(out[(i, j)], prod);
                }
            }
        }
        out
    }

    pub fn is_identity(&self, ring: &Ring) -> bool {
        self.rows == self.cols && *self == Matrix::identity(ring, self.rows)
    }

    /// Inverse over a local ring: Gauss-Jordan elimination pivoting only on
    /// units. Returns `None` when the matrix is not invertible.
    pub fn inverse(&self, ring: &Ring) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(ring, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| ring.is_unit(a[(r, col)]))?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let s = ring.inv(a[(col, col)]).expect("pivot is a unit");
            for j in 0..n {
                a[(col, j)] = ring.mul(s, a[(col, j)]);
                inv[(col, j)] = ring.mul(s, inv[(col, j)]);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == Elem::ZERO {
                    continue;
                }
                for j in 0..n {
                    let x = ring.mul(f, a[(col, j)]);
                    a[(r, j)] = ring.sub(a[(r, j)], x);
                    let y = ring.mul(f, inv[(col, j)]);
                    inv[(r, j)] = ring.sub(inv[(r, j)], y);
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self, ring: &Ring) -> bool {
        self.inverse(ring).is_some()
    }

    /// Block sum `self ⊕ 1`, adding one row and column at the end.
    pub fn direct_sum_one(&self, ring: &Ring) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut out = Matrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(i, j)];
            }
        }
        out[(n, n)] = ring.one();
        out
    }

    pub fn to_ints(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.0).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|e| e.0.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_ints().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_over_z4() {
        let r = Ring::parse("Z4").unwrap();
        let g = Matrix::from_ints(&r, 2, 2, &[1, 2, 2, 3]);
        let inv = g.inverse(&r).unwrap();
        assert!(g.mul(&r, &inv).is_identity(&r));
        assert!(inv.mul(&r, &g).is_identity(&r));
        // det = 2 is not a unit
        let h = Matrix::from_ints(&r, 2, 2, &[2, 0, 0, 1]);
        assert!(h.inverse(&r).is_none());
    }

    #[test]
    fn product_and_transpose() {
        let r = Ring::parse("F3").unwrap();
        let a = Matrix::from_ints(&r, 2, 3, &[1, 2, 0, 0, 1, 1]);
        let b = Matrix::from_ints(&r, 3, 1, &[1, 1, 2]);
        assert_eq!(a.mul(&r, &b), Matrix::from_ints(&r, 2, 1, &[0, 0]));
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn direct_sum_with_one() {
        let r = Ring::parse("F2").unwrap();
        let g = Matrix::from_ints(&r, 2, 2, &[0, 1, 1, 0]);
        let s = g.direct_sum_one(&r);
        assert_eq!(s, Matrix::from_ints(&r, 3, 3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]));
    }
}
