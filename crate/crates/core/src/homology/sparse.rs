use serde::Serialize;

/// Sparse integer matrix in compressed-column form. Entries within a column
/// are sorted by row and non-zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<i64>,
}

/// Sorts `(row, value)` pairs, merges duplicates and drops zeros.
pub fn normalize_column(entries: &mut Vec<(u32, i64)>) {
    entries.sort_unstable_by_key(|e| e.0);
    let mut w = 0;
    for r in 0..entries.len() {
        if w > 0 && entries[w - 1].0 == entries[r].0 {
            entries[w - 1].1 += entries[r].1;
        } else {
            entries[w] = entries[r];
            w += 1;
        }
    }
    entries.truncate(w);
    entries.retain(|e| e.1 != 0);
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix {
            rows,
            cols,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds from per-column entry lists (duplicates are summed).
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> SparseMatrix {
        let mut b = SparseBuilder::new(rows);
        for mut c in columns {
            b.push_column(&mut c);
        }
        b.finish()
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[i64]) -> SparseMatrix {
        assert_eq!(data.len(), rows * cols);
        let columns = (0..cols)
            .map(|j| {
                (0..rows)
                    .filter(|&i| data[i * cols + j] != 0)
                    .map(|i| (i as u32, data[i * cols + j]))
                    .collect()
            })
            .collect();
        SparseMatrix::from_columns(rows, columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (u32, i64)> + '_ {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        self.row_idx[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut d = vec![0; self.rows * self.cols];
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                d[i as usize * self.cols + j] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.rows];
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                cols[i as usize].push((j as u32, v));
            }
        }
        SparseMatrix::from_columns(self.cols, cols)
    }

    /// `self * other`, with `None` on overflow.
    pub fn checked_mul(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut acc: Vec<i128> = vec![0; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut b = SparseBuilder::new(self.rows);
        for j in 0..other.cols {
            for (k, v) in other.column(j) {
                for (i, a) in self.column(k as usize) {
                    if acc[i as usize] == 0 {
                        touched.push(i);
                    }
                    acc[i as usize] += a as i128 * v as i128;
                }
            }
            let mut col = Vec::with_capacity(touched.len());
            for &i in &touched {
                let x = acc[i as usize];
                acc[i as usize] = 0;
                if x != 0 {
                    col.push((i, i64::try_from(x).ok()?));
                }
            }
            touched.clear();
            b.push_column(&mut col);
        }
        Some(b.finish())
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// Keeps the listed rows (in the given order) and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut remap = vec![u32::MAX; self.rows];
        for (new, &old) in rows.iter().enumerate() {
            remap[old] = new as u32;
        }
        let columns = cols
            .iter()
            .map(|&j| {
                self.column(j)
                    .filter(|&(i, _)| remap[i as usize] != u32::MAX)
                    .map(|(i, v)| (remap[i as usize], v))
                    .collect()
            })
            .collect();
        SparseMatrix::from_columns(rows.len(), columns)
    }
}

/// Incremental column-by-column construction.
pub struct SparseBuilder {
    m: SparseMatrix,
}

impl SparseBuilder {
    pub fn new(rows: usize) -> SparseBuilder {
        SparseBuilder {
            m: SparseMatrix {
                rows,
                cols: 0,
                col_ptr: vec![0],
                row_idx: Vec::new(),
                vals: Vec::new(),
            },
        }
    }

    pub fn push_column(&mut self, entries: &mut Vec<(u32, i64)>) {
        normalize_column(entries);
        for &(i, v) in entries.iter() {
            assert!((i as usize) < self.m.rows, "row index out of range");
            self.m.row_idx.push(i);
            self.m.vals.push(v);
        }
        self.m.cols += 1;
        self.m.col_ptr.push(self.m.row_idx.len());
    }

    pub fn finish(self) -> SparseMatrix {
        self.m
    }
}
