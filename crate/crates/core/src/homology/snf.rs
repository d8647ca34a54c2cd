//! Smith normal form over the integers.
//!
//! Elimination runs in checked `i128` arithmetic and restarts in `BigInt`
//! if any intermediate value overflows.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::sparse::SparseMatrix;

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> IntMatrix {
        assert_eq!(data.len(), rows * cols);
        IntMatrix {
            rows,
            cols,
            data: data.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_sparse(m: &SparseMatrix) -> IntMatrix {
        IntMatrix::from_i64(m.rows(), m.cols(), &m.to_dense())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(|x| x.to_i64()).collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, r * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`,
/// all diagonal entries non-negative. Inverses of `U` and `V` are tracked too.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Non-zero diagonal entries in order.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

trait SnfNum: Clone + PartialEq + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn cmp_abs(&self, o: &Self) -> Ordering;
    fn below_zero(&self) -> bool;
    fn negated(&self) -> Self;
    /// Euclidean quotient `floor(self / d)`.
    fn quot(&self, d: &Self) -> Self;
    /// `self - q*b`
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn divides(&self, b: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl SnfNum for i128 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn below_zero(&self) -> bool {
        *self < 0
    }
    fn negated(&self) -> Self {
        -*self
    }
    fn quot(&self, d: &Self) -> Self {
        self.div_floor(d)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn divides(&self, b: &Self) -> bool {
        if *self == 0 {
            *b == 0
        } else {
            b % self == 0
        }
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SnfNum for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.magnitude().cmp(o.magnitude())
    }
    fn below_zero(&self) -> bool {
        Signed::is_negative(self)
    }
    fn negated(&self) -> Self {
        -self
    }
    fn quot(&self, d: &Self) -> Self {
        self.div_floor(d)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn divides(&self, b: &Self) -> bool {
        if Zero::is_zero(self) {
            Zero::is_zero(b)
        } else {
            Zero::is_zero(&(b % self))
        }
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Dense<T> {
    rows: usize,
    cols: usize,
    a: Vec<T>,
}

impl<T: SnfNum> Dense<T> {
    fn identity(n: usize) -> Dense<T> {
        let mut a = vec![T::nil(); n * n];
        for i in 0..n {
            a[i * n + i] = T::unit();
        }
        Dense { rows: n, cols: n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> &T {
        &self.a[i * self.cols + j]
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            for j in 0..self.cols {
                self.a.swap(i * self.cols + j, k * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, k: usize) {
        if i != k {
            for r in 0..self.rows {
                self.a.swap(r * self.cols + i, r * self.cols + k);
            }
        }
    }

    /// row_i -= q * row_k
    fn row_sub(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            let b = self.a[k * self.cols + j].clone();
            if !b.is_nil() {
                let v = self.a[i * self.cols + j].sub_mul(q, &b)?;
                self.a[i * self.cols + j] = v;
            }
        }
        Some(())
    }

    /// col_i -= q * col_k
    fn col_sub(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        for r in 0..self.rows {
            let b = self.a[r * self.cols + k].clone();
            if !b.is_nil() {
                let v = self.a[r * self.cols + i].sub_mul(q, &b)?;
                self.a[r * self.cols + i] = v;
            }
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.a[i * self.cols + j] = self.a[i * self.cols + j].negated();
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            self.a[r * self.cols + j] = self.a[r * self.cols + j].negated();
        }
    }

    fn to_int(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.a.iter().map(|x| x.to_big()).collect(),
        }
    }
}

/// Transforms are kept only when requested.
struct Calc<T> {
    a: Dense<T>,
    u: Option<(Dense<T>, Dense<T>)>,
    v: Option<(Dense<T>, Dense<T>)>,
}

impl<T: SnfNum> Calc<T> {
    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap_rows(i, k);
        if let Some((u, u_inv)) = &mut self.u {
            u.swap_rows(i, k);
            u_inv.swap_cols(i, k);
        }
    }

    fn swap_cols(&mut self, i: usize, k: usize) {
        self.a.swap_cols(i, k);
        if let Some((v, v_inv)) = &mut self.v {
            v.swap_cols(i, k);
            v_inv.swap_rows(i, k);
        }
    }

    /// row_i -= q row_k (left multiplication by E = I - q e_ik);
    /// E^{-1} = I + q e_ik acts on U^{-1} from the right: col_k += q col_i.
    fn row_sub(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        self.a.row_sub(i, k, q)?;
        if let Some((u, u_inv)) = &mut self.u {
            u.row_sub(i, k, q)?;
            u_inv.col_sub(k, i, &q.negated())?;
        }
        Some(())
    }

    fn col_sub(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        self.a.col_sub(i, k, q)?;
        if let Some((v, v_inv)) = &mut self.v {
            v.col_sub(i, k, q)?;
            v_inv.row_sub(k, i, &q.negated())?;
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some((u, u_inv)) = &mut self.u {
            u.negate_row(i);
            u_inv.negate_col(i);
        }
    }

    fn run(&mut self) -> Option<()> {
        let (m, n) = (self.a.rows, self.a.cols);
        for t in 0..m.min(n) {
            // smallest non-zero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = self.a.at(i, j);
                    if !x.is_nil()
                        && best.is_none_or(|(bi, bj)| x.cmp_abs(self.a.at(bi, bj)) == Ordering::Less)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if self.a.at(i, t).is_nil() {
                        continue;
                    }
                    let q = self.a.at(i, t).quot(self.a.at(t, t));
                    self.row_sub(i, t, &q)?;
                    if !self.a.at(i, t).is_nil() {
                        dirty = true;
                    }
                }
                for j in t + 1..n {
                    if self.a.at(t, j).is_nil() {
                        continue;
                    }
                    let q = self.a.at(t, j).quot(self.a.at(t, t));
                    self.col_sub(j, t, &q)?;
                    if !self.a.at(t, j).is_nil() {
                        dirty = true;
                    }
                }
                if dirty {
                    self.move_smallest_to_pivot(t);
                    continue;
                }
                // divisibility of the trailing block
                let mut offender = None;
                'scan: for i in t + 1..m {
                    for j in t + 1..n {
                        if !self.a.at(t, t).divides(self.a.at(i, j)) {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        // row_t += row_i
                        self.row_sub(t, i, &T::unit().negated())?;
                    }
                    None => break,
                }
            }
            if self.a.at(t, t).below_zero() {
                self.negate_row(t);
            }
        }
        Some(())
    }

    /// Moves the smallest non-zero entry of row `t` / column `t` to `(t,t)`.
    fn move_smallest_to_pivot(&mut self, t: usize) {
        let (m, n) = (self.a.rows, self.a.cols);
        let mut best = (t, t);
        for i in t..m {
            let x = self.a.at(i, t);
            if !x.is_nil() && (self.a.at(best.0, best.1).is_nil() || x.cmp_abs(self.a.at(best.0, best.1)) == Ordering::Less) {
                best = (i, t);
            }
        }
        for j in t..n {
            let x = self.a.at(t, j);
            if !x.is_nil() && (self.a.at(best.0, best.1).is_nil() || x.cmp_abs(self.a.at(best.0, best.1)) == Ordering::Less) {
                best = (t, j);
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }
}

fn run_generic<T: SnfNum>(a: Vec<T>, rows: usize, cols: usize, transforms: bool) -> Option<Calc<T>> {
    let mut calc = Calc {
        a: Dense { rows, cols, a },
        u: transforms.then(|| (Dense::identity(rows), Dense::identity(rows))),
        v: transforms.then(|| (Dense::identity(cols), Dense::identity(cols))),
    };
    calc.run()?;
    Some(calc)
}

fn finish<T: SnfNum>(calc: Calc<T>) -> SmithForm {
    let (u, u_inv) = calc.u.expect("transforms requested");
    let (v, v_inv) = calc.v.expect("transforms requested");
    SmithForm {
        u: u.to_int(),
        u_inv: u_inv.to_int(),
        d: calc.a.to_int(),
        v: v.to_int(),
        v_inv: v_inv.to_int(),
    }
}

/// Full Smith normal form with transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let small: Option<Vec<i128>> = a.data.iter().map(|x| x.to_i128()).collect();
    if let Some(small) = small {
        if let Some(calc) = run_generic(small, a.rows, a.cols, true) {
            return finish(calc);
        }
    }
    let calc = run_generic(a.data.clone(), a.rows, a.cols, true).expect("bigint arithmetic cannot overflow");
    finish(calc)
}

/// Non-zero invariant factors only (no transforms).
pub fn invariant_factors_dense(a: &IntMatrix) -> Vec<BigInt> {
    let small: Option<Vec<i128>> = a.data.iter().map(|x| x.to_i128()).collect();
    let diag = |d: IntMatrix| -> Vec<BigInt> {
        (0..d.rows.min(d.cols))
            .map(|i| d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    };
    if let Some(small) = small {
        if let Some(calc) = run_generic(small, a.rows, a.cols, false) {
            return diag(calc.a.to_int());
        }
    }
    let calc = run_generic(a.data.clone(), a.rows, a.cols, false).expect("bigint arithmetic cannot overflow");
    diag(calc.a.to_int())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &IntMatrix) -> Vec<i64> {
        (0..d.rows().min(d.cols())).map(|i| d.get(i, i).to_i64().unwrap()).collect()
    }

    fn check(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u_inv.mul(&s.d).mul(&s.v_inv), *a);
        assert!(s.u.mul(&s.u_inv) == IntMatrix::identity(a.rows()));
        assert!(s.v.mul(&s.v_inv) == IntMatrix::identity(a.cols()));
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let inv = s.invariants();
        assert!(inv.iter().all(|x| x.is_positive()));
        assert!(inv.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        s
    }

    #[test]
    fn already_diagonal() {
        let s = check(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 0]));
        assert_eq!(diag(&s.d), vec![2, 0]);
    }

    #[test]
    fn two_by_two() {
        // det = -2 forces d1*d2 = 2 with d1 | d2
        let a = IntMatrix::from_i64(2, 2, &[1, 2, 3, 4]);
        assert_eq!(a.determinant(), BigInt::from(-2));
        let s = check(&a);
        assert_eq!(diag(&s.d), vec![1, 2]);
    }

    #[test]
    fn zero_matrix() {
        let s = check(&IntMatrix::zeros(3, 3));
        assert_eq!(diag(&s.d), vec![0, 0, 0]);
    }

    #[test]
    fn divisibility_fix_up() {
        // diag(2, 3) has SNF diag(1, 6)
        let s = check(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]));
        assert_eq!(diag(&s.d), vec![1, 6]);
        let s = check(&IntMatrix::from_i64(3, 3, &[4, 0, 0, 0, 6, 0, 0, 0, 10]));
        assert_eq!(diag(&s.d), vec![2, 2, 60]);
    }

    #[test]
    fn rectangular() {
        let s = check(&IntMatrix::from_i64(2, 3, &[2, 4, 4, -6, 6, 12]));
        assert_eq!(diag(&s.d), vec![2, 6]);
        assert_eq!(invariant_factors_dense(&IntMatrix::from_i64(2, 3, &[2, 4, 4, -6, 6, 12])), vec![BigInt::from(2), BigInt::from(6)]);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = 1i64 << 62;
        let a = IntMatrix::from_i64(3, 3, &[big, big - 1, 3, big - 3, big, 7, 5, 11, big - 7]);
        let s = check(&a);
        let product: BigInt = s.invariants().iter().product();
        assert_eq!(product, a.determinant().abs());
    }
}
