use std::collections::HashMap;

use super::{canonical_summand, Elem, Matrix, Ring};
use crate::caps::Caps;
use crate::error::{Error, Result};

/// `|GL_n(R)| = |m|^(n^2) * |GL_n(k)|` for a local ring with residue field `k`.
pub fn gl_order(ring: &Ring, n: usize) -> u128 {
    let q = ring.residue_size() as u128;
    let m = ring.nonunit_count() as u128;
    let mut order = m.saturating_pow((n * n) as u32);
    for i in 0..n as u32 {
        order = order.saturating_mul(q.saturating_pow(n as u32) - q.pow(i));
    }
    order
}

/// A finite matrix group with elements indexed `0..order`, in row-major
/// lexicographic order of their entries.
pub struct MatrixGroup {
    ring: Ring,
    n: usize,
    elements: Vec<Matrix>,
    index: HashMap<Vec<Elem>, u32>,
    inverses: Vec<u32>,
    identity: u32,
    table: Option<Vec<u32>>,
}

/// Largest order for which the full multiplication table is cached.
const TABLE_LIMIT: usize = 2048;

/// Enumerates `GL_n(R)` row by row: a partial list of rows is kept only if
/// it is a basis of a free summand, so every completed matrix is invertible.
pub fn enumerate_gl(ring: &Ring, n: usize, caps: &Caps) -> Result<MatrixGroup> {
    let expected = gl_order(ring, n);
    if expected > caps.gl_order as u128 {
        return Err(Error::cap(
            format!("GL_{n}({ring})"),
            expected.min(u64::MAX as u128) as u64,
            caps.gl_order,
        ));
    }
    let size = ring.size() as usize;
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
    let mut out = Vec::with_capacity(expected as usize);
    let mut rows: Vec<Vec<Elem>> = Vec::with_capacity(n);
    extend_rows(ring, n, &vectors, &mut rows, &mut out);
    debug_assert_eq!(out.len() as u128, expected);
    Ok(MatrixGroup::from_sorted(ring.clone(), n, out))
}

fn extend_rows(ring: &Ring, n: usize, vectors: &[Vec<Elem>], rows: &mut Vec<Vec<Elem>>, out: &mut Vec<Matrix>) {
    if rows.len() == n {
        out.push(Matrix::from_rows(n, rows));
        return;
    }
    for v in vectors {
        rows.push(v.clone());
        let m = Matrix::from_rows(n, rows);
        if canonical_summand(ring, &m).is_some_and(|s| s.rank() == rows.len()) {
            extend_rows(ring, n, vectors, rows, out);
        }
        rows.pop();
    }
}

impl MatrixGroup {
    /// Builds a group from a list of matrices closed under products and
    /// inverses. The list is sorted.
    pub fn from_elements(ring: Ring, n: usize, mut elements: Vec<Matrix>) -> Result<MatrixGroup> {
        elements.sort();
        elements.dedup();
        let g = MatrixGroup::from_sorted(ring, n, elements);
        for a in &g.elements {
            for b in &g.elements {
                if !g.index.contains_key(a.mul(&g.ring, b).entries()) {
                    return Err(Error::InvalidArgument("matrix list is not closed under products".into()));
                }
            }
        }
        Ok(g)
    }

    /// The subgroup generated by `gens` (closure under products).
    pub fn generated_by(ring: &Ring, n: usize, gens: &[Matrix]) -> MatrixGroup {
        let mut seen: HashMap<Vec<Elem>, ()> = HashMap::new();
        let id = Matrix::identity(ring, n);
        let mut elems = vec![id.clone()];
        seen.insert(id.entries().to_vec(), ());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = x.mul(ring, g);
                if seen.insert(y.entries().to_vec(), ()).is_none() {
                    elems.push(y.clone());
                    frontier.push(y);
                }
            }
        }
        elems.sort();
        MatrixGroup::from_sorted(ring.clone(), n, elems)
    }

    fn from_sorted(ring: Ring, n: usize, elements: Vec<Matrix>) -> MatrixGroup {
        let index: HashMap<Vec<Elem>, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.entries().to_vec(), i as u32))
            .collect();
        let id = Matrix::identity(&ring, n);
        let identity = index[id.entries()];
        let inverses = elements
            .iter()
            .map(|m| {
                let inv = m.inverse(&ring).expect("group elements are invertible");
                index[inv.entries()]
            })
            .collect();
        let mut g = MatrixGroup {
            ring,
            n,
            elements,
            index,
            inverses,
            identity,
            table: None,
        };
        let order = g.order();
        if order <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(order * order);
            for a in 0..order {
                for b in 0..order {
                    t.push(g.mul_slow(a as u32, b as u32));
                }
            }
            g.table = Some(t);
        }
        g
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Matrix {
        &self.elements[i as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn inverse(&self, i: u32) -> u32 {
        self.inverses[i as usize]
    }

    pub fn inverse_matrix(&self, i: u32) -> &Matrix {
        &self.elements[self.inverses[i as usize] as usize]
    }

    pub fn index_of(&self, m: &Matrix) -> Option<u32> {
        self.index.get(m.entries()).copied()
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.elements[a as usize].mul(&self.ring, &self.elements[b as usize]);
        self.index[p.entries()]
    }

    /// Index of the product `a·b`.
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.mul_slow(a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_gl(ring: &Ring, n: usize) -> usize {
        let size = ring.size() as usize;
        (0..size.pow((n * n) as u32))
            .filter(|&x| {
                let mut v = Vec::with_capacity(n * n);
                let mut y = x;
                for _ in 0..n * n {
                    v.push(Elem((y % size) as u32));
                    y /= size;
                }
                Matrix::new(n, n, v).is_invertible(ring)
            })
            .count()
    }

    #[test]
    fn gl2_f2_has_six_elements() {
        let r = Ring::parse("F2").unwrap();
        assert_eq!(brute_gl(&r, 2), 6);
        assert_eq!(enumerate_gl(&r, 2, &Caps::default()).unwrap().order(), 6);
    }

    #[test]
    fn gl2_f3_has_48_elements() {
        let r = Ring::parse("F3").unwrap();
        assert_eq!(brute_gl(&r, 2), 48);
        assert_eq!(enumerate_gl(&r, 2, &Caps::default()).unwrap().order(), 48);
    }

    #[test]
    fn gl1_is_the_unit_group() {
        for spec in ["F2", "F3", "F4", "Z4", "Z9", "F2[t]/t^2"] {
            let r = Ring::parse(spec).unwrap();
            let g = enumerate_gl(&r, 1, &Caps::default()).unwrap();
            let diag: Vec<Elem> = g.elements().iter().map(|m| m[(0, 0)]).collect();
            assert_eq!(diag, r.units());
        }
    }

    #[test]
    fn orders_match_brute_force_and_formula() {
        for spec in ["F2", "F3", "Z4", "F4", "F2[t]/t^2"] {
            let r = Ring::parse(spec).unwrap();
            let g = enumerate_gl(&r, 2, &Caps::default()).unwrap();
            assert_eq!(g.order(), brute_gl(&r, 2), "{spec}");
            assert_eq!(g.order() as u128, gl_order(&r, 2));
        }
    }

    #[test]
    fn elements_sorted_and_inverses_correct() {
        let r = Ring::parse("Z4").unwrap();
        let g = enumerate_gl(&r, 2, &Caps::default()).unwrap();
        assert!(g.elements().windows(2).all(|w| w[0] < w[1]));
        for i in 0..g.order() as u32 {
            assert_eq!(g.mul(i, g.inverse(i)), g.identity());
            assert!(g.element(i).mul(&r, g.inverse_matrix(i)).is_identity(&r));
        }
    }

    #[test]
    fn default_caps_admit_gl3_f3_but_not_gl4_f4() {
        let caps = Caps::default();
        assert_eq!(gl_order(&Ring::parse("F3").unwrap(), 3), 11232);
        assert!(gl_order(&Ring::parse("F3").unwrap(), 3) <= caps.gl_order as u128);
        let err = enumerate_gl(&Ring::parse("F4").unwrap(), 4, &caps).err().unwrap();
        assert!(err.is_cap_exceeded());
    }

    #[test]
    fn generated_subgroup() {
        let r = Ring::parse("F3").unwrap();
        let e12 = Matrix::from_ints(&r, 2, 2, &[1, 1, 0, 1]);
        let e21 = Matrix::from_ints(&r, 2, 2, &[1, 0, 1, 1]);
        // elementary matrices generate SL_2(F_3), of order 24
        assert_eq!(MatrixGroup::generated_by(&r, 2, &[e12, e21]).order(), 24);
    }
}
