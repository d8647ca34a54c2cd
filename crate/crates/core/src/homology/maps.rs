use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::complex::{ChainMap, ColumnSource, Truncation};
use super::modp::ModpReducer;
use super::snf::{smith_normal_form, IntMatrix};
use super::sparse::{SparseBuilder, SparseMatrix};
use super::sparse_snf::invariant_factors;
use super::{homology, Coefficients, HomologyGroup};
use crate::error::{Error, Result};

/// Columns form a basis of the integer kernel of `a`.
pub fn kernel_basis(a: &SparseMatrix) -> IntMatrix {
    let s = smith_normal_form(&IntMatrix::from_sparse(a));
    let r = s.rank();
    let n = a.cols();
    let mut k = IntMatrix::zeros(n, n - r);
    for j in r..n {
        for i in 0..n {
            k.set(i, j - r, s.v.get(i, j).clone());
        }
    }
    k
}

/// Basis of the kernel of `a` over `F_p`, as dense vectors with entries in
/// `0..p`.
pub fn kernel_basis_mod_p(a: &SparseMatrix, p: u32) -> Vec<Vec<u32>> {
    let (rows, cols) = (a.rows(), a.cols());
    let p64 = p as i64;
    let mut m: Vec<Vec<i64>> = vec![vec![0; cols]; rows];
    for j in 0..cols {
        for (i, v) in a.column(j) {
            m[i as usize][j] = v.rem_euclid(p64);
        }
    }
    let inv = |x: i64| -> i64 {
        let mut r = 1i64;
        let (mut b, mut e) = (x, p64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p64;
            }
            b = b * b % p64;
            e >>= 1;
        }
        r
    };
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, r);
        let s = inv(m[rank][c]);
        for x in m[rank].iter_mut() {
            *x = *x * s % p64;
        }
        for r2 in 0..rows {
            if r2 != rank && m[r2][c] != 0 {
                let f = m[r2][c];
                for k in 0..cols {
                    m[r2][k] = (m[r2][k] - f * m[rank][k]).rem_euclid(p64);
                }
            }
        }
        pivot_cols.push(c);
        rank += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u32; cols];
            v[free] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (-m[r][free]).rem_euclid(p64) as u32;
            }
            v
        })
        .collect()
}

/// What a chain map does to homology in one degree.
#[derive(Debug, Clone, Serialize)]
pub struct InducedMap {
    pub degree: usize,
    pub coefficients: Coefficients,
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    pub surjective: bool,
    /// `None` when undecided (integral coefficients, non-isomorphic groups).
    pub injective: Option<bool>,
    pub isomorphism: Option<bool>,
}

/// Decides surjectivity of `f_*: H_d(A) → H_d(B)` by checking that the
/// images of cycles together with the boundaries of `B` span all cycles of
/// `B`. Over the integers injectivity then follows when the two groups are
/// abstractly isomorphic (finitely generated abelian groups are Hopfian).
/// Both complexes need degree `d + 1`.
pub fn induced_map<A, B>(f: &ChainMap, a: &A, b: &B, d: usize, coeff: Coefficients) -> Result<InducedMap>
where
    A: ColumnSource + ?Sized,
    B: ColumnSource + ?Sized,
{
    if a.top_degree() < d + 1 || b.top_degree() < d + 1 || f.maps.len() <= d {
        return Err(Error::InvalidArgument(format!("induced map in degree {d} needs both complexes and the map through degree {}", d + 1)));
    }
    f.check(&Truncation::new(a, d + 1), &Truncation::new(b, d + 1))?;
    let ha = homology(&Truncation::new(a, d + 1), coeff)?;
    let hb = homology(&Truncation::new(b, d + 1), coeff)?;
    let source = ha.group(d as i64).cloned().expect("degree is computed");
    let target = hb.group(d as i64).cloned().expect("degree is computed");
    let fd = &f.maps[d];
    let nb = b.dim(d);
    let b_next = b.boundary_matrix(d + 1);
    match coeff {
        Coefficients::Integers => {
            let cycles = if d == 0 {
                IntMatrix::identity(a.dim(0))
            } else {
                kernel_basis(&a.boundary_matrix(d))
            };
            let mut gens = SparseBuilder::new(nb);
            let mut col = Vec::new();
            for j in 0..cycles.cols() {
                col.clear();
                for i in 0..cycles.rows() {
                    let z = cycles.get(i, j);
                    if z.is_zero() {
                        continue;
                    }
                    let z = z.to_i64().ok_or_else(|| Error::InvalidComplex("cycle coefficient too large".into()))?;
                    for (r, v) in fd.column(i) {
                        col.push((r, v.checked_mul(z).ok_or_else(|| Error::InvalidComplex("overflow in chain map".into()))?));
                    }
                }
                gens.push_column(&mut col);
            }
            for j in 0..b_next.cols() {
                col.clear();
                col.extend(b_next.column(j));
                gens.push_column(&mut col);
            }
            let inv = invariant_factors(&gens.finish())?;
            let rank_bd = if d == 0 { 0 } else { invariant_factors(&b.boundary_matrix(d))?.len() };
            let cycle_rank = nb - rank_bd;
            let surjective = inv.len() == cycle_rank && inv.iter().all(|x| x == &1.into());
            let same = source.same_group(&target);
            let injective = if surjective && same {
                Some(true)
            } else if source.betti > target.betti {
                Some(false)
            } else {
                None
            };
            Ok(InducedMap {
                degree: d,
                coefficients: coeff,
                isomorphism: match injective {
                    Some(i) => Some(i && surjective),
                    None => (!surjective).then_some(false),
                },
                source,
                target,
                surjective,
                injective,
            })
        }
        Coefficients::Prime(p) => {
            let cycles: Vec<Vec<u32>> = if d == 0 {
                (0..a.dim(0))
                    .map(|i| {
                        let mut v = vec![0; a.dim(0)];
                        v[i] = 1;
                        v
                    })
                    .collect()
            } else {
                kernel_basis_mod_p(&a.boundary_matrix(d), p)
            };
            let mut red = ModpReducer::new(p, nb);
            let mut buf = Vec::new();
            let to_col = |buf: &mut Vec<(u32, i64)>| -> (Vec<u32>, Vec<u32>) {
                super::sparse::normalize_column(buf);
                let mut rows = Vec::new();
                let mut vals = Vec::new();
                for &(r, v) in buf.iter() {
                    let v = v.rem_euclid(p as i64);
                    if v != 0 {
                        rows.push(r);
                        vals.push(v as u32);
                    }
                }
                (rows, vals)
            };
            for j in 0..b_next.cols() {
                buf.clear();
                buf.extend(b_next.column(j));
                let (r, v) = to_col(&mut buf);
                red.push(r, v);
            }
            let boundary_rank = red.rank();
            for z in &cycles {
                buf.clear();
                for (i, &c) in z.iter().enumerate() {
                    if c != 0 {
                        buf.extend(fd.column(i).map(|(r, v)| (r, v.rem_euclid(p as i64) * c as i64)));
                    }
                }
                let (r, v) = to_col(&mut buf);
                red.push(r, v);
            }
            let image_rank = red.rank() - boundary_rank;
            let surjective = image_rank == target.betti;
            let injective = image_rank == source.betti;
            Ok(InducedMap {
                degree: d,
                coefficients: coeff,
                source,
                target,
                surjective,
                injective: Some(injective),
                isomorphism: Some(surjective && injective),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::ChainComplex;

    fn circle(n: usize) -> ChainComplex {
        // n-gon: vertex i, edge i from i to i+1
        let d1 = SparseMatrix::from_columns(n, (0..n).map(|i| vec![(i as u32, -1), (((i + 1) % n) as u32, 1)]).collect());
        let d2 = SparseMatrix::zeros(n, 0);
        ChainComplex::new(vec![n, n, 0], vec![d1, d2], false).unwrap()
    }

    /// The degree-k map of a 3-gon to itself: vertex i -> k*i, edges wrapped
    /// so each edge maps to a path of length k.
    fn wrap(k: usize) -> ChainMap {
        let n = 3;
        let f0 = SparseMatrix::from_columns(n, (0..n).map(|i| vec![(((k * i) % n) as u32, 1)]).collect());
        let f1 = SparseMatrix::from_columns(n, (0..n).map(|i| (0..k).map(|s| (((k * i + s) % n) as u32, 1)).collect()).collect());
        ChainMap {
            maps: vec![f0, f1, SparseMatrix::zeros(0, 0)],
        }
    }

    #[test]
    fn kernel_bases() {
        let a = SparseMatrix::from_dense(2, 3, &[1, 1, 0, 0, 2, 2]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 1);
        let v: Vec<i64> = k.column(0).iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(v == vec![1, -1, 1] || v == vec![-1, 1, -1]);
        let k2 = kernel_basis_mod_p(&a, 2);
        assert_eq!(k2.len(), 2);
    }

    #[test]
    fn identity_and_degree_maps_on_a_circle() {
        let c = circle(3);
        let id = wrap(1);
        let m = induced_map(&id, &c, &c, 1, Coefficients::Integers).unwrap();
        assert_eq!(m.isomorphism, Some(true));
        let double = wrap(2);
        let m = induced_map(&double, &c, &c, 1, Coefficients::Integers).unwrap();
        assert!(!m.surjective);
        assert_eq!(m.isomorphism, Some(false));
        // multiplication by 2 is an isomorphism mod 3, zero mod 2
        assert_eq!(induced_map(&double, &c, &c, 1, Coefficients::Prime(3)).unwrap().isomorphism, Some(true));
        assert_eq!(induced_map(&double, &c, &c, 1, Coefficients::Prime(2)).unwrap().isomorphism, Some(false));
        let h0 = induced_map(&double, &c, &c, 0, Coefficients::Integers).unwrap();
        assert_eq!(h0.isomorphism, Some(true));
    }
}
