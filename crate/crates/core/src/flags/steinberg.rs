use std::fmt;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{tits_complex, FlagSpace, GlAction};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::homology::{
    homology, invariant_factors, kernel_basis, kernel_basis_mod_p, smith_normal_form, Coefficients, HomologyResult,
    IntMatrix, ModpReducer, SparseMatrix,
};
use crate::ring::Ring;

/// `Z^rank ⊕ ⊕ Z/t`, or an `F_p` vector space of dimension `rank`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub coefficients: Coefficients,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.coefficients {
            Coefficients::Integers => "Z".to_string(),
            Coefficients::Prime(p) => format!("F{p}"),
        };
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push(base),
            r => parts.push(format!("{base}^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Top homology of the Tits complex of `R^n` with its `GL_n(R)` action.
///
/// The cycles of degree `n - 2` are the whole top homology (there are no
/// boundaries above the top). `basis` holds cycle coordinates over the top
/// simplices; `action[g][j] = (k, s)` says `g` sends simplex `j` to `s`
/// times simplex `k`.
pub struct SteinbergData {
    pub ring: String,
    pub rank: usize,
    pub coefficients: Coefficients,
    /// Reduced homology of the Tits complex in every degree.
    pub homology: HomologyResult,
    pub concentrated: bool,
    pub simplices: Vec<Vec<u32>>,
    pub basis: Vec<Vec<i64>>,
    pub action: Vec<Vec<(u32, i8)>>,
    left_inverse: Vec<Vec<i64>>,
    gl: GlAction,
}

pub fn steinberg(ring: &Ring, n: usize, coeff: Coefficients, caps: &Caps) -> Result<SteinbergData> {
    if n < 2 {
        return Err(Error::InvalidArgument("the Steinberg module needs rank at least 2".into()));
    }
    let space = FlagSpace::new(ring, n, caps)?;
    let complex = tits_complex(&space, caps)?;
    let reduced = homology(&complex.chain_complex(), coeff)?.to_reduced();
    let top = n - 2;
    let simplices = complex.simplices(top).to_vec();
    let boundary = if top == 0 {
        SparseMatrix::from_columns(1, (0..simplices.len()).map(|_| vec![(0, 1)]).collect())
    } else {
        complex.chain_complex().boundary(top).clone()
    };
    let (basis, left_inverse) = match coeff {
        Coefficients::Integers => integral_basis(&boundary)?,
        Coefficients::Prime(p) => {
            let k: Vec<Vec<i64>> = kernel_basis_mod_p(&boundary, p)
                .into_iter()
                .map(|v| v.into_iter().map(|x| x as i64).collect())
                .collect();
            let l = left_inverse_mod_p(&k, simplices.len(), p)?;
            (k, l)
        }
    };
    if basis.len() != reduced.betti(top as i64) {
        return Err(Error::InvalidComplex("cycle basis disagrees with the homology rank".into()));
    }
    let gl = space.gl_action(caps)?;
    let action = gl
        .summand_act
        .par_iter()
        .map(|sa| {
            simplices
                .iter()
                .map(|s| {
                    let mut image: Vec<u32> = s.iter().map(|&v| sa[v as usize]).collect();
                    let sign = sort_with_sign(&mut image);
                    let k = simplices.binary_search(&image).expect("automorphisms permute simplices");
                    (k as u32, sign)
                })
                .collect()
        })
        .collect();
    Ok(SteinbergData {
        ring: ring.to_string(),
        rank: n,
        coefficients: coeff,
        concentrated: super::is_concentrated(&reduced, n),
        homology: reduced,
        simplices,
        basis,
        action,
        left_inverse,
        gl,
    })
}

fn sort_with_sign(v: &mut [u32]) -> i8 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// Kernel basis over `Z` and a left inverse of it, from the Smith form of
/// the basis matrix `K = U⁻¹ [I; 0] V⁻¹`.
fn integral_basis(boundary: &SparseMatrix) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let k = kernel_basis(boundary);
    let (rows, r) = (k.rows(), k.cols());
    let s = smith_normal_form(&k);
    if s.invariants().len() != r || s.invariants().iter().any(|x| x != &1.into()) {
        return Err(Error::InvalidComplex("cycle lattice is not saturated".into()));
    }
    let mut u_top = IntMatrix::zeros(r, rows);
    for i in 0..r {
        for j in 0..rows {
            u_top.set(i, j, s.u.get(i, j).clone());
        }
    }
    let l = s.v.mul(&u_top);
    let too_big = || Error::InvalidComplex("Steinberg basis coefficients exceed 64 bits".into());
    let basis = (0..r)
        .map(|c| k.column(c).iter().map(|x| x.to_i64().ok_or_else(too_big)).collect())
        .collect::<Result<_>>()?;
    let left = (0..r)
        .map(|i| (0..rows).map(|j| l.get(i, j).to_i64().ok_or_else(too_big)).collect())
        .collect::<Result<_>>()?;
    Ok((basis, left))
}

fn inv_mod(a: i64, p: i64) -> i64 {
    let (mut r, mut b, mut e) = (1i64, a.rem_euclid(p), p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// `L` with `L K = I` for linearly independent columns `basis` of length
/// `rows`, by reducing `[K | I]` to `[I; 0 | E]` and keeping the top of `E`.
fn left_inverse_mod_p(basis: &[Vec<i64>], rows: usize, p: u32) -> Result<Vec<Vec<i64>>> {
    let p = p as i64;
    let r = basis.len();
    let width = r + rows;
    let mut m: Vec<Vec<i64>> = (0..rows)
        .map(|i| {
            let mut row = vec![0; width];
            for c in 0..r {
                row[c] = basis[c][i].rem_euclid(p);
            }
            row[r + i] = 1;
            row
        })
        .collect();
    for c in 0..r {
        let piv = (c..rows)
            .find(|&i| m[i][c] != 0)
            .ok_or_else(|| Error::InvalidComplex("cycle basis is not independent".into()))?;
        m.swap(c, piv);
        let s = inv_mod(m[c][c], p);
        for x in m[c].iter_mut() {
            *x = *x * s % p;
        }
        let pivot_row = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != c && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x - f * y).rem_euclid(p);
                }
            }
        }
    }
    Ok(m[..r].iter().map(|row| row[r..].to_vec()).collect())
}

impl SteinbergData {
    /// Dimension (rank) of the module.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn gl(&self) -> &GlAction {
        &self.gl
    }

    pub fn group_order(&self) -> usize {
        self.gl.group.order()
    }

    /// `g·K` where `K` is the basis matrix: simplex coordinates of the
    /// images of the basis cycles.
    fn moved_basis(&self, g: u32) -> Vec<Vec<i64>> {
        let perm = &self.action[g as usize];
        self.basis
            .iter()
            .map(|col| {
                let mut out = vec![0i64; col.len()];
                for (j, &x) in col.iter().enumerate() {
                    if x != 0 {
                        let (k, s) = perm[j];
                        out[k as usize] = x * s as i64;
                    }
                }
                out
            })
            .collect()
    }

    fn reduce(&self, x: i128) -> Result<i64> {
        match self.coefficients {
            Coefficients::Integers => {
                i64::try_from(x).map_err(|_| Error::InvalidComplex("action matrix entry exceeds 64 bits".into()))
            }
            Coefficients::Prime(p) => Ok(x.rem_euclid(p as i128) as i64),
        }
    }

    /// Matrix of `g` on the basis, row-major: column `c` holds the
    /// coordinates of `g` applied to basis cycle `c`. Checks that the image
    /// is reproduced exactly by the basis.
    pub fn action_matrix(&self, g: u32) -> Result<Vec<Vec<i64>>> {
        let r = self.dim();
        let moved = self.moved_basis(g);
        let mut rho = vec![vec![0i64; r]; r];
        for (c, col) in moved.iter().enumerate() {
            for (i, row) in self.left_inverse.iter().enumerate() {
                let acc: i128 = row.iter().zip(col).map(|(&a, &b)| a as i128 * b as i128).sum();
                rho[i][c] = self.reduce(acc)?;
            }
        }
        for (c, col) in moved.iter().enumerate() {
            for (j, &target) in col.iter().enumerate() {
                let acc: i128 = (0..r).map(|i| self.basis[i][j] as i128 * rho[i][c] as i128).sum();
                if self.reduce(acc - target as i128)? != 0 {
                    return Err(Error::InvalidComplex(format!("group element {g} does not preserve the cycles")));
                }
            }
        }
        Ok(rho)
    }

    /// Checks `ρ(g)ρ(h) = ρ(gh)` on all pairs, or on a deterministic sample
    /// of about `max_pairs` pairs.
    pub fn check_representation(&self, max_pairs: usize) -> Result<bool> {
        let order = self.group_order() as u32;
        let mats: Vec<Vec<Vec<i64>>> = (0..order).into_par_iter().map(|g| self.action_matrix(g)).collect::<Result<_>>()?;
        let total = order as usize * order as usize;
        let step = total.div_ceil(max_pairs.max(1)).max(1);
        let r = self.dim();
        let ok = (0..total).into_par_iter().step_by(step).try_fold(
            || true,
            |acc, k| -> Result<bool> {
                let (g, h) = ((k / order as usize) as u32, (k % order as usize) as u32);
                let gh = self.gl.group.mul(g, h) as usize;
                let (a, b) = (&mats[g as usize], &mats[h as usize]);
                for i in 0..r {
                    for j in 0..r {
                        let v: i128 = (0..r).map(|t| a[i][t] as i128 * b[t][j] as i128).sum();
                        if self.reduce(v)? != mats[gh][i][j] {
                            return Ok(false);
                        }
                    }
                }
                Ok(acc)
            },
        );
        ok.try_reduce(|| true, |a, b| Ok(a && b))
    }

    /// A generating set: all elements for small groups, otherwise a greedy
    /// set where each element is outside the span of the earlier ones.
    pub fn generators(&self) -> Vec<u32> {
        let group = &self.gl.group;
        let order = group.order();
        if order <= 2048 {
            return (0..order as u32).collect();
        }
        let mut inside = vec![false; order];
        inside[group.identity() as usize] = true;
        let mut elems = vec![group.identity()];
        let mut gens = Vec::new();
        for g in 0..order as u32 {
            if inside[g as usize] {
                continue;
            }
            gens.push(g);
            let mut frontier = elems.clone();
            while let Some(x) = frontier.pop() {
                for &s in &gens {
                    let y = group.mul(x, s);
                    if !inside[y as usize] {
                        inside[y as usize] = true;
                        elems.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }

    /// The module modulo the span of `x - g·x` for `g` in `gens`.
    pub fn coinvariants_under(&self, gens: &[u32]) -> Result<AbelianGroup> {
        let r = self.dim();
        let mats: Vec<Vec<Vec<i64>>> = gens.par_iter().map(|&g| self.action_matrix(g)).collect::<Result<_>>()?;
        let columns: Vec<Vec<(u32, i64)>> = mats
            .iter()
            .flat_map(|m| {
                (0..r).map(move |c| {
                    (0..r)
                        .map(|i| (i as u32, m[i][c] - (i == c) as i64))
                        .filter(|&(_, v)| v != 0)
                        .collect()
                })
            })
            .collect();
        match self.coefficients {
            Coefficients::Integers => {
                let inv = invariant_factors(&SparseMatrix::from_columns(r, columns))?;
                let torsion = inv
                    .iter()
                    .filter(|x| !(*x == &1.into()))
                    .map(|x| x.to_u64().filter(|_| !x.is_zero()).ok_or_else(|| Error::InvalidComplex("torsion exceeds 64 bits".into())))
                    .collect::<Result<_>>()?;
                Ok(AbelianGroup {
                    coefficients: self.coefficients,
                    rank: r - inv.len(),
                    torsion,
                })
            }
            Coefficients::Prime(p) => {
                let mut red = ModpReducer::new(p, r);
                for col in columns {
                    let (rows, vals): (Vec<u32>, Vec<u32>) = col
                        .into_iter()
                        .map(|(i, v)| (i, v.rem_euclid(p as i64) as u32))
                        .filter(|&(_, v)| v != 0)
                        .unzip();
                    red.push(rows, vals);
                }
                Ok(AbelianGroup {
                    coefficients: self.coefficients,
                    rank: r - red.rank(),
                    torsion: Vec::new(),
                })
            }
        }
    }

    pub fn coinvariants(&self) -> Result<AbelianGroup> {
        self.coinvariants_under(&self.generators())
    }
}

/// `St(R^n)` modulo the span of `x - g·x` over all `g ∈ GL_n(R)`.
pub fn steinberg_coinvariants(ring: &Ring, n: usize, coeff: Coefficients, caps: &Caps) -> Result<AbelianGroup> {
    steinberg(ring, n, coeff, caps)?.coinvariants()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(ring: &str, n: usize, coeff: Coefficients) -> SteinbergData {
        steinberg(&Ring::parse(ring).unwrap(), n, coeff, &Caps::default()).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(st("F2", 2, Coefficients::Integers).dim(), 2);
        assert_eq!(st("F2", 3, Coefficients::Integers).dim(), 8);
        assert_eq!(st("F3", 2, Coefficients::Integers).dim(), 3);
        assert_eq!(st("F2", 3, Coefficients::Prime(2)).dim(), 8);
        assert!(st("F2", 3, Coefficients::Integers).concentrated);
    }

    #[test]
    fn action_is_a_representation() {
        for (ring, n, c) in [
            ("F2", 2, Coefficients::Integers),
            ("F3", 2, Coefficients::Integers),
            ("F2", 3, Coefficients::Integers),
            ("F2", 3, Coefficients::Prime(3)),
            ("Z4", 2, Coefficients::Prime(2)),
        ] {
            let s = st(ring, n, c);
            assert!(s.check_representation(5000).unwrap(), "{ring} {n} {c}");
            let id = s.gl().group.identity();
            let rho = s.action_matrix(id).unwrap();
            for (i, row) in rho.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    assert_eq!(x, (i == j) as i64);
                }
            }
        }
    }

    /// Oracle: reduced 0-chains of three points with basis `u = e_1 - e_2`,
    /// `v = e_2 - e_3`. The transposition (12) sends `u -> -u, v -> u + v`
    /// and (23) sends `u -> u + v, v -> -v`; the relation matrix has
    /// invariant factors `1, 1`.
    #[test]
    fn three_point_oracle() {
        use crate::homology::invariant_factors_dense;
        // columns x - σx for x in {u, v}
        let rel = IntMatrix::from_i64(2, 4, &[2, -1, 0, 0, 0, 0, -1, 2]);
        let inv = invariant_factors_dense(&rel);
        assert_eq!(inv.len(), 2);
        assert!(inv.iter().all(|x| x == &1.into()));
        let c = steinberg_coinvariants(&Ring::parse("F2").unwrap(), 2, Coefficients::Integers, &Caps::default()).unwrap();
        assert_eq!(c.rank + c.torsion.len(), 2 - inv.len());
    }

    #[test]
    fn coinvariants_vanish_for_small_fields() {
        for (ring, n) in [("F2", 2), ("F3", 2), ("F2", 3)] {
            let c = steinberg_coinvariants(&Ring::parse(ring).unwrap(), n, Coefficients::Integers, &Caps::default()).unwrap();
            assert!(c.is_zero(), "{ring} {n}: {c}");
        }
    }

    #[test]
    fn trivial_action_leaves_the_module() {
        let s = st("F2", 3, Coefficients::Integers);
        let c = s.coinvariants_under(&[s.gl().group.identity()]).unwrap();
        assert_eq!((c.rank, c.torsion.len()), (8, 0));
        assert_eq!(c.to_string(), "Z^8");
    }

    #[test]
    fn coinvariants_of_a_transposition() {
        // the transposition in GL_2(F_2) swaps two of the three lines:
        // Z^2 / (e_1 - e_2) in the basis of differences is Z
        let s = st("F2", 2, Coefficients::Integers);
        let r = Ring::parse("F2").unwrap();
        let swap = crate::ring::Matrix::from_ints(&r, 2, 2, &[0, 1, 1, 0]);
        let g = s.gl().group.index_of(&swap).unwrap();
        let c = s.coinvariants_under(&[g]).unwrap();
        assert_eq!(c.rank, 1);
    }

    #[test]
    fn greedy_generators_generate() {
        let s = st("F2", 2, Coefficients::Integers);
        assert_eq!(s.generators().len(), 6);
        assert_eq!(sort_with_sign(&mut [2, 1, 0]), -1);
        assert_eq!(sort_with_sign(&mut [1, 2, 0]), 1);
    }
}
