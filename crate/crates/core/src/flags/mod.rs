//! Splittable flags in `R^n`, the Tits complex of proper summands, the
//! Steinberg module with its `GL_n(R)` action, and the equivariant
//! homology of the flag poset relative to its non-trivial part.

mod steinberg;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::caps::Caps;
use crate::category::{action_category, order_complex, FinCategory, GroupAction, GroupTable, Nerve, Poset, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology::{homology, Coefficients, HomologyResult};
use crate::ring::{enumerate_gl, enumerate_summands, summand_count, MatrixGroup, Ring, Summand};

pub use steinberg::{steinberg, steinberg_coinvariants, AbelianGroup, SteinbergData};

/// The proper non-zero summands of `R^n` and the splittable flags built
/// from them.
///
/// Summands are sorted by rank and then by canonical basis. A flag is a
/// strictly increasing chain of summand indices (index order refines rank
/// order, so sorted indices are chain order); index 0 is the trivial
/// flag `0 ⊂ R^n`, followed by the other flags by length and then
/// lexicographically.
pub struct FlagSpace {
    ring: Ring,
    n: usize,
    summands: Vec<Summand>,
    summand_index: HashMap<Summand, u32>,
    /// `below[a * s + b]`: summand `a` is strictly inside summand `b`
    below: Vec<bool>,
    flags: Vec<Vec<u32>>,
    flag_index: HashMap<Vec<u32>, u32>,
}

impl FlagSpace {
    pub fn new(ring: &Ring, n: usize, caps: &Caps) -> Result<FlagSpace> {
        if n == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        let expected: u128 = (1..n).map(|k| summand_count(ring, n, k)).sum();
        if expected > caps.summands as u128 {
            return Err(Error::cap(format!("summands of {ring}^{n}"), expected.min(u64::MAX as u128) as u64, caps.summands));
        }
        let mut summands = Vec::with_capacity(expected as usize);
        for k in 1..n {
            summands.extend(enumerate_summands(ring, n, k, caps)?);
        }
        let s = summands.len();
        let summand_index = summands.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let below: Vec<bool> = (0..s * s)
            .into_par_iter()
            .map(|k| {
                let (a, b) = (&summands[k / s], &summands[k % s]);
                a.rank() < b.rank() && b.contains(ring, a)
            })
            .collect();
        let above: Vec<Vec<u32>> = (0..s)
            .map(|a| (0..s).filter(|&b| below[a * s + b]).map(|b| b as u32).collect())
            .collect();
        let mut flags: Vec<Vec<u32>> = vec![Vec::new()];
        let mut level: Vec<Vec<u32>> = (0..s as u32).map(|a| vec![a]).collect();
        while !level.is_empty() {
            if (flags.len() + level.len()) as u64 > caps.flags {
                return Err(Error::cap(format!("flags of {ring}^{n}"), (flags.len() + level.len()) as u64, caps.flags));
            }
            let mut next = Vec::new();
            for f in &level {
                for &b in &above[*f.last().unwrap() as usize] {
                    let mut g = f.clone();
                    g.push(b);
                    next.push(g);
                }
            }
            flags.append(&mut level);
            level = next;
        }
        let flag_index = flags.iter().enumerate().map(|(i, f)| (f.clone(), i as u32)).collect();
        Ok(FlagSpace {
            ring: ring.clone(),
            n,
            summands,
            summand_index,
            below,
            flags,
            flag_index,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn summand_index(&self, s: &Summand) -> Option<u32> {
        self.summand_index.get(s).copied()
    }

    /// Summand `a` is strictly contained in summand `b`.
    pub fn strictly_below(&self, a: u32, b: u32) -> bool {
        self.below[a as usize * self.summands.len() + b as usize]
    }

    pub fn num_flags(&self) -> usize {
        self.flags.len()
    }

    pub fn flags(&self) -> &[Vec<u32>] {
        &self.flags
    }

    pub fn flag(&self, f: u32) -> &[u32] {
        &self.flags[f as usize]
    }

    pub fn flag_index(&self, chain: &[u32]) -> Option<u32> {
        self.flag_index.get(chain).copied()
    }

    pub const TRIVIAL: u32 = 0;

    /// `f <= g` in the refinement order: every summand of `g` occurs in `f`.
    pub fn refines(&self, f: u32, g: u32) -> bool {
        let (f, g) = (self.flag(f), self.flag(g));
        g.iter().all(|x| f.binary_search(x).is_ok())
    }

    /// Ranks of the successive quotients `M_1, M_2/M_1, ..., R^n/M_k`.
    pub fn graded_ranks(&self, f: u32) -> Vec<usize> {
        let mut prev = 0;
        let mut out = Vec::new();
        for &s in self.flag(f) {
            let r = self.summands[s as usize].rank();
            out.push(r - prev);
            prev = r;
        }
        out.push(self.n - prev);
        out
    }

    pub fn summand_label(&self, s: u32) -> String {
        let b = self.summands[s as usize].basis();
        let rows: Vec<String> = (0..b.rows())
            .map(|i| b.row(i).iter().map(|&x| self.ring.format_elem(x)).collect::<Vec<_>>().join(" "))
            .collect();
        format!("<{}>", rows.join("; "))
    }

    pub fn flag_label(&self, f: u32) -> String {
        let mut parts = vec!["0".to_string()];
        parts.extend(self.flag(f).iter().map(|&s| self.summand_label(s)));
        parts.push("M".to_string());
        parts.join(" < ")
    }

    /// The proper non-zero summands ordered by inclusion.
    pub fn summand_poset(&self) -> Result<Poset> {
        let s = self.summands.len();
        let labels = (0..s as u32).map(|i| self.summand_label(i)).collect();
        Poset::new(labels, self.below.clone())
    }

    /// Image of a flag under a summand permutation that preserves ranks.
    fn map_flag(&self, f: u32, on_summands: &[u32]) -> u32 {
        let mut image: Vec<u32> = self.flag(f).iter().map(|&s| on_summands[s as usize]).collect();
        image.sort_unstable();
        self.flag_index[&image]
    }

    /// `GL_n(R)` with its action tables on summands and flags.
    pub fn gl_action(&self, caps: &Caps) -> Result<GlAction> {
        let group = enumerate_gl(&self.ring, self.n, caps)?;
        let summand_act: Vec<Vec<u32>> = group
            .elements()
            .par_iter()
            .map(|g| {
                let gt = g.transpose();
                self.summands
                    .iter()
                    .map(|m| self.summand_index[&m.act_transposed(&self.ring, &gt)])
                    .collect()
            })
            .collect();
        let flag_act = summand_act
            .par_iter()
            .map(|sa| (0..self.flags.len() as u32).map(|f| self.map_flag(f, sa)).collect())
            .collect();
        Ok(GlAction {
            group,
            summand_act,
            flag_act,
        })
    }
}

/// `GL_n(R)` acting on the summands and flags of a [`FlagSpace`].
pub struct GlAction {
    pub group: MatrixGroup,
    /// `summand_act[g][s]` is the index of `g·s`
    pub summand_act: Vec<Vec<u32>>,
    /// `flag_act[g][f]` is the index of `g·f`
    pub flag_act: Vec<Vec<u32>>,
}

/// The poset of splittable flags under refinement, optionally with the
/// trivial flag (its maximum). Returns the poset and the flag index of each
/// element.
pub fn flag_poset(space: &FlagSpace, include_trivial: bool) -> Result<(Poset, Vec<u32>)> {
    let ids: Vec<u32> = (0..space.num_flags() as u32)
        .filter(|&f| include_trivial || f != FlagSpace::TRIVIAL)
        .collect();
    let labels = ids.iter().map(|&f| space.flag_label(f)).collect();
    let k = ids.len();
    let less = (0..k * k)
        .into_par_iter()
        .map(|x| {
            let (a, b) = (ids[x / k], ids[x % k]);
            a != b && space.refines(a, b)
        })
        .collect();
    Ok((Poset::new(labels, less)?, ids))
}

/// The order complex of the proper non-zero summands of `R^n` (empty for
/// `n = 1`). Vertex `i` is summand `i` of the flag space.
pub fn tits_complex(space: &FlagSpace, caps: &Caps) -> Result<SimplicialComplex> {
    order_complex(&space.summand_poset()?, caps)
}

/// Reduced homology of the Tits complex.
pub fn tits_homology(space: &FlagSpace, coeff: Coefficients, caps: &Caps) -> Result<HomologyResult> {
    let k = tits_complex(space, caps)?;
    Ok(homology(&k.chain_complex(), coeff)?.to_reduced())
}

/// Whether reduced homology is free and concentrated in degree `n - 2`.
pub fn is_concentrated(h: &HomologyResult, n: usize) -> bool {
    h.is_free() && h.support().iter().all(|&d| d == n as i64 - 2)
}

/// Homology of the action category of `GL_n(R)` on all flags relative to
/// the full subcategory of non-trivial flags, through degree `top` (exact
/// below `top`).
pub fn borel_pair_homology(ring: &Ring, n: usize, coeff: Coefficients, top: usize, caps: &Caps) -> Result<HomologyResult> {
    let (skel, upper) = borel_pair(ring, n, caps)?;
    homology(&Nerve::relative(&skel, &upper, top, caps)?, coeff)
}

/// A skeleton of the action category of `GL_n(R)` on all flags, and which
/// of its objects is the trivial flag. Equivalent categories have homotopy
/// equivalent nerves, and the trivial flag forms its own isomorphism
/// class, so the pair survives passing to the skeleton.
pub fn borel_pair(ring: &Ring, n: usize, caps: &Caps) -> Result<(FinCategory, Vec<bool>)> {
    let space = FlagSpace::new(ring, n, caps)?;
    let action = space.gl_action(caps)?;
    pair_category(&space, &action.group, &action.flag_act, caps)
}

/// The same pair with the trivial group acting: the flag poset with its
/// maximum relative to the poset without it.
pub fn flag_pair_homology(ring: &Ring, n: usize, coeff: Coefficients, top: usize, caps: &Caps) -> Result<HomologyResult> {
    let space = FlagSpace::new(ring, n, caps)?;
    let identity = vec![(0..space.num_flags() as u32).collect()];
    let (skel, upper) = pair_category(&space, &GroupTable::cyclic(1), &identity, caps)?;
    homology(&Nerve::relative(&skel, &upper, top, caps)?, coeff)
}

fn pair_category<G: GroupAction + ?Sized>(
    space: &FlagSpace,
    group: &G,
    flag_act: &[Vec<u32>],
    caps: &Caps,
) -> Result<(FinCategory, Vec<bool>)> {
    let (poset, ids) = flag_poset(space, true)?;
    let act: Vec<Vec<u32>> = flag_act
        .iter()
        .map(|p| ids.iter().map(|&f| p[f as usize]).collect())
        .collect();
    let cat = action_category(group, &poset, &act, caps)?;
    let (skel, parent) = cat.skeleton(caps)?;
    let trivial = ids.iter().position(|&f| f == FlagSpace::TRIVIAL).expect("trivial flag is included") as u32;
    let upper: Vec<bool> = (0..skel.num_objects() as u32)
        .map(|x| cat.source(parent[skel.identity(x) as usize]) == trivial)
        .collect();
    Ok((skel, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{nerve_truncated, Poset};
    use crate::ring::Matrix;

    fn space(ring: &str, n: usize) -> FlagSpace {
        FlagSpace::new(&Ring::parse(ring).unwrap(), n, &Caps::default()).unwrap()
    }

    #[test]
    fn flag_counts() {
        let s = space("F2", 2);
        assert_eq!(flag_poset(&s, false).unwrap().0.len(), 3);
        let (p, _) = flag_poset(&s, true).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.maximum(), Some(0));
        let s = space("F2", 3);
        let (p, ids) = flag_poset(&s, false).unwrap();
        assert_eq!(p.len(), 35);
        let lengths: Vec<usize> = ids.iter().map(|&f| s.flag(f).len()).collect();
        assert_eq!(lengths.iter().filter(|&&l| l == 1).count(), 14);
        assert_eq!(lengths.iter().filter(|&&l| l == 2).count(), 21);
        assert_eq!(space("F3", 2).num_flags(), 5);
        assert_eq!(space("F5", 1).num_flags(), 1);
    }

    /// Oracle for the two-step flags of F_2^3: pairs (line, plane) with the
    /// line's vector in the plane, using bitmask vectors.
    #[test]
    fn incident_pairs_in_f2_cubed() {
        let mut pairs = 0;
        for v in 1u32..8 {
            // a plane is the kernel of a non-zero functional w
            for w in 1u32..8 {
                if (v & w).count_ones() % 2 == 0 {
                    pairs += 1;
                }
            }
        }
        assert_eq!(pairs, 21);
    }

    #[test]
    fn refinement_order() {
        let s = space("F2", 3);
        for f in 0..s.num_flags() as u32 {
            assert!(s.refines(f, FlagSpace::TRIVIAL));
            if f != FlagSpace::TRIVIAL {
                assert!(!s.refines(FlagSpace::TRIVIAL, f));
            }
        }
        let full = (0..s.num_flags() as u32).find(|&f| s.flag(f).len() == 2).unwrap();
        let parts = s.flag(full).to_vec();
        assert!(s.refines(full, s.flag_index(&parts[..1]).unwrap()));
        assert!(s.refines(full, s.flag_index(&parts[1..]).unwrap()));
    }

    #[test]
    fn graded_ranks_sum_to_n() {
        let s = space("Z4", 3);
        for f in 0..s.num_flags() as u32 {
            let g = s.graded_ranks(f);
            assert_eq!(g.iter().sum::<usize>(), 3);
            assert!(g.iter().all(|&r| r > 0));
        }
        assert_eq!(s.graded_ranks(FlagSpace::TRIVIAL), vec![3]);
    }

    #[test]
    fn tits_examples() {
        let caps = Caps::default();
        let s = space("F3", 2);
        let k = tits_complex(&s, &caps).unwrap();
        assert_eq!((k.count(0), k.count(1)), (4, 0));
        let h = tits_homology(&s, Coefficients::Integers, &caps).unwrap();
        assert_eq!(h.betti(0), 3);
        assert!(is_concentrated(&h, 2));

        let s = space("F2", 3);
        let k = tits_complex(&s, &caps).unwrap();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (14, 21, 0));
        let h = tits_homology(&s, Coefficients::Integers, &caps).unwrap();
        assert_eq!((h.betti(0), h.betti(1)), (0, 8));
        assert!(is_concentrated(&h, 3));

        let s = space("Z4", 2);
        let k = tits_complex(&s, &caps).unwrap();
        assert_eq!((k.count(0), k.count(1)), (6, 0));
        assert!(is_concentrated(&tits_homology(&s, Coefficients::Integers, &caps).unwrap(), 2));

        let s = space("F2", 1);
        let h = tits_homology(&s, Coefficients::Integers, &caps).unwrap();
        assert_eq!(h.support(), vec![-1]);
        assert_eq!(h.betti(-1), 1);
    }

    /// Oracle: lines of R^2 as unimodular vectors up to units.
    #[test]
    fn six_lines_over_z4() {
        let r = Ring::parse("Z4").unwrap();
        let unimodular = (0..4u32)
            .flat_map(|a| (0..4u32).map(move |b| (a, b)))
            .filter(|&(a, b)| a % 2 == 1 || b % 2 == 1)
            .count();
        assert_eq!(unimodular, 12);
        assert_eq!(unimodular / r.units().len(), 6);
        assert_eq!(space("Z4", 2).summands().len(), 6);
    }

    #[test]
    fn flag_poset_with_maximum_is_contractible() {
        let s = space("F2", 3);
        let (p, _) = flag_poset(&s, true).unwrap();
        let h = homology(&order_complex(&p, &Caps::default()).unwrap().chain_complex(), Coefficients::Integers).unwrap();
        assert_eq!(h.support(), vec![0]);
        assert_eq!(h.betti(0), 1);
    }

    #[test]
    fn gl_acts_by_poset_automorphisms() {
        let s = space("F2", 3);
        let a = s.gl_action(&Caps::default()).unwrap();
        assert_eq!(a.group.order(), 168);
        let nf = s.num_flags();
        for (g, fa) in a.flag_act.iter().enumerate() {
            assert_eq!(fa[0], FlagSpace::TRIVIAL);
            let mut seen = vec![false; nf];
            for &y in fa {
                seen[y as usize] = true;
            }
            assert!(seen.iter().all(|&b| b), "element {g} permutes flags");
            for x in 0..nf as u32 {
                for y in 0..nf as u32 {
                    assert_eq!(s.refines(x, y), s.refines(fa[x as usize], fa[y as usize]));
                }
            }
        }
        // action law
        let ord = a.group.order() as u32;
        for g in (0..ord).step_by(7) {
            for h in (0..ord).step_by(5) {
                let gh = a.group.mul(g, h) as usize;
                for x in 0..s.summands().len() {
                    assert_eq!(a.summand_act[gh][x], a.summand_act[g as usize][a.summand_act[h as usize][x] as usize]);
                }
            }
        }
    }

    #[test]
    fn gl_is_transitive_on_summands_of_each_rank() {
        for (ring, n) in [("F2", 3), ("F3", 2), ("Z4", 2)] {
            let s = space(ring, n);
            let a = s.gl_action(&Caps::default()).unwrap();
            for k in 1..n {
                let first = s.summands().iter().position(|m| m.rank() == k).unwrap();
                let orbit: std::collections::BTreeSet<u32> = a.summand_act.iter().map(|sa| sa[first]).collect();
                assert_eq!(orbit.len(), s.summands().iter().filter(|m| m.rank() == k).count());
            }
        }
    }

    #[test]
    fn acting_by_a_permutation_matrix() {
        let r = Ring::parse("F2").unwrap();
        let s = FlagSpace::new(&r, 2, &Caps::default()).unwrap();
        let a = s.gl_action(&Caps::default()).unwrap();
        let swap = Matrix::from_ints(&r, 2, 2, &[0, 1, 1, 0]);
        let g = a.group.index_of(&swap).unwrap();
        let e1 = Summand::standard(&r, 2, 1);
        let i = s.summand_index(&e1).unwrap();
        let j = a.summand_act[g as usize][i as usize];
        let e2 = canonical(&r, &[0, 1]);
        assert_eq!(s.summands()[j as usize], e2);
    }

    fn canonical(r: &Ring, v: &[i64]) -> Summand {
        crate::ring::canonical_summand(r, &Matrix::from_ints(r, 1, v.len(), v)).unwrap()
    }

    #[test]
    fn borel_pair_with_trivial_group_is_a_suspension() {
        let r = Ring::parse("F2").unwrap();
        let h = flag_pair_homology(&r, 2, Coefficients::Integers, 3, &Caps::default()).unwrap();
        assert_eq!(h.betti(1), 2);
        assert!(h.vanishes_in(0) && h.vanishes_in(2));
    }

    #[test]
    fn borel_pair_bottom_degree_over_f2_squared() {
        let r = Ring::parse("F2").unwrap();
        let h = borel_pair_homology(&r, 2, Coefficients::Integers, 3, &Caps::default()).unwrap();
        assert!(h.vanishes_in(0));
        assert!(h.vanishes_in(1));
    }

    #[test]
    fn summand_poset_nerve_agrees_with_order_complex() {
        let s = space("F3", 2);
        let p: Poset = s.summand_poset().unwrap();
        let c = p.to_category(&Caps::default()).unwrap();
        let h = homology(&nerve_truncated(&c, 2, &Caps::default()).unwrap(), Coefficients::Integers).unwrap();
        assert_eq!(h.betti(0), 4);
    }
}
