use super::{FinCategory, Functor};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::homology::{ChainComplex, ChainMap, ColumnSource, SparseBuilder};

/// The normalized nerve of a finite category, truncated at degree `top`.
///
/// Degree-`d` basis elements are chains `x_0 -f_1-> x_1 -> ... -f_d-> x_d`
/// of non-identity morphisms, ordered lexicographically by source object
/// and then by morphism indices. Chains are ranked and unranked through
/// prefix counts, so no chain list is stored.
pub struct Nerve<'a> {
    cat: &'a FinCategory,
    top: usize,
    truncated: bool,
    /// relative nerves only keep chains ending in these objects
    ending: Option<Vec<bool>>,
    /// per object: non-identity morphisms out of it
    ni_out: Vec<Vec<u32>>,
    /// position of a non-identity morphism inside `ni_out[source]`
    ni_pos: Vec<u32>,
    /// `start[k][x]`: rank of the first k-chain starting at `x`; one extra
    /// entry holds the total
    start: Vec<Vec<u64>>,
    /// `prefix[k][x][i]`: number of k-chains from `x` whose first morphism
    /// precedes `ni_out[x][i]`
    prefix: Vec<Vec<Vec<u64>>>,
}

impl<'a> Nerve<'a> {
    pub fn new(cat: &'a FinCategory, top: usize, caps: &Caps) -> Result<Nerve<'a>> {
        Nerve::build(cat, top, None, caps)
    }

    /// Chains of `N(C) / N(S)` where `S` is the full subcategory on the
    /// objects outside `upper`. No morphism may leave `upper`, so a chain
    /// avoids `S` exactly when it ends in `upper`, and those chains form a
    /// basis of the quotient.
    pub fn relative(cat: &'a FinCategory, upper: &[bool], top: usize, caps: &Caps) -> Result<Nerve<'a>> {
        if upper.len() != cat.num_objects() {
            return Err(Error::InvalidArgument("object mask has the wrong length".into()));
        }
        for f in 0..cat.num_morphisms() as u32 {
            if upper[cat.source(f) as usize] && !upper[cat.target(f) as usize] {
                return Err(Error::InvalidArgument(format!(
                    "morphism {} leaves the upper set",
                    cat.morphism_label(f)
                )));
            }
        }
        Nerve::build(cat, top, Some(upper.to_vec()), caps)
    }

    fn build(cat: &'a FinCategory, top: usize, ending: Option<Vec<bool>>, caps: &Caps) -> Result<Nerve<'a>> {
        let n = cat.num_objects();
        let mut ni_out = vec![Vec::new(); n];
        let mut ni_pos = vec![u32::MAX; cat.num_morphisms()];
        for x in 0..n as u32 {
            for &f in cat.out(x) {
                if !cat.is_identity(f) {
                    ni_pos[f as usize] = ni_out[x as usize].len() as u32;
                    ni_out[x as usize].push(f);
                }
            }
        }
        // count[k][x] for k up to top + 1 (to detect truncation)
        let base: Vec<u64> = match &ending {
            Some(m) => m.iter().map(|&b| b as u64).collect(),
            None => vec![1; n],
        };
        let mut total: u64 = base.iter().sum();
        let mut count: Vec<Vec<u64>> = vec![base];
        let mut prefix: Vec<Vec<Vec<u64>>> = vec![vec![vec![0]; n]];
        for k in 1..=top + 1 {
            let prev = &count[k - 1];
            let mut ck = vec![0u64; n];
            let mut pk = Vec::with_capacity(n);
            for x in 0..n {
                let mut acc = 0u64;
                let mut p = Vec::with_capacity(ni_out[x].len() + 1);
                p.push(0);
                for &f in &ni_out[x] {
                    acc = acc.saturating_add(prev[cat.target(f) as usize]);
                    p.push(acc);
                }
                ck[x] = acc;
                pk.push(p);
            }
            let level: u64 = ck.iter().fold(0u64, |a, &b| a.saturating_add(b));
            if k <= top {
                total = total.saturating_add(level);
                if total > caps.chains || level > u32::MAX as u64 {
                    return Err(Error::cap(format!("nerve chains through degree {k}"), total, caps.chains));
                }
            }
            count.push(ck);
            prefix.push(pk);
        }
        let truncated = count[top + 1].iter().any(|&c| c > 0);
        count.pop();
        prefix.pop();
        let start = count
            .iter()
            .map(|ck| {
                let mut s = Vec::with_capacity(n + 1);
                let mut acc = 0;
                s.push(0);
                for &c in ck {
                    acc += c;
                    s.push(acc);
                }
                s
            })
            .collect();
        Ok(Nerve {
            cat,
            top,
            truncated,
            ending,
            ni_out,
            ni_pos,
            start,
            prefix,
        })
    }

    pub fn category(&self) -> &FinCategory {
        self.cat
    }

    pub fn is_relative(&self) -> bool {
        self.ending.is_some()
    }

    fn keeps_end(&self, x: u32) -> bool {
        self.ending.as_ref().is_none_or(|m| m[x as usize])
    }

    /// The chain with the given rank in degree `d`, as morphism indices.
    /// Degree 0 chains are objects and yield an empty list.
    pub fn unrank(&self, d: usize, j: usize, out: &mut Vec<u32>) -> u32 {
        out.clear();
        let j = j as u64;
        let s = &self.start[d];
        let x = s.partition_point(|&v| v <= j) - 1;
        if d == 0 {
            return x as u32;
        }
        let mut r = j - s[x];
        let mut cur = x;
        for k in (1..=d).rev() {
            let p = &self.prefix[k][cur];
            let i = p.partition_point(|&v| v <= r) - 1;
            r -= p[i];
            let f = self.ni_out[cur][i];
            out.push(f);
            cur = self.cat.target(f) as usize;
        }
        x as u32
    }

    /// Rank of a chain of non-identity morphisms starting at `x`.
    pub fn rank(&self, x: u32, chain: &[u32]) -> usize {
        let k = chain.len();
        let mut r = self.start[k][x as usize];
        let mut cur = x as usize;
        for (i, &f) in chain.iter().enumerate() {
            r += self.prefix[k - i][cur][self.ni_pos[f as usize] as usize];
            cur = self.cat.target(f) as usize;
        }
        r as usize
    }

    /// Chains of degree `d` whose objects all lie in `keep`; `keep` must
    /// describe a full subcategory.
    pub fn chains_within(&self, d: usize, keep: &[bool]) -> Vec<usize> {
        let mut chain = Vec::new();
        (0..self.dim(d))
            .filter(|&j| {
                let x = self.unrank(d, j, &mut chain);
                keep[x as usize] && chain.iter().all(|&f| keep[self.cat.target(f) as usize])
            })
            .collect()
    }
}

impl ColumnSource for Nerve<'_> {
    fn top_degree(&self) -> usize {
        self.top
    }

    fn dim(&self, d: usize) -> usize {
        *self.start[d].last().unwrap() as usize
    }

    fn is_truncated(&self) -> bool {
        self.truncated
    }

    fn boundary_into(&self, d: usize, j: usize, out: &mut Vec<(u32, i64)>) {
        let mut chain = Vec::with_capacity(d);
        let x = self.unrank(d, j, &mut chain);
        let cat = self.cat;
        if d == 1 {
            out.push((self.rank(cat.target(chain[0]), &[]) as u32, 1));
            if self.keeps_end(x) {
                out.push((self.rank(x, &[]) as u32, -1));
            }
            return;
        }
        let mut face = Vec::with_capacity(d - 1);
        // d_0 drops the first morphism
        out.push((self.rank(cat.target(chain[0]), &chain[1..]) as u32, 1));
        for i in 1..d {
            let h = cat.compose(chain[i], chain[i - 1]);
            if cat.is_identity(h) {
                continue;
            }
            face.clear();
            face.extend_from_slice(&chain[..i - 1]);
            face.push(h);
            face.extend_from_slice(&chain[i + 1..]);
            out.push((self.rank(x, &face) as u32, if i % 2 == 0 { 1 } else { -1 }));
        }
        // d_d drops the last morphism
        if self.keeps_end(cat.target(chain[d - 2])) {
            out.push((self.rank(x, &chain[..d - 1]) as u32, if d % 2 == 0 { 1 } else { -1 }));
        }
    }
}

/// The normalized nerve through degree `top`, materialized and checked.
pub fn nerve_truncated(cat: &FinCategory, top: usize, caps: &Caps) -> Result<ChainComplex> {
    ChainComplex::from_source(&Nerve::new(cat, top, caps)?)
}

/// The chain map between normalized nerves induced by a functor. Chains
/// that acquire an identity are degenerate and map to zero.
pub fn functor_chain_map(f: &Functor<'_>, source: &Nerve<'_>, target: &Nerve<'_>) -> Result<ChainMap> {
    if !std::ptr::eq(source.category(), f.source) || !std::ptr::eq(target.category(), f.target) {
        return Err(Error::InvalidFunctor("nerves do not belong to the functor's categories".into()));
    }
    if source.is_relative() || target.is_relative() {
        return Err(Error::InvalidArgument("chain maps between relative nerves are not supported".into()));
    }
    let top = source.top_degree().min(target.top_degree());
    let mut maps = Vec::with_capacity(top + 1);
    let mut chain = Vec::new();
    let mut image = Vec::new();
    for d in 0..=top {
        let mut b = SparseBuilder::new(target.dim(d));
        let mut col = Vec::new();
        for j in 0..source.dim(d) {
            col.clear();
            let x = source.unrank(d, j, &mut chain);
            image.clear();
            image.extend(chain.iter().map(|&g| f.mor_map[g as usize]));
            if !image.iter().any(|&g| f.target.is_identity(g)) {
                col.push((target.rank(f.obj_map[x as usize], &image) as u32, 1));
            }
            b.push_column(&mut col);
        }
        maps.push(b.finish());
    }
    let map = ChainMap { maps };
    map.check(source, target)?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::super::tests::arrow;
    use super::super::GroupTable;
    use super::*;
    use crate::homology::{homology, Coefficients};

    #[test]
    fn rank_and_unrank_are_inverse() {
        let g = FinCategory::from_group(&GroupTable::cyclic(3));
        let nerve = Nerve::new(&g, 3, &Caps::default()).unwrap();
        assert_eq!(nerve.dim(3), 8);
        let mut chain = Vec::new();
        let mut prev: Option<Vec<u32>> = None;
        for j in 0..nerve.dim(3) {
            let x = nerve.unrank(3, j, &mut chain);
            assert_eq!(nerve.rank(x, &chain), j);
            if let Some(p) = &prev {
                assert!(*p < chain, "chains are in lexicographic order");
            }
            prev = Some(chain.clone());
        }
    }

    #[test]
    fn classifying_space_of_z2() {
        // H_d(Z/2; F_2) = F_2 in every degree
        let c = FinCategory::from_group(&GroupTable::cyclic(2));
        let h = homology(&nerve_truncated(&c, 4, &Caps::default()).unwrap(), Coefficients::Prime(2)).unwrap();
        for d in 0..=3 {
            assert_eq!(h.betti(d), 1);
            assert!(h.group(d).unwrap().reliable);
        }
        assert!(!h.group(4).unwrap().reliable);
        // integrally: Z, Z/2, 0, Z/2
        let hz = homology(&nerve_truncated(&c, 4, &Caps::default()).unwrap(), Coefficients::Integers).unwrap();
        assert_eq!(hz.torsion(1), &[2]);
        assert!(hz.group(2).unwrap().is_zero());
        assert_eq!(hz.torsion(3), &[2]);
    }

    #[test]
    fn discrete_and_arrow() {
        let d = FinCategory::discrete(3);
        let h = homology(&nerve_truncated(&d, 2, &Caps::default()).unwrap(), Coefficients::Integers).unwrap();
        assert_eq!(h.betti(0), 3);
        assert!(h.groups.iter().all(|g| g.reliable));
        let a = arrow();
        let c = nerve_truncated(&a, 3, &Caps::default()).unwrap();
        assert_eq!(c.dims(), &[2, 1, 0, 0]);
        let h = homology(&c, Coefficients::Integers).unwrap();
        assert_eq!(h.support(), vec![0]);
        assert_eq!(h.betti(0), 1);
    }

    #[test]
    fn relative_nerve_matches_quotient() {
        use crate::category::Poset;
        use crate::homology::{relative_homology, QuotientComplex};
        // non-empty subsets of {1,2,3}; the full set is the only upper object
        let masks: Vec<u32> = (1..8).collect();
        let p = Poset::from_le(masks.iter().map(|m| format!("{m:03b}")).collect(), |i, j| masks[i] & !masks[j] == 0).unwrap();
        let c = p.to_category(&Caps::default()).unwrap();
        let upper: Vec<bool> = masks.iter().map(|&m| m == 7).collect();
        let rel = Nerve::relative(&c, &upper, 4, &Caps::default()).unwrap();
        let full = Nerve::new(&c, 4, &Caps::default()).unwrap();
        let lower: Vec<bool> = upper.iter().map(|b| !b).collect();
        let sub: Vec<Vec<usize>> = (0..=4).map(|d| full.chains_within(d, &lower)).collect();
        let q = QuotientComplex::new(&full, &sub).unwrap();
        for d in 0..=4 {
            assert_eq!(rel.dim(d), q.dim(d));
        }
        ChainComplex::from_source(&rel).unwrap();
        let a = homology(&rel, Coefficients::Integers).unwrap();
        let b = relative_homology(&full, &sub, Coefficients::Integers).unwrap();
        assert_eq!(a.groups, b.groups);
        // cone on a circle relative to the circle
        assert_eq!(a.support(), vec![2]);
        let wrong: Vec<bool> = upper.iter().map(|b| !b).collect();
        assert!(Nerve::relative(&c, &wrong, 2, &Caps::default()).is_err());
    }

    #[test]
    fn chain_cap() {
        let c = FinCategory::from_group(&GroupTable::cyclic(5));
        let caps = Caps {
            chains: 100,
            ..Caps::default()
        };
        let err = Nerve::new(&c, 4, &caps).err().unwrap();
        assert!(err.is_cap_exceeded());
        // 1 + 4 + 16 + 64 chains fit, the 256 of degree 4 do not
        assert!(err.to_string().contains("degree 4"));
    }

    #[test]
    fn inclusion_of_a_point_into_an_arrow() {
        let a = arrow();
        let (p, parent) = a.full_subcategory(&[0], &Caps::default()).unwrap();
        let f = Functor::inclusion(&p, &a, &parent).unwrap();
        let (np, na) = (Nerve::new(&p, 2, &Caps::default()).unwrap(), Nerve::new(&a, 2, &Caps::default()).unwrap());
        let map = functor_chain_map(&f, &np, &na).unwrap();
        let m = crate::homology::induced_map(&map, &np, &na, 0, Coefficients::Integers).unwrap();
        assert_eq!(m.isomorphism, Some(true));
        let m = crate::homology::induced_map(&map, &np, &na, 1, Coefficients::Integers).unwrap();
        assert_eq!(m.isomorphism, Some(true));
    }

    #[test]
    fn constant_functor_is_onto_in_degree_zero() {
        let g = FinCategory::from_group(&GroupTable::cyclic(2));
        let point = FinCategory::discrete(1);
        let k = Functor::new(&g, &point, vec![0], vec![0, 0]).unwrap();
        let (ng, np) = (Nerve::new(&g, 2, &Caps::default()).unwrap(), Nerve::new(&point, 2, &Caps::default()).unwrap());
        let map = functor_chain_map(&k, &ng, &np).unwrap();
        let m = crate::homology::induced_map(&map, &ng, &np, 0, Coefficients::Integers).unwrap();
        assert!(m.surjective);
        let id = Functor::identity(&g);
        let map = functor_chain_map(&id, &ng, &ng).unwrap();
        for d in 0..=2 {
            let n = ng.dim(d);
            assert_eq!(map.maps[d].to_dense(), (0..n * n).map(|i| (i / n == i % n) as i64).collect::<Vec<_>>());
        }
    }
}
