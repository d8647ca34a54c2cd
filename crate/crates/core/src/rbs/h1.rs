use crate::flags::AbelianGroup;
use crate::homology::Coefficients;
use crate::ring::{Matrix, MatrixGroup};

use super::RbsCategory;

/// Subgroup generated by `seeds` and closed under conjugation by `normalizers`.
fn closure(group: &MatrixGroup, seeds: &[u32], normalizers: &[u32]) -> Vec<u32> {
    let order = group.order();
    let mut gens: Vec<u32> = seeds.to_vec();
    loop {
        let mut inside = vec![false; order];
        inside[group.identity() as usize] = true;
        let mut elems = vec![group.identity()];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &s in &gens {
                let y = group.mul(x, s);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        let mut grew = false;
        for &t in normalizers {
            let ti = group.inverse(t);
            for k in 0..gens.len() {
                let c = group.mul(group.mul(t, gens[k]), ti);
                if !inside[c as usize] {
                    gens.push(c);
                    grew = true;
                    break;
                }
            }
        }
        if !grew {
            elems.sort_unstable();
            return elems;
        }
    }
}

/// `E = <U_F : F a flag>`, sorted. It is normal because `g U_F g⁻¹ = U_{gF}`.
pub fn unipotent_subgroup(c: &RbsCategory) -> Vec<u32> {
    let mut seeds: Vec<u32> = (0..c.space().num_flags() as u32).flat_map(|f| c.unipotent(f).to_vec()).collect();
    seeds.sort_unstable();
    seeds.dedup();
    closure(&c.gl().group, &seeds, &[])
}

/// The subgroup generated by elementary matrices `1 + a e_ij`, `i != j`.
pub fn elementary_matrices_subgroup(group: &MatrixGroup) -> Vec<u32> {
    let ring = group.ring();
    let n = group.rank();
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for a in ring.elements() {
                let mut m = Matrix::identity(ring, n);
                m[(i, j)] = a;
                seeds.push(group.index_of(&m).expect("elementary matrices are invertible"));
            }
        }
    }
    closure(group, &seeds, &[])
}

/// A small generating set of the whole group.
fn generators(group: &MatrixGroup) -> Vec<u32> {
    let order = group.order();
    let mut inside = vec![false; order];
    inside[group.identity() as usize] = true;
    let mut elems = vec![group.identity()];
    let mut gens = Vec::new();
    for g in 0..order as u32 {
        if inside[g as usize] {
            continue;
        }
        gens.push(g);
        let mut i = 0;
        while i < elems.len() {
            for &s in &gens {
                let y = group.mul(elems[i], s);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
    }
    gens
}

/// Cosets of a normal subgroup with coset labels for every element.
pub struct GroupQuotient {
    pub coset_of: Vec<u32>,
    pub cosets: usize,
}

impl GroupQuotient {
    pub fn new(group: &MatrixGroup, normal: &[u32]) -> GroupQuotient {
        let mut coset_of = vec![u32::MAX; group.order()];
        let mut cosets = 0;
        for g in 0..group.order() as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            for &x in normal {
                coset_of[group.mul(g, x) as usize] = cosets;
            }
            cosets += 1;
        }
        GroupQuotient {
            coset_of,
            cosets: cosets as usize,
        }
    }
}

/// `(G / N)^ab` for a normal subgroup `N`, as invariant factors: `N` is
/// enlarged by the commutators of a generating set (normally closed), and
/// the structure of the finite abelian quotient is read off from how many
/// elements have order dividing each prime power.
pub fn abelianized_quotient(group: &MatrixGroup, normal: &[u32]) -> AbelianGroup {
    let gens = generators(group);
    let mut seeds = normal.to_vec();
    for &a in &gens {
        for &b in &gens {
            let c = group.mul(group.mul(a, b), group.mul(group.inverse(a), group.inverse(b)));
            seeds.push(c);
        }
    }
    let sub = closure(group, &seeds, &gens);
    let q = GroupQuotient::new(group, &sub);
    // one representative per coset
    let mut reps = vec![u32::MAX; q.cosets];
    for (g, &c) in q.coset_of.iter().enumerate() {
        if reps[c as usize] == u32::MAX {
            reps[c as usize] = g as u32;
        }
    }
    let id_coset = q.coset_of[group.identity() as usize];
    let orders: Vec<usize> = reps
        .iter()
        .map(|&g| {
            let mut x = g;
            let mut k = 1;
            while q.coset_of[x as usize] != id_coset {
                x = group.mul(x, g);
                k += 1;
            }
            k
        })
        .collect();
    let total = q.cosets;
    // exponents of each prime: cyclic factors of order >= p^i number
    // log_p |A[p^i]| - log_p |A[p^(i-1)]|
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    let mut rest = total;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            let mut logs = vec![0u32];
            let mut pk = 1usize;
            loop {
                pk *= p;
                let count = orders.iter().filter(|&&o| pk % o == 0).count();
                let log = count.ilog(p);
                if log == *logs.last().unwrap() {
                    break;
                }
                logs.push(log);
            }
            // number of factors of order >= p^i
            let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
            let mut exps = Vec::new();
            for (i, &c) in at_least.iter().enumerate() {
                let next = at_least.get(i + 1).copied().unwrap_or(0);
                for _ in 0..c - next {
                    exps.push((p as u64).pow(i as u32 + 1));
                }
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            per_prime.push(exps);
        }
        p += 1;
    }
    let factors = per_prime.iter().map(|e| e.len()).max().unwrap_or(0);
    let mut torsion: Vec<u64> = (0..factors)
        .map(|i| per_prime.iter().map(|e| e.get(i).copied().unwrap_or(1)).product())
        .collect();
    torsion.sort_unstable();
    AbelianGroup {
        coefficients: Coefficients::Integers,
        rank: 0,
        torsion,
    }
}
