use std::collections::HashMap;

use serde::Serialize;

use super::RbsCategory;
use crate::caps::Caps;
use crate::category::{FinCategory, Functor};
use crate::error::{Error, Result};
use crate::flags::FlagSpace;
use crate::ring::{canonical_summand, enumerate_gl, Elem, Matrix, MatrixGroup, Ring};

/// The list model of `RBS(R^n)` on standard modules: objects are the
/// compositions `(r_1, ..., r_k)` of `n` (the list `(R^{r_1}, ..., R^{r_k})`),
/// and a morphism `r -> s` exists when `s` merges consecutive blocks of `r`.
/// It is a tuple with one coset `g_j · U` per target block, where `g_j ∈
/// GL_{s_j}` and `U` is the block unitriangular group of the merged blocks
/// (a flag in `R^{s_j}` with an identification of its graded pieces).
pub struct ListModel {
    n: usize,
    compositions: Vec<Vec<usize>>,
    /// `groups[s - 1] = GL_s`
    groups: Vec<MatrixGroup>,
    unipotent: HashMap<Vec<usize>, Vec<u32>>,
    morphisms: Vec<ListMorphism>,
    index: HashMap<ListMorphism, u32>,
    category: FinCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ListMorphism {
    pub source: u32,
    pub target: u32,
    /// canonical coset representative in `GL_{s_j}` for each target block
    pub blocks: Vec<u32>,
}

fn compositions_of(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0..1u32 << (n - 1) {
        let mut c = Vec::new();
        let mut run = 1;
        for i in 0..n - 1 {
            if mask >> i & 1 == 1 {
                c.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        c.push(run);
        out.push(c);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Splits `r` into the consecutive runs summing to the parts of `s`, or
/// `None` when `s` does not merge blocks of `r`.
fn merge_pattern(r: &[usize], s: &[usize]) -> Option<Vec<Vec<usize>>> {
    let mut out = Vec::with_capacity(s.len());
    let mut i = 0;
    for &target in s {
        let mut run = Vec::new();
        let mut sum = 0;
        while sum < target && i < r.len() {
            sum += r[i];
            run.push(r[i]);
            i += 1;
        }
        if sum != target || run.is_empty() {
            return None;
        }
        out.push(run);
    }
    (i == r.len()).then_some(out)
}

fn block_unitriangular(ring: &Ring, m: &Matrix, blocks: &[usize]) -> bool {
    let mut block_of = Vec::new();
    for (b, &len) in blocks.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, len));
    }
    let size = m.rows();
    (0..size).all(|i| {
        (0..size).all(|j| {
            let x = m[(i, j)];
            if block_of[i] == block_of[j] {
                x == if i == j { ring.one() } else { ring.zero() }
            } else if block_of[i] > block_of[j] {
                x == ring.zero()
            } else {
                true
            }
        })
    })
}

fn block_diagonal(parts: &[&Matrix]) -> Matrix {
    let size: usize = parts.iter().map(|m| m.rows()).sum();
    let mut out = Matrix::zeros(size, size);
    let mut off = 0;
    for m in parts {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out[(off + i, off + j)] = m[(i, j)];
            }
        }
        off += m.rows();
    }
    out
}

pub fn list_model(ring: &Ring, n: usize, caps: &Caps) -> Result<ListModel> {
    if n == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let compositions = compositions_of(n);
    let groups: Vec<MatrixGroup> = (1..=n).map(|s| enumerate_gl(ring, s, caps)).collect::<Result<_>>()?;
    let mut unipotent = HashMap::new();
    for s in 1..=n {
        for c in compositions_of(s) {
            let g = &groups[s - 1];
            let u: Vec<u32> = (0..g.order() as u32).filter(|&x| block_unitriangular(ring, g.element(x), &c)).collect();
            unipotent.insert(c, u);
        }
    }
    let rep = |s: usize, c: &[usize], g: u32| -> u32 {
        let group = &groups[s - 1];
        unipotent[c].iter().map(|&u| group.mul(g, u)).min().expect("U contains 1")
    };
    let mut morphisms = Vec::new();
    for (a, r) in compositions.iter().enumerate() {
        for (b, s) in compositions.iter().enumerate() {
            let Some(pattern) = merge_pattern(r, s) else { continue };
            let reps: Vec<Vec<u32>> = s
                .iter()
                .zip(&pattern)
                .map(|(&sj, run)| {
                    let mut v: Vec<u32> = (0..groups[sj - 1].order() as u32).map(|g| rep(sj, run, g)).collect();
                    v.sort_unstable();
                    v.dedup();
                    v
                })
                .collect();
            let mut idx = vec![0usize; s.len()];
            loop {
                morphisms.push(ListMorphism {
                    source: a as u32,
                    target: b as u32,
                    blocks: idx.iter().zip(&reps).map(|(&i, r)| r[i]).collect(),
                });
                if morphisms.len() as u64 > caps.morphisms {
                    return Err(Error::cap("list model morphisms", morphisms.len() as u64, caps.morphisms));
                }
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < reps[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
    }
    let index: HashMap<ListMorphism, u32> = morphisms.iter().cloned().enumerate().map(|(i, m)| (m, i as u32)).collect();
    let identities = (0..compositions.len())
        .map(|a| {
            let blocks = compositions[a].iter().map(|&s| groups[s - 1].identity()).collect();
            index[&ListMorphism {
                source: a as u32,
                target: a as u32,
                blocks,
            }]
        })
        .collect();
    let label = |c: &[usize]| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    let compose = |f: u32, g: u32| -> u32 {
        // f ∘ g with g: r -> s and f: s -> t
        let (mf, mg) = (&morphisms[f as usize], &morphisms[g as usize]);
        let r = &compositions[mg.source as usize];
        let s = &compositions[mg.target as usize];
        let t = &compositions[mf.target as usize];
        let outer = merge_pattern(s, t).expect("composable");
        let inner = merge_pattern(r, s).expect("composable");
        let mut j = 0;
        let blocks = t
            .iter()
            .zip(&outer)
            .enumerate()
            .map(|(k, (&tk, run))| {
                let parts: Vec<&Matrix> = (0..run.len()).map(|i| groups[s[j + i] - 1].element(mg.blocks[j + i])).collect();
                let merged: Vec<usize> = (0..run.len()).flat_map(|i| inner[j + i].iter().copied()).collect();
                j += run.len();
                let h = groups[tk - 1].element(mf.blocks[k]);
                let prod = h.mul(ring, &block_diagonal(&parts));
                rep(tk, &merged, groups[tk - 1].index_of(&prod).expect("invertible"))
            })
            .collect();
        index[&ListMorphism {
            source: mg.source,
            target: mf.target,
            blocks,
        }]
    };
    let category = FinCategory::from_fn(
        compositions.iter().map(|c| label(c)).collect(),
        morphisms.iter().map(|m| format!("{:?}:{}->{}", m.blocks, m.source, m.target)).collect(),
        morphisms.iter().map(|m| m.source).collect(),
        morphisms.iter().map(|m| m.target).collect(),
        identities,
        compose,
        caps,
    )?;
    Ok(ListModel {
        n,
        compositions,
        groups,
        unipotent,
        morphisms,
        index,
        category,
    })
}

impl ListModel {
    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    pub fn compositions(&self) -> &[Vec<usize>] {
        &self.compositions
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn morphism(&self, m: u32) -> &ListMorphism {
        &self.morphisms[m as usize]
    }

    fn coset_rep(&self, s: usize, c: &[usize], g: u32) -> u32 {
        let group = &self.groups[s - 1];
        self.unipotent[c].iter().map(|&u| group.mul(g, u)).min().expect("U contains 1")
    }
}

/// Columns form a basis of `R^n` whose first `rank M_i` vectors span `M_i`
/// for every summand of the flag.
pub(super) fn adapted_basis(space: &FlagSpace, f: u32) -> Matrix {
    let ring = space.ring();
    let n = space.rank();
    let mut vecs: Vec<Vec<Elem>> = Vec::new();
    let extend = |candidates: Vec<Vec<Elem>>, target: usize, vecs: &mut Vec<Vec<Elem>>| {
        for v in candidates {
            if vecs.len() == target {
                break;
            }
            vecs.push(v);
            let span = canonical_summand(ring, &Matrix::from_rows(n, vecs));
            if span.is_none_or(|s| s.rank() != vecs.len()) {
                vecs.pop();
            }
        }
        assert_eq!(vecs.len(), target, "flag steps have free quotients");
    };
    for &s in space.flag(f) {
        let m = &space.summands()[s as usize];
        let b = m.basis();
        extend((0..b.rows()).map(|i| b.row(i).to_vec()).collect(), m.rank(), &mut vecs);
    }
    let id = Matrix::identity(ring, n);
    extend((0..n).map(|i| id.row(i).to_vec()).collect(), n, &mut vecs);
    Matrix::from_rows(n, &vecs).transpose()
}

/// Outcome of comparing the flag model with the list model through the
/// associated-graded functor.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub ring: String,
    pub rank: usize,
    pub flag_objects: usize,
    pub flag_morphisms: usize,
    pub list_objects: usize,
    pub list_morphisms: usize,
    pub functor_valid: bool,
    pub essentially_surjective: bool,
    pub hom_counts_match: bool,
    pub fully_faithful: bool,
}

impl EquivalenceReport {
    pub fn is_equivalence(&self) -> bool {
        self.functor_valid && self.essentially_surjective && self.fully_faithful && self.hom_counts_match
    }
}

/// The associated-graded functor: a flag goes to its graded ranks, and
/// `g : F -> G` to the diagonal blocks of `c_G⁻¹ g c_F` for adapted bases.
fn graded_functor(rbs: &RbsCategory, list: &ListModel) -> Result<(Vec<u32>, Vec<u32>)> {
    let space = rbs.space();
    let ring = space.ring();
    let comp_index: HashMap<&[usize], u32> = list.compositions.iter().enumerate().map(|(i, c)| (c.as_slice(), i as u32)).collect();
    let nf = space.num_flags();
    let ranks: Vec<Vec<usize>> = (0..nf as u32).map(|f| space.graded_ranks(f)).collect();
    let obj_map: Vec<u32> = ranks.iter().map(|r| comp_index[r.as_slice()]).collect();
    let bases: Vec<Matrix> = (0..nf as u32).map(|f| adapted_basis(space, f)).collect();
    let inverses: Vec<Matrix> = bases.iter().map(|b| b.inverse(ring).expect("adapted bases are invertible")).collect();
    let cat = rbs.category();
    let mor_map = (0..cat.num_morphisms() as u32)
        .map(|m| {
            let mm = rbs.morphism(m);
            let g = rbs.gl().group.element(mm.rep);
            let x = inverses[mm.target as usize].mul(ring, &g.mul(ring, &bases[mm.source as usize]));
            let (r, s) = (&ranks[mm.source as usize], &ranks[mm.target as usize]);
            let pattern = merge_pattern(r, s).ok_or_else(|| Error::InvalidFunctor("target does not coarsen the image".into()))?;
            let mut off = 0;
            let mut blocks = Vec::with_capacity(s.len());
            for (&sj, run) in s.iter().zip(&pattern) {
                for i in off + sj..list.n {
                    for j in off..off + sj {
                        if x[(i, j)] != ring.zero() {
                            return Err(Error::InvalidFunctor(format!("morphism {m} is not block triangular")));
                        }
                    }
                }
                let d = Matrix::new(
                    sj,
                    sj,
                    (0..sj * sj).map(|k| x[(off + k / sj, off + k % sj)]).collect(),
                );
                let gi = list.groups[sj - 1]
                    .index_of(&d)
                    .ok_or_else(|| Error::InvalidFunctor("diagonal block is not invertible".into()))?;
                blocks.push(list.coset_rep(sj, run, gi));
                off += sj;
            }
            list.index
                .get(&ListMorphism {
                    source: obj_map[mm.source as usize],
                    target: obj_map[mm.target as usize],
                    blocks,
                })
                .copied()
                .ok_or_else(|| Error::InvalidFunctor(format!("image of morphism {m} is missing")))
        })
        .collect::<Result<_>>()?;
    Ok((obj_map, mor_map))
}

pub fn list_model_check(ring: &Ring, n: usize, caps: &Caps) -> Result<EquivalenceReport> {
    let rbs = super::rbs_category(ring, n, caps)?;
    let list = list_model(ring, n, caps)?;
    let (obj_map, mor_map) = graded_functor(&rbs, &list)?;
    let functor_valid = Functor::new(rbs.category(), list.category(), obj_map.clone(), mor_map.clone()).is_ok();
    let mut hit = vec![false; list.compositions.len()];
    for &o in &obj_map {
        hit[o as usize] = true;
    }
    let essentially_surjective = hit.iter().all(|&h| h);
    let (fc, lc) = (rbs.category(), list.category());
    let nf = fc.num_objects() as u32;
    let mut hom_counts_match = true;
    let mut fully_faithful = true;
    for f in 0..nf {
        for g in 0..nf {
            let hom = fc.hom(f, g);
            let target = lc.hom(obj_map[f as usize], obj_map[g as usize]);
            hom_counts_match &= hom.len() == target.len();
            let mut images: Vec<u32> = hom.iter().map(|&m| mor_map[m as usize]).collect();
            images.sort_unstable();
            images.dedup();
            fully_faithful &= images.len() == hom.len() && images.len() == target.len();
        }
    }
    Ok(EquivalenceReport {
        ring: ring.to_string(),
        rank: n,
        flag_objects: fc.num_objects(),
        flag_morphisms: fc.num_morphisms(),
        list_objects: lc.num_objects(),
        list_morphisms: lc.num_morphisms(),
        functor_valid,
        essentially_surjective,
        hom_counts_match,
        fully_faithful,
    })
}
