//! Reductive Borel-Serre categories of `R^n` in the flag model, their
//! boundary and rank truncations, the stabilization functor, homology of
//! nerves, and the comparison with the list model.

mod h1;
mod list;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::category::{functor_chain_map, FinCategory, Functor, Nerve};
use crate::error::{Error, Result};
use crate::flags::{borel_pair_homology, FlagSpace, GlAction};
use crate::homology::{homology, induced_map, Coefficients, HomologyResult, InducedMap};
use crate::ring::{canonical_summand, Matrix, Ring};

pub use h1::{abelianized_quotient, elementary_matrices_subgroup, unipotent_subgroup, GroupQuotient};
pub use list::{list_model, list_model_check, EquivalenceReport, ListModel};

/// A morphism `F -> G` of the flag model: the coset `g·U_F` with `g·F <= G`,
/// stored by its smallest element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RbsMorphism {
    pub source: u32,
    pub target: u32,
    pub rep: u32,
}

/// `RBS(R^n)`: objects are the splittable flags (object `i` is flag `i` of
/// the flag space, object 0 the trivial flag), morphisms `F -> G` are the
/// cosets `{g : g·F <= G} / U_F`, composed by multiplying representatives.
pub struct RbsCategory {
    space: FlagSpace,
    gl: GlAction,
    /// `U_F` for every flag, sorted
    unipotent: Vec<Vec<u32>>,
    morphisms: Vec<RbsMorphism>,
    category: FinCategory,
}

/// Elements `g` with `(g - 1) M_i ⊆ M_{i-1}` for every step of the flag
/// (`M_0 = 0`, last step the whole module).
fn unipotent_of(space: &FlagSpace, gl: &GlAction, f: u32) -> Vec<u32> {
    let ring = space.ring();
    let n = space.rank();
    let chain = space.flag(f);
    let steps: Vec<Matrix> = chain
        .iter()
        .map(|&s| space.summands()[s as usize].basis().clone())
        .chain(std::iter::once(Matrix::identity(ring, n)))
        .collect();
    (0..gl.group.order() as u32)
        .into_par_iter()
        .filter(|&g| {
            let m = gl.group.element(g);
            steps.iter().enumerate().all(|(i, basis)| {
                (0..basis.rows()).all(|r| {
                    let v = basis.row(r);
                    let w: Vec<_> = (0..n)
                        .map(|a| {
                            let gv = (0..n).fold(ring.zero(), |acc, b| ring.add(acc, ring.mul(m[(a, b)], v[b])));
                            ring.sub(gv, v[a])
                        })
                        .collect();
                    if i == 0 {
                        w.iter().all(|&x| x == ring.zero())
                    } else {
                        space.summands()[chain[i - 1] as usize].contains_vector(ring, &w)
                    }
                })
            })
        })
        .collect()
}

/// All flags obtained by deleting summands from `chain`.
fn coarsenings(space: &FlagSpace, chain: &[u32]) -> Vec<u32> {
    let k = chain.len();
    let mut out: Vec<u32> = (0..1u32 << k)
        .map(|mask| {
            let sub: Vec<u32> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| chain[i]).collect();
            space.flag_index(&sub).expect("sub-chains are flags")
        })
        .collect();
    out.sort_unstable();
    out
}

pub fn rbs_category(ring: &Ring, n: usize, caps: &Caps) -> Result<RbsCategory> {
    let space = FlagSpace::new(ring, n, caps)?;
    let gl = space.gl_action(caps)?;
    RbsCategory::build(space, gl, caps)
}

impl RbsCategory {
    fn build(space: FlagSpace, gl: GlAction, caps: &Caps) -> Result<RbsCategory> {
        let nf = space.num_flags();
        let unipotent: Vec<Vec<u32>> = (0..nf as u32).map(|f| unipotent_of(&space, &gl, f)).collect();
        let order = gl.group.order();
        let coarse: Vec<Vec<u32>> = (0..nf as u32).map(|f| coarsenings(&space, space.flag(f))).collect();
        let mut morphisms = Vec::new();
        for f in 0..nf as u32 {
            let u = &unipotent[f as usize];
            let mut is_rep = vec![false; order];
            for g in 0..order as u32 {
                let r = u.iter().map(|&x| gl.group.mul(g, x)).min().expect("U_F contains 1");
                is_rep[r as usize] = true;
            }
            for g in (0..order as u32).filter(|&g| is_rep[g as usize]) {
                let gf = gl.flag_act[g as usize][f as usize];
                for &t in &coarse[gf as usize] {
                    morphisms.push(RbsMorphism {
                        source: f,
                        target: t,
                        rep: g,
                    });
                }
            }
            if morphisms.len() as u64 > caps.morphisms {
                return Err(Error::cap("RBS morphisms", morphisms.len() as u64, caps.morphisms));
            }
        }
        let index: HashMap<RbsMorphism, u32> = morphisms.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        let identities = (0..nf as u32)
            .map(|f| {
                index[&RbsMorphism {
                    source: f,
                    target: f,
                    rep: unipotent[f as usize][0],
                }]
            })
            .collect();
        let objects = (0..nf as u32).map(|f| space.flag_label(f)).collect();
        let labels = morphisms.iter().map(|m| format!("g{}:{}->{}", m.rep, m.source, m.target)).collect();
        let rep_of = |g: u32, f: u32| -> u32 {
            unipotent[f as usize]
                .iter()
                .map(|&x| gl.group.mul(g, x))
                .min()
                .expect("U_F contains 1")
        };
        let category = FinCategory::from_fn(
            objects,
            labels,
            morphisms.iter().map(|m| m.source).collect(),
            morphisms.iter().map(|m| m.target).collect(),
            identities,
            |a, b| {
                let (ma, mb) = (morphisms[a as usize], morphisms[b as usize]);
                let rep = rep_of(gl.group.mul(ma.rep, mb.rep), mb.source);
                index[&RbsMorphism {
                    source: mb.source,
                    target: ma.target,
                    rep,
                }]
            },
            caps,
        )?;
        Ok(RbsCategory {
            space,
            gl,
            unipotent,
            morphisms,
            category,
        })
    }

    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    pub fn space(&self) -> &FlagSpace {
        &self.space
    }

    pub fn gl(&self) -> &GlAction {
        &self.gl
    }

    pub fn morphism(&self, m: u32) -> RbsMorphism {
        self.morphisms[m as usize]
    }

    /// `U_F` as sorted element indices.
    pub fn unipotent(&self, f: u32) -> &[u32] {
        &self.unipotent[f as usize]
    }

    /// Elements fixing every summand of the flag.
    pub fn stabilizer(&self, f: u32) -> Vec<u32> {
        (0..self.gl.group.order() as u32)
            .filter(|&g| self.gl.flag_act[g as usize][f as usize] == f)
            .collect()
    }

    /// Smallest element of `g·U_F`.
    pub fn coset_rep(&self, g: u32, f: u32) -> u32 {
        self.unipotent[f as usize]
            .iter()
            .map(|&x| self.gl.group.mul(g, x))
            .min()
            .expect("U_F contains 1")
    }

    /// The morphism `F -> G` represented by `g`, if `g·F <= G`.
    pub fn morphism_for(&self, f: u32, g: u32, t: u32) -> Option<u32> {
        let rep = self.coset_rep(g, f);
        let gf = self.gl.flag_act[g as usize][f as usize];
        if !self.space.refines(gf, t) {
            return None;
        }
        self.category
            .hom(f, t)
            .into_iter()
            .find(|&m| self.morphisms[m as usize].rep == rep)
    }

    /// Checks every composable pair against every choice of coset
    /// representatives: `(a·u)(b·v)·U` must be the coset of `a ∘ b`.
    /// Returns the first offending pair `(a, b)`.
    pub fn coset_independence_violation(&self) -> Option<(u32, u32)> {
        let cat = &self.category;
        let group = &self.gl.group;
        for a in 0..cat.num_morphisms() as u32 {
            let ma = self.morphism(a);
            for &b in cat.incoming(ma.source) {
                let mb = self.morphism(b);
                let expected = self.morphism(cat.compose(a, b)).rep;
                for &ua in self.unipotent(ma.source) {
                    let ga = group.mul(ma.rep, ua);
                    for &ub in self.unipotent(mb.source) {
                        let gb = group.mul(mb.rep, ub);
                        if self.coset_rep(group.mul(ga, gb), mb.source) != expected {
                            return Some((a, b));
                        }
                    }
                }
            }
        }
        None
    }

    /// The first flag of every `GL`-orbit, ascending (the trivial flag
    /// first). Flags in one orbit are isomorphic objects.
    pub fn orbit_representatives(&self) -> Vec<u32> {
        let nf = self.space.num_flags();
        let mut seen = vec![false; nf];
        let mut reps = Vec::new();
        for f in 0..nf {
            if seen[f] {
                continue;
            }
            reps.push(f as u32);
            for act in &self.gl.flag_act {
                seen[act[f] as usize] = true;
            }
        }
        reps
    }

    /// A skeleton: the full subcategory on orbit representatives. Returns
    /// the category and the flag of each of its objects.
    pub fn skeleton(&self, caps: &Caps) -> Result<(FinCategory, Vec<u32>)> {
        let reps = self.orbit_representatives();
        let (cat, _) = self.category.full_subcategory(&reps, caps)?;
        Ok((cat, reps))
    }
}

/// `∂RBS`: the full subcategory on non-trivial flags, with the parent index
/// of each morphism.
pub fn boundary_rbs(c: &RbsCategory, caps: &Caps) -> Result<(FinCategory, Vec<u32>)> {
    let objs: Vec<u32> = (1..c.space.num_flags() as u32).collect();
    c.category.full_subcategory(&objs, caps)
}

/// Full subcategory on flags whose graded pieces all have rank at most `k`.
/// Returns the category and its flags.
pub fn rank_truncation(c: &RbsCategory, k: usize, caps: &Caps) -> Result<(FinCategory, Vec<u32>)> {
    if k > c.space.rank() {
        return Err(Error::InvalidArgument(format!("truncation rank {k} exceeds {}", c.space.rank())));
    }
    let objs: Vec<u32> = (0..c.space.num_flags() as u32)
        .filter(|&f| c.space.graded_ranks(f).iter().all(|&r| r <= k))
        .collect();
    let (cat, _) = c.category.full_subcategory(&objs, caps)?;
    Ok((cat, objs))
}

/// Homology of the nerve of `RBS(R^n)` through degree `top` (exact below
/// `top`), computed on a skeleton.
pub fn rbs_homology(ring: &Ring, n: usize, coeff: Coefficients, top: usize, caps: &Caps) -> Result<HomologyResult> {
    rbs_category(ring, n, caps)?.homology(coeff, top, caps)
}

/// Homology of `(N RBS, N ∂RBS)` through degree `top`, computed on a
/// skeleton.
pub fn rbs_relative_homology(ring: &Ring, n: usize, coeff: Coefficients, top: usize, caps: &Caps) -> Result<HomologyResult> {
    rbs_category(ring, n, caps)?.relative_homology(coeff, top, caps)
}

impl RbsCategory {
    pub fn homology(&self, coeff: Coefficients, top: usize, caps: &Caps) -> Result<HomologyResult> {
        let (skel, _) = self.skeleton(caps)?;
        homology(&Nerve::new(&skel, top, caps)?, coeff)
    }

    /// No morphism leaves the trivial flag, so the relative chains are the
    /// chains ending there.
    pub fn relative_homology(&self, coeff: Coefficients, top: usize, caps: &Caps) -> Result<HomologyResult> {
        let (skel, upper) = self.skeleton_pair(caps)?;
        homology(&Nerve::relative(&skel, &upper, top, caps)?, coeff)
    }

    /// A skeleton and which of its objects is the trivial flag.
    pub fn skeleton_pair(&self, caps: &Caps) -> Result<(FinCategory, Vec<bool>)> {
        let (skel, reps) = self.skeleton(caps)?;
        let upper = reps.iter().map(|&f| f == FlagSpace::TRIVIAL).collect();
        Ok((skel, upper))
    }
}

/// Dimensions of `H_d(RBS, ∂RBS; F_p)` against the Borel pair of the flag
/// poset, in the degrees where both are exact.
#[derive(Debug, Clone, Serialize)]
pub struct CofibreReport {
    pub ring: String,
    pub rank: usize,
    pub prime: u32,
    pub rbs: HomologyResult,
    pub borel: HomologyResult,
    pub compared: Vec<i64>,
    pub mismatches: Vec<i64>,
}

impl CofibreReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && !self.compared.is_empty()
    }
}

pub fn cofibre_check(ring: &Ring, n: usize, p: u32, top: usize, caps: &Caps) -> Result<CofibreReport> {
    let coeff = Coefficients::prime(p)?;
    let (rbs, borel) = rayon::join(
        || rbs_relative_homology(ring, n, coeff, top, caps),
        || borel_pair_homology(ring, n, coeff, top, caps),
    );
    let (rbs, borel) = (rbs?, borel?);
    let mut compared = Vec::new();
    let mut mismatches = Vec::new();
    for g in &rbs.groups {
        let Some(h) = borel.group(g.degree) else { continue };
        if g.reliable && h.reliable {
            compared.push(g.degree);
            if g.betti != h.betti {
                mismatches.push(g.degree);
            }
        }
    }
    Ok(CofibreReport {
        ring: ring.to_string(),
        rank: n,
        prime: p,
        rbs,
        borel,
        compared,
        mismatches,
    })
}

/// The functor `RBS(R^{n-1}) -> RBS(R^n)` sending `M_1 ⊂ ... ⊂ M_k` to
/// `M_1 ⊂ ... ⊂ M_k ⊂ R^{n-1}` (first coordinates) and `g` to `g ⊕ 1`.
pub struct Stabilization {
    pub small: RbsCategory,
    pub large: RbsCategory,
    pub obj_map: Vec<u32>,
    pub mor_map: Vec<u32>,
}

pub fn stabilization_functor(ring: &Ring, n: usize, caps: &Caps) -> Result<Stabilization> {
    if n < 2 {
        return Err(Error::InvalidArgument("stabilization needs n >= 2".into()));
    }
    let small = rbs_category(ring, n - 1, caps)?;
    let large = rbs_category(ring, n, caps)?;
    let embed = |s: &crate::ring::Summand| -> u32 {
        let b = s.basis();
        let rows: Vec<Vec<_>> = (0..b.rows())
            .map(|i| {
                let mut r = b.row(i).to_vec();
                r.push(ring.zero());
                r
            })
            .collect();
        let image = canonical_summand(ring, &Matrix::from_rows(n, &rows)).expect("embedded summands stay summands");
        large.space.summand_index(&image).expect("embedded summand is enumerated")
    };
    let hyperplane = large
        .space
        .summand_index(&crate::ring::Summand::standard(ring, n, n - 1))
        .expect("standard hyperplane is enumerated");
    let summand_map: Vec<u32> = small.space.summands().iter().map(embed).collect();
    let obj_map: Vec<u32> = (0..small.space.num_flags() as u32)
        .map(|f| {
            let mut chain: Vec<u32> = small.space.flag(f).iter().map(|&s| summand_map[s as usize]).collect();
            chain.push(hyperplane);
            chain.sort_unstable();
            large.space.flag_index(&chain).expect("image chain is a flag")
        })
        .collect();
    let mor_map = (0..small.category.num_morphisms() as u32)
        .map(|m| {
            let mm = small.morphism(m);
            let g = small.gl.group.element(mm.rep).direct_sum_one(ring);
            let g = large.gl.group.index_of(&g).expect("g ⊕ 1 is invertible");
            large
                .morphism_for(obj_map[mm.source as usize], g, obj_map[mm.target as usize])
                .ok_or_else(|| Error::InvalidFunctor(format!("image of morphism {m} is not a morphism")))
        })
        .collect::<Result<_>>()?;
    Ok(Stabilization {
        small,
        large,
        obj_map,
        mor_map,
    })
}

impl Stabilization {
    /// The functor, validated on identities and all composable pairs.
    pub fn functor(&self) -> Result<Functor<'_>> {
        Functor::new(&self.small.category, &self.large.category, self.obj_map.clone(), self.mor_map.clone())
    }

    /// Every image object is a non-trivial flag.
    pub fn lands_in_boundary(&self) -> bool {
        self.obj_map.iter().all(|&f| f != FlagSpace::TRIVIAL)
    }

    /// The same functor with target `∂RBS(R^n)`, validated.
    pub fn check_factors_through_boundary(&self, caps: &Caps) -> Result<bool> {
        if !self.lands_in_boundary() {
            return Ok(false);
        }
        let (bd, parent) = boundary_rbs(&self.large, caps)?;
        let mut back = vec![u32::MAX; self.large.category.num_morphisms()];
        for (i, &m) in parent.iter().enumerate() {
            back[m as usize] = i as u32;
        }
        let obj: Vec<u32> = self.obj_map.iter().map(|&f| f - 1).collect();
        let mor: Vec<u32> = self.mor_map.iter().map(|&m| back[m as usize]).collect();
        if mor.contains(&u32::MAX) {
            return Ok(false);
        }
        Ok(Functor::new(&self.small.category, &bd, obj, mor).is_ok())
    }

    /// Induced maps on `H_d` for `d <= top`, from nerves through `top + 1`.
    pub fn induced_maps(&self, coeff: Coefficients, top: usize, caps: &Caps) -> Result<Vec<InducedMap>> {
        let f = self.functor()?;
        let a = Nerve::new(&self.small.category, top + 1, caps)?;
        let b = Nerve::new(&self.large.category, top + 1, caps)?;
        let map = functor_chain_map(&f, &a, &b)?;
        (0..=top).map(|d| induced_map(&map, &a, &b, d, coeff)).collect()
    }
}
