//! Finite categories, functors, nerves, posets and simplicial complexes.

mod construct;
mod nerve;
mod poset;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use construct::{action_category, random_concrete_category, twisted_arrow, GroupAction, GroupTable};
pub use nerve::{functor_chain_map, nerve_truncated, Nerve};
pub use poset::{order_complex, Poset, SimplicialComplex};

use crate::caps::Caps;
use crate::error::{Error, Result};

/// A finite category. Morphisms are indexed `0..num_morphisms()`; objects
/// `0..num_objects()`. Composition is stored as a table.
#[derive(Debug, Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    labels: Vec<String>,
    src: Vec<u32>,
    tgt: Vec<u32>,
    identities: Vec<u32>,
    is_id: Vec<bool>,
    /// per object: morphisms with that source, ascending
    out: Vec<Vec<u32>>,
    /// per object: morphisms with that target, ascending
    inc: Vec<Vec<u32>>,
    /// position of `f` inside `out[src f]`
    pos_out: Vec<u32>,
    /// per `g`: where the composites `f∘g` (for `f` in `out[tgt g]`) start
    comp_off: Vec<usize>,
    comp: Vec<u32>,
}

/// Plain description of a category, for (de)serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryData {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismData>,
    pub identities: Vec<u32>,
    /// Triples `[f, g, f∘g]` for every composable pair with neither an
    /// identity.
    pub composition: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismData {
    pub label: String,
    pub source: u32,
    pub target: u32,
}

impl FinCategory {
    /// Builds a category from its morphisms and a composition rule
    /// `compose(f, g) = f∘g` (defined when `target(g) == source(f)`), then
    /// checks the identity and associativity laws. Associativity is checked
    /// on every composable triple when there are at most
    /// `caps.associativity` of them, otherwise on that many random triples.
    pub fn from_fn<F>(
        objects: Vec<String>,
        labels: Vec<String>,
        src: Vec<u32>,
        tgt: Vec<u32>,
        identities: Vec<u32>,
        compose: F,
        caps: &Caps,
    ) -> Result<FinCategory>
    where
        F: Fn(u32, u32) -> u32 + Sync,
    {
        let m = src.len();
        let n = objects.len();
        if tgt.len() != m || labels.len() != m {
            return Err(Error::InvalidCategory("source, target and label lists differ in length".into()));
        }
        if m as u64 > caps.morphisms {
            return Err(Error::cap("morphisms", m as u64, caps.morphisms));
        }
        if identities.len() != n {
            return Err(Error::InvalidCategory("need one identity per object".into()));
        }
        if src.iter().chain(&tgt).any(|&x| x as usize >= n) {
            return Err(Error::InvalidCategory("morphism endpoint out of range".into()));
        }
        let mut is_id = vec![false; m];
        for (x, &i) in identities.iter().enumerate() {
            if i as usize >= m || src[i as usize] != x as u32 || tgt[i as usize] != x as u32 {
                return Err(Error::InvalidCategory(format!("identity of object {x} is not an endomorphism of it")));
            }
            is_id[i as usize] = true;
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut pos_out = vec![0u32; m];
        for f in 0..m {
            pos_out[f] = out[src[f] as usize].len() as u32;
            out[src[f] as usize].push(f as u32);
            inc[tgt[f] as usize].push(f as u32);
        }
        let mut comp_off = Vec::with_capacity(m + 1);
        let mut total = 0usize;
        for g in 0..m {
            comp_off.push(total);
            total += out[tgt[g] as usize].len();
        }
        comp_off.push(total);
        if total as u64 > caps.morphisms.saturating_mul(64) {
            return Err(Error::cap("composable pairs", total as u64, caps.morphisms.saturating_mul(64)));
        }
        let rows: Vec<Vec<u32>> = (0..m)
            .into_par_iter()
            .map(|g| out[tgt[g] as usize].iter().map(|&f| compose(f, g as u32)).collect())
            .collect();
        let comp: Vec<u32> = rows.into_iter().flatten().collect();
        let cat = FinCategory {
            objects,
            labels,
            src,
            tgt,
            identities,
            is_id,
            out,
            inc,
            pos_out,
            comp_off,
            comp,
        };
        cat.validate(caps)?;
        Ok(cat)
    }

    /// Builds from explicit data; missing composites involving identities
    /// are filled in.
    pub fn from_data(data: &CategoryData, caps: &Caps) -> Result<FinCategory> {
        let m = data.morphisms.len();
        let mut table = std::collections::HashMap::new();
        for &[f, g, h] in &data.composition {
            if f as usize >= m || g as usize >= m || h as usize >= m {
                return Err(Error::InvalidCategory("composition entry out of range".into()));
            }
            table.insert((f, g), h);
        }
        let id_set: std::collections::HashSet<u32> = data.identities.iter().copied().collect();
        let missing = std::sync::Mutex::new(None);
        let cat = FinCategory::from_fn(
            data.objects.clone(),
            data.morphisms.iter().map(|x| x.label.clone()).collect(),
            data.morphisms.iter().map(|x| x.source).collect(),
            data.morphisms.iter().map(|x| x.target).collect(),
            data.identities.clone(),
            |f, g| {
                if id_set.contains(&f) {
                    g
                } else if id_set.contains(&g) {
                    f
                } else {
                    *table.get(&(f, g)).unwrap_or_else(|| {
                        missing.lock().unwrap().get_or_insert((f, g));
                        &0
                    })
                }
            },
            caps,
        );
        if let Some((f, g)) = *missing.lock().unwrap() {
            return Err(Error::InvalidCategory(format!("composite of {f} after {g} is missing")));
        }
        cat
    }

    pub fn to_data(&self) -> CategoryData {
        let mut composition = Vec::new();
        for g in 0..self.num_morphisms() as u32 {
            if self.is_identity(g) {
                continue;
            }
            for &f in self.out(self.target(g)) {
                if !self.is_identity(f) {
                    composition.push([f, g, self.compose(f, g)]);
                }
            }
        }
        CategoryData {
            objects: self.objects.clone(),
            morphisms: (0..self.num_morphisms())
                .map(|f| MorphismData {
                    label: self.labels[f].clone(),
                    source: self.src[f],
                    target: self.tgt[f],
                })
                .collect(),
            identities: self.identities.clone(),
            composition,
        }
    }

    fn validate(&self, caps: &Caps) -> Result<()> {
        let m = self.num_morphisms() as u32;
        for g in 0..m {
            for &f in self.out(self.target(g)) {
                let h = self.compose(f, g);
                if h >= m || self.source(h) != self.source(g) || self.target(h) != self.target(f) {
                    return Err(Error::InvalidCategory(format!("composite of {f} after {g} has wrong endpoints")));
                }
            }
            if self.compose(g, self.identity(self.source(g))) != g || self.compose(self.identity(self.target(g)), g) != g {
                return Err(Error::InvalidCategory(format!("identity law fails for morphism {g}")));
            }
        }
        let triples: u64 = (0..m)
            .map(|g| {
                self.out(self.target(g))
                    .iter()
                    .map(|&f| self.out(self.target(f)).len() as u64)
                    .sum::<u64>()
            })
            .sum();
        let assoc = |h: u32, f: u32, g: u32| self.compose(self.compose(h, f), g) == self.compose(h, self.compose(f, g));
        if triples <= caps.associativity {
            let bad = (0..m).into_par_iter().find_any(|&g| {
                self.out(self.target(g))
                    .iter()
                    .any(|&f| self.out(self.target(f)).iter().any(|&h| !assoc(h, f, g)))
            });
            if let Some(g) = bad {
                return Err(Error::InvalidCategory(format!("associativity fails for a triple starting with {g}")));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..caps.associativity {
                let g = rng.gen_range(0..m);
                let fs = self.out(self.target(g));
                let f = fs[rng.gen_range(0..fs.len())];
                let hs = self.out(self.target(f));
                let h = hs[rng.gen_range(0..hs.len())];
                if !assoc(h, f, g) {
                    return Err(Error::InvalidCategory(format!("associativity fails for ({h}, {f}, {g})")));
                }
            }
        }
        Ok(())
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.src.len()
    }

    pub fn object_label(&self, x: u32) -> &str {
        &self.objects[x as usize]
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_label(&self, f: u32) -> &str {
        &self.labels[f as usize]
    }

    #[inline]
    pub fn source(&self, f: u32) -> u32 {
        self.src[f as usize]
    }

    #[inline]
    pub fn target(&self, f: u32) -> u32 {
        self.tgt[f as usize]
    }

    #[inline]
    pub fn identity(&self, x: u32) -> u32 {
        self.identities[x as usize]
    }

    #[inline]
    pub fn is_identity(&self, f: u32) -> bool {
        self.is_id[f as usize]
    }

    /// Morphisms out of `x`, ascending.
    pub fn out(&self, x: u32) -> &[u32] {
        &self.out[x as usize]
    }

    /// Morphisms into `x`, ascending.
    pub fn incoming(&self, x: u32) -> &[u32] {
        &self.inc[x as usize]
    }

    pub fn hom(&self, x: u32, y: u32) -> Vec<u32> {
        self.out(x).iter().copied().filter(|&f| self.target(f) == y).collect()
    }

    /// `f∘g`; requires `target(g) == source(f)`.
    #[inline]
    pub fn compose(&self, f: u32, g: u32) -> u32 {
        debug_assert_eq!(self.target(g), self.source(f), "morphisms are not composable");
        self.comp[self.comp_off[g as usize] + self.pos_out[f as usize] as usize]
    }

    /// An inverse of `f`, if `f` is an isomorphism.
    pub fn inverse(&self, f: u32) -> Option<u32> {
        let (x, y) = (self.source(f), self.target(f));
        self.hom(y, x)
            .into_iter()
            .find(|&g| self.compose(g, f) == self.identity(x) && self.compose(f, g) == self.identity(y))
    }

    /// Isomorphism class of every object, numbered by first appearance.
    pub fn iso_classes(&self) -> Vec<u32> {
        let n = self.num_objects();
        let mut class = vec![u32::MAX; n];
        let mut next = 0;
        for x in 0..n as u32 {
            if class[x as usize] != u32::MAX {
                continue;
            }
            class[x as usize] = next;
            for &f in self.out(x) {
                let y = self.target(f);
                if class[y as usize] == u32::MAX && self.inverse(f).is_some() {
                    class[y as usize] = next;
                }
            }
            next += 1;
        }
        class
    }

    /// Full subcategory on `objs` (kept in the given order), together with
    /// the parent index of every morphism of the result.
    pub fn full_subcategory(&self, objs: &[u32], caps: &Caps) -> Result<(FinCategory, Vec<u32>)> {
        let mut new_obj = vec![u32::MAX; self.num_objects()];
        for (i, &x) in objs.iter().enumerate() {
            if new_obj[x as usize] != u32::MAX {
                return Err(Error::InvalidArgument(format!("object {x} listed twice")));
            }
            new_obj[x as usize] = i as u32;
        }
        let mut parent = Vec::new();
        for &x in objs {
            for &f in self.out(x) {
                if new_obj[self.target(f) as usize] != u32::MAX {
                    parent.push(f);
                }
            }
        }
        let mut new_mor = vec![u32::MAX; self.num_morphisms()];
        for (i, &f) in parent.iter().enumerate() {
            new_mor[f as usize] = i as u32;
        }
        let sub = FinCategory::from_fn(
            objs.iter().map(|&x| self.objects[x as usize].clone()).collect(),
            parent.iter().map(|&f| self.labels[f as usize].clone()).collect(),
            parent.iter().map(|&f| new_obj[self.source(f) as usize]).collect(),
            parent.iter().map(|&f| new_obj[self.target(f) as usize]).collect(),
            objs.iter().map(|&x| new_mor[self.identity(x) as usize]).collect(),
            |f, g| new_mor[self.compose(parent[f as usize], parent[g as usize]) as usize],
            caps,
        )?;
        Ok((sub, parent))
    }

    /// The full subcategory on the first object of each isomorphism class.
    /// It is equivalent to `self`, so has the same nerve homology.
    pub fn skeleton(&self, caps: &Caps) -> Result<(FinCategory, Vec<u32>)> {
        let class = self.iso_classes();
        let mut reps = Vec::new();
        for (x, &c) in class.iter().enumerate() {
            if c as usize == reps.len() {
                reps.push(x as u32);
            }
        }
        self.full_subcategory(&reps, caps)
    }

    pub fn opposite(&self, caps: &Caps) -> Result<FinCategory> {
        FinCategory::from_fn(
            self.objects.clone(),
            self.labels.clone(),
            self.tgt.clone(),
            self.src.clone(),
            self.identities.clone(),
            |f, g| self.compose(g, f),
            caps,
        )
    }

    /// `n` objects and only identities.
    pub fn discrete(n: usize) -> FinCategory {
        FinCategory::from_fn(
            (0..n).map(|i| i.to_string()).collect(),
            (0..n).map(|i| format!("id{i}")).collect(),
            (0..n as u32).collect(),
            (0..n as u32).collect(),
            (0..n as u32).collect(),
            |f, _| f,
            &Caps::default(),
        )
        .expect("discrete categories are valid")
    }

    /// One object whose endomorphisms form the given group.
    pub fn from_group(g: &GroupTable) -> FinCategory {
        let n = g.order();
        FinCategory::from_fn(
            vec!["*".into()],
            (0..n).map(|i| format!("g{i}")).collect(),
            vec![0; n],
            vec![0; n],
            vec![g.identity()],
            |a, b| g.mul(a, b),
            &Caps::default(),
        )
        .expect("a group table defines a category")
    }
}

/// A functor between finite categories, checked at construction.
#[derive(Debug, Clone)]
pub struct Functor<'a> {
    pub source: &'a FinCategory,
    pub target: &'a FinCategory,
    pub obj_map: Vec<u32>,
    pub mor_map: Vec<u32>,
}

impl<'a> Functor<'a> {
    pub fn new(source: &'a FinCategory, target: &'a FinCategory, obj_map: Vec<u32>, mor_map: Vec<u32>) -> Result<Functor<'a>> {
        if obj_map.len() != source.num_objects() || mor_map.len() != source.num_morphisms() {
            return Err(Error::InvalidFunctor("map sizes do not match the source category".into()));
        }
        if obj_map.iter().any(|&y| y as usize >= target.num_objects())
            || mor_map.iter().any(|&f| f as usize >= target.num_morphisms())
        {
            return Err(Error::InvalidFunctor("image out of range".into()));
        }
        for x in 0..source.num_objects() as u32 {
            if mor_map[source.identity(x) as usize] != target.identity(obj_map[x as usize]) {
                return Err(Error::InvalidFunctor(format!("identity of object {x} is not preserved")));
            }
        }
        for f in 0..source.num_morphisms() as u32 {
            let ff = mor_map[f as usize];
            if target.source(ff) != obj_map[source.source(f) as usize] || target.target(ff) != obj_map[source.target(f) as usize] {
                return Err(Error::InvalidFunctor(format!("morphism {f} is sent to a morphism with wrong endpoints")));
            }
        }
        let bad = (0..source.num_morphisms() as u32).into_par_iter().find_any(|&g| {
            source.out(source.target(g)).iter().any(|&f| {
                mor_map[source.compose(f, g) as usize] != target.compose(mor_map[f as usize], mor_map[g as usize])
            })
        });
        if let Some(g) = bad {
            return Err(Error::InvalidFunctor(format!("composition with morphism {g} is not preserved")));
        }
        Ok(Functor {
            source,
            target,
            obj_map,
            mor_map,
        })
    }

    pub fn identity(c: &'a FinCategory) -> Functor<'a> {
        Functor {
            source: c,
            target: c,
            obj_map: (0..c.num_objects() as u32).collect(),
            mor_map: (0..c.num_morphisms() as u32).collect(),
        }
    }

    /// The inclusion of a full subcategory produced by `full_subcategory`.
    pub fn inclusion(sub: &'a FinCategory, parent: &'a FinCategory, mor_parent: &[u32]) -> Result<Functor<'a>> {
        let obj_map = (0..sub.num_objects() as u32)
            .map(|x| parent.source(mor_parent[sub.identity(x) as usize]))
            .collect();
        Functor::new(sub, parent, obj_map, mor_parent.to_vec())
    }

    pub fn compose_with(&self, after: &Functor<'a>) -> Result<Functor<'a>> {
        if !std::ptr::eq(self.target, after.source) {
            return Err(Error::InvalidFunctor("functors are not composable".into()));
        }
        Functor::new(
            self.source,
            after.target,
            self.obj_map.iter().map(|&x| after.obj_map[x as usize]).collect(),
            self.mor_map.iter().map(|&f| after.mor_map[f as usize]).collect(),
        )
    }
}
