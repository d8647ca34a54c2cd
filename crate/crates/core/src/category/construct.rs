use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{FinCategory, Poset};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ring::MatrixGroup;

/// A finite group with elements `0..order()`.
pub trait GroupAction: Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> u32;
    /// Index of `a·b`.
    fn mul(&self, a: u32, b: u32) -> u32;
}

impl GroupAction for MatrixGroup {
    fn order(&self) -> usize {
        MatrixGroup::order(self)
    }
    fn identity(&self) -> u32 {
        MatrixGroup::identity(self)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        MatrixGroup::mul(self, a, b)
    }
}

/// A group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    table: Vec<u32>,
    identity: u32,
}

impl GroupTable {
    pub fn new(order: usize, table: Vec<u32>) -> Result<GroupTable> {
        if table.len() != order * order || table.iter().any(|&x| x as usize >= order) {
            return Err(Error::InvalidArgument("multiplication table has the wrong shape".into()));
        }
        let m = |a: usize, b: usize| table[a * order + b] as usize;
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or_else(|| Error::InvalidArgument("no identity element".into()))?;
        for a in 0..order {
            if !(0..order).any(|b| m(a, b) == identity) {
                return Err(Error::InvalidArgument(format!("element {a} has no inverse")));
            }
            for b in 0..order {
                for c in 0..order {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::InvalidArgument("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(GroupTable {
            order,
            table,
            identity: identity as u32,
        })
    }

    pub fn cyclic(n: usize) -> GroupTable {
        GroupTable {
            order: n,
            table: (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect(),
            identity: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }
}

impl GroupAction for GroupTable {
    fn order(&self) -> usize {
        self.order
    }
    fn identity(&self) -> u32 {
        self.identity
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        GroupTable::mul(self, a, b)
    }
}

/// The twisted arrow category: objects are the morphisms of `c`, and a
/// morphism `f -> g` is a pair `(a, b)` with `g = b∘f∘a`.
pub fn twisted_arrow(c: &FinCategory, caps: &Caps) -> Result<FinCategory> {
    let m = c.num_morphisms();
    let mut pos_in = vec![0u32; m];
    let mut pos_out = vec![0u32; m];
    for x in 0..c.num_objects() as u32 {
        for (i, &f) in c.incoming(x).iter().enumerate() {
            pos_in[f as usize] = i as u32;
        }
        for (i, &f) in c.out(x).iter().enumerate() {
            pos_out[f as usize] = i as u32;
        }
    }
    let mut base = Vec::with_capacity(m + 1);
    let mut total: u64 = 0;
    for f in 0..m as u32 {
        base.push(total);
        total += (c.incoming(c.source(f)).len() * c.out(c.target(f)).len()) as u64;
    }
    base.push(total);
    if total > caps.morphisms {
        return Err(Error::cap("twisted arrow morphisms", total, caps.morphisms));
    }
    let idx = |f: u32, a: u32, b: u32| -> u32 {
        (base[f as usize] + pos_in[a as usize] as u64 * c.out(c.target(f)).len() as u64 + pos_out[b as usize] as u64) as u32
    };
    let mut parts = Vec::with_capacity(total as usize);
    let (mut src, mut tgt, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for f in 0..m as u32 {
        for &a in c.incoming(c.source(f)) {
            for &b in c.out(c.target(f)) {
                let g = c.compose(b, c.compose(f, a));
                parts.push((a, b));
                src.push(f);
                tgt.push(g);
                labels.push(format!("({},{})", c.morphism_label(a), c.morphism_label(b)));
            }
        }
    }
    let identities = (0..m as u32)
        .map(|f| idx(f, c.identity(c.source(f)), c.identity(c.target(f))))
        .collect();
    FinCategory::from_fn(
        (0..m as u32).map(|f| c.morphism_label(f).to_string()).collect(),
        labels,
        src.clone(),
        tgt,
        identities,
        |h, g| {
            // g = (a, b): f -> f', h = (a', b'): f' -> f''
            let (a, b) = parts[g as usize];
            let (a2, b2) = parts[h as usize];
            idx(src[g as usize], c.compose(a, a2), c.compose(b2, b))
        },
        caps,
    )
}

/// The action category of a group acting on a poset by order automorphisms:
/// objects are the poset elements and `Hom(x, y) = {g : g·x <= y}`, with
/// composition given by the group product. `act[g][x]` is `g·x`.
pub fn action_category<G: GroupAction + ?Sized>(group: &G, poset: &Poset, act: &[Vec<u32>], caps: &Caps) -> Result<FinCategory> {
    let order = group.order();
    let n = poset.len();
    if act.len() != order || act.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidAction("action table has the wrong shape".into()));
    }
    if act[group.identity() as usize].iter().enumerate().any(|(x, &y)| x as u32 != y) {
        return Err(Error::InvalidAction("the identity does not act trivially".into()));
    }
    let pairs = (order as u64).saturating_mul(order as u64).saturating_mul(n as u64);
    let check_pair = |g: u32, h: u32| -> bool {
        let gh = group.mul(g, h) as usize;
        (0..n).all(|x| act[gh][x] == act[g as usize][act[h as usize][x] as usize])
    };
    if pairs <= caps.associativity {
        let bad = (0..order as u32)
            .into_par_iter()
            .any(|g| (0..order as u32).any(|h| !check_pair(g, h)));
        if bad {
            return Err(Error::InvalidAction("(gh)·x differs from g·(h·x)".into()));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0xac7);
        for _ in 0..(caps.associativity / n.max(1) as u64).max(1) {
            let (g, h) = (rng.gen_range(0..order as u32), rng.gen_range(0..order as u32));
            if !check_pair(g, h) {
                return Err(Error::InvalidAction("(gh)·x differs from g·(h·x)".into()));
            }
        }
    }
    for (g, p) in act.iter().enumerate() {
        let mut seen = vec![false; n];
        for &y in p {
            if y as usize >= n || std::mem::replace(&mut seen[y as usize], true) {
                return Err(Error::InvalidAction(format!("element {g} does not act by a bijection")));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if poset.lt(x, y) != poset.lt(p[x] as usize, p[y] as usize) {
                    return Err(Error::InvalidAction(format!("element {g} does not preserve the order")));
                }
            }
        }
    }
    let up: Vec<Vec<u32>> = (0..n).map(|x| poset.up_set(x)).collect();
    let mut base = Vec::with_capacity(n * order + 1);
    let mut total: u64 = 0;
    for x in 0..n {
        for p in act.iter() {
            base.push(total);
            total += up[p[x] as usize].len() as u64;
        }
    }
    base.push(total);
    if total > caps.morphisms {
        return Err(Error::cap("action category morphisms", total, caps.morphisms));
    }
    let (mut src, mut tgt, mut elem) = (Vec::new(), Vec::new(), Vec::new());
    for x in 0..n {
        for (g, p) in act.iter().enumerate() {
            for &y in &up[p[x] as usize] {
                src.push(x as u32);
                tgt.push(y);
                elem.push(g as u32);
            }
        }
    }
    let idx = |x: u32, g: u32, y: u32| -> u32 {
        let gx = act[g as usize][x as usize] as usize;
        let pos = up[gx].binary_search(&y).expect("target lies above g·x");
        (base[x as usize * order + g as usize] + pos as u64) as u32
    };
    let labels = (0..src.len())
        .map(|f| format!("g{}:{}->{}", elem[f], poset.labels()[src[f] as usize], poset.labels()[tgt[f] as usize]))
        .collect();
    let identities = (0..n as u32).map(|x| idx(x, group.identity(), x)).collect();
    FinCategory::from_fn(
        poset.labels().to_vec(),
        labels,
        src.clone(),
        tgt.clone(),
        identities,
        |f, g| idx(src[g as usize], group.mul(elem[f as usize], elem[g as usize]), tgt[f as usize]),
        caps,
    )
}

/// A small category of functions between finite sets, generated by random
/// maps: objects are sets of sizes in `1..=3`, morphisms all composites of
/// the generators (plus identities). Returns `None` when the closure has
/// more than `max_morphisms` morphisms.
pub fn random_concrete_category(seed: u64, max_morphisms: usize) -> Option<FinCategory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_obj = rng.gen_range(1..=3usize);
    let sizes: Vec<usize> = (0..n_obj).map(|_| rng.gen_range(1..=3)).collect();
    type Mor = (u32, u32, Vec<u8>);
    let mut all: BTreeSet<Mor> = (0..n_obj).map(|x| (x as u32, x as u32, (0..sizes[x] as u8).collect())).collect();
    let n_gen = rng.gen_range(1..=4);
    let mut gens = Vec::new();
    for _ in 0..n_gen {
        let (s, t) = (rng.gen_range(0..n_obj), rng.gen_range(0..n_obj));
        let map: Vec<u8> = (0..sizes[s]).map(|_| rng.gen_range(0..sizes[t] as u8)).collect();
        gens.push((s as u32, t as u32, map));
    }
    let mut frontier: Vec<Mor> = Vec::new();
    for g in gens {
        if all.insert(g.clone()) {
            frontier.push(g);
        }
    }
    while let Some(f) = frontier.pop() {
        let current: Vec<Mor> = all.iter().cloned().collect();
        for g in current {
            // f∘g and g∘f where defined
            if g.1 == f.0 {
                let h = (g.0, f.1, g.2.iter().map(|&i| f.2[i as usize]).collect());
                if all.insert(h.clone()) {
                    frontier.push(h);
                }
            }
            if f.1 == g.0 {
                let h = (f.0, g.1, f.2.iter().map(|&i| g.2[i as usize]).collect());
                if all.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
        if all.len() > max_morphisms {
            return None;
        }
    }
    let mors: Vec<Mor> = all.into_iter().collect();
    let index: HashMap<&Mor, u32> = mors.iter().enumerate().map(|(i, m)| (m, i as u32)).collect();
    let identities = (0..n_obj as u32)
        .map(|x| index[&(x, x, (0..sizes[x as usize] as u8).collect::<Vec<u8>>())])
        .collect();
    FinCategory::from_fn(
        sizes.iter().enumerate().map(|(i, s)| format!("X{i}({s})")).collect(),
        mors.iter().map(|m| format!("{:?}", m.2)).collect(),
        mors.iter().map(|m| m.0).collect(),
        mors.iter().map(|m| m.1).collect(),
        identities,
        |f, g| {
            let (mf, mg) = (&mors[f as usize], &mors[g as usize]);
            let h = (mg.0, mf.1, mg.2.iter().map(|&i| mf.2[i as usize]).collect());
            index[&h]
        },
        &Caps::default(),
    )
    .ok()
}
