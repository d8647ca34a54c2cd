use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

use super::monotone_maps;

/// A partitioned linearly ordered set `I_P`: the elements of `I` and `P`
/// in order (as labels) and the order preserving partitioning map
/// `s : I -> P` as indices into `P`. Parts may be empty, so `∅_∅` (no
/// parts) and `∅_*` (one empty part) are different values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct JObject {
    items: Vec<u32>,
    parts: Vec<u32>,
    part_of: Vec<usize>,
}

impl JObject {
    pub fn new(items: Vec<u32>, parts: Vec<u32>, part_of: Vec<usize>) -> Result<JObject> {
        if items.len() != part_of.len() {
            return Err(Error::InvalidPartition("one part index per element is needed".into()));
        }
        if part_of.iter().any(|&p| p >= parts.len()) {
            return Err(Error::InvalidPartition("part index out of range".into()));
        }
        if part_of.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidPartition("partitioning map is not order preserving".into()));
        }
        Ok(JObject { items, parts, part_of })
    }

    /// `I = 1 < ... < n` partitioned into consecutive blocks of the given sizes
    /// (zero sizes give empty parts), parts labelled `1..=k`.
    pub fn from_sizes(sizes: &[usize]) -> JObject {
        let part_of: Vec<usize> = sizes.iter().enumerate().flat_map(|(p, &k)| std::iter::repeat_n(p, k)).collect();
        JObject {
            items: (1..=part_of.len() as u32).collect(),
            parts: (1..=sizes.len() as u32).collect(),
            part_of,
        }
    }

    /// `∅_∅`.
    pub fn empty() -> JObject {
        JObject {
            items: Vec::new(),
            parts: Vec::new(),
            part_of: Vec::new(),
        }
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn part_of(&self) -> &[usize] {
        &self.part_of
    }

    /// Every part is non-empty.
    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.parts.len()];
        for &p in &self.part_of {
            hit[p] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Element indices in part `p`.
    pub fn block(&self, p: usize) -> Vec<usize> {
        (0..self.items.len()).filter(|&i| self.part_of[i] == p).collect()
    }

    /// Part sizes in order.
    pub fn sizes(&self) -> Vec<usize> {
        (0..self.parts.len()).map(|p| self.block(p).len()).collect()
    }

    /// Same elements repartitioned through `part_of` onto new parts.
    fn with_partition(&self, parts: Vec<u32>, part_of: Vec<usize>) -> JObject {
        JObject {
            items: self.items.clone(),
            parts,
            part_of,
        }
    }
}

/// Parts written as `(123)(45)(6)`; labels inside a part are juxtaposed.
impl fmt::Display for JObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅_∅");
        }
        for p in 0..self.parts.len() {
            write!(f, "(")?;
            for i in self.block(p) {
                write!(f, "{}", self.items[i])?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A morphism `I_P -> J_Q`: order preserving `θ : I -> J` and
/// `ρ : Q -> P` with `s = ρ ∘ r ∘ θ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct JMorphism {
    source: JObject,
    target: JObject,
    theta: Vec<usize>,
    rho: Vec<usize>,
}

fn is_monotone(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

impl JMorphism {
    pub fn new(source: JObject, target: JObject, theta: Vec<usize>, rho: Vec<usize>) -> Result<JMorphism> {
        if theta.len() != source.items.len() || theta.iter().any(|&j| j >= target.items.len()) {
            return Err(Error::InvalidPartition("θ is not a map I -> J".into()));
        }
        if rho.len() != target.parts.len() || rho.iter().any(|&p| p >= source.parts.len()) {
            return Err(Error::InvalidPartition("ρ is not a map Q -> P".into()));
        }
        if !is_monotone(&theta) || !is_monotone(&rho) {
            return Err(Error::InvalidPartition("θ and ρ must be order preserving".into()));
        }
        if (0..theta.len()).any(|i| source.part_of[i] != rho[target.part_of[theta[i]]]) {
            return Err(Error::InvalidPartition("square does not commute".into()));
        }
        Ok(JMorphism {
            source,
            target,
            theta,
            rho,
        })
    }

    pub fn identity(x: &JObject) -> JMorphism {
        JMorphism {
            source: x.clone(),
            target: x.clone(),
            theta: (0..x.items.len()).collect(),
            rho: (0..x.parts.len()).collect(),
        }
    }

    pub fn source(&self) -> &JObject {
        &self.source
    }

    pub fn target(&self) -> &JObject {
        &self.target
    }

    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    pub fn rho(&self) -> &[usize] {
        &self.rho
    }

    /// `(θ, id_P)`.
    pub fn is_collapse(&self) -> bool {
        self.source.parts == self.target.parts && self.rho.iter().enumerate().all(|(q, &p)| p == q)
    }

    /// `(id_I, ρ)`.
    pub fn is_splitting(&self) -> bool {
        self.source.items == self.target.items && self.theta.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &JMorphism) -> Result<JMorphism> {
        if self.target != other.source {
            return Err(Error::InvalidPartition("morphisms are not composable".into()));
        }
        Ok(JMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            theta: self.theta.iter().map(|&j| other.theta[j]).collect(),
            rho: other.rho.iter().map(|&q| self.rho[q]).collect(),
        })
    }

    /// `I_P -> J_P -> J_Q`: the collapse `(θ, id_P)` onto `J` partitioned by
    /// `ρ ∘ r`, then the splitting `(id_J, ρ)`.
    pub fn factor_collapse_splitting(&self) -> (JMorphism, JMorphism) {
        let middle = self
            .target
            .with_partition(self.source.parts.clone(), self.target.part_of.iter().map(|&q| self.rho[q]).collect());
        let collapse = JMorphism {
            source: self.source.clone(),
            target: middle.clone(),
            theta: self.theta.clone(),
            rho: (0..self.source.parts.len()).collect(),
        };
        let splitting = JMorphism {
            source: middle,
            target: self.target.clone(),
            theta: (0..self.target.items.len()).collect(),
            rho: self.rho.clone(),
        };
        (collapse, splitting)
    }
}

/// Every `ρ : Q -> P` making `(θ, ρ)` a morphism `source -> target`.
pub fn compatible_rhos(source: &JObject, target: &JObject, theta: &[usize]) -> Vec<Vec<usize>> {
    monotone_maps(target.parts.len(), source.parts.len())
        .into_iter()
        .filter(|rho| JMorphism::new(source.clone(), target.clone(), theta.to_vec(), rho.clone()).is_ok())
        .collect()
}

/// The zigzag `I_P -> I_{Q_θ} <- I_Q -> J_Q` attached to an order
/// preserving `θ : I -> J` refining the partitions, where `Q_θ` is the set
/// of parts of `J` whose preimage is non-empty.
pub fn refinement_zigzag(source: &JObject, target: &JObject, theta: &[usize]) -> Result<[JMorphism; 3]> {
    if theta.len() != source.items.len() || theta.iter().any(|&j| j >= target.items.len()) || !is_monotone(theta) {
        return Err(Error::InvalidOrderMap("θ is not an order preserving map I -> J".into()));
    }
    let nq = target.parts.len();
    // part of P containing the preimage of each J_q, if the preimage is non-empty
    let mut lands: Vec<Option<usize>> = vec![None; nq];
    for (i, &j) in theta.iter().enumerate() {
        let q = target.part_of[j];
        let p = source.part_of[i];
        match lands[q] {
            None => lands[q] = Some(p),
            Some(p0) if p0 != p => {
                return Err(Error::NotRefining(format!("the preimage of part {} meets two parts", target.parts[q])));
            }
            _ => {}
        }
    }
    let q_theta: Vec<usize> = (0..nq).filter(|&q| lands[q].is_some()).collect();
    let position: HashMap<usize, usize> = q_theta.iter().enumerate().map(|(k, &q)| (q, k)).collect();
    let rho_theta: Vec<usize> = q_theta.iter().map(|&q| lands[q].expect("non-empty")).collect();
    let r_theta: Vec<usize> = theta.iter().map(|&j| target.part_of[j]).collect();
    let i_q_theta = source.with_partition(
        q_theta.iter().map(|&q| target.parts[q]).collect(),
        r_theta.iter().map(|q| position[q]).collect(),
    );
    let i_q = source.with_partition(target.parts.clone(), r_theta);
    let identity: Vec<usize> = (0..source.items.len()).collect();
    let first = JMorphism::new(source.clone(), i_q_theta.clone(), identity.clone(), rho_theta)?;
    let second = JMorphism::new(i_q.clone(), i_q_theta, identity, q_theta)?;
    let third = JMorphism::new(i_q, target.clone(), theta.to_vec(), (0..nq).collect())?;
    Ok([first, second, third])
}

/// A family of disjoint ordered alphabets `I_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnugContext {
    alphabets: Vec<Vec<u32>>,
    /// generator -> (alphabet, position)
    #[serde(skip)]
    place: HashMap<u32, (usize, usize)>,
}

impl SnugContext {
    pub fn new(alphabets: Vec<Vec<u32>>) -> Result<SnugContext> {
        let mut place = HashMap::new();
        for (t, a) in alphabets.iter().enumerate() {
            for (k, &x) in a.iter().enumerate() {
                if place.insert(x, (t, k)).is_some() {
                    return Err(Error::InvalidPartition(format!("generator {x} appears twice")));
                }
            }
        }
        Ok(SnugContext { alphabets, place })
    }

    /// Parses `1<2<3|4<5|6`.
    pub fn parse(text: &str) -> Result<SnugContext> {
        let text = text.trim();
        if text.is_empty() {
            return SnugContext::new(Vec::new());
        }
        let alphabets = text
            .split('|')
            .map(|a| {
                a.split('<')
                    .map(|x| {
                        x.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::InvalidArgument(format!("bad generator `{x}` in context")))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?;
        SnugContext::new(alphabets)
    }

    pub fn alphabets(&self) -> &[Vec<u32>] {
        &self.alphabets
    }

    /// `b` directly follows `a` in the same alphabet.
    fn follows(&self, a: u32, b: u32) -> bool {
        match (self.place.get(&a), self.place.get(&b)) {
            (Some(&(s, i)), Some(&(t, j))) => s == t && j == i + 1,
            _ => false,
        }
    }

    fn check_word(&self, word: &[u32]) -> Result<()> {
        match word.iter().find(|x| !self.place.contains_key(x)) {
            Some(x) => Err(Error::InvalidArgument(format!("{x} is not a generator of the context"))),
            None => Ok(()),
        }
    }
}

/// Reads a word: whitespace or comma separated labels, or one label per
/// character when there is no separator.
pub fn parse_word(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    let bad = |x: &str| Error::InvalidArgument(format!("bad letter `{x}` in word"));
    if text.contains(|c: char| c.is_whitespace() || c == ',') {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| bad(x)))
            .collect()
    } else {
        text.chars().map(|c| c.to_digit(10).ok_or_else(|| bad(&c.to_string()))).collect()
    }
}

/// The partition `I^x_{P^x}` of a word into maximal runs of consecutive
/// generators of one alphabet. Parts are labelled `1..=k`; the empty word
/// gives `∅_∅`.
pub fn snug_partition(context: &SnugContext, word: &[u32]) -> Result<JObject> {
    context.check_word(word)?;
    let mut part_of = Vec::with_capacity(word.len());
    let mut part = 0;
    for (i, &x) in word.iter().enumerate() {
        if i > 0 && !context.follows(word[i - 1], x) {
            part += 1;
        }
        part_of.push(part);
    }
    let parts = if word.is_empty() { 0 } else { part + 1 };
    JObject::new(word.to_vec(), (1..=parts as u32).collect(), part_of)
}

/// Checks that `obj` partitions `word` into snug parts no two adjacent of
/// which could be merged.
pub fn is_maximally_snug(context: &SnugContext, word: &[u32], obj: &JObject) -> bool {
    if obj.items != word || !obj.is_surjective() {
        return false;
    }
    let blocks: Vec<Vec<usize>> = (0..obj.parts.len()).map(|p| obj.block(p)).collect();
    let snug = blocks.iter().all(|b| b.windows(2).all(|w| context.follows(word[w[0]], word[w[1]])));
    let maximal = blocks.windows(2).all(|w| !context.follows(word[*w[0].last().unwrap()], word[w[1][0]]));
    snug && maximal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(items: &[u32], parts: &[u32], part_of: &[usize]) -> JObject {
        JObject::new(items.to_vec(), parts.to_vec(), part_of.to_vec()).unwrap()
    }

    #[test]
    fn snug_examples() {
        let c = SnugContext::parse("1<2<3|4<5|6").unwrap();
        let show = |w: &str| snug_partition(&c, &parse_word(w).unwrap()).unwrap().to_string();
        assert_eq!(show("123456"), "(123)(45)(6)");
        assert_eq!(show("654321"), "(6)(5)(4)(3)(2)(1)");
        assert_eq!(show("12423456"), "(12)(4)(23)(45)(6)");
        let empty = snug_partition(&c, &[]).unwrap();
        assert_eq!(empty, JObject::empty());
        assert_eq!(empty.to_string(), "∅_∅");
        assert!(snug_partition(&c, &[7]).is_err());
    }

    #[test]
    fn empty_objects_differ() {
        let star = JObject::from_sizes(&[0]);
        assert_ne!(star, JObject::empty());
        // ∅_* maps to everything, ∅_∅ only to objects without parts
        let target = JObject::from_sizes(&[2, 1]);
        assert_eq!(compatible_rhos(&star, &target, &[]).len(), 1);
        assert!(compatible_rhos(&JObject::empty(), &target, &[]).is_empty());
    }

    #[test]
    fn factorization_example() {
        // I = 1..8 in one part, J = {2,5,6,8} split as {2,5} {6,8}
        let i = labelled(&[1, 2, 3, 4, 5, 6, 7, 8], &[8], &[0; 8]);
        let j = labelled(&[2, 5, 6, 8], &[5, 8], &[0, 0, 1, 1]);
        let m = JMorphism::new(i, j, vec![0, 0, 1, 1, 1, 2, 3, 3], vec![0, 0]).unwrap();
        let (c, s) = m.factor_collapse_splitting();
        assert!(c.is_collapse() && s.is_splitting());
        assert_eq!(c.then(&s).unwrap(), m);
        assert_eq!(c.target().to_string(), "(2568)");
    }

    #[test]
    fn factorization_of_pure_maps() {
        let i = JObject::from_sizes(&[2, 1]);
        let collapse = JMorphism::new(i.clone(), JObject::from_sizes(&[1, 1]), vec![0, 0, 1], vec![0, 1]).unwrap();
        let (c, s) = collapse.factor_collapse_splitting();
        assert_eq!((c, s.clone()), (collapse.clone(), JMorphism::identity(collapse.target())));
        let split = JMorphism::new(i.clone(), JObject::from_sizes(&[1, 1, 1]), vec![0, 1, 2], vec![0, 0, 1]).unwrap();
        let (c, s) = split.factor_collapse_splitting();
        assert_eq!((c, s), (JMorphism::identity(&i), split));
    }

    #[test]
    fn two_choices_of_rho_but_one_zigzag() {
        // {1<3} -> {1<2<3}, both completely partitioned
        let i = labelled(&[1, 3], &[1, 3], &[0, 1]);
        let j = labelled(&[1, 2, 3], &[1, 2, 3], &[0, 1, 2]);
        let theta = vec![0, 2];
        let rhos = compatible_rhos(&i, &j, &theta);
        assert_eq!(rhos, vec![vec![0, 0, 1], vec![0, 1, 1]]);
        let [a, b, c] = refinement_zigzag(&i, &j, &theta).unwrap();
        assert_eq!(a.target().parts(), &[1, 3]);
        assert_eq!(b.target(), a.target());
        assert_eq!(b.source(), c.source());
        assert_eq!(c.target(), &j);
    }

    #[test]
    fn zigzag_of_identity() {
        let x = JObject::from_sizes(&[2, 1, 3]);
        let id: Vec<usize> = (0..6).collect();
        for m in refinement_zigzag(&x, &x, &id).unwrap() {
            assert_eq!(m, JMorphism::identity(&x));
        }
    }

    #[test]
    fn zigzag_rejects_non_refining_maps() {
        let i = JObject::from_sizes(&[1, 1]);
        let j = JObject::from_sizes(&[1]);
        assert!(matches!(refinement_zigzag(&i, &j, &[0, 0]), Err(Error::NotRefining(_))));
    }

    #[test]
    fn composition_is_associative_and_unital() {
        let a = JObject::from_sizes(&[2, 2]);
        let b = JObject::from_sizes(&[1, 1, 1]);
        let c = JObject::from_sizes(&[1, 1, 1]);
        let f = JMorphism::new(a.clone(), b.clone(), vec![0, 0, 1, 2], vec![0, 1, 1]).unwrap();
        let g = JMorphism::new(b.clone(), c.clone(), vec![0, 1, 2], vec![0, 1, 2]).unwrap();
        assert_eq!(JMorphism::identity(&a).then(&f).unwrap(), f);
        assert_eq!(f.then(&JMorphism::identity(&b)).unwrap(), f);
        let h = f.then(&g).unwrap();
        assert_eq!(JMorphism::new(a, c, h.theta().to_vec(), h.rho().to_vec()).unwrap(), h);
    }
}
