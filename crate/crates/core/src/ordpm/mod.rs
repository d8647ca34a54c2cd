//! Finite ordered combinatorics: the equivalence between `Δ^op` and the
//! category `Ord±` of bipointed ordered sets, partitioned linearly ordered
//! sets and their morphisms, partitions of words into maximally snug
//! substrings, filtered dimension sequences, and word counts of free monoids.

mod fred;
mod partition;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use fred::{fred_hom, fred_objects, free_monoid_words, FilteredDimSeq, FredMorphism};
pub use partition::{
    compatible_rhos, is_maximally_snug, parse_word, refinement_zigzag, snug_partition, JMorphism, JObject,
    SnugContext,
};

/// A morphism `(m)± -> (n)±` of `Ord±`. Points of `(m)±` are numbered
/// `0 = ⊥, 1..=m, m + 1 = ⊤`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrdPmMorphism {
    source: usize,
    target: usize,
    map: Vec<usize>,
}

impl OrdPmMorphism {
    /// `map` lists the images of `1..=m`; ⊥ and ⊤ are fixed.
    pub fn new(source: usize, target: usize, map: Vec<usize>) -> Result<OrdPmMorphism> {
        if map.len() != source {
            return Err(Error::InvalidOrderMap(format!("expected {source} values, got {}", map.len())));
        }
        let mut full = Vec::with_capacity(source + 2);
        full.push(0);
        full.extend(map);
        full.push(target + 1);
        if full.iter().any(|&x| x > target + 1) {
            return Err(Error::InvalidOrderMap(format!("value out of range for ({target})±")));
        }
        if full.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidOrderMap("not order preserving".into()));
        }
        Ok(OrdPmMorphism { source, target, map: full })
    }

    pub fn identity(n: usize) -> OrdPmMorphism {
        OrdPmMorphism {
            source: n,
            target: n,
            map: (0..n + 2).collect(),
        }
    }

    /// `θ_i : (n)± -> (1)±`, sending `j < i` to ⊥, `i` to 1 and `j > i` to ⊤.
    pub fn face(n: usize, i: usize) -> Result<OrdPmMorphism> {
        if i == 0 || i > n {
            return Err(Error::InvalidArgument(format!("face index {i} outside 1..={n}")));
        }
        let map = (1..=n)
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Greater => 2,
            })
            .collect();
        OrdPmMorphism::new(n, 1, map)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Image of a point of `(source)±`, with ⊥ = 0 and ⊤ = `source + 1`.
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &OrdPmMorphism) -> Result<OrdPmMorphism> {
        if self.target != other.source {
            return Err(Error::InvalidOrderMap("morphisms are not composable".into()));
        }
        Ok(OrdPmMorphism {
            source: self.source,
            target: other.target,
            map: self.map.iter().map(|&x| other.map[x]).collect(),
        })
    }

    /// Every morphism `(m)± -> (n)±`.
    pub fn all(m: usize, n: usize) -> Vec<OrdPmMorphism> {
        monotone_maps(m, n + 2)
            .into_iter()
            .map(|v| OrdPmMorphism::new(m, n, v).expect("monotone"))
            .collect()
    }
}

impl fmt::Display for OrdPmMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |x: usize| match x {
            0 => "⊥".to_string(),
            x if x == self.target + 1 => "⊤".to_string(),
            x => x.to_string(),
        };
        let parts: Vec<String> = (1..=self.source).map(|i| format!("{i}->{}", name(self.map[i]))).collect();
        write!(f, "({})± -> ({})± [{}]", self.source, self.target, parts.join(", "))
    }
}

/// Non-decreasing sequences of length `len` with values in `0..values`.
pub(crate) fn monotone_maps(len: usize, values: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(len: usize, values: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in lo..values {
            cur.push(v);
            go(len, values, v, cur, out);
            cur.pop();
        }
    }
    go(len, values, 0, &mut cur, &mut out);
    out
}

fn check_simplicial(theta: &[usize], n: usize) -> Result<()> {
    if theta.is_empty() {
        return Err(Error::InvalidOrderMap("[m] is never empty".into()));
    }
    if theta.iter().any(|&x| x > n) {
        return Err(Error::InvalidOrderMap(format!("value out of range for [{n}]")));
    }
    if theta.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidOrderMap("not order preserving".into()));
    }
    Ok(())
}

/// Sends `θ : [m] -> [n]` (given as its values `θ(0..=m)`) to the morphism
/// `(n)± -> (m)±` with `i ↦ ⊥` for `i <= θ(0)`, `j` for
/// `θ(j-1) < i <= θ(j)` and ⊤ for `i > θ(m)`.
pub fn delta_to_ordpm(theta: &[usize], n: usize) -> Result<OrdPmMorphism> {
    check_simplicial(theta, n)?;
    let m = theta.len() - 1;
    let map = (1..=n)
        .map(|i| {
            if i <= theta[0] {
                0
            } else if i > theta[m] {
                m + 1
            } else {
                (1..=m).find(|&j| theta[j - 1] < i && i <= theta[j]).expect("θ is monotone")
            }
        })
        .collect();
    OrdPmMorphism::new(n, m, map)
}

/// The inverse: `α : (m)± -> (n)±` goes to `[n] -> [m]`,
/// `i ↦ max { x : α(x) <= i }` (with ⊥ read as 0).
pub fn ordpm_to_delta(alpha: &OrdPmMorphism) -> Vec<usize> {
    (0..=alpha.target)
        .map(|i| (0..=alpha.source).filter(|&x| alpha.apply(x) <= i).max().unwrap_or(0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compose(theta: &[usize], psi: &[usize]) -> Vec<usize> {
        theta.iter().map(|&x| psi[x]).collect()
    }

    #[test]
    fn identity_and_constant() {
        assert_eq!(delta_to_ordpm(&[0, 1, 2, 3], 3).unwrap(), OrdPmMorphism::identity(3));
        // [0] -> [n], 0 ↦ 0: everything goes to ⊤ of (0)±
        let a = delta_to_ordpm(&[0], 4).unwrap();
        assert!((1..=4).all(|i| a.apply(i) == 1));
        assert_eq!(ordpm_to_delta(&OrdPmMorphism::identity(2)), vec![0, 1, 2]);
    }

    #[test]
    fn face_maps() {
        for n in 1..=5 {
            for i in 1..=n {
                let a = delta_to_ordpm(&[i - 1, i], n).unwrap();
                assert_eq!(a, OrdPmMorphism::face(n, i).unwrap());
                assert_eq!(ordpm_to_delta(&a), vec![i - 1, i]);
            }
        }
    }

    #[test]
    fn round_trip_both_ways() {
        for m in 0..=5 {
            for n in 0..=5 {
                for theta in monotone_maps(m + 1, n + 1) {
                    let a = delta_to_ordpm(&theta, n).unwrap();
                    assert_eq!((a.source(), a.target()), (n, m));
                    assert_eq!(ordpm_to_delta(&a), theta);
                }
                for a in OrdPmMorphism::all(m, n) {
                    assert_eq!(delta_to_ordpm(&ordpm_to_delta(&a), m).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn contravariant_functor() {
        for l in 0..=3 {
            for m in 0..=3 {
                for n in 0..=3 {
                    for theta in monotone_maps(l + 1, m + 1) {
                        for psi in monotone_maps(m + 1, n + 1) {
                            let lhs = delta_to_ordpm(&compose(&theta, &psi), n).unwrap();
                            let rhs = delta_to_ordpm(&psi, n).unwrap().then(&delta_to_ordpm(&theta, m).unwrap()).unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(delta_to_ordpm(&[1, 0], 2).is_err());
        assert!(delta_to_ordpm(&[0, 3], 2).is_err());
        assert!(OrdPmMorphism::new(2, 2, vec![2, 1]).is_err());
    }
}
