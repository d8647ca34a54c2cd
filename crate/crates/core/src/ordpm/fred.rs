use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

use super::partition::{JMorphism, JObject};

/// A reduced filtered dimension sequence `⟨d^(1), ..., d^(k)⟩`: non-empty
/// parts of positive dimensions. The empty sequence has no parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FilteredDimSeq {
    parts: Vec<Vec<u32>>,
}

impl FilteredDimSeq {
    pub fn new(parts: Vec<Vec<u32>>) -> Result<FilteredDimSeq> {
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidPartition("parts of a filtered dimension sequence are non-empty".into()));
        }
        if parts.iter().flatten().any(|&d| d == 0) {
            return Err(Error::InvalidPartition("dimensions must be positive".into()));
        }
        Ok(FilteredDimSeq { parts })
    }

    /// Parses `(1,1),(2)`; the empty string is the empty sequence.
    pub fn parse(text: &str) -> Result<FilteredDimSeq> {
        let text = text.trim().trim_start_matches('<').trim_end_matches('>').trim();
        if text.is_empty() {
            return FilteredDimSeq::new(Vec::new());
        }
        let bad = || Error::InvalidArgument(format!("bad filtered dimension sequence `{text}`"));
        let mut parts = Vec::new();
        for chunk in text.split(')') {
            let chunk = chunk.trim().trim_start_matches(',').trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk.strip_prefix('(').ok_or_else(bad)?;
            let dims = inner
                .split(',')
                .map(|d| d.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<u32>>>()?;
            parts.push(dims);
        }
        FilteredDimSeq::new(parts)
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    pub fn dims(&self) -> Vec<u32> {
        self.parts.iter().flatten().copied().collect()
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().flatten().sum()
    }

    /// The indexing object `I_P`.
    pub fn shape(&self) -> JObject {
        JObject::from_sizes(&self.parts.iter().map(|p| p.len()).collect::<Vec<_>>())
    }
}

impl fmt::Display for FilteredDimSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("({})", p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "<{}>", parts.join(","))
    }
}

/// A morphism of filtered dimension sequences, as its `(θ, ρ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FredMorphism {
    pub theta: Vec<usize>,
    pub rho: Vec<usize>,
}

/// Order preserving surjections `0..a -> 0..b`, as value lists.
fn surjections(a: usize, b: usize) -> Vec<Vec<usize>> {
    if b > a || (b == 0) != (a == 0) {
        return Vec::new();
    }
    if a == 0 {
        return vec![Vec::new()];
    }
    // choose which of the a - 1 gaps step up
    let mut out = Vec::new();
    for mask in 0u64..1 << (a - 1) {
        if mask.count_ones() as usize != b - 1 {
            continue;
        }
        let mut v = Vec::with_capacity(a);
        let mut cur = 0;
        v.push(0);
        for g in 0..a - 1 {
            cur += (mask >> g & 1) as usize;
            v.push(cur);
        }
        out.push(v);
    }
    out
}

/// All morphisms `D -> E`: surjective `θ`, the `ρ` forced by the
/// partitions, and `e_j = Σ_{θ(i) = j} d_i`.
pub fn fred_hom(d: &FilteredDimSeq, e: &FilteredDimSeq) -> Vec<FredMorphism> {
    let (src, tgt) = (d.shape(), e.shape());
    let (dd, ee) = (d.dims(), e.dims());
    let nq = e.parts.len();
    let mut out = Vec::new();
    for theta in surjections(dd.len(), ee.len()) {
        let mut sums = vec![0u32; ee.len()];
        for (i, &j) in theta.iter().enumerate() {
            sums[j] += dd[i];
        }
        if sums != ee {
            continue;
        }
        // θ is surjective, so every J_q has a non-empty preimage
        let mut rho = vec![usize::MAX; nq];
        let mut ok = true;
        for (i, &j) in theta.iter().enumerate() {
            let q = tgt.part_of()[j];
            let p = src.part_of()[i];
            if rho[q] == usize::MAX {
                rho[q] = p;
            } else if rho[q] != p {
                ok = false;
            }
        }
        if ok && JMorphism::new(src.clone(), tgt.clone(), theta.clone(), rho.clone()).is_ok() {
            out.push(FredMorphism { theta, rho });
        }
    }
    out
}

/// Every reduced filtered dimension sequence of total dimension `total`.
pub fn fred_objects(total: u32) -> Vec<FilteredDimSeq> {
    fn compositions(n: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        (1..=n)
            .flat_map(|first| {
                compositions(n - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    let mut out = Vec::new();
    for dims in compositions(total) {
        if dims.is_empty() {
            out.push(FilteredDimSeq { parts: Vec::new() });
            continue;
        }
        for sizes in compositions(dims.len() as u32) {
            let mut parts = Vec::new();
            let mut at = 0;
            for s in sizes {
                parts.push(dims[at..at + s as usize].to_vec());
                at += s as usize;
            }
            out.push(FilteredDimSeq { parts });
        }
    }
    out
}

/// Number of elements of total degree `0..=max_degree` in level `n` of the
/// free monoid on a graded set with `sizes[k - 1]` generators of degree `k`:
/// tuples of `n` words, i.e. the coefficients of `(1 - Σ a_k x^k)^(-n)`.
pub fn free_monoid_words(sizes: &[u64], n: usize, max_degree: usize) -> Vec<BigUint> {
    // words of each degree: w_0 = 1, w_d = Σ_k a_k w_{d-k}
    let mut words = vec![BigUint::zero(); max_degree + 1];
    words[0] = BigUint::one();
    for deg in 1..=max_degree {
        let mut acc = BigUint::zero();
        for (k, &a) in sizes.iter().enumerate() {
            let k = k + 1;
            if k <= deg && a > 0 {
                acc += &words[deg - k] * a;
            }
        }
        words[deg] = acc;
    }
    let mut out = vec![BigUint::zero(); max_degree + 1];
    out[0] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); max_degree + 1];
        for (i, x) in out.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, w) in words.iter().enumerate().take(max_degree + 1 - i) {
                next[i + j] += x * w;
            }
        }
        out = next;
    }
    out
}
