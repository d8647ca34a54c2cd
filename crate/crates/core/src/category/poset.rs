use std::collections::HashMap;

use super::FinCategory;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::homology::{ChainComplex, SparseMatrix};

/// A finite poset given by its strict order relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    less: Vec<bool>,
}

impl Poset {
    /// `less[i * n + j]` says `i < j`. Checks irreflexivity, antisymmetry
    /// and transitivity.
    pub fn new(labels: Vec<String>, less: Vec<bool>) -> Result<Poset> {
        let n = labels.len();
        if less.len() != n * n {
            return Err(Error::InvalidPoset("relation matrix has the wrong size".into()));
        }
        let lt = |i: usize, j: usize| less[i * n + j];
        for i in 0..n {
            if lt(i, i) {
                return Err(Error::InvalidPoset(format!("element {i} is below itself")));
            }
            for j in 0..n {
                if lt(i, j) && lt(j, i) {
                    return Err(Error::InvalidPoset(format!("elements {i} and {j} are below each other")));
                }
                if lt(i, j) {
                    for k in 0..n {
                        if lt(j, k) && !lt(i, k) {
                            return Err(Error::InvalidPoset(format!("relation is not transitive at {i} < {j} < {k}")));
                        }
                    }
                }
            }
        }
        Ok(Poset { labels, less })
    }

    /// Builds from a non-strict comparison `le(i, j)` meaning `i <= j`.
    pub fn from_le(labels: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        let n = labels.len();
        let less = (0..n * n).map(|k| k / n != k % n && le(k / n, k % n)).collect();
        Poset::new(labels, less)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.less[i * self.len() + j]
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j)
    }

    /// Elements `>= x`, ascending.
    pub fn up_set(&self, x: usize) -> Vec<u32> {
        (0..self.len()).filter(|&y| self.le(x, y)).map(|y| y as u32).collect()
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|x| self.le(x, m)))
    }

    /// The poset as a category: one morphism `x -> y` for each `x <= y`.
    pub fn to_category(&self, caps: &Caps) -> Result<FinCategory> {
        let n = self.len();
        let mut index = HashMap::new();
        let (mut src, mut tgt, mut labels) = (Vec::new(), Vec::new(), Vec::new());
        for x in 0..n {
            for y in 0..n {
                if self.le(x, y) {
                    index.insert((x as u32, y as u32), src.len() as u32);
                    src.push(x as u32);
                    tgt.push(y as u32);
                    labels.push(format!("{}<={}", self.labels[x], self.labels[y]));
                }
            }
        }
        let identities = (0..n as u32).map(|x| index[&(x, x)]).collect();
        let (s, t) = (src.clone(), tgt.clone());
        FinCategory::from_fn(
            self.labels.clone(),
            labels,
            src,
            tgt,
            identities,
            |f, g| index[&(s[g as usize], t[f as usize])],
            caps,
        )
    }
}

/// A simplicial complex on vertices `0..num_vertices`, stored as sorted
/// vertex tuples grouped by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    num_vertices: usize,
    simplices: Vec<Vec<Vec<u32>>>,
}

impl SimplicialComplex {
    /// Checks that tuples are strictly increasing and faces are present.
    pub fn new(num_vertices: usize, mut simplices: Vec<Vec<Vec<u32>>>) -> Result<SimplicialComplex> {
        for (d, level) in simplices.iter_mut().enumerate() {
            for s in level.iter() {
                if s.len() != d + 1 || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&v| v as usize >= num_vertices) {
                    return Err(Error::InvalidArgument(format!("bad simplex {s:?} in dimension {d}")));
                }
            }
            level.sort();
            level.dedup();
        }
        while simplices.last().is_some_and(|l| l.is_empty()) {
            simplices.pop();
        }
        for d in 1..simplices.len() {
            for s in &simplices[d] {
                for i in 0..=d {
                    let mut face = s.clone();
                    face.remove(i);
                    if simplices[d - 1].binary_search(&face).is_err() {
                        return Err(Error::InvalidArgument(format!("face {face:?} of {s:?} is missing")));
                    }
                }
            }
        }
        Ok(SimplicialComplex { num_vertices, simplices })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// `-1` for the empty complex.
    pub fn dimension(&self) -> i64 {
        self.simplices.len() as i64 - 1
    }

    pub fn simplices(&self, d: usize) -> &[Vec<u32>] {
        self.simplices.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    /// Simplicial chains (unreduced). The empty complex gives one zero
    /// group in degree 0.
    pub fn chain_complex(&self) -> ChainComplex {
        let top = self.simplices.len().max(1) - 1;
        let dims: Vec<usize> = (0..=top).map(|d| self.count(d)).collect();
        let boundaries = (1..=top)
            .map(|d| {
                let lower = &self.simplices[d - 1];
                let cols = self.simplices[d]
                    .iter()
                    .map(|s| {
                        (0..=d)
                            .map(|i| {
                                let mut face = s.clone();
                                face.remove(i);
                                let r = lower.binary_search(&face).expect("faces are present") as u32;
                                (r, if i % 2 == 0 { 1 } else { -1 })
                            })
                            .collect()
                    })
                    .collect();
                SparseMatrix::from_columns(lower.len(), cols)
            })
            .collect();
        ChainComplex::new(dims, boundaries, false).expect("simplicial boundaries square to zero")
    }
}

/// Simplices are the chains `x_0 < x_1 < ... < x_k` of the poset.
pub fn order_complex(p: &Poset, caps: &Caps) -> Result<SimplicialComplex> {
    let n = p.len();
    let above: Vec<Vec<u32>> = (0..n)
        .map(|x| (0..n).filter(|&y| p.lt(x, y)).map(|y| y as u32).collect())
        .collect();
    let mut simplices: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut total = 0u64;
    let mut stack: Vec<u32> = Vec::new();
    fn extend(
        above: &[Vec<u32>],
        stack: &mut Vec<u32>,
        out: &mut Vec<Vec<Vec<u32>>>,
        total: &mut u64,
        cap: u64,
    ) -> Result<()> {
        let d = stack.len() - 1;
        if out.len() <= d {
            out.push(Vec::new());
        }
        let mut s = stack.clone();
        s.sort_unstable();
        out[d].push(s);
        *total += 1;
        if *total > cap {
            return Err(Error::cap("order complex simplices", *total, cap));
        }
        let last = *stack.last().unwrap() as usize;
        for &y in &above[last] {
            stack.push(y);
            extend(above, stack, out, total, cap)?;
            stack.pop();
        }
        Ok(())
    }
    for x in 0..n as u32 {
        stack.push(x);
        extend(&above, &mut stack, &mut simplices, &mut total, caps.chains)?;
        stack.pop();
    }
    SimplicialComplex::new(n, simplices)
}
