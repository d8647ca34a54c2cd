//! Chain complexes and their homology over the integers and prime fields.

mod complex;
mod maps;
mod modp;
mod snf;
mod sparse;
mod sparse_snf;
mod zreduce;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use complex::{check_boundary_square, ChainComplex, ChainMap, ColumnSource, QuotientComplex, Truncation};
pub use maps::{induced_map, kernel_basis, kernel_basis_mod_p, InducedMap};
pub use modp::{boundary_rank, boundary_ranks, ModpReducer};
pub use snf::{invariant_factors_dense, smith_normal_form, IntMatrix, SmithForm};
pub use sparse::{normalize_column, SparseBuilder, SparseMatrix};
pub use sparse_snf::invariant_factors;
pub use zreduce::boundary_invariant_factors;

use crate::error::{Error, Result};
use crate::ring::is_prime;

/// Largest prime the streaming mod-p reducer accepts.
const BOUND_PRIME: u32 = 65521;

/// Coefficients for homology: the integers or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Integers,
    Prime(u32),
}

impl Coefficients {
    pub fn prime(p: u32) -> Result<Coefficients> {
        if !is_prime(p as u64) || p >= 1 << 16 {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Coefficients::Prime(p))
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// Accepts `Z`, `F<p>` and `Fp:<p>`.
impl FromStr for Coefficients {
    type Err = Error;
    fn from_str(s: &str) -> Result<Coefficients> {
        let s = s.trim();
        if s == "Z" {
            return Ok(Coefficients::Integers);
        }
        let digits = s.strip_prefix("Fp:").or_else(|| s.strip_prefix('F'));
        match digits.and_then(|d| d.parse::<u32>().ok()) {
            Some(p) => Coefficients::prime(p),
            None => Err(Error::InvalidArgument(format!("unknown coefficients '{s}' (use Z, F2, Fp:3, ...)"))),
        }
    }
}

impl Serialize for Coefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One homology group: `Z^betti ⊕ ⊕ Z/t` (over a field only `betti`, the
/// dimension, is used).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: i64,
    pub betti: usize,
    pub torsion: Vec<u64>,
    pub reliable: bool,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    /// Same abstract group (ignoring degree and reliability).
    pub fn same_group(&self, other: &HomologyGroup) -> bool {
        self.betti == other.betti && self.torsion == other.torsion
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.betti == 1 {
            parts.push("Z".to_string());
        } else if self.betti > 1 {
            parts.push(format!("Z^{}", self.betti));
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub coefficients: Coefficients,
    pub reduced: bool,
    pub groups: Vec<HomologyGroup>,
    /// Largest degree whose group is exact, if any.
    pub reliable_up_to: Option<i64>,
}

impl HomologyResult {
    pub fn group(&self, degree: i64) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| g.degree == degree)
    }

    pub fn betti(&self, degree: i64) -> usize {
        self.group(degree).map_or(0, |g| g.betti)
    }

    pub fn torsion(&self, degree: i64) -> &[u64] {
        self.group(degree).map_or(&[], |g| &g.torsion)
    }

    /// The group in `degree` is trivial and exact. Degrees past the top of
    /// an untruncated complex count as trivial.
    pub fn vanishes_in(&self, degree: i64) -> bool {
        match self.group(degree) {
            Some(g) => g.reliable && g.is_zero(),
            None => self.reliable_up_to.is_some_and(|r| degree <= r) || self.is_complete_past(degree),
        }
    }

    fn is_complete_past(&self, degree: i64) -> bool {
        let top = self.groups.iter().map(|g| g.degree).max().unwrap_or(-1);
        degree > top && self.groups.iter().all(|g| g.reliable)
    }

    /// Converts to reduced homology (removes one free summand from degree 0,
    /// or adds `H_{-1}` for an empty complex).
    pub fn to_reduced(&self) -> HomologyResult {
        if self.reduced {
            return self.clone();
        }
        let mut out = self.clone();
        out.reduced = true;
        match out.groups.iter_mut().find(|g| g.degree == 0) {
            Some(g) if g.betti > 0 => g.betti -= 1,
            _ => {
                out.groups.insert(
                    0,
                    HomologyGroup {
                        degree: -1,
                        betti: 1,
                        torsion: Vec::new(),
                        reliable: true,
                    },
                );
            }
        }
        if !out.groups.iter().any(|g| g.degree == -1) {
            out.groups.insert(
                0,
                HomologyGroup {
                    degree: -1,
                    betti: 0,
                    torsion: Vec::new(),
                    reliable: true,
                },
            );
        }
        out
    }

    /// Degrees with a non-trivial group.
    pub fn support(&self) -> Vec<i64> {
        self.groups.iter().filter(|g| !g.is_zero()).map(|g| g.degree).collect()
    }

    pub fn is_free(&self) -> bool {
        self.groups.iter().all(|g| g.torsion.is_empty())
    }
}

fn torsion_of(invariants: &[BigInt]) -> Result<Vec<u64>> {
    invariants
        .iter()
        .filter(|x| !x.is_one())
        .map(|x| {
            x.to_u64()
                .ok_or_else(|| Error::InvalidComplex(format!("torsion coefficient {x} does not fit in 64 bits")))
        })
        .collect()
}

/// Homology of `src` in degrees `0..=top`. For a truncated complex the top
/// degree is reported as unreliable (its Betti number is an upper bound).
pub fn homology<S: ColumnSource + ?Sized>(src: &S, coeff: Coefficients) -> Result<HomologyResult> {
    let top = src.top_degree();
    let truncated = src.is_truncated();
    let dims: Vec<usize> = (0..=top).map(|d| src.dim(d)).collect();
    // rank[d] = rank of ∂_d, with ∂_0 = 0; torsion[d] from ∂_d
    let mut rank = vec![0usize; top + 2];
    let mut tors: Vec<Vec<u64>> = vec![Vec::new(); top + 2];
    match coeff {
        Coefficients::Prime(p) => {
            rank[..=top].copy_from_slice(&boundary_ranks(src, p));
        }
        Coefficients::Integers => {
            // rank_Q ∂_d <= dim C_{d-1} - rank_Q ∂_{d-1}; a prime reaching
            // that bound pins the rational rank
            let modp = boundary_ranks(src, BOUND_PRIME);
            for d in 1..=top {
                let bound = dims[d - 1] - modp[d - 1];
                let inv = boundary_invariant_factors(src, d, (modp[d] == bound).then_some(bound))?;
                rank[d] = inv.len();
                tors[d] = torsion_of(&inv)?;
            }
        }
    }
    let groups = (0..=top)
        .map(|d| {
            let last = d == top;
            HomologyGroup {
                degree: d as i64,
                betti: dims[d] - rank[d] - if last { 0 } else { rank[d + 1] },
                torsion: if last { Vec::new() } else { tors[d + 1].clone() },
                reliable: !(last && truncated),
            }
        })
        .collect();
    let reliable_up_to = if truncated {
        top.checked_sub(1).map(|t| t as i64)
    } else {
        Some(top as i64)
    };
    Ok(HomologyResult {
        coefficients: coeff,
        reduced: false,
        groups,
        reliable_up_to,
    })
}

/// Homology of the quotient `C / S` where `sub[d]` selects the basis of the
/// subcomplex in degree `d`.
pub fn relative_homology<S: ColumnSource + ?Sized>(
    src: &S,
    sub: &[Vec<usize>],
    coeff: Coefficients,
) -> Result<HomologyResult> {
    homology(&QuotientComplex::new(src, sub)?, coeff)
}

/// Checks that `fp` is what the universal coefficient theorem predicts
/// from the integral homology `z`, in every degree where both are exact.
pub fn universal_coefficients_consistent(z: &HomologyResult, fp: &HomologyResult) -> bool {
    let Coefficients::Prime(p) = fp.coefficients else {
        return false;
    };
    if z.coefficients != Coefficients::Integers || z.reduced != fp.reduced {
        return false;
    }
    let divisible = |deg: i64| -> usize {
        match z.group(deg) {
            Some(g) => g.torsion.iter().filter(|&&t| t % p as u64 == 0).count(),
            None => 0,
        }
    };
    fp.groups.iter().filter(|g| g.reliable).all(|g| {
        let d = g.degree;
        let Some(zg) = z.group(d) else {
            return g.betti == divisible(d - 1);
        };
        if !zg.reliable || z.group(d - 1).is_some_and(|h| !h.reliable) {
            return true;
        }
        g.betti == zg.betti + divisible(d) + divisible(d - 1)
    })
}

/// `Σ (-1)^d dim C_d = Σ (-1)^d betti_d`, meaningful for untruncated
/// complexes only.
pub fn euler_characteristic_matches<S: ColumnSource + ?Sized>(src: &S, h: &HomologyResult) -> bool {
    if src.is_truncated() || h.reduced {
        return false;
    }
    let chains: i64 = (0..=src.top_degree())
        .map(|d| if d % 2 == 0 { src.dim(d) as i64 } else { -(src.dim(d) as i64) })
        .sum();
    let betti: i64 = h
        .groups
        .iter()
        .map(|g| if g.degree % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) })
        .sum();
    chains == betti
}
