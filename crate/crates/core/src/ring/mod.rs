//! Finite commutative local rings, dense matrices over them, general linear
//! groups and canonical forms for free direct summands of `R^n`.
//!
//! Every supported ring is presented as `(Z/p^e)[t]/(f)` for a monic `f` of
//! degree `m`. Elements are encoded as the integer `sum c_i (p^e)^i`, so the
//! encoding is canonical and totally ordered.

mod descriptor;
mod group;
mod matrix;
mod summand;

use std::fmt;
use std::sync::Arc;

pub use descriptor::{is_prime, RingDescriptor, RingKind};
pub use group::{enumerate_gl, gl_order, MatrixGroup};
pub use matrix::Matrix;
pub use summand::{canonical_summand, enumerate_summands, summand_count, Summand};

use crate::caps::Caps;
use crate::error::{Error, Result};

/// Canonical encoding of a ring element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Rings up to this size keep full addition and multiplication tables.
const TABLE_LIMIT: u64 = 256;

struct RingData {
    desc: RingDescriptor,
    p: u64,
    /// `p^e`, the modulus of the coefficients.
    coeff_mod: u64,
    /// Lower coefficients `f_0..f_{m-1}` of the monic modulus polynomial.
    modulus: Vec<u64>,
    size: u64,
    add: Vec<u16>,
    mul: Vec<u16>,
    is_unit: Vec<bool>,
    inverse: Vec<u32>,
    units: Vec<Elem>,
}

/// A finite commutative local ring. Cloning is cheap.
#[derive(Clone)]
pub struct Ring {
    data: Arc<RingData>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data.desc == other.data.desc
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.data.desc)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.data.desc)
    }
}

/// Builds a ring from its descriptor, validating primality, irreducibility
/// and (up to `caps.ring_check`) locality.
pub fn make_ring(desc: &RingDescriptor, caps: &Caps) -> Result<Ring> {
    Ring::new(desc.clone(), caps)
}

impl Ring {
    pub fn parse(spec: &str) -> Result<Ring> {
        make_ring(&spec.parse()?, &Caps::default())
    }

    pub fn new(desc: RingDescriptor, caps: &Caps) -> Result<Ring> {
        let (p, e, modulus) = desc.presentation()?;
        let coeff_mod = p.pow(e);
        let m = modulus.len() as u32;
        let size = coeff_mod
            .checked_pow(m)
            .ok_or_else(|| Error::cap("ring size", u64::MAX, caps.ring_size))?;
        if size > caps.ring_size {
            return Err(Error::cap(format!("ring {desc}"), size, caps.ring_size));
        }
        let mut data = RingData {
            desc,
            p,
            coeff_mod,
            modulus,
            size,
            add: Vec::new(),
            mul: Vec::new(),
            is_unit: Vec::new(),
            inverse: Vec::new(),
            units: Vec::new(),
        };
        if size <= TABLE_LIMIT {
            let s = size as usize;
            data.add = vec![0; s * s];
            data.mul = vec![0; s * s];
            for a in 0..size {
                for b in 0..size {
                    data.add[(a * size + b) as usize] = data.add_raw(a, b) as u16;
                    data.mul[(a * size + b) as usize] = data.mul_raw(a, b) as u16;
                }
            }
        }
        // Residue-field criterion for units; locality is verified below
        // rather than assumed.
        let unit_count = (0..size).filter(|&a| data.residue_nonzero(a)).count() as u64;
        data.is_unit = (0..size).map(|a| data.residue_nonzero(a)).collect();
        data.inverse = vec![u32::MAX; size as usize];
        for a in 0..size {
            if data.is_unit[a as usize] {
                let inv = data.pow_raw(a, unit_count - 1);
                if data.mul_fast(a, inv) != 1 {
                    return Err(Error::RingSpec {
                        spec: data.desc.to_string(),
                        reason: format!("element {a} has no inverse"),
                    });
                }
                data.inverse[a as usize] = inv as u32;
            }
        }
        data.units = (0..size)
            .filter(|&a| data.is_unit[a as usize])
            .map(|a| Elem(a as u32))
            .collect();
        if size <= caps.ring_check {
            data.check_local()?;
        }
        Ok(Ring { data: Arc::new(data) })
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.data.desc
    }

    pub fn kind(&self) -> RingKind {
        self.data.desc.kind()
    }

    pub fn characteristic(&self) -> u64 {
        self.data.coeff_mod
    }

    /// The prime `p` with `|R| = p^m`.
    pub fn prime(&self) -> u64 {
        self.data.p
    }

    pub fn size(&self) -> u64 {
        self.data.size
    }

    /// Size of the residue field `R/m`.
    pub fn residue_size(&self) -> u64 {
        self.data.size / self.nonunit_count()
    }

    /// Number of elements of the maximal ideal.
    pub fn nonunit_count(&self) -> u64 {
        self.data.size - self.data.units.len() as u64
    }

    pub fn maximal_ideal_generator(&self) -> &'static str {
        self.data.desc.maximal_ideal_generator()
    }

    pub fn is_field(&self) -> bool {
        self.nonunit_count() == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.data.size as u32).map(Elem)
    }

    pub fn units(&self) -> &[Elem] {
        &self.data.units
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        if self.data.size == 1 {
            Elem::ZERO
        } else {
            Elem::ONE
        }
    }

    pub fn from_int(&self, v: i64) -> Elem {
        let r = v.rem_euclid(self.data.coeff_mod as i64) as u64;
        Elem(r as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let d = &self.data;
        if !d.add.is_empty() {
            Elem(d.add[(a.0 as u64 * d.size + b.0 as u64) as usize] as u32)
        } else {
            Elem(d.add_raw(a.0 as u64, b.0 as u64) as u32)
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.data.mul_fast(a.0 as u64, b.0 as u64) as u32)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.data.neg_raw(a.0 as u64) as u32)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn is_unit(&self, a: Elem) -> bool {
        self.data.is_unit[a.index()]
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        let v = self.data.inverse[a.index()];
        (v != u32::MAX).then_some(Elem(v))
    }

    /// Coefficients `c_0..c_{m-1}` of the element in `(Z/p^e)[t]/(f)`.
    pub fn coefficients(&self, a: Elem) -> Vec<u64> {
        self.data.digits(a.0 as u64)
    }

    pub fn format_elem(&self, a: Elem) -> String {
        let c = self.coefficients(a);
        if c.len() == 1 {
            return c[0].to_string();
        }
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let t = match i {
                0 => ci.to_string(),
                1 if ci == 1 => "t".to_string(),
                1 => format!("{ci}t"),
                _ if ci == 1 => format!("t^{i}"),
                _ => format!("{ci}t^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl RingData {
    fn digits(&self, mut a: u64) -> Vec<u64> {
        let m = self.modulus.len();
        let mut out = vec![0; m];
        for c in out.iter_mut() {
            *c = a % self.coeff_mod;
            a /= self.coeff_mod;
        }
        out
    }

    fn undigits(&self, c: &[u64]) -> u64 {
        c.iter()
            .rev()
            .fold(0, |acc, &ci| acc * self.coeff_mod + ci % self.coeff_mod)
    }

    fn add_raw(&self, a: u64, b: u64) -> u64 {
        let x = self.digits(a);
        let y = self.digits(b);
        let s: Vec<u64> = x
            .iter()
            .zip(&y)
            .map(|(u, v)| (u + v) % self.coeff_mod)
            .collect();
        self.undigits(&s)
    }

    fn neg_raw(&self, a: u64) -> u64 {
        let x = self.digits(a);
        let s: Vec<u64> = x
            .iter()
            .map(|u| (self.coeff_mod - u) % self.coeff_mod)
            .collect();
        self.undigits(&s)
    }

    fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let q = self.coeff_mod;
        let m = self.modulus.len();
        let x = self.digits(a);
        let y = self.digits(b);
        let mut prod = vec![0u64; 2 * m];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % q;
            }
        }
        // t^m = -(f_0 + f_1 t + ... + f_{m-1} t^{m-1})
        for deg in (m..2 * m).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &fi) in self.modulus.iter().enumerate() {
                let k = deg - m + i;
                prod[k] = (prod[k] + q - (c * fi) % q) % q;
            }
        }
        self.undigits(&prod[..m])
    }

    #[inline]
    fn mul_fast(&self, a: u64, b: u64) -> u64 {
        if !self.mul.is_empty() {
            self.mul[(a * self.size + b) as usize] as u64
        } else {
            self.mul_raw(a, b)
        }
    }

    fn pow_raw(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = if self.size == 1 { 0 } else { 1 };
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_fast(acc, base);
            }
            base = self.mul_fast(base, base);
            e >>= 1;
        }
        acc
    }

    fn residue_nonzero(&self, a: u64) -> bool {
        match self.desc.kind() {
            RingKind::ExtensionField | RingKind::PrimeField => a != 0,
            RingKind::IntegersModPrimePower | RingKind::TruncatedPolynomial => {
                (a % self.coeff_mod) % self.p != 0
            }
        }
    }

    /// Exhaustive check that the non-units form an ideal.
    fn check_local(&self) -> Result<()> {
        let nonunits: Vec<u64> = (0..self.size).filter(|&a| !self.is_unit[a as usize]).collect();
        for &a in &nonunits {
            for &b in &nonunits {
                if self.is_unit[self.add_fast(a, b) as usize] {
                    return Err(Error::NotLocal(self.desc.to_string(), "addition"));
                }
            }
            for r in 0..self.size {
                if self.is_unit[self.mul_fast(a, r) as usize] {
                    return Err(Error::NotLocal(self.desc.to_string(), "multiplication"));
                }
            }
        }
        Ok(())
    }

    fn add_fast(&self, a: u64, b: u64) -> u64 {
        if !self.add.is_empty() {
            self.add[(a * self.size + b) as usize] as u64
        } else {
            self.add_raw(a, b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_units(r: &Ring) -> Vec<Elem> {
        r.elements()
            .filter(|&a| r.elements().any(|b| r.mul(a, b) == r.one()))
            .collect()
    }

    #[test]
    fn f2_has_one_unit() {
        let r = Ring::parse("F2").unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.units(), &[Elem(1)]);
        assert!(r.is_field());
    }

    #[test]
    fn z4_units_are_one_and_three() {
        let r = Ring::parse("Z4").unwrap();
        assert_eq!(r.size(), 4);
        assert_eq!(brute_units(&r), vec![Elem(1), Elem(3)]);
        assert_eq!(r.units(), &[Elem(1), Elem(3)]);
        assert_eq!(r.residue_size(), 2);
    }

    #[test]
    fn f4_has_three_units() {
        let r = Ring::parse("F4:t^2+t+1").unwrap();
        assert_eq!(r.size(), 4);
        assert_eq!(brute_units(&r).len(), 3);
        assert_eq!(r.units().len(), 3);
        // t * t = t + 1
        let t = Elem(2);
        assert_eq!(r.mul(t, t), Elem(3));
    }

    #[test]
    fn unit_sets_match_brute_force() {
        for spec in ["F2", "F3", "F5", "F4", "F8", "F9", "Z4", "Z8", "Z9", "F2[t]/t^2", "F3[t]/t^2", "F2[t]/t^3"] {
            let r = Ring::parse(spec).unwrap();
            assert_eq!(brute_units(&r), r.units(), "{spec}");
            for &u in r.units() {
                assert_eq!(r.mul(u, r.inv(u).unwrap()), r.one());
            }
        }
    }

    #[test]
    fn truncated_polynomial_arithmetic() {
        let r = Ring::parse("F2[t]/t^2").unwrap();
        let t = Elem(2);
        assert_eq!(r.mul(t, t), Elem::ZERO);
        assert!(!r.is_unit(t));
        assert!(r.is_unit(r.add(t, r.one())));
        assert_eq!(r.residue_size(), 2);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(Ring::parse("F6"), Err(Error::RingSpec { .. }) | Err(Error::NotPrime(_))));
        assert!(matches!(Ring::parse("F4:t^2+1"), Err(Error::Reducible(_))));
        assert!(matches!(Ring::parse("Z6"), Err(Error::RingSpec { .. })));
        assert!(Ring::parse("Q").is_err());
    }

    #[test]
    fn size_cap_is_enforced() {
        let caps = Caps {
            ring_size: 8,
            ..Caps::default()
        };
        let err = make_ring(&"F9".parse().unwrap(), &caps).unwrap_err();
        assert!(err.is_cap_exceeded());
    }

    #[test]
    fn large_ring_without_tables() {
        let r = Ring::parse("Z1024").unwrap();
        assert_eq!(r.size(), 1024);
        assert_eq!(r.units().len(), 512);
        assert_eq!(r.mul(Elem(3), r.inv(Elem(3)).unwrap()), r.one());
        assert_eq!(r.add(Elem(1000), Elem(100)), Elem(76));
    }
}
