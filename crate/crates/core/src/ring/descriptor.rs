use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingKind {
    PrimeField,
    ExtensionField,
    IntegersModPrimePower,
    TruncatedPolynomial,
}

/// Parsed ring spec.
///
/// Grammar accepted by [`FromStr`]:
///
/// * `F<p>` for a prime `p`;
/// * `F<q>` for `q` in {4, 8, 9} (built-in irreducible polynomials);
/// * `F<q>:<poly>` with an explicit irreducible polynomial in `t`, e.g. `F4:t^2+t+1`;
/// * `Z<p^k>` for `Z/p^k`, e.g. `Z4`, `Z8`;
/// * `F<p>[t]/t^<k>` for the truncated polynomial ring, e.g. `F2[t]/t^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingDescriptor {
    PrimeField { p: u64 },
    /// `F_p[t]/(f)` with `f` monic irreducible, coefficients low to high
    /// (the leading 1 included).
    ExtensionField { p: u64, poly: Vec<u64> },
    IntegersMod { p: u64, k: u32 },
    Truncated { p: u64, k: u32 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, k)` with `n = p^k`, if `n` is a prime power.
fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

fn builtin_poly(q: u64) -> Option<(u64, Vec<u64>)> {
    match q {
        4 => Some((2, vec![1, 1, 1])),
        8 => Some((2, vec![1, 1, 0, 1])),
        9 => Some((3, vec![1, 0, 1])),
        _ => None,
    }
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let k = shift + i;
                r[k] = (r[k] + p * p - (lead * bi) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Brute-force irreducibility over F_p: no monic factor of degree 1..=deg/2.
pub fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                f.push(x % p);
                x /= p;
            }
            f.push(1);
            if poly_rem(poly, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn parse_u64(s: &str, spec: &str) -> Result<u64> {
    s.parse::<u64>().map_err(|_| Error::RingSpec {
        spec: spec.to_string(),
        reason: format!("`{s}` is not a positive integer"),
    })
}

/// Parses a polynomial in `t` such as `t^2+t+1` or `2t^3+t+2`, reducing the
/// coefficients mod `p`. Returns coefficients low to high.
fn parse_poly(s: &str, p: u64, spec: &str) -> Result<Vec<u64>> {
    let bad = |reason: String| Error::RingSpec {
        spec: spec.to_string(),
        reason,
    };
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(bad("empty polynomial".into()));
    }
    let mut coeffs: Vec<u64> = Vec::new();
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if ch == '+' || ch == '-' {
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(bad("dangling sign".into()));
    }
    terms.push((neg, cur));
    for (neg, term) in terms {
        let (coef, exp) = match term.find('t') {
            None => (parse_u64(&term, spec)?, 0usize),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { parse_u64(c, spec)? };
                let rest = &term[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    parse_u64(e, spec)? as usize
                } else {
                    return Err(bad(format!("cannot parse term `{term}`")));
                };
                (c, e)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        let c = coef % p;
        coeffs[exp] = if neg {
            (coeffs[exp] + p - c) % p
        } else {
            (coeffs[exp] + c) % p
        };
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    if coeffs.last() != Some(&1) {
        return Err(bad("polynomial must be monic".into()));
    }
    Ok(coeffs)
}

impl FromStr for RingDescriptor {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let bad = |reason: &str| Error::RingSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        if let Some(rest) = s.strip_prefix('Z') {
            let n = parse_u64(rest, spec)?;
            let (p, k) = prime_power(n).ok_or_else(|| bad("modulus must be a prime power"))?;
            return Ok(RingDescriptor::IntegersMod { p, k });
        }
        let rest = s.strip_prefix('F').ok_or_else(|| bad("expected `F` or `Z` prefix"))?;
        if let Some((q, trunc)) = rest.split_once("[t]/") {
            let p = parse_u64(q, spec)?;
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let k = trunc
                .strip_prefix("t^")
                .map(|k| parse_u64(k, spec))
                .or_else(|| (trunc == "t").then_some(Ok(1)))
                .ok_or_else(|| bad("expected `t^k` after `[t]/`"))??;
            if k == 0 {
                return Err(bad("truncation degree must be positive"));
            }
            return Ok(RingDescriptor::Truncated { p, k: k as u32 });
        }
        let (qs, poly) = match rest.split_once(':') {
            Some((q, poly)) => (q, Some(poly)),
            None => (rest, None),
        };
        let q = parse_u64(qs, spec)?;
        let (p, m) = prime_power(q).ok_or_else(|| {
            if q < 2 {
                bad("field size must be at least 2")
            } else {
                Error::NotPrime(q)
            }
        })?;
        match poly {
            None if m == 1 => Ok(RingDescriptor::PrimeField { p }),
            None => {
                let (_, poly) = builtin_poly(q).ok_or_else(|| {
                    bad("no built-in polynomial for this field; use F<q>:<poly>")
                })?;
                Ok(RingDescriptor::ExtensionField { p, poly })
            }
            Some(text) => {
                let coeffs = parse_poly(text, p, spec)?;
                if coeffs.len() as u32 - 1 != m {
                    return Err(bad("polynomial degree does not match the field size"));
                }
                if !is_irreducible(&coeffs, p) {
                    return Err(Error::Reducible(text.to_string()));
                }
                if m == 1 {
                    return Ok(RingDescriptor::PrimeField { p });
                }
                Ok(RingDescriptor::ExtensionField { p, poly: coeffs })
            }
        }
    }
}

impl RingDescriptor {
    pub fn kind(&self) -> RingKind {
        match self {
            RingDescriptor::PrimeField { .. } => RingKind::PrimeField,
            RingDescriptor::ExtensionField { .. } => RingKind::ExtensionField,
            RingDescriptor::IntegersMod { .. } => RingKind::IntegersModPrimePower,
            RingDescriptor::Truncated { .. } => RingKind::TruncatedPolynomial,
        }
    }

    pub fn prime(&self) -> u64 {
        match *self {
            RingDescriptor::PrimeField { p }
            | RingDescriptor::ExtensionField { p, .. }
            | RingDescriptor::IntegersMod { p, .. }
            | RingDescriptor::Truncated { p, .. } => p,
        }
    }

    pub fn maximal_ideal_generator(&self) -> &'static str {
        match self {
            RingDescriptor::PrimeField { .. } | RingDescriptor::ExtensionField { .. } => "0",
            RingDescriptor::IntegersMod { .. } => "p",
            RingDescriptor::Truncated { .. } => "t",
        }
    }

    /// `(p, e, f)` presenting the ring as `(Z/p^e)[t]/(f)`; `f` is given by
    /// its non-leading coefficients.
    pub(crate) fn presentation(&self) -> Result<(u64, u32, Vec<u64>)> {
        let p = self.prime();
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(match self {
            RingDescriptor::PrimeField { .. } => (p, 1, vec![0]),
            RingDescriptor::ExtensionField { poly, .. } => {
                if poly.len() < 2 || *poly.last().unwrap() != 1 {
                    return Err(Error::RingSpec {
                        spec: self.to_string(),
                        reason: "polynomial must be monic of positive degree".into(),
                    });
                }
                if !is_irreducible(poly, p) {
                    return Err(Error::Reducible(format_poly(poly)));
                }
                (p, 1, poly[..poly.len() - 1].to_vec())
            }
            RingDescriptor::IntegersMod { k, .. } => (p, *k, vec![0]),
            RingDescriptor::Truncated { k, .. } => (p, 1, vec![0; *k as usize]),
        })
    }
}

fn format_poly(poly: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in poly.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}t"),
            _ => format!("{coef}t^{i}"),
        });
    }
    terms.join("+")
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::PrimeField { p } => write!(f, "F{p}"),
            RingDescriptor::ExtensionField { p, poly } => {
                let q = p.pow(poly.len() as u32 - 1);
                write!(f, "F{q}:{}", format_poly(poly))
            }
            RingDescriptor::IntegersMod { p, k } => write!(f, "Z{}", p.pow(*k)),
            RingDescriptor::Truncated { p, k } if *k == 1 => write!(f, "F{p}[t]/t"),
            RingDescriptor::Truncated { p, k } => write!(f, "F{p}[t]/t^{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_specs() {
        assert_eq!("F2".parse::<RingDescriptor>().unwrap(), RingDescriptor::PrimeField { p: 2 });
        assert_eq!(
            "F4:t^2+t+1".parse::<RingDescriptor>().unwrap(),
            RingDescriptor::ExtensionField { p: 2, poly: vec![1, 1, 1] }
        );
        assert_eq!("F4".parse::<RingDescriptor>().unwrap(), "F4:t^2+t+1".parse().unwrap());
        assert_eq!("Z4".parse::<RingDescriptor>().unwrap(), RingDescriptor::IntegersMod { p: 2, k: 2 });
        assert_eq!("Z8".parse::<RingDescriptor>().unwrap(), RingDescriptor::IntegersMod { p: 2, k: 3 });
        assert_eq!(
            "F2[t]/t^2".parse::<RingDescriptor>().unwrap(),
            RingDescriptor::Truncated { p: 2, k: 2 }
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["F2", "F3", "F4:t^2+t+1", "F9:t^2+1", "F8:t^3+t+1", "Z4", "Z8", "F2[t]/t^2"] {
            let d: RingDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            assert_eq!(d.to_string().parse::<RingDescriptor>().unwrap(), d);
        }
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[2, 0, 1], 3));
        // (t^2+t+1)^2 = t^4+t^2+1 over F2 has no roots but is reducible
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!("F6".parse::<RingDescriptor>(), Err(Error::NotPrime(6))));
        assert!(matches!("F4:t^2+1".parse::<RingDescriptor>(), Err(Error::Reducible(_))));
        assert!("F4:t^3+t+1".parse::<RingDescriptor>().is_err());
        assert!("Z12".parse::<RingDescriptor>().is_err());
        assert!("F16".parse::<RingDescriptor>().is_err());
        assert!(matches!("F4[t]/t^2".parse::<RingDescriptor>(), Err(Error::NotPrime(4))));
    }
}
