use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rbslab_core::homology::Coefficients;
use rbslab_core::ordpm::{parse_word, FilteredDimSeq, SnugContext};
use rbslab_core::ring::Ring;
use rbslab_core::Caps;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tits,
    RbsHomology,
    RbsRelative,
    CofibreCheck,
    StabMap,
    Steinberg,
    Coinvariants,
    H1,
    TwistedArrow,
    Snug,
    OrdpmRoundtrip,
    Fred,
    AcceptanceGrid,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Tits => "tits",
            Command::RbsHomology => "rbs-homology",
            Command::RbsRelative => "rbs-relative",
            Command::CofibreCheck => "cofibre-check",
            Command::StabMap => "stab-map",
            Command::Steinberg => "steinberg",
            Command::Coinvariants => "coinvariants",
            Command::H1 => "h1",
            Command::TwistedArrow => "twisted-arrow",
            Command::Snug => "snug",
            Command::OrdpmRoundtrip => "ordpm-roundtrip",
            Command::Fred => "fred",
            Command::AcceptanceGrid => "acceptance-grid",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One named computation with everything that determines its result.
/// Unused fields stay `None`; `output` does not affect the result and is
/// left out of the cache key.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u32>,
    /// Which category for `twisted-arrow`: `rbs`, `flags`, `bz2` or `random:<seed>`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    /// Criteria to run for `acceptance-grid`; empty means all.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub only: Vec<u32>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub caps: BTreeMap<String, u64>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl JobSpec {
    pub fn new(command: Command) -> JobSpec {
        JobSpec {
            command: Some(command),
            ..JobSpec::default()
        }
    }

    pub fn command(&self) -> Command {
        self.command.expect("job has a command")
    }

    pub fn ring(&self) -> Result<Ring, UsageError> {
        let spec = self.ring.as_deref().ok_or_else(|| usage(format!("{} needs --ring", self.command())))?;
        Ring::parse(spec).map_err(|e| usage(e.to_string()))
    }

    pub fn rank(&self) -> Result<usize, UsageError> {
        self.rank.ok_or_else(|| usage(format!("{} needs --rank", self.command())))
    }

    pub fn coefficients(&self) -> Result<Coefficients, UsageError> {
        match &self.coeff {
            None => Ok(Coefficients::Integers),
            Some(c) => Coefficients::from_str(c).map_err(|e| usage(e.to_string())),
        }
    }

    pub fn max_degree(&self, default: usize) -> usize {
        self.max_degree.unwrap_or(default)
    }

    pub fn prime(&self) -> Result<u32, UsageError> {
        let p = self.prime.ok_or_else(|| usage(format!("{} needs --p", self.command())))?;
        Coefficients::prime(p).map_err(|e| usage(e.to_string()))?;
        Ok(p)
    }

    /// Default caps with the overrides applied.
    pub fn caps(&self) -> Result<Caps, UsageError> {
        apply_caps(&Caps::default(), &self.caps)
    }

    /// Checks every argument the command will read, so that failures
    /// after this point are genuine computation failures.
    pub fn validate(&self) -> Result<(), UsageError> {
        let command = self.command.ok_or_else(|| usage("no command"))?;
        self.caps()?;
        if self.coeff.is_some() {
            self.coefficients()?;
        }
        match command {
            Command::Tits | Command::RbsHomology | Command::RbsRelative | Command::Steinberg | Command::Coinvariants => {
                self.ring()?;
                self.rank()?;
            }
            Command::StabMap => {
                self.ring()?;
                if self.rank()? < 2 {
                    return Err(usage("stab-map needs --rank >= 2 (the target rank)"));
                }
            }
            Command::CofibreCheck => {
                self.ring()?;
                self.rank()?;
                self.prime()?;
            }
            Command::H1 => {
                self.ring()?;
            }
            Command::TwistedArrow => {
                let t = self.target.as_deref().ok_or_else(|| usage("twisted-arrow needs --target"))?;
                parse_target(t)?;
                if t == "rbs" || t == "rbs-skeleton" || t == "flags" {
                    self.ring()?;
                    self.rank()?;
                }
            }
            Command::Snug => {
                let c = self.context.as_deref().ok_or_else(|| usage("snug needs --context"))?;
                let w = self.word.as_deref().ok_or_else(|| usage("snug needs --word"))?;
                SnugContext::parse(c).map_err(|e| usage(e.to_string()))?;
                parse_word(w).map_err(|e| usage(e.to_string()))?;
            }
            Command::OrdpmRoundtrip => {}
            Command::Fred => {
                match (&self.from, &self.to) {
                    (Some(a), Some(b)) => {
                        FilteredDimSeq::parse(a).map_err(|e| usage(e.to_string()))?;
                        FilteredDimSeq::parse(b).map_err(|e| usage(e.to_string()))?;
                    }
                    (None, None) => {
                        if self.total.is_none() {
                            return Err(usage("fred needs --total or both --from and --to"));
                        }
                    }
                    _ => return Err(usage("fred needs both --from and --to")),
                }
            }
            Command::AcceptanceGrid => {
                if let Some(c) = self.only.iter().find(|&&c| !(1..=10).contains(&c)) {
                    return Err(usage(format!("no acceptance criterion {c}")));
                }
            }
        }
        Ok(())
    }

    /// The job as `rbslab` arguments, for messages.
    pub fn command_line(&self) -> String {
        let mut parts = vec![self.command().name().to_string()];
        let mut flag = |name: &str, v: Option<String>| {
            if let Some(v) = v {
                parts.push(format!("--{name} {v}"));
            }
        };
        flag("ring", self.ring.clone());
        flag("rank", self.rank.map(|x| x.to_string()));
        flag("coeff", self.coeff.clone());
        flag("p", self.prime.map(|x| x.to_string()));
        flag("max-degree", self.max_degree.map(|x| x.to_string()));
        flag("target", self.target.clone());
        flag("context", self.context.as_ref().map(|c| format!("\"{c}\"")));
        flag("word", self.word.clone());
        flag("max-size", self.max_size.map(|x| x.to_string()));
        flag("total", self.total.map(|x| x.to_string()));
        flag("from", self.from.as_ref().map(|c| format!("\"{c}\"")));
        flag("to", self.to.as_ref().map(|c| format!("\"{c}\"")));
        for (k, v) in &self.caps {
            parts.push(format!("--cap {k}={v}"));
        }
        parts.join(" ")
    }

    /// Canonical JSON of everything that determines the result.
    pub fn cache_key_material(&self) -> String {
        serde_json::to_string(self).expect("job serializes")
    }
}

/// Categories accepted by `twisted-arrow --target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Rbs,
    /// One object per isomorphism class of flags.
    RbsSkeleton,
    Flags,
    Bz2,
    Random(u64),
}

pub fn parse_target(text: &str) -> Result<Target, UsageError> {
    match text {
        "rbs" => Ok(Target::Rbs),
        "rbs-skeleton" => Ok(Target::RbsSkeleton),
        "flags" => Ok(Target::Flags),
        "bz2" => Ok(Target::Bz2),
        _ => text
            .strip_prefix("random:")
            .and_then(|s| s.parse().ok())
            .map(Target::Random)
            .ok_or_else(|| usage(format!("unknown target `{text}` (use rbs, rbs-skeleton, flags, bz2 or random:<seed>)"))),
    }
}

/// Parses `key=value`, accepting `-` or `_` in the key.
pub fn parse_cap(text: &str) -> Result<(String, u64), UsageError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("cap override `{text}` is not key=value")))?;
    let v = v
        .trim()
        .replace('_', "")
        .parse::<u64>()
        .map_err(|_| usage(format!("cap value `{v}` is not a non-negative integer")))?;
    Ok((k.trim().replace('-', "_"), v))
}

pub fn apply_caps(base: &Caps, overrides: &BTreeMap<String, u64>) -> Result<Caps, UsageError> {
    let mut value = serde_json::to_value(base).expect("caps serialize");
    let map = value.as_object_mut().expect("caps are a struct");
    for (k, v) in overrides {
        if !map.contains_key(k) {
            let known: Vec<&str> = map.keys().map(|s| s.as_str()).collect();
            return Err(usage(format!("unknown cap `{k}` (known: {})", known.join(", "))));
        }
        map.insert(k.clone(), (*v).into());
    }
    Ok(serde_json::from_value(value).expect("caps deserialize"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_overrides() {
        let mut o = BTreeMap::new();
        let (k, v) = parse_cap("gl-order=100").unwrap();
        o.insert(k, v);
        assert_eq!(apply_caps(&Caps::default(), &o).unwrap().gl_order, 100);
        o.insert("bogus".into(), 1);
        assert!(apply_caps(&Caps::default(), &o).is_err());
        assert!(parse_cap("chains").is_err());
        assert_eq!(parse_cap("chains=1_000").unwrap().1, 1000);
    }

    #[test]
    fn output_is_not_part_of_the_key() {
        let mut a = JobSpec::new(Command::Tits);
        a.ring = Some("F2".into());
        let mut b = a.clone();
        b.output = Some("x.json".into());
        assert_eq!(a.cache_key_material(), b.cache_key_material());
        b.rank = Some(3);
        assert_ne!(a.cache_key_material(), b.cache_key_material());
    }

    #[test]
    fn validation() {
        let mut j = JobSpec::new(Command::CofibreCheck);
        j.ring = Some("F2".into());
        j.rank = Some(2);
        assert!(j.validate().is_err());
        j.prime = Some(4);
        assert!(j.validate().is_err());
        j.prime = Some(3);
        j.validate().unwrap();
        j.ring = Some("F6".into());
        assert!(j.validate().is_err());
        assert!(parse_target("random:x").is_err());
        assert_eq!(parse_target("random:7").unwrap(), Target::Random(7));
    }
}
