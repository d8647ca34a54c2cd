use std::io::Write;

use rbslab_core::homology::{HomologyGroup, HomologyResult};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::job::JobSpec;

/// Bumped whenever a field of [`Report`] or of a result payload changes
/// meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// A comparison or acceptance check came out false.
    Failed,
    CapExceeded,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::Failed => 2,
            Status::CapExceeded => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Everything a job produces. `cache_hit` and `timings` describe this
/// particular run; the rest is a function of the job and the version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub version: String,
    pub job: JobSpec,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_hit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
    pub result: Value,
}

impl Report {
    /// The report without run metadata: byte-identical for identical jobs.
    pub fn payload_only(&self) -> Report {
        Report {
            cache_hit: None,
            timings: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `path,value` rows, one per leaf of the JSON report.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["path", "value"])?;
        for (path, leaf) in rows {
            w.write_record([path, leaf])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::Array(_) => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn group_entry(g: &HomologyGroup) -> Value {
    json!({
        "betti": g.betti,
        "torsion": g.torsion,
        "reliable": g.reliable,
    })
}

/// Homology keyed by degree, each entry `{betti, torsion[], reliable}`.
pub fn homology_table(h: &HomologyResult) -> Value {
    let mut degrees = Map::new();
    for g in &h.groups {
        degrees.insert(g.degree.to_string(), group_entry(g));
    }
    json!({
        "coefficients": h.coefficients.to_string(),
        "reduced": h.reduced,
        "reliable_up_to": h.reliable_up_to,
        "degrees": degrees,
    })
}
