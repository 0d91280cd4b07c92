//! Output artifacts: a JSON report envelope and a CSV table writer.
//!
//! Every artifact embeds the tool name and version, a fingerprint of the
//! exact configuration bytes it was produced from, and the seed, so a
//! result file can always be traced back to the run that made it.

use crate::config::Config;
use crate::error::{Error, Result};
use serde::Serialize;

pub const TOOL_NAME: &str = "hardybound";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 64-bit FNV-1a over raw bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Printable fingerprint of the configuration text.
pub fn config_fingerprint(raw: &str) -> String {
    format!("fnv1a:{:016x}", fnv1a64(raw.as_bytes()))
}

/// Provenance block present in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Artifact {
    pub fn new(raw_config: &str, seed: u64) -> Artifact {
        Artifact {
            name: TOOL_NAME,
            version: TOOL_VERSION,
            config_hash: config_fingerprint(raw_config),
            seed,
        }
    }

    /// The `#`-prefixed comment line that heads CSV artifacts.
    pub fn csv_comment(&self) -> String {
        format!(
            "# {} v{} config={} seed={}",
            self.name, self.version, self.config_hash, self.seed
        )
    }
}

/// Full JSON report: provenance, the command, the effective configuration
/// echo, and the command-specific result.
#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub artifact: &'a Artifact,
    pub command: &'a str,
    pub config: &'a Config,
    pub result: T,
}

pub fn render_json<T: Serialize>(
    artifact: &Artifact,
    command: &str,
    config: &Config,
    result: T,
) -> Result<String> {
    let report = Report {
        artifact,
        command,
        config,
        result,
    };
    serde_json::to_string_pretty(&report)
        .map_err(|e| Error::invalid(format!("could not serialize report: {e}")))
}

/// Minimal CSV writer: one comment line, a header, then rows. Fields
/// containing separators or quotes are quoted with doubling.
#[derive(Debug, Clone)]
pub struct CsvTable {
    comment: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(artifact: &Artifact, header: &[&str]) -> CsvTable {
        CsvTable {
            comment: artifact.csv_comment(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "CSV row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.comment);
        out.push('\n');
        out.push_str(&join_csv(&self.header));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&join_csv(row));
            out.push('\n');
        }
        out
    }
}

fn join_csv(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| escape_csv(f))
        .collect::<Vec<_>>()
        .join(",")
}

fn escape_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// CSV cell for a float: shortest round-trip form, `inf` spelled out.
pub fn csv_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

/// CSV cell for an optional float; absent values render empty.
pub fn csv_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), csv_f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv1a_reference_vectors() {
        // Published FNV-1a 64-bit test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
        assert_eq!(config_fingerprint(""), "fnv1a:cbf29ce484222325");
    }

    #[test]
    fn csv_renders_with_provenance_comment() {
        let artifact = Artifact::new("[exponents]\np=2\nq=1.5\n", 42);
        let mut table = CsvTable::new(&artifact, &["kernel", "value"]);
        table.push(vec!["constant".into(), csv_f64(0.25)]);
        table.push(vec!["with,comma".into(), csv_opt(None)]);
        let text = table.render();
        let mut lines = text.lines();
        let head = lines.next().unwrap();
        assert!(head.starts_with("# hardybound v"));
        assert!(head.contains("config=fnv1a:"));
        assert!(head.contains("seed=42"));
        assert_eq!(lines.next().unwrap(), "kernel,value");
        assert_eq!(lines.next().unwrap(), "constant,0.25");
        assert_eq!(lines.next().unwrap(), "\"with,comma\",");
    }

    #[test]
    fn json_report_embeds_artifact_and_config() {
        let raw = "[exponents]\np = 2\nq = 1.5\n";
        let cfg = Config::from_toml_str(raw).unwrap();
        let artifact = Artifact::new(raw, 7);
        let json = render_json(&artifact, "criterion", &cfg, serde_json::json!({"ok": true}))
            .unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["artifact"]["name"], "hardybound");
        assert_eq!(parsed["artifact"]["seed"], 7);
        assert_eq!(parsed["command"], "criterion");
        assert_eq!(parsed["config"]["exponents"]["p"], 2.0);
        assert_eq!(parsed["result"]["ok"], true);
    }

    #[test]
    fn special_floats_render_explicitly() {
        assert_eq!(csv_f64(f64::INFINITY), "inf");
        assert_eq!(csv_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(csv_f64(f64::NAN), "nan");
        assert_eq!(csv_f64(0.1), "0.1");
        assert_eq!(csv_opt(Some(2.0)), "2");
        assert_eq!(csv_opt(None), "");
    }
}
