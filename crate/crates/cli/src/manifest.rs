//! `manifest.json`: the resolved configuration, tool version, seed, timing
//! and a SHA-256 of every file written.

use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Manifest<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
    /// File name and contents digest, in write order.
    pub outputs: Vec<(String, String)>,
}

impl Manifest<'_> {
    pub fn to_json(&self) -> String {
        let config: Map<String, Value> = self
            .config
            .echo()
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::to_value(v).expect("toml values are JSON")))
            .collect();
        let outputs: Map<String, Value> = self
            .outputs
            .iter()
            .map(|(name, digest)| (name.clone(), Value::String(format!("sha256:{digest}"))))
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "tool": "twotier",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.config.seed,
            "started_unix": self.started_unix,
            "wall_clock_seconds": self.wall_clock_seconds,
            "config": config,
            "outputs": outputs,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::write(dir.join("manifest.json"), self.to_json())
    }
}

/// Rebuilds a TOML configuration from a manifest's flat `config` echo.
pub fn config_toml_from_manifest(text: &str) -> Result<String, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("manifest is not valid JSON: {e}"))?;
    let config = doc
        .get("config")
        .and_then(Value::as_object)
        .ok_or("manifest has no `config` object")?;
    let mut out = String::new();
    for (key, value) in config {
        let v: toml::Value =
            serde_json::from_value(value.clone()).map_err(|e| format!("manifest key `{key}`: {e}"))?;
        out.push_str(&format!("{key} = {v}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_config_round_trips() {
        let cfg = RunConfig::parse("load.zeta = 0.0071\nrun.seed = 42\nsweep.method = \"analytic\"\n", &Overrides::default())
            .unwrap();
        let m = Manifest {
            command: "analyze",
            config: &cfg,
            started_unix: 0.0,
            wall_clock_seconds: 0.5,
            outputs: vec![("a.csv".into(), sha256_hex(b"x"))],
        };
        let toml = config_toml_from_manifest(&m.to_json()).unwrap();
        assert_eq!(RunConfig::parse(&toml, &Overrides::default()).unwrap(), cfg);
    }
}
