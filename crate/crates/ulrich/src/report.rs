//! Reproducible certificate files: every CLI run can be re-executed from the
//! recorded command, inputs and seed, and reproduces the payload byte for
//! byte (all maps are ordered, nothing carries timestamps or floats).

use crate::error::{Error, Result};

pub const CERTIFICATE_VERSION: &str = "1";

/// A named pass/fail record inside a certificate.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// The envelope written by certificate-producing commands.
#[derive(Clone, Debug)]
pub struct CertificateFile {
    pub command: String,
    pub inputs: serde_json::Value,
    pub seed: u64,
    pub result: serde_json::Value,
    pub checks: Vec<Check>,
}

impl CertificateFile {
    pub fn new(command: impl Into<String>, inputs: serde_json::Value, seed: u64) -> Self {
        CertificateFile {
            command: command.into(),
            inputs,
            seed,
            result: serde_json::Value::Null,
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": CERTIFICATE_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "result": self.result,
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "pass": c.pass,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }

    /// Canonical byte rendering (pretty JSON with a trailing newline).
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }
}

/// Parse a JSON document from a string with crate-local errors.
pub fn parse_json(text: &str) -> Result<serde_json::Value> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_render() {
        let mut c = CertificateFile::new("demo", serde_json::json!({"d": 2}), 7);
        c.result = serde_json::json!({"ok": true});
        c.check("identity", true, "exact");
        let a = c.render();
        let b = c.render();
        assert_eq!(a, b);
        assert!(c.all_passed());
    }
}
