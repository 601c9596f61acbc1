//! Versioned JSON envelope shared by every command.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// Bumped whenever a field of the envelope changes meaning.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "hodgecheck";

/// JSON schema the envelope validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub schema_version: u32,
    pub tool: Tool,
    /// `validate`, `check` or `gallery`.
    pub command: String,
    /// Input file, check or case name.
    pub subject: String,
    pub parameters: Value,
    pub verdict: String,
    pub summary: String,
    pub report: Value,
}

impl Envelope {
    pub fn new(
        command: &str,
        subject: &str,
        parameters: Value,
        verdict: &str,
        summary: &str,
        report: Value,
    ) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: TOOL_NAME.into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
            command: command.into(),
            subject: subject.into(),
            parameters,
            verdict: verdict.into(),
            summary: summary.into(),
            report,
        }
    }

    /// Pretty JSON with a trailing newline. Object keys are sorted, so equal
    /// reports give equal bytes.
    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}: {}\n", self.command, self.subject, self.verdict);
        if !self.summary.is_empty() {
            out += &format!("  {}\n", self.summary);
        }
        if let Some(checks) = self.report.get("checks").and_then(Value::as_array) {
            for c in checks {
                let name = c
                    .get("axiom")
                    .or_else(|| c.get("name"))
                    .and_then(Value::as_str);
                let status = c.get("status").and_then(Value::as_str);
                if let (Some(n), Some(s)) = (name, status) {
                    out += &format!("  {s:<8} {n}");
                    if let Some(d) = c.get("detail").and_then(Value::as_str) {
                        out += &format!("  {d}");
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}
