use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::CliError;

/// A command's result, ready to be printed in any supported format.
pub struct Payload {
    pub json: Value,
    pub csv: Option<String>,
    pub text: Option<String>,
    /// Extra files written next to `--out`, as `(suffix, contents)`.
    pub sidecars: Vec<(&'static str, String)>,
}

impl Payload {
    pub fn new(value: &impl Serialize) -> Self {
        Self {
            json: serde_json::to_value(value).expect("outputs serialize"),
            csv: None,
            text: None,
            sidecars: Vec::new(),
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn with_sidecar(mut self, suffix: &'static str, contents: String) -> Self {
        self.sidecars.push((suffix, contents));
        self
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.csv.clone().ok_or_else(|| {
                CliError::Usage("csv output is not available for this command".into())
            }),
            Format::Text => Ok(self.text.clone().unwrap_or_else(|| flat_text(&self.json))),
        }
    }
}

/// `key: value` for each top-level field; nested values stay compact JSON.
fn flat_text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                out.push_str(k);
                out.push_str(": ");
                out.push_str(&scalar(v));
                out.push('\n');
            }
        }
        other => {
            out.push_str(&scalar(other));
            out.push('\n');
        }
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
