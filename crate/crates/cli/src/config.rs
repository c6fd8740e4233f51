//! Run configuration: defaults, config files (TOML or JSON), and family
//! resolution from command-line arguments.

use cesaro::weights::{FamilySpec, WeightFamily};
use serde::Deserialize;
use std::path::Path;

/// Defaults used when neither flags nor config files specify a value.
#[derive(Clone, Debug)]
pub struct RunDefaults {
    pub window: usize,
    pub n_max: u32,
    pub m_search: u32,
    pub k_max: u32,
    pub family: Option<FamilySpec>,
}

impl Default for RunDefaults {
    fn default() -> Self {
        RunDefaults { window: 4096, n_max: 5, m_search: 12, k_max: 50, family: None }
    }
}

#[derive(Deserialize, Default)]
struct FileConfig {
    window: Option<usize>,
    n_max: Option<u32>,
    m_search: Option<u32>,
    k_max: Option<u32>,
    family: Option<FamilySpec>,
}

pub fn load_config(path: Option<&Path>) -> Result<RunDefaults, String> {
    let mut defaults = RunDefaults::default();
    let Some(path) = path else { return Ok(defaults) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let parsed: FileConfig = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| format!("config parse error: {e}"))?
    } else {
        toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))?
    };
    if let Some(v) = parsed.window {
        defaults.window = v;
    }
    if let Some(v) = parsed.n_max {
        defaults.n_max = v;
    }
    if let Some(v) = parsed.m_search {
        defaults.m_search = v;
    }
    if let Some(v) = parsed.k_max {
        defaults.k_max = v;
    }
    defaults.family = parsed.family;
    Ok(defaults)
}

/// Quotes bare identifier keys so relaxed inline specs like
/// `{log_weight_expr: "-i/n"}` parse as JSON.
fn quote_bare_keys(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 8);
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut in_string = false;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if in_string {
            out.push(c);
            if c == '"' && bytes[i - 1] != b'\\' {
                in_string = false;
            }
            i += 1;
            continue;
        }
        match c {
            '"' => {
                in_string = true;
                out.push(c);
                i += 1;
            }
            '{' | ',' => {
                out.push(c);
                i += 1;
                // Skip whitespace, then quote an unquoted identifier key.
                let mut j = i;
                while j < bytes.len() && (bytes[j] as char).is_whitespace() {
                    j += 1;
                }
                let key_start = j;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let mut k = j;
                while k < bytes.len() && (bytes[k] as char).is_whitespace() {
                    k += 1;
                }
                if j > key_start && k < bytes.len() && bytes[k] == b':' {
                    out.push_str(&s[i..key_start]);
                    out.push('"');
                    out.push_str(&s[key_start..j]);
                    out.push('"');
                    i = j;
                }
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

pub fn parse_family_arg(
    defaults: &RunDefaults,
    family: Option<&str>,
    alpha: Option<f64>,
    s: Option<u32>,
    shape: Option<&str>,
) -> Result<WeightFamily, String> {
    let spec: FamilySpec = match family {
        None => defaults
            .family
            .clone()
            .ok_or_else(|| "no family given (use --family or a config file)".to_string())?,
        Some(text) if text.trim_start().starts_with('{') => {
            let strict = serde_json::from_str::<FamilySpec>(text);
            match strict {
                Ok(spec) => spec,
                Err(_) => serde_json::from_str(&quote_bare_keys(text))
                    .map_err(|e| format!("family spec parse error: {e}"))?,
            }
        }
        Some(name) => {
            let mut params = serde_json::Map::new();
            if let Some(a) = alpha {
                params.insert("alpha".into(), serde_json::json!(a));
            }
            if let Some(sv) = s {
                params.insert("s".into(), serde_json::json!(sv));
            }
            if let Some(sh) = shape {
                params.insert("shape".into(), serde_json::json!(sh));
            }
            FamilySpec::Builtin {
                builtin: name.to_owned(),
                params: serde_json::Value::Object(params),
            }
        }
    };
    spec.build().map_err(|e| e.to_string())
}
