//! Optional config file support: flat `key=value` lines or a JSON object.
//! Keys name long flags (underscores become hyphens); flags given on the
//! command line override the file.

use anyhow::{bail, Context, Result};

/// Returns argv with config-file entries appended as flags for every key
/// not already present on the command line.
pub fn inject_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--config" {
            path = argv.get(i + 1).cloned();
            if path.is_none() {
                bail!("--config requires a path");
            }
            i += 2;
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            i += 1;
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
    let entries = parse_config(&text)?;
    let mut out = argv.clone();
    for (key, value) in entries {
        let flag = format!("--{}", key.replace('_', "-"));
        if !argv.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            out.push(flag);
            out.push(value);
        }
    }
    Ok(out)
}

fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(trimmed).context("parsing JSON config")?;
        let obj = value.as_object().context("config JSON must be an object")?;
        let mut entries = Vec::new();
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                other => bail!("config key {k:?} has unsupported value {other}"),
            };
            entries.push((k.clone(), s));
        }
        return Ok(entries);
    }
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("config line {}: expected key=value", lineno + 1))?;
        entries.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(entries)
}
