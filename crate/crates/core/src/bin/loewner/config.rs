//! `--config FILE` support: the file's keys are turned into `--key=value`
//! tokens placed before the user's own flags, so explicit flags win.

use std::ffi::OsString;
use std::path::Path;

use serde_json::{Map, Value};

pub const SUBCOMMANDS: [&str; 6] = ["evolve", "classify", "moments", "bounds", "boundary", "figures"];

/// Keys that are never replayed from a file.
const SKIPPED: [&str; 2] = ["config", "manifest"];

fn load_table(path: &Path) -> Result<Map<String, Value>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let value: Value = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| format!("invalid JSON config {}: {e}", path.display()))?
    } else {
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| format!("invalid TOML config {}: {e}", path.display()))?;
        serde_json::to_value(table).map_err(|e| e.to_string())?
    };
    let Value::Object(mut map) = value else {
        return Err(format!("config {} must be a table", path.display()));
    };
    // A run manifest carries its flags under `config`.
    if let Some(Value::Object(inner)) = map.get("config") {
        if map.contains_key("command") {
            map = inner.clone();
        }
    }
    Ok(map)
}

fn to_tokens(map: &Map<String, Value>) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (key, value) in map {
        let flag = if key == "A" || key == "B" { key.clone() } else { key.replace('_', "-") };
        if SKIPPED.contains(&flag.as_str()) {
            continue;
        }
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(format!("--{flag}").into()),
            Value::Number(n) => out.push(format!("--{flag}={n}").into()),
            Value::String(s) => out.push(format!("--{flag}={s}").into()),
            _ => return Err(format!("config key '{key}' must be a scalar")),
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Splices the config file named on the command line into `args`.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(sub) = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(args);
    };
    let Some(path) = config_path(&args[sub + 1..]) else {
        return Ok(args);
    };
    let tokens = to_tokens(&load_table(Path::new(&path))?)?;
    let mut out = args[..=sub].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_precede_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "spec = \"cayley\"\nk = 2.5\nt_end = 1\nclosed-check = true\n").unwrap();
        let args: Vec<OsString> =
            ["loewner", "evolve", "--config", path.to_str().unwrap(), "--k", "1"].iter().map(OsString::from).collect();
        let out: Vec<String> = expand(args).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(out[..2], ["loewner", "evolve"]);
        let k_file = out.iter().position(|s| s == "--k=2.5").unwrap();
        let k_flag = out.iter().position(|s| s == "--k").unwrap();
        assert!(k_file < k_flag);
        assert!(out.contains(&"--t-end=1".to_owned()));
        assert!(out.contains(&"--closed-check".to_owned()));
    }

    #[test]
    fn manifest_config_section_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, r#"{"command":"evolve","config":{"spec":"cayley","manifest":"x.json","seed":3}}"#)
            .unwrap();
        let args: Vec<OsString> =
            ["loewner", "evolve", "--config", path.to_str().unwrap()].iter().map(OsString::from).collect();
        let out: Vec<String> = expand(args).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        assert!(out.contains(&"--spec=cayley".to_owned()));
        assert!(out.contains(&"--seed=3".to_owned()));
        assert!(!out.iter().any(|s| s.starts_with("--manifest")));
    }
}
