//! `key=value` config files. Keys are long flag names; a file is expanded
//! into flags placed before the command-line ones, so explicit flags win.

use std::ffi::OsString;
use std::fmt::{self, Display};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::CliError;

pub const RUN_CONF: &str = "run.conf";
pub const RUN_JSON: &str = "run.json";

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::config(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                i + 1
            )));
        };
        let key = k.trim();
        if key.is_empty() || key.starts_with('-') {
            return Err(CliError::config(format!(
                "{}:{}: bad key '{key}'",
                path.display(),
                i + 1
            )));
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config FILE` (or `--config=FILE`) from `args` and splices the
/// file's settings in right after the subcommand name.
pub fn expand_config_args(mut args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut config: Option<PathBuf> = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--" {
            break;
        }
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::config("--config needs a file argument"));
            }
            config = Some(PathBuf::from(args.remove(i + 1)));
            args.remove(i);
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
            args.remove(i);
            continue;
        }
        i += 1;
    }
    let Some(path) = config else { return Ok(args) };
    let text = botnet_gnn::io_util::read_to_string(&path)?;
    let mut flags = Vec::new();
    for (k, v) in parse_config(&text, &path)? {
        match v.as_str() {
            "true" => flags.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => flags.push(OsString::from(format!("--{k}={v}"))),
        }
    }
    // position of the subcommand: first argument that is not a flag
    let at = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .ok_or_else(|| CliError::config("no subcommand given"))?;
    args.splice(at..at, flags);
    Ok(args)
}

/// Writes `run.conf` (flag schema, reusable with `--config`) and `run.json`.
pub fn write_run_config<T: Serialize>(dir: &Path, command: &str, args: &T) -> Result<(), CliError> {
    let value = serde_json::to_value(args).map_err(|e| CliError::config(e.to_string()))?;
    let mut conf = format!("# botgnn {command}\n");
    if let serde_json::Value::Object(map) = &value {
        for (k, v) in map {
            let text = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            conf.push_str(&format!("{k}={text}\n"));
        }
    }
    botnet_gnn::io_util::write_atomic(&dir.join(RUN_CONF), conf.as_bytes())?;
    let json = serde_json::json!({ "command": command, "args": value });
    let text = serde_json::to_string_pretty(&json).map_err(|e| CliError::config(e.to_string()))?;
    botnet_gnn::io_util::write_atomic(&dir.join(RUN_JSON), (text + "\n").as_bytes())?;
    Ok(())
}

/// Comma-separated flag value.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvList<T>(pub Vec<T>);

impl<T: FromStr> FromStr for CsvList<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<T>()
                    .map_err(|e| format!("'{}': {e}", p.trim()))
            })
            .collect::<Result<Vec<T>, String>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(CsvList(items))
    }
}

impl<T: Display> Display for CsvList<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl<T: Display> Serialize for CsvList<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Serializes any `Display` value as its string form.
pub fn display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_and_rejects() {
        let p = Path::new("x.conf");
        let kv = parse_config("# c\nlayers = 12\n\nseed=3 # trailing\n", p).unwrap();
        assert_eq!(
            kv,
            vec![("layers".into(), "12".into()), ("seed".into(), "3".into())]
        );
        assert!(parse_config("layers 12", p).is_err());
        assert!(parse_config("=4", p).is_err());
    }

    #[test]
    fn config_flags_precede_explicit_ones() {
        let dir = std::env::temp_dir().join(format!("botgnn-conf-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.conf");
        std::fs::write(&path, "layers=4\nquiet=true\nverbose=false\n").unwrap();
        let args = os(&[
            "botgnn",
            "train",
            "--config",
            path.to_str().unwrap(),
            "--layers",
            "2",
        ]);
        let out = expand_config_args(args).unwrap();
        assert_eq!(
            out,
            os(&["botgnn", "train", "--layers=4", "--quiet", "--layers", "2"])
        );
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn csv_list() {
        let l: CsvList<usize> = "2, 4,6".parse().unwrap();
        assert_eq!(l.0, vec![2, 4, 6]);
        assert_eq!(l.to_string(), "2,4,6");
        assert!("2,x".parse::<CsvList<usize>>().is_err());
    }
}
