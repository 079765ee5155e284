//! `key = value` config files. Keys are long flag names of the chosen
//! subcommand; their values are spliced in ahead of the command-line flags, so
//! explicit flags win.

use crate::CliError;
use clap::Command;
use std::ffi::OsString;

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`, got {raw:?}", no + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Config(format!("config line {}: empty key", no + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Finds `--config`, reads it, validates keys against the subcommand and
/// returns the argument vector with the config tokens inserted.
pub fn expand(args: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut sub_pos = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            path = args.get(i + 1).cloned();
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else if sub_pos.is_none() && cmd.find_subcommand(a.as_ref()).is_some() {
            sub_pos = Some(i);
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let Some(pos) = sub_pos else {
        return Err(CliError::Config("a subcommand is required alongside --config".into()));
    };
    let sub = cmd.find_subcommand(args[pos].to_string_lossy().as_ref()).expect("found above");
    let mut tokens = Vec::new();
    for (key, value) in parse(&text)? {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| CliError::Config(format!("unknown config key {key:?} for `{}`", sub.get_name())))?;
        if arg.get_num_args().is_some_and(|n| n.takes_values()) {
            tokens.push(OsString::from(format!("--{key}")));
            tokens.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" => tokens.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(CliError::Config(format!("config key {key:?} is a switch; use true or false"))),
            }
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_and_comments() {
        let kv = parse("# sweep\nL_max = 12\n s = 0,0.5  # two values\n\n").unwrap();
        assert_eq!(kv, vec![("L-max".into(), "12".into()), ("s".into(), "0,0.5".into())]);
        assert!(parse("no equals sign").is_err());
        assert!(parse(" = 3").is_err());
    }
}
