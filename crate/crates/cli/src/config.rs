//! Plain `key = value` config files.
//!
//! Each key is the long name of a flag of the chosen subcommand (`_` and `-`
//! are interchangeable). Entries are turned into flag tokens placed before
//! the command-line flags, so flags given on the command line win.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::{Cli, CliError};

/// Parses config text into `(key, values)` entries in file order.
pub fn parse(text: &str) -> Result<Vec<(String, Vec<String>)>, String> {
    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(format!("line {}: invalid key {key:?}", lineno + 1));
        }
        let values: Vec<String> = value.split_whitespace().map(str::to_owned).collect();
        if values.is_empty() {
            return Err(format!("line {}: key {key:?} has no value", lineno + 1));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(format!("line {}: duplicate key {key:?}", lineno + 1));
        }
        entries.push((key, values));
    }
    Ok(entries)
}

/// Long flag names a subcommand accepts from a config file.
fn known_keys(subcommand: &str) -> Vec<String> {
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(subcommand) else {
        return Vec::new();
    };
    sub.get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|&l| l != "config" && l != "help")
        .map(str::to_owned)
        .collect()
}

/// Rebuilds the argument vector with the config entries inserted right after
/// the subcommand name.
pub fn merge(argv: &[OsString], subcommand: &str, path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let entries = parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let known = known_keys(subcommand);
    let mut tokens = Vec::new();
    for (key, values) in entries {
        if !known.contains(&key) {
            return Err(CliError::Config(format!(
                "{}: unknown key {key:?} for `{subcommand}` (accepted: {})",
                path.display(),
                known.join(", ")
            )));
        }
        tokens.push(OsString::from(format!("--{key}")));
        tokens.extend(values.into_iter().map(OsString::from));
    }
    let mut out = Vec::with_capacity(argv.len() + tokens.len());
    out.extend(argv.iter().take(2).cloned());
    out.extend(tokens);
    out.extend(argv.iter().skip(2).cloned());
    Ok(out)
}
