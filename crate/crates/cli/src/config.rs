//! Flat TOML config files and their fingerprint.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Reads `path` as a flat table of scalars into `T`, rejecting unknown keys.
pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))?;
    if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table() || v.is_array()) {
        return Err(CliError::config(format!("key `{k}`: only flat scalar values are allowed")));
    }
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let msg = e.message().trim();
        match e.span().and_then(|s| key_at(text, s.start)) {
            Some(k) if !msg.contains(k) => CliError::config(format!("key `{k}`: {msg}")),
            _ => CliError::config(msg.to_string()),
        }
    })
}

/// Key of the `key = value` line containing byte offset `pos`.
fn key_at(text: &str, pos: usize) -> Option<&str> {
    let start = text[..pos.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[start..].lines().next()?;
    let (key, _) = line.split_once('=')?;
    Some(key.trim()).filter(|k| !k.is_empty())
}

pub fn to_text<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("flat option structs always serialize")
}

/// SHA-256 of the serialized effective configuration, hex encoded.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    Sha256::digest(to_text(value).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
