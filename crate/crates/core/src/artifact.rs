//! Versioned JSON documents written and read by the command-line tool.
//!
//! Every document is an object with a `format` tag naming its kind and a
//! `format_version`, followed by the kind-specific fields.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::selection::SelectionConfig;

pub const FORMAT_VERSION: u32 = 1;

pub const FOREST: &str = "forest-rules/forest";
pub const RULE_SUBSET: &str = "forest-rules/rule-subset";
pub const EXPERIMENT: &str = "forest-rules/experiment";
pub const RECTANGLES: &str = "forest-rules/rule-rectangles";
pub const EVALUATION: &str = "forest-rules/evaluation";

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    format_version: u32,
    #[serde(flatten)]
    body: T,
}

pub fn to_json_string<T: Serialize>(kind: &str, body: &T) -> Result<String> {
    let envelope = Envelope {
        format: kind.to_string(),
        format_version: FORMAT_VERSION,
        body,
    };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    Ok(text)
}

pub fn from_json_str<T: DeserializeOwned>(kind: &str, text: &str) -> Result<T> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
        format_version: u32,
    }
    let header: Header = serde_json::from_str(text)?;
    if header.format != kind {
        return Err(Error::Format(format!("expected a {kind} document, found {}", header.format)));
    }
    if header.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "{kind} format version {} is not supported (expected {FORMAT_VERSION})",
            header.format_version
        )));
    }
    let envelope: Envelope<T> = serde_json::from_str(text)?;
    Ok(envelope.body)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, kind: &str, body: &T) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    out.write_all(to_json_string(kind, body)?.as_bytes()).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>, kind: &str) -> Result<T> {
    let path = path.as_ref();
    let mut text = String::new();
    std::io::Read::read_to_string(
        &mut BufReader::new(File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?),
        &mut text,
    )
    .map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(kind, &text)
}

pub fn save_forest(path: impl AsRef<Path>, forest: &Forest) -> Result<()> {
    write_json(path, FOREST, forest)
}

pub fn load_forest(path: impl AsRef<Path>) -> Result<Forest> {
    let forest: Forest = read_json(path, FOREST)?;
    forest.validate()?;
    Ok(forest)
}

/// A selected rule subset together with how it was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetDocument {
    pub config: SelectionConfig,
    /// Size of the rule set the indices refer to.
    pub total_rules: usize,
    pub forest_seed: u64,
    pub selected: Vec<usize>,
    pub scores: Option<Vec<f64>>,
    pub rules: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_checks_kind_and_version() {
        let text = to_json_string(RULE_SUBSET, &serde_json::json!({"a": 1})).unwrap();
        assert!(text.contains("\"format_version\": 1"));
        let v: serde_json::Value = from_json_str(RULE_SUBSET, &text).unwrap();
        assert_eq!(v["a"], 1);
        assert!(from_json_str::<serde_json::Value>(FOREST, &text).is_err());
        let bumped = text.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(from_json_str::<serde_json::Value>(RULE_SUBSET, &bumped).is_err());
    }
}
