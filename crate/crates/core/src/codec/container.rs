//! The compressed container: a `SPC1` header line, the grammar section in
//! pattern file format (or a `!sha256 <hex>` line naming a grammar held
//! elsewhere), a `%%` line, then one encoding per line. Items are
//! space-separated: `@<id>`, `@<id>/<bitmap-hex>` or `=<symbol>`.

use std::fmt::Write as _;

use super::{parse_bitmap, CodeItem, Encoding};
use crate::error::{Error, Result};
use crate::model::{PatternId, PatternStore, Symbol};

const MAGIC: &str = "SPC1";
const SEPARATOR: &str = "%%";
const DETACHED: &str = "!sha256 ";

#[derive(Clone, Debug, PartialEq)]
pub enum GrammarSection {
    Embedded(PatternStore),
    /// Only the hash of the grammar is stored; the reader supplies the store.
    Detached { sha256: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Container {
    pub grammar: GrammarSection,
    pub encodings: Vec<Encoding>,
}

pub fn write_container(c: &Container) -> String {
    let mut out = format!("{MAGIC}\n");
    match &c.grammar {
        GrammarSection::Embedded(store) => out.push_str(&store.to_pattern_file()),
        GrammarSection::Detached { sha256 } => {
            let _ = writeln!(out, "{DETACHED}{sha256}");
        }
    }
    out.push_str(SEPARATOR);
    out.push('\n');
    for enc in &c.encodings {
        let _ = writeln!(out, "{enc}");
    }
    out
}

/// Parses a container. A detached grammar must be supplied as `external`
/// and must hash to the recorded value; an embedded one is used as is.
pub fn read_container(text: &str, external: Option<&PatternStore>) -> Result<(PatternStore, Vec<Encoding>)> {
    let mut lines = text.split('\n').collect::<Vec<_>>();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    if lines.first().map(|l| l.trim_end_matches('\r')) != Some(MAGIC) {
        return Err(Error::parse(1, format!("not a container (expected `{MAGIC}` header)")));
    }
    let sep = lines
        .iter()
        .position(|l| l.trim_end_matches('\r') == SEPARATOR)
        .ok_or_else(|| Error::parse(lines.len(), format!("missing `{SEPARATOR}` line after the grammar section")))?;
    let grammar_lines = &lines[1..sep];

    let store = match grammar_lines {
        [only] if only.starts_with(DETACHED) => {
            let expected = only[DETACHED.len()..].trim().to_string();
            let store = external.ok_or_else(|| {
                Error::InvalidParams("container refers to a detached grammar; supply the store".into())
            })?;
            let actual = store.sha256_hex();
            if actual != expected {
                return Err(Error::GrammarMismatch { expected, actual });
            }
            store.clone()
        }
        _ => PatternStore::parse(&grammar_lines.join("\n")).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line: line + 1,
                message,
            },
            other => other,
        })?,
    };

    let encodings = lines[sep + 1..]
        .iter()
        .enumerate()
        .map(|(k, line)| parse_encoding(&store, line, sep + 2 + k))
        .collect::<Result<Vec<_>>>()?;
    Ok((store, encodings))
}

pub(crate) fn parse_encoding(store: &PatternStore, line: &str, lineno: usize) -> Result<Encoding> {
    if line.is_empty() {
        return Encoding::new(store, Vec::new());
    }
    let items = line
        .split(' ')
        .map(|tok| parse_item(store, tok).map_err(|m| Error::parse(lineno, m)))
        .collect::<Result<Vec<_>>>()?;
    Encoding::new(store, items)
}

fn parse_item(store: &PatternStore, tok: &str) -> std::result::Result<CodeItem, String> {
    if let Some(sym) = tok.strip_prefix('=') {
        return Symbol::new(sym).map(CodeItem::Literal).map_err(|e| e.to_string());
    }
    let Some(body) = tok.strip_prefix('@') else {
        return Err(format!("bad item {tok:?} (expected `@id`, `@id/bitmap` or `=symbol`)"));
    };
    let (id, hex) = match body.split_once('/') {
        Some((id, hex)) => (id, Some(hex)),
        None => (body, None),
    };
    let id = PatternId::new(id).map_err(|e| e.to_string())?;
    let pattern = store.get(&id).ok_or_else(|| format!("unknown pattern `{id}`"))?;
    let matched = match hex {
        None => None,
        Some(hex) => Some(
            parse_bitmap(hex, pattern.len())
                .ok_or_else(|| format!("bad bitmap {hex:?} for `{id}` ({} symbols)", pattern.len()))?,
        ),
    };
    Ok(CodeItem::PatternRef { id, matched })
}
