use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::symbol::Symbol;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternId(String);

impl PatternId {
    pub fn new(id: &str) -> Result<Self> {
        let bad = id.is_empty()
            || id
                .chars()
                .any(|c| c.is_whitespace() || c == ':' || c == '/');
        if bad {
            return Err(Error::InvalidPattern(format!("bad pattern id {id:?}")));
        }
        Ok(PatternId(id.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    New,
    Old,
}

/// An immutable sequence of symbols with an occurrence count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    id: PatternId,
    symbols: Arc<[Symbol]>,
    frequency: u64,
    provenance: Provenance,
}

impl Pattern {
    pub fn new(
        id: PatternId,
        symbols: Vec<Symbol>,
        frequency: u64,
        provenance: Provenance,
    ) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidPattern(format!("pattern {id} has no symbols")));
        }
        if frequency == 0 {
            return Err(Error::InvalidPattern(format!(
                "pattern {id} has frequency 0"
            )));
        }
        Ok(Pattern {
            id,
            symbols: symbols.into(),
            frequency,
            provenance,
        })
    }

    pub fn old(id: &str, symbols: Vec<Symbol>, frequency: u64) -> Result<Self> {
        Self::new(PatternId::new(id)?, symbols, frequency, Provenance::Old)
    }

    /// A New pattern always has frequency 1.
    pub fn new_input(symbols: Vec<Symbol>) -> Result<Self> {
        Self::new(PatternId("New".into()), symbols, 1, Provenance::New)
    }

    pub fn id(&self) -> &PatternId {
        &self.id
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn frequency(&self) -> u64 {
        self.frequency
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub(crate) fn with_frequency(&self, frequency: u64) -> Pattern {
        Pattern {
            frequency: frequency.max(1),
            ..self.clone()
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::symbol::join(&self.symbols))
    }
}
