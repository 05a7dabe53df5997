use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An atomic token. Compared by exact string equality; brackets and the
/// like have no special meaning.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(token: &str) -> Result<Self> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSymbol(token.to_string()));
        }
        Ok(Symbol(Arc::from(token)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Symbol::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Splits on whitespace into symbols. Empty input gives an empty vector.
pub fn tokenize(text: &str) -> Vec<Symbol> {
    text.split_whitespace()
        .map(|t| Symbol(Arc::from(t)))
        .collect()
}

/// One symbol per non-whitespace character.
pub fn tokenize_chars(text: &str) -> Vec<Symbol> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| Symbol(Arc::from(c.to_string().as_str())))
        .collect()
}

pub fn join(symbols: &[Symbol]) -> String {
    let mut out = String::new();
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s.as_str());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_whitespace_and_empty() {
        assert!(Symbol::new("").is_err());
        assert!(Symbol::new("a b").is_err());
        assert!(Symbol::new("a\tb").is_err());
        assert!(Symbol::new("#head").is_ok());
        assert!(Symbol::new("<").is_ok());
    }

    #[test]
    fn no_case_folding() {
        assert_ne!(Symbol::new("Np").unwrap(), Symbol::new("NP").unwrap());
    }

    #[test]
    fn tokenizers() {
        assert_eq!(join(&tokenize("  t w  o ")), "t w o");
        assert_eq!(join(&tokenize_chars("two kit")), "t w o k i t");
        assert!(tokenize("   ").is_empty());
    }
}
