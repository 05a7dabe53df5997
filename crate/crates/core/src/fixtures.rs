//! Bundled pattern stores used by the examples, the CLI and the tests.

use crate::model::{tokenize, PatternStore, Symbol};

/// Letter-level parsing grammar for the sentence "two kittens play".
pub const FIG1_GRAMMAR: &str = include_str!("../fixtures/fig1.sp");

/// Four-level class hierarchy ending in an individual cat.
pub const FIG2_CLASSES: &str = include_str!("../fixtures/fig2.sp");

pub const FIG1_SENTENCE: &str = "t w o k i t t e n s p l a y";

pub const FIG2_FEATURES: &str = "white-bib eats furry purrs";

pub fn fig1_store() -> PatternStore {
    PatternStore::parse(FIG1_GRAMMAR).expect("bundled grammar parses")
}

pub fn fig2_store() -> PatternStore {
    PatternStore::parse(FIG2_CLASSES).expect("bundled classes parse")
}

pub fn fig1_sentence() -> Vec<Symbol> {
    tokenize(FIG1_SENTENCE)
}

pub fn fig2_features() -> Vec<Symbol> {
    tokenize(FIG2_FEATURES)
}
