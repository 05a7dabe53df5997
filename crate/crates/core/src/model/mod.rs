//! Symbols, patterns, the pattern store and the bit-cost model.

mod cost;
mod pattern;
mod store;
mod symbol;

pub use cost::{stable_sum, BitCost};
pub use pattern::{Pattern, PatternId, Provenance};
pub use store::PatternStore;
pub use symbol::{join, tokenize, tokenize_chars, Symbol};
