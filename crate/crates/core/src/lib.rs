//! Pattern alignment and minimum-length encoding over symbol sequences.
//!
//! A [`model::PatternStore`] holds Old patterns with frequencies. A New
//! pattern is encoded by aligning it against stored patterns
//! ([`alignment::build_alignments`]); alignments are ranked by how many bits
//! they save ([`scoring`]), and the unmatched parts of the winning Old rows
//! are the system's inferences. The same machinery gives lossless
//! compression ([`codec`]), query by example ([`alignment::retrieve`]) and
//! unsupervised learning of new patterns ([`learning`]).
//!
//! ```
//! use sp_machine::alignment::{build_alignments, SearchParams};
//! use sp_machine::model::{tokenize, Pattern, PatternStore};
//!
//! let store = PatternStore::parse("2\tt h e\n1\tc a t\n").unwrap();
//! let new = Pattern::new_input(tokenize("t h e c a t")).unwrap();
//! let ranked = build_alignments(&store, &new, &SearchParams::default()).unwrap();
//! assert_eq!(ranked[0].0.old_row_count(), 2);
//! ```

pub mod alignment;
pub mod cli;
pub mod codec;
pub mod error;
pub mod fixtures;
pub mod learning;
pub mod model;
pub mod scoring;

pub use error::{Error, Result};
