//! Multiple alignments of one New pattern against Old patterns from a store.

mod exhaustive;
mod pairwise;
mod render;
mod search;
mod types;

pub use pairwise::pairwise_match;
pub use render::{render_text, structured, AlignmentView, ColumnView, RowView};
pub use search::{build_alignments, retrieve};
pub use types::{projection, Column, Matching, MultipleAlignment, SearchParams};

pub(crate) use types::Element;
