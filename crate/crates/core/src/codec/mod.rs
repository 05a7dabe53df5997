//! Lossless encoding of New sequences in terms of a grammar store.
//!
//! An encoding is a list of items in New order. A pattern reference stands
//! for the New symbols that its row covers; a literal stands for one
//! uncovered symbol. When a row covers only part of its pattern the
//! reference carries a bitmap of the covered positions, charged one bit per
//! pattern symbol.
//!
//! A New symbol matched in a column with several Old rows belongs to the
//! lowest such row, and a row's bitmap marks the positions it owns. Rows
//! owning no New symbol (pure structure, such as a sentence pattern whose
//! slots are filled by other rows) are not needed to rebuild New and are
//! left out. When every row is referenced and none carries a bitmap, the
//! encoding cost equals the alignment's encoded bits exactly.

mod container;
pub mod text;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::alignment::{build_alignments, MultipleAlignment, SearchParams};
use crate::error::{Error, Result};
use crate::model::{stable_sum, BitCost, Pattern, PatternId, PatternStore, Symbol};
use crate::scoring::{score_alignment, CompressionScore};

pub use container::{read_container, write_container, Container, GrammarSection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CodeItem {
    PatternRef {
        id: PatternId,
        /// Covered positions of the pattern; `None` means all of them.
        matched: Option<Vec<bool>>,
    },
    Literal(Symbol),
}

impl fmt::Display for CodeItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeItem::PatternRef { id, matched: None } => write!(f, "@{id}"),
            CodeItem::PatternRef { id, matched: Some(bits) } => write!(f, "@{id}/{}", bitmap_hex(bits)),
            CodeItem::Literal(s) => write!(f, "={s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Encoding {
    pub items: Vec<CodeItem>,
    pub cost: BitCost,
}

impl Encoding {
    /// Builds an encoding, computing its cost against `store`.
    pub fn new(store: &PatternStore, items: Vec<CodeItem>) -> Result<Self> {
        let cost = items_cost(store, &items)?;
        Ok(Encoding { items, cost })
    }

    /// Parses one line of space-separated items, as found in a container.
    pub fn parse(store: &PatternStore, line: &str) -> Result<Self> {
        container::parse_encoding(store, line, 1)
    }

    pub fn has_bitmaps(&self) -> bool {
        self.items
            .iter()
            .any(|i| matches!(i, CodeItem::PatternRef { matched: Some(_), .. }))
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, item) in self.items.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Pattern code lengths, one bit per bitmap position, and literal symbol costs.
fn items_cost(store: &PatternStore, items: &[CodeItem]) -> Result<BitCost> {
    let mut terms = Vec::with_capacity(items.len());
    for item in items {
        match item {
            CodeItem::PatternRef { id, matched } => {
                terms.push(store.pattern_code_cost(id)?.bits());
                if let Some(bits) = matched {
                    terms.push(bits.len() as f64);
                }
            }
            CodeItem::Literal(s) => terms.push(store.symbol_cost(s).bits()),
        }
    }
    Ok(BitCost::new(stable_sum(terms)))
}

/// Bit `i` is position `i`, most significant bit of each hex digit first.
pub(crate) fn bitmap_hex(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|nibble| {
            let v = nibble
                .iter()
                .enumerate()
                .fold(0u32, |acc, (k, &b)| acc | (u32::from(b) << (3 - k)));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

pub(crate) fn parse_bitmap(hex: &str, len: usize) -> Option<Vec<bool>> {
    if hex.len() != len.div_ceil(4) {
        return None;
    }
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let v = c.to_digit(16)?;
        bits.extend((0..4).map(|k| v & (1 << (3 - k)) != 0));
    }
    // padding bits must be clear
    if bits[len..].iter().any(|&b| b) {
        return None;
    }
    bits.truncate(len);
    Some(bits)
}

pub fn encode(store: &PatternStore, al: &MultipleAlignment) -> Result<Encoding> {
    let new = al.new_pattern().symbols();
    let rows = al.rows();
    // owner row of each New position, and positions owned per row
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; new.len()];
    let mut owned: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rows.len()];
    for col in al.columns() {
        let Some(&new_pos) = col.entries.get(&0) else { continue };
        let (&r, &pos) = col.entries.range(1..).next().expect("columns have two entries");
        owner[new_pos] = Some((r, pos));
        owned[r].push((new_pos, pos));
    }
    for (r, list) in owned.iter_mut().enumerate().skip(1) {
        list.sort_unstable();
        if let (Some(first), Some(last)) = (list.first(), list.last()) {
            if last.0 - first.0 + 1 != list.len() {
                return Err(Error::NonDecodable(format!(
                    "New symbols covered by row {r} ({}) are interleaved with other material",
                    rows[r].id()
                )));
            }
        }
    }
    let reference = |r: usize| -> CodeItem {
        let mut bits = vec![false; rows[r].len()];
        for &(_, pos) in &owned[r] {
            bits[pos] = true;
        }
        CodeItem::PatternRef {
            id: rows[r].id().clone(),
            matched: if bits.iter().all(|&b| b) { None } else { Some(bits) },
        }
    };
    let mut items = Vec::new();
    for (i, s) in new.iter().enumerate() {
        match owner[i] {
            None => items.push(CodeItem::Literal(s.clone())),
            Some((r, _)) if owned[r][0].0 == i => items.push(reference(r)),
            Some(_) => {}
        }
    }
    Encoding::new(store, items)
}

pub fn decode(store: &PatternStore, enc: &Encoding) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for item in &enc.items {
        match item {
            CodeItem::Literal(s) => out.push(s.clone()),
            CodeItem::PatternRef { id, matched } => {
                let p = store.get(id).ok_or_else(|| Error::UnknownPattern(id.to_string()))?;
                match matched {
                    None => out.extend(p.symbols().iter().cloned()),
                    Some(bits) => {
                        if bits.len() != p.len() {
                            return Err(Error::InvalidPattern(format!(
                                "bitmap for `{id}` has {} positions, pattern has {}",
                                bits.len(),
                                p.len()
                            )));
                        }
                        out.extend(p.symbols().iter().zip(bits).filter(|(_, &b)| b).map(|(s, _)| s.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Language production: the symbol sequence an encoding stands for.
pub fn produce(store: &PatternStore, enc: &Encoding) -> Result<Vec<Symbol>> {
    decode(store, enc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressedCorpus {
    pub grammar: PatternStore,
    pub encodings: Vec<Encoding>,
    /// Score of the alignment behind each encoding; `None` for empty sequences.
    pub scores: Vec<Option<CompressionScore>>,
}

impl CompressedCorpus {
    pub fn encoding_bits(&self) -> f64 {
        stable_sum(self.encodings.iter().map(|e| e.cost.bits()))
    }

    /// Σ encoded_bits of the chosen alignments.
    pub fn alignment_bits(&self) -> f64 {
        stable_sum(self.scores.iter().flatten().map(|s| s.encoded_bits.bits()))
    }

    pub fn raw_bits(&self) -> f64 {
        stable_sum(self.scores.iter().flatten().map(|s| s.raw_bits.bits()))
    }
}

/// Aligns and encodes each sequence with the best-ranked alignment that
/// decodes losslessly. The bare New alignment always does, so every
/// sequence gets an encoding.
pub fn compress_corpus(store: &PatternStore, corpus: &[Vec<Symbol>], params: &SearchParams) -> Result<CompressedCorpus> {
    params.validate()?;
    let parts: Vec<(Encoding, Option<CompressionScore>)> = corpus
        .par_iter()
        .map(|seq| compress_one(store, seq, params))
        .collect::<Result<_>>()?;
    let (encodings, scores) = parts.into_iter().unzip();
    Ok(CompressedCorpus {
        grammar: store.clone(),
        encodings,
        scores,
    })
}

fn compress_one(store: &PatternStore, seq: &[Symbol], params: &SearchParams) -> Result<(Encoding, Option<CompressionScore>)> {
    if seq.is_empty() {
        return Ok((Encoding::new(store, Vec::new())?, None));
    }
    let new = Pattern::new_input(seq.to_vec())?;
    for (al, score) in build_alignments(store, &new, params)? {
        match encode(store, &al) {
            Ok(enc) => return Ok((enc, Some(score))),
            Err(Error::NonDecodable(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let bare = MultipleAlignment::new(new)?;
    let score = score_alignment(store, &bare)?;
    Ok((encode(store, &bare)?, Some(score)))
}

pub fn decompress_corpus(store: &PatternStore, encodings: &[Encoding]) -> Result<Vec<Vec<Symbol>>> {
    encodings.iter().map(|e| decode(store, e)).collect()
}
