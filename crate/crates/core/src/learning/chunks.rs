//! Agglomerative chunk discovery over a raw symbol stream.
//!
//! The most frequent adjacent pair of elements is unified into a chunk, the
//! stream is rewritten with the chunk in place of each occurrence, and the
//! process repeats. Frequent words emerge as chunks because their internal
//! transitions repeat far more often than transitions across word boundaries.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Pattern, PatternId, Symbol};

/// One side of a merge: a stream symbol or an earlier chunk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ChunkElement {
    Symbol(Symbol),
    Chunk(PatternId),
}

impl fmt::Display for ChunkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChunkElement::Symbol(s) => write!(f, "{s}"),
            ChunkElement::Chunk(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeRecord {
    pub left: ChunkElement,
    pub right: ChunkElement,
    pub chunk: PatternId,
    pub count: u64,
}

/// A node of the bracketed parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseNode {
    Symbol(Symbol),
    Chunk { id: PatternId, children: Box<[ParseNode; 2]> },
}

impl ParseNode {
    pub fn flatten_into(&self, out: &mut Vec<Symbol>) {
        match self {
            ParseNode::Symbol(s) => out.push(s.clone()),
            ParseNode::Chunk { children, .. } => {
                children[0].flatten_into(out);
                children[1].flatten_into(out);
            }
        }
    }
}

impl fmt::Display for ParseNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseNode::Symbol(s) => write!(f, "{s}"),
            ParseNode::Chunk { children, .. } => write!(f, "[{} {}]", children[0], children[1]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChunkLexicon {
    /// In discovery order; frequency is the pair count at merge time.
    pub chunks: Vec<Pattern>,
    pub merge_log: Vec<MergeRecord>,
    /// Top-level elements of the final parse.
    pub parse: Vec<ParseNode>,
    /// How often each chunk stands as a top-level element of the final parse.
    pub usage: Vec<u64>,
}

impl ChunkLexicon {
    pub fn flatten(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for node in &self.parse {
            node.flatten_into(&mut out);
        }
        out
    }

    /// Chunks ranked by final-parse usage, then by count at merge, then by
    /// discovery order. Chunks absorbed entirely into larger ones rank last.
    pub fn top(&self, n: usize) -> Vec<(&Pattern, u64)> {
        let mut order: Vec<usize> = (0..self.chunks.len()).collect();
        order.sort_by(|&a, &b| {
            self.usage[b]
                .cmp(&self.usage[a])
                .then(self.merge_log[b].count.cmp(&self.merge_log[a].count))
                .then(a.cmp(&b))
        });
        order
            .into_iter()
            .take(n)
            .map(|i| (&self.chunks[i], self.usage[i]))
            .collect()
    }

    /// The parse with nested square brackets, one space between top-level elements.
    pub fn bracketed(&self) -> String {
        let parts: Vec<String> = self.parse.iter().map(|n| n.to_string()).collect();
        parts.join(" ")
    }
}

/// Pair-merge chunking. A pair must occur at least twice (and at least
/// `min_count` times, counting non-overlapping occurrences) to be merged.
pub fn discover_chunks(stream: &[Symbol], max_chunks: usize, min_count: u64) -> ChunkLexicon {
    let mut alphabet: Vec<Symbol> = Vec::new();
    let mut index: HashMap<&Symbol, usize> = HashMap::new();
    let mut seq: Vec<usize> = stream
        .iter()
        .map(|s| {
            *index.entry(s).or_insert_with(|| {
                alphabet.push(s.clone());
                alphabet.len() - 1
            })
        })
        .collect();
    let base = alphabet.len();
    // element ids >= base are chunks; parts[k] are the two halves of chunk k
    let mut parts: Vec<(usize, usize)> = Vec::new();
    let mut chunks = Vec::new();
    let mut merge_log = Vec::new();
    let threshold = min_count.max(2);

    while chunks.len() < max_chunks {
        let Some(((a, b), count)) = best_pair(&seq) else { break };
        if count < threshold {
            break;
        }
        let id = PatternId::new(&format!("L{}", chunks.len() + 1)).expect("valid id");
        let new_elem = base + parts.len();
        parts.push((a, b));
        let mut symbols = Vec::new();
        expand(new_elem, base, &alphabet, &parts, &mut symbols);
        chunks.push(Pattern::old(id.as_str(), symbols, count).expect("non-empty chunk"));
        let element = |e: usize| {
            if e < base {
                ChunkElement::Symbol(alphabet[e].clone())
            } else {
                ChunkElement::Chunk(chunks[e - base].id().clone())
            }
        };
        merge_log.push(MergeRecord {
            left: element(a),
            right: element(b),
            chunk: id,
            count,
        });
        seq = rewrite(&seq, (a, b), new_elem);
    }

    let mut usage = vec![0u64; chunks.len()];
    for &e in &seq {
        if e >= base {
            usage[e - base] += 1;
        }
    }
    let parse = seq
        .iter()
        .map(|&e| build_node(e, base, &alphabet, &parts, &chunks))
        .collect();
    ChunkLexicon {
        chunks,
        merge_log,
        parse,
        usage,
    }
}

/// Most frequent pair by non-overlapping count; ties go to the pair seen first.
fn best_pair(seq: &[usize]) -> Option<((usize, usize), u64)> {
    // pair -> (count, first start, last counted start)
    let mut stats: HashMap<(usize, usize), (u64, usize, usize)> = HashMap::new();
    for i in 0..seq.len().saturating_sub(1) {
        let pair = (seq[i], seq[i + 1]);
        match stats.get_mut(&pair) {
            Some(st) => {
                if st.2 + 1 < i || pair.0 != pair.1 {
                    st.0 += 1;
                    st.2 = i;
                }
            }
            None => {
                stats.insert(pair, (1, i, i));
            }
        }
    }
    stats
        .into_iter()
        .max_by(|x, y| x.1 .0.cmp(&y.1 .0).then(y.1 .1.cmp(&x.1 .1)))
        .map(|(pair, (count, _, _))| (pair, count))
}

fn rewrite(seq: &[usize], pair: (usize, usize), with: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if i + 1 < seq.len() && (seq[i], seq[i + 1]) == pair {
            out.push(with);
            i += 2;
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    out
}

fn expand(e: usize, base: usize, alphabet: &[Symbol], parts: &[(usize, usize)], out: &mut Vec<Symbol>) {
    if e < base {
        out.push(alphabet[e].clone());
    } else {
        let (a, b) = parts[e - base];
        expand(a, base, alphabet, parts, out);
        expand(b, base, alphabet, parts, out);
    }
}

fn build_node(e: usize, base: usize, alphabet: &[Symbol], parts: &[(usize, usize)], chunks: &[Pattern]) -> ParseNode {
    if e < base {
        return ParseNode::Symbol(alphabet[e].clone());
    }
    let (a, b) = parts[e - base];
    ParseNode::Chunk {
        id: chunks[e - base].id().clone(),
        children: Box::new([
            build_node(a, base, alphabet, parts, chunks),
            build_node(b, base, alphabet, parts, chunks),
        ]),
    }
}
