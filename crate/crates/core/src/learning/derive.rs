//! New Old patterns from the best alignment of a New pattern.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::alignment::{build_alignments, MultipleAlignment, SearchParams};
use crate::error::{Error, Result};
use crate::model::{stable_sum, Pattern, PatternId, PatternStore, Provenance, Symbol};
use crate::scoring::CompressionScore;

/// Candidates drawn from one New pattern, not yet part of any store.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub candidates: Vec<Pattern>,
    /// Patterns the extraction rules proposed but that would have lowered
    /// this instance's best compression difference once stored.
    pub rejected: Vec<Pattern>,
    /// Distinct Old patterns used by the best alignment.
    pub used: Vec<PatternId>,
    pub best: Option<(MultipleAlignment, CompressionScore)>,
}

impl Derivation {
    /// A new store with the used patterns' frequencies bumped and the
    /// candidates added. Candidates equal to a stored pattern bump it instead.
    pub fn commit(&self, store: &PatternStore) -> Result<PatternStore> {
        store.merged(&self.used, &self.candidates)
    }

    /// As [`Derivation::commit`] with only one of the candidates.
    pub fn commit_one(&self, store: &PatternStore, candidate: usize) -> Result<PatternStore> {
        store.merged(&self.used, std::slice::from_ref(&self.candidates[candidate]))
    }
}

pub fn derive_patterns(store: &PatternStore, new: &Pattern, params: &SearchParams) -> Result<Derivation> {
    if new.provenance() != Provenance::New {
        return Err(Error::InvalidPattern("derive_patterns needs a New pattern".into()));
    }
    let best = build_alignments(store, new, params)?.into_iter().next();
    let Some((al, score)) = best.clone().filter(|(al, _)| al.old_row_count() > 0) else {
        let id = store.next_learned_id();
        let whole = Pattern::old(id.as_str(), new.symbols().to_vec(), 1)?;
        return screen(store, new, params, vec![whole], Vec::new(), best);
    };

    let mut ids = IdSource::new(store);
    let mut candidates = Vec::new();
    let matched = al.matched_new_positions();
    let syms = new.symbols();
    let mut i = 0;
    while i < syms.len() {
        if matched[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < syms.len() && !matched[i] {
            i += 1;
        }
        candidates.push(Pattern::old(ids.next().as_str(), syms[start..i].to_vec(), 1)?);
    }

    if let Some(composite) = composite(&al) {
        candidates.push(Pattern::old(ids.next().as_str(), composite, 1)?);
    }

    let used: BTreeSet<PatternId> = al.old_rows().map(|(_, p)| p.id().clone()).collect();
    screen(store, new, params, candidates, used.into_iter().collect(), Some((al, score)))
}

/// Keeps the proposals that, stored alongside the frequency updates, leave
/// the instance compressing at least as well as before.
fn screen(
    store: &PatternStore,
    new: &Pattern,
    params: &SearchParams,
    proposals: Vec<Pattern>,
    used: Vec<PatternId>,
    best: Option<(MultipleAlignment, CompressionScore)>,
) -> Result<Derivation> {
    let before = best.as_ref().map_or(0.0, |(_, s)| s.compression_difference);
    let (mut candidates, mut rejected) = (Vec::new(), Vec::new());
    for p in proposals {
        let trial = store.merged(&used, std::slice::from_ref(&p))?;
        let after = build_alignments(&trial, new, params)?
            .first()
            .map_or(0.0, |(_, s)| s.compression_difference);
        if after >= before {
            candidates.push(p);
        } else {
            rejected.push(p);
        }
    }
    Ok(Derivation {
        candidates,
        rejected,
        used,
        best,
    })
}

/// The New sequence with each fully matched row's span replaced by the
/// row's id. A row qualifies when every one of its symbols is matched to New
/// and the New positions it covers are contiguous and covered by it alone.
/// Returns None when nothing was replaced or the result is a bare reference.
fn composite(al: &MultipleAlignment) -> Option<Vec<Symbol>> {
    let cells = al.cell_map();
    let cols = al.columns();
    let new_len = al.new_pattern().len();
    let mut spans: Vec<(usize, usize, usize)> = Vec::new();
    for (r, row) in al.old_rows() {
        let mut covered = Vec::with_capacity(row.len());
        for c in &cells[r] {
            match c.and_then(|c| cols[c].entries.get(&0).copied()) {
                Some(p) => covered.push(p),
                None => break,
            }
        }
        if covered.len() != row.len() {
            continue;
        }
        let (lo, hi) = (covered[0], covered[covered.len() - 1]);
        if hi - lo + 1 == covered.len() {
            spans.push((lo, hi, r));
        }
    }
    spans.sort();
    let mut out = Vec::new();
    let mut pos = 0;
    for (lo, hi, r) in spans {
        if lo < pos {
            continue;
        }
        out.extend_from_slice(&al.new_pattern().symbols()[pos..lo]);
        out.push(Symbol::new(al.rows()[r].id().as_str()).expect("ids are valid symbols"));
        pos = hi + 1;
    }
    if pos == 0 {
        return None;
    }
    out.extend_from_slice(&al.new_pattern().symbols()[pos..new_len]);
    (out.len() > 1).then_some(out)
}

struct IdSource {
    next: u64,
}

impl IdSource {
    fn new(store: &PatternStore) -> Self {
        let first = store.next_learned_id();
        IdSource {
            next: first.as_str()[1..].parse().expect("L<n> id"),
        }
    }

    fn next(&mut self) -> PatternId {
        let id = PatternId::new(&format!("L{}", self.next)).expect("valid id");
        self.next += 1;
        id
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrammarCost {
    pub grammar_bits: f64,
    pub encoding_bits: f64,
    pub total_bits: f64,
}

/// Two-part description length of a corpus under a store. Empty sequences
/// cost nothing.
pub fn grammar_cost(store: &PatternStore, corpus: &[Vec<Symbol>], params: &SearchParams) -> Result<GrammarCost> {
    let mut grammar_terms = Vec::new();
    for p in store.patterns() {
        grammar_terms.extend(p.symbols().iter().map(|s| store.symbol_cost(s).bits()));
        grammar_terms.push(store.pattern_code_cost(p.id())?.bits());
    }
    let grammar_bits = stable_sum(grammar_terms);

    let encoding_terms = corpus
        .par_iter()
        .filter(|s| !s.is_empty())
        .map(|seq| {
            let new = Pattern::new_input(seq.clone())?;
            let best = build_alignments(store, &new, params)?;
            Ok(best
                .first()
                .map(|(_, s)| s.encoded_bits.bits())
                .expect("the bare New alignment always exists"))
        })
        .collect::<Result<Vec<f64>>>()?;
    let encoding_bits = stable_sum(encoding_terms);
    Ok(GrammarCost {
        grammar_bits,
        encoding_bits,
        total_bits: grammar_bits + encoding_bits,
    })
}
