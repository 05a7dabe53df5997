//! Unsupervised learning: chunk discovery from raw streams, and new Old
//! patterns derived from partial alignments.

mod chunks;
mod derive;
mod synthetic;

pub use chunks::{discover_chunks, ChunkElement, ChunkLexicon, MergeRecord, ParseNode};
pub use derive::{derive_patterns, grammar_cost, Derivation, GrammarCost};
pub use synthetic::{word_stream, WordStream};

use crate::alignment::SearchParams;
use crate::error::Result;
use crate::model::{Pattern, PatternStore, Symbol};

#[derive(Clone, Debug)]
pub struct LearnReport {
    pub store: PatternStore,
    /// Cost of the corpus under the starting store.
    pub initial: GrammarCost,
    /// Cost after each pass.
    pub passes: Vec<GrammarCost>,
}

/// Presents every corpus sequence to [`derive_patterns`] once per pass.
/// A derivation is committed only when the resulting store describes the
/// whole corpus in no more bits than the current one, so the total cost
/// never rises from one sequence to the next.
pub fn learn(store: &PatternStore, corpus: &[Vec<Symbol>], passes: usize, params: &SearchParams) -> Result<LearnReport> {
    let initial = grammar_cost(store, corpus, params)?;
    let mut store = store.clone();
    let mut current = initial;
    let mut costs = Vec::with_capacity(passes);
    for _ in 0..passes {
        for seq in corpus.iter().filter(|s| !s.is_empty()) {
            let new = Pattern::new_input(seq.clone())?;
            let d = derive_patterns(&store, &new, params)?;
            let mut trials = vec![d.commit(&store)?];
            if d.candidates.len() > 1 {
                for i in 0..d.candidates.len() {
                    trials.push(d.commit_one(&store, i)?);
                }
            }
            let mut best: Option<(PatternStore, GrammarCost)> = None;
            for trial in trials {
                let cost = grammar_cost(&trial, corpus, params)?;
                if cost.total_bits <= best.as_ref().map_or(current.total_bits, |b| b.1.total_bits) {
                    best = Some((trial, cost));
                }
            }
            if let Some((s, c)) = best {
                store = s;
                current = c;
            }
        }
        costs.push(current);
    }
    Ok(LearnReport {
        store,
        initial,
        passes: costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tokenize;

    #[test]
    fn repeats_beat_the_empty_store() {
        let corpus: Vec<Vec<Symbol>> = (0..50).map(|_| tokenize("t h e c a t")).collect();
        let params = SearchParams::default();
        let report = learn(&PatternStore::empty(), &corpus, 2, &params).unwrap();
        assert!(report.passes[1].total_bits < report.initial.total_bits);
        assert_eq!(report.store.len(), 1);
    }

    #[test]
    fn totals_never_rise() {
        let corpus: Vec<Vec<Symbol>> = ["t h e c a t s a t", "t h e d o g s a t"]
            .iter()
            .cycle()
            .take(8)
            .map(|s| tokenize(s))
            .collect();
        let report = learn(&PatternStore::empty(), &corpus, 3, &SearchParams::default()).unwrap();
        let mut last = report.initial.total_bits;
        for p in &report.passes {
            assert!(p.total_bits <= last);
            last = p.total_bits;
        }
    }
}
