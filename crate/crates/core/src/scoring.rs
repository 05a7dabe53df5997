//! Minimum-length-encoding scores, probabilities over candidate sets, and
//! inferences read off winning alignments.
//!
//! An alignment is charged:
//!
//! * the reference cost of every Old row,
//! * the symbol cost of every New symbol left out of all columns,
//! * the symbol cost of every unmatched Old symbol that is *shared*, i.e.
//!   that occurs in two or more stored patterns.
//!
//! Shared symbols are where patterns attach to each other (brackets, class
//! markers, feature slots). An alignment that leaves one dangling has not
//! resolved that part of the structure and pays for it. Symbols unique to a
//! single pattern are free when unmatched: they are what the alignment
//! contributes beyond the input, i.e. its inferences.

use std::collections::HashMap;

use serde::Serialize;

use crate::alignment::{Element, MultipleAlignment};
use crate::error::{Error, Result};
use crate::model::{stable_sum, BitCost, PatternId, PatternStore, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompressionScore {
    pub raw_bits: BitCost,
    pub encoded_bits: BitCost,
    /// `raw_bits - encoded_bits`; may be negative.
    pub compression_difference: f64,
}

impl CompressionScore {
    pub(crate) fn from_parts(raw: f64, encoded: f64) -> Self {
        CompressionScore {
            raw_bits: BitCost::new(raw),
            encoded_bits: BitCost::new(encoded),
            compression_difference: raw - encoded,
        }
    }
}

pub fn score_alignment(store: &PatternStore, al: &MultipleAlignment) -> Result<CompressionScore> {
    let cells = al.cell_map();
    let new = al.new_pattern();
    let raw = stable_sum(new.symbols().iter().map(|s| store.symbol_cost(s).bits()));

    let mut terms = Vec::new();
    for (pos, s) in new.symbols().iter().enumerate() {
        if cells[0][pos].is_none() {
            terms.push(store.symbol_cost(s).bits());
        }
    }
    for (r, row) in al.old_rows() {
        terms.push(store.pattern_code_cost(row.id())?.bits());
        for (pos, s) in row.symbols().iter().enumerate() {
            if cells[r][pos].is_none() && store.is_shared(s) {
                terms.push(store.symbol_cost(s).bits());
            }
        }
    }
    Ok(CompressionScore::from_parts(raw, stable_sum(terms)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlignmentProbability {
    /// Index into the candidate list the probabilities were computed over.
    pub index: usize,
    pub p: f64,
}

/// `p_i = 2^-e_i / sum_j 2^-e_j` over the given candidates, where `e` is the
/// encoded size. Computed relative to the smallest `e` so nothing underflows.
pub fn alignment_probabilities(scored: &[(MultipleAlignment, CompressionScore)]) -> Vec<AlignmentProbability> {
    let encoded: Vec<f64> = scored.iter().map(|(_, s)| s.encoded_bits.bits()).collect();
    probabilities_from_encoded(&encoded)
        .into_iter()
        .enumerate()
        .map(|(index, p)| AlignmentProbability { index, p })
        .collect()
}

pub(crate) fn probabilities_from_encoded(encoded: &[f64]) -> Vec<f64> {
    let Some(min) = encoded.iter().copied().min_by(f64::total_cmp) else {
        return Vec::new();
    };
    let weights: Vec<f64> = encoded.iter().map(|e| (-(e - min)).exp2()).collect();
    let total = stable_sum(weights.iter().copied());
    weights.into_iter().map(|w| w / total).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inference {
    pub symbol: Symbol,
    pub source_row: usize,
    pub pattern: PatternId,
    pub p: f64,
}

/// Every Old-row symbol that no column covers, in projection order, carrying
/// the alignment's probability.
pub fn infer(al: &MultipleAlignment, p: AlignmentProbability) -> Vec<Inference> {
    al.elements()
        .into_iter()
        .filter_map(|e| match e {
            Element::Residue { row, pos } if row > 0 => Some(Inference {
                symbol: al.rows()[row].symbols()[pos].clone(),
                source_row: row,
                pattern: al.rows()[row].id().clone(),
                p: p.p,
            }),
            _ => None,
        })
        .collect()
}

/// Inferences pooled over a candidate set: an inference (same symbol from the
/// same pattern) supported by several alignments gets the sum of their
/// probabilities, capped at 1. Sorted by probability, then first appearance.
pub fn aggregate_inferences(
    scored: &[(MultipleAlignment, CompressionScore)],
    probs: &[AlignmentProbability],
) -> Result<Vec<Inference>> {
    if scored.len() != probs.len() {
        return Err(Error::InvalidParams(
            "probabilities do not match the candidate list".into(),
        ));
    }
    let mut order: Vec<(PatternId, Symbol)> = Vec::new();
    let mut pooled: HashMap<(PatternId, Symbol), (f64, usize)> = HashMap::new();
    for ((al, _), p) in scored.iter().zip(probs) {
        let mut seen = std::collections::HashSet::new();
        for inf in infer(al, *p) {
            let key = (inf.pattern.clone(), inf.symbol.clone());
            if !seen.insert(key.clone()) {
                continue;
            }
            let entry = pooled.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                (0.0, inf.source_row)
            });
            entry.0 += inf.p;
        }
    }
    let mut out: Vec<Inference> = order
        .into_iter()
        .map(|key| {
            let (p, row) = pooled[&key];
            Inference {
                pattern: key.0,
                symbol: key.1,
                source_row: row,
                p: p.min(1.0),
            }
        })
        .collect();
    out.sort_by(|a, b| b.p.total_cmp(&a.p));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::Column;
    use crate::model::{tokenize, Pattern};

    fn new(s: &str) -> Pattern {
        Pattern::new_input(tokenize(s)).unwrap()
    }

    fn col(sym: &str, entries: &[(usize, usize)]) -> Column {
        Column {
            symbol: Symbol::new(sym).unwrap(),
            entries: entries.iter().copied().collect(),
        }
    }

    #[test]
    fn new_alone_scores_zero() {
        let store = crate::fixtures::fig1_store();
        let al = MultipleAlignment::new(new("t w o")).unwrap();
        let s = score_alignment(&store, &al).unwrap();
        assert_eq!(s.compression_difference, 0.0);
        assert_eq!(s.raw_bits, s.encoded_bits);
    }

    #[test]
    fn single_pattern_certainty() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let al = MultipleAlignment::from_parts(
            vec![new("a b"), store.patterns()[0].clone()],
            vec![col("a", &[(0, 0), (1, 0)]), col("b", &[(0, 1), (1, 1)])],
        )
        .unwrap();
        let s = score_alignment(&store, &al).unwrap();
        assert_eq!(s.encoded_bits.bits(), 0.0);
        assert_eq!(s.compression_difference, s.raw_bits.bits());
        assert_eq!(s.raw_bits.bits(), 2.0);
    }

    #[test]
    fn unknown_row_pattern() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let stranger = Pattern::old("Q1", tokenize("a b"), 1).unwrap();
        let al = MultipleAlignment::from_parts(
            vec![new("a"), stranger],
            vec![col("a", &[(0, 0), (1, 0)])],
        )
        .unwrap();
        assert!(matches!(score_alignment(&store, &al), Err(Error::UnknownPattern(_))));
    }

    #[test]
    fn dangling_shared_symbols_are_charged() {
        // "x" is shared by both patterns; leaving it unmatched costs bits
        let store = PatternStore::parse("1\ta x\n1\tx b\n").unwrap();
        let al = MultipleAlignment::from_parts(
            vec![new("a"), store.patterns()[0].clone()],
            vec![col("a", &[(0, 0), (1, 0)])],
        )
        .unwrap();
        let s = score_alignment(&store, &al).unwrap();
        let x = store.symbol_cost(&Symbol::new("x").unwrap()).bits();
        assert!((s.encoded_bits.bits() - (1.0 + x)).abs() < 1e-12);
    }

    #[test]
    fn probabilities() {
        assert_eq!(probabilities_from_encoded(&[5.0]), vec![1.0]);
        assert_eq!(probabilities_from_encoded(&[3.0, 3.0]), vec![0.5, 0.5]);
        let p = probabilities_from_encoded(&[2.0, 3.0]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12 && (p[1] - 1.0 / 3.0).abs() < 1e-12);
        // far apart values stay finite and normalised
        let p = probabilities_from_encoded(&[1.0, 2000.0]);
        assert_eq!(p[0], 1.0);
        assert!(p[1] >= 0.0);
    }

    #[test]
    fn inference_from_residue() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let al = MultipleAlignment::from_parts(
            vec![new("a"), store.patterns()[0].clone()],
            vec![col("a", &[(0, 0), (1, 0)])],
        )
        .unwrap();
        let inf = infer(&al, AlignmentProbability { index: 0, p: 1.0 });
        assert_eq!(inf.len(), 1);
        assert_eq!(inf[0].symbol.as_str(), "b");
        assert_eq!(inf[0].source_row, 1);

        let full = MultipleAlignment::from_parts(
            vec![new("a b"), store.patterns()[0].clone()],
            vec![col("a", &[(0, 0), (1, 0)]), col("b", &[(0, 1), (1, 1)])],
        )
        .unwrap();
        assert!(infer(&full, AlignmentProbability { index: 0, p: 1.0 }).is_empty());
    }

    proptest::proptest! {
        #[test]
        fn probabilities_normalise_and_shift(enc in proptest::collection::vec(0.0f64..200.0, 1..12),
                                             shift in 0.0f64..50.0) {
            let p = probabilities_from_encoded(&enc);
            let total: f64 = p.iter().sum();
            proptest::prop_assert!((total - 1.0).abs() < 1e-9);
            let shifted: Vec<f64> = enc.iter().map(|e| e + shift).collect();
            let q = probabilities_from_encoded(&shifted);
            for (a, b) in p.iter().zip(&q) {
                proptest::prop_assert!((a - b).abs() < 1e-9);
            }
            for i in 0..enc.len() {
                for j in 0..enc.len() {
                    if enc[i] < enc[j] {
                        proptest::prop_assert!(p[i] >= p[j]);
                    }
                }
            }
        }
    }
}
