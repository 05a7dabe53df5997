//! k-best order-preserving matchings between two symbol sequences.
//!
//! Each matching is scored by the total symbol cost of its matched symbols.
//! A gap between consecutive matched pairs is always walked as "skip in `a`
//! first, then in `b`", so every distinct matching corresponds to exactly one
//! path and the k best paths are k distinct matchings.

use crate::model::{BitCost, PatternStore, Symbol};

use super::types::Matching;

/// Above this many cells the search is restricted to a diagonal band.
const EXACT_CELLS: usize = 1 << 16;
const BAND: usize = 64;

#[derive(Clone, Copy, Debug)]
struct Entry {
    score: f64,
    count: u32,
    step: Step,
    /// rank within the successor state's list
    rank: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Done,
    Match,
    SkipA,
    SkipB,
}

fn better(x: &Entry, y: &Entry) -> std::cmp::Ordering {
    y.score
        .total_cmp(&x.score)
        .then(y.count.cmp(&x.count))
}

pub fn pairwise_match(a: &[Symbol], b: &[Symbol], store: &PatternStore, k: usize) -> Vec<Matching> {
    let weights: Vec<f64> = a.iter().map(|s| store.symbol_cost(s).bits()).collect();
    weighted_matchings(a, b, &weights, k)
}

/// `weights[i]` is the gain for matching `a[i]`.
pub(crate) fn weighted_matchings(a: &[Symbol], b: &[Symbol], weights: &[f64], k: usize) -> Vec<Matching> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 || k == 0 {
        return Vec::new();
    }
    let banded = n * m > EXACT_CELLS;
    let in_band = |i: usize, j: usize| {
        !banded || (i * m).abs_diff(j * n) <= BAND * n.max(m)
    };
    // keep one extra so the empty matching can be dropped
    let keep = k + 1;
    let idx = |i: usize, j: usize, phase: usize| ((i * (m + 1) + j) << 1) | phase;
    let mut table: Vec<Vec<Entry>> = vec![Vec::new(); (n + 1) * (m + 1) * 2];

    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            for phase in 0..2 {
                if i == n && j == m {
                    table[idx(i, j, phase)] = vec![Entry {
                        score: 0.0,
                        count: 0,
                        step: Step::Done,
                        rank: 0,
                    }];
                    continue;
                }
                if !in_band(i, j) {
                    continue;
                }
                let mut cand: Vec<Entry> = Vec::new();
                let mut push = |from: &[Entry], step: Step, gain: f64, inc: u32| {
                    for (rank, e) in from.iter().enumerate() {
                        cand.push(Entry {
                            score: e.score + gain,
                            count: e.count + inc,
                            step,
                            rank: rank as u16,
                        });
                    }
                };
                if i < n && j < m && a[i] == b[j] {
                    push(&table[idx(i + 1, j + 1, 0)], Step::Match, weights[i], 1);
                }
                if phase == 0 && i < n {
                    push(&table[idx(i + 1, j, 0)], Step::SkipA, 0.0, 0);
                }
                if j < m {
                    push(&table[idx(i, j + 1, 1)], Step::SkipB, 0.0, 0);
                }
                cand.sort_by(better);
                cand.truncate(keep);
                table[idx(i, j, phase)] = cand;
            }
        }
    }

    let start = &table[idx(0, 0, 0)];
    let mut out = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for top in 0..start.len() {
        let (mut i, mut j, mut phase, mut rank) = (0usize, 0usize, 0usize, top);
        let mut pairs = Vec::new();
        loop {
            let e = table[idx(i, j, phase)][rank];
            rank = e.rank as usize;
            match e.step {
                Step::Done => break,
                Step::Match => {
                    pairs.push((i, j));
                    i += 1;
                    j += 1;
                    phase = 0;
                }
                Step::SkipA => i += 1,
                Step::SkipB => {
                    j += 1;
                    phase = 1;
                }
            }
        }
        if pairs.is_empty() {
            continue;
        }
        out.push(Matching {
            score_hint: BitCost::new(start[top].score),
            pairs,
            banded,
        });
        if out.len() == k {
            break;
        }
    }
    out
}
