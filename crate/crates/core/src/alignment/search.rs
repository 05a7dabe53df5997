//! Stage-wise beam search for alignments that encode the New pattern
//! cheaply, plus query-by-example retrieval.
//!
//! A partial alignment is a set of row chains glued together at columns,
//! i.e. a partial order over its symbols. Extending it by one Old pattern
//! means choosing which pattern symbols unify with which existing elements
//! so that the result stays acyclic. [`Extender`] solves that exactly by
//! walking down-sets of the partial order; only when the down-set space gets
//! too large does it fall back to matching against the fixed linearisation.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::types::{canonical_column_order, linearize, Column, Element, MultipleAlignment, SearchParams};
use crate::error::{Error, Result};
use crate::model::{stable_sum, Pattern, PatternStore, Provenance, Symbol};
use crate::scoring::{score_alignment, CompressionScore};

/// Down-set states explored per extension before falling back.
const EXTENSION_STATE_BUDGET: usize = 200_000;

pub(crate) const NEW_ROW: usize = usize::MAX;

/// Interned symbols and precomputed weights for one search.
pub(crate) struct Ctx<'a> {
    pub store: &'a PatternStore,
    pub new: Pattern,
    pub new_syms: Vec<u32>,
    pub new_cost: Vec<f64>,
    pub pat_syms: Vec<Vec<u32>>,
    /// Cost charged while the symbol is unmatched: its symbol cost if shared, else 0.
    pub pat_shared_cost: Vec<Vec<f64>>,
    pub code_cost: Vec<f64>,
    pub symbols: Vec<Symbol>,
}

impl<'a> Ctx<'a> {
    pub fn new(store: &'a PatternStore, new: &Pattern) -> Result<Self> {
        if new.provenance() != Provenance::New {
            return Err(Error::InvalidPattern("alignment input must be a New pattern".into()));
        }
        let mut ids: HashMap<Symbol, u32> = HashMap::new();
        let mut symbols = Vec::new();
        let mut intern = |s: &Symbol| -> u32 {
            *ids.entry(s.clone()).or_insert_with(|| {
                symbols.push(s.clone());
                (symbols.len() - 1) as u32
            })
        };
        let pat_syms: Vec<Vec<u32>> = store
            .patterns()
            .iter()
            .map(|p| p.symbols().iter().map(&mut intern).collect())
            .collect();
        let new_syms: Vec<u32> = new.symbols().iter().map(&mut intern).collect();
        let new_cost: Vec<f64> = new.symbols().iter().map(|s| store.symbol_cost(s).bits()).collect();
        let pat_shared_cost = store
            .patterns()
            .iter()
            .map(|p| {
                p.symbols()
                    .iter()
                    .map(|s| if store.is_shared(s) { store.symbol_cost(s).bits() } else { 0.0 })
                    .collect()
            })
            .collect();
        let code_cost = store
            .patterns()
            .iter()
            .map(|p| store.pattern_code_cost(p.id()).map(|c| c.bits()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctx {
            store,
            new: new.clone(),
            new_syms,
            new_cost,
            pat_syms,
            pat_shared_cost,
            code_cost,
            symbols,
        })
    }

    /// Whether two (pattern, position) entries may share a column. A symbol
    /// is never unified with itself in another instance of its pattern, and
    /// two Old patterns are never joined start to start or end to end.
    pub fn may_unify(&self, a: (usize, usize), b: (usize, usize)) -> bool {
        if a.0 == NEW_ROW || b.0 == NEW_ROW {
            return true;
        }
        if a == b {
            return false;
        }
        let last = |(p, pos): (usize, usize)| pos + 1 == self.pat_syms[p].len();
        !(a.1 == 0 && b.1 == 0 || last(a) && last(b))
    }

    fn row_syms(&self, pattern: usize) -> &[u32] {
        if pattern == NEW_ROW {
            &self.new_syms
        } else {
            &self.pat_syms[pattern]
        }
    }

    fn row_weights(&self, pattern: usize) -> &[f64] {
        if pattern == NEW_ROW {
            &self.new_cost
        } else {
            &self.pat_shared_cost[pattern]
        }
    }
}

/// Row order plus each row's (column, position) hits; identifies a state up to its score.
pub(crate) type StateKey = (Vec<usize>, Vec<Vec<(usize, usize)>>);

/// A search-internal alignment: rows name store patterns by index.
#[derive(Clone, Debug)]
pub(crate) struct State {
    /// `rows[0] == NEW_ROW`; other entries index into the store.
    pub rows: Vec<usize>,
    pub cells: Vec<Vec<Option<usize>>>,
    /// Per column: (row, position) sorted by row.
    pub cols: Vec<Vec<(usize, usize)>>,
    pub encoded: f64,
}

impl State {
    pub fn root(ctx: &Ctx) -> State {
        let mut s = State {
            rows: vec![NEW_ROW],
            cells: vec![vec![None; ctx.new_syms.len()]],
            cols: Vec::new(),
            encoded: 0.0,
        };
        s.encoded = s.compute_encoded(ctx);
        s
    }

    /// Rebuilds cells with canonically ordered columns and rescoring.
    pub fn finish(mut self, ctx: &Ctx) -> State {
        for col in &mut self.cols {
            col.sort_unstable();
        }
        let order = canonical_column_order(self.rows.len(), &self.cols).expect("search keeps alignments acyclic");
        let mut cols: Vec<Option<Vec<(usize, usize)>>> = std::mem::take(&mut self.cols).into_iter().map(Some).collect();
        self.cols = order.into_iter().map(|i| cols[i].take().unwrap()).collect();
        self.cells = self
            .rows
            .iter()
            .map(|&p| vec![None; ctx.row_syms(p).len()])
            .collect();
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, pos) in col {
                self.cells[r][pos] = Some(c);
            }
        }
        self.encoded = self.compute_encoded(ctx);
        self
    }

    fn compute_encoded(&self, ctx: &Ctx) -> f64 {
        let mut terms = Vec::new();
        for (r, &p) in self.rows.iter().enumerate() {
            if p != NEW_ROW {
                terms.push(ctx.code_cost[p]);
            }
            let w = ctx.row_weights(p);
            for (pos, cell) in self.cells[r].iter().enumerate() {
                if cell.is_none() && (p == NEW_ROW || w[pos] > 0.0) {
                    terms.push(w[pos]);
                }
            }
        }
        stable_sum(terms)
    }

    /// Identity up to the order in which rows were added.
    pub fn key(&self) -> StateKey {
        let mut rows: Vec<usize> = self.rows[1..].to_vec();
        rows.sort_unstable();
        let mut cols: Vec<Vec<(usize, usize)>> = self
            .cols
            .iter()
            .map(|col| {
                let mut v: Vec<(usize, usize)> = col.iter().map(|&(r, pos)| (self.rows[r], pos)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        cols.sort_unstable();
        (rows, cols)
    }

    pub fn to_alignment(&self, ctx: &Ctx) -> MultipleAlignment {
        let rows: Vec<Pattern> = self
            .rows
            .iter()
            .map(|&p| {
                if p == NEW_ROW {
                    ctx.new.clone()
                } else {
                    ctx.store.patterns()[p].clone()
                }
            })
            .collect();
        let columns = self
            .cols
            .iter()
            .map(|col| {
                let (r, pos) = col[0];
                Column {
                    symbol: ctx.symbols[ctx.row_syms(self.rows[r])[pos] as usize].clone(),
                    entries: col.iter().copied().collect(),
                }
            })
            .collect();
        let al = MultipleAlignment::from_parts_unchecked(rows, columns);
        debug_assert_eq!(al.validate(), Ok(()));
        al
    }

    /// Symbols that could still earn bits: unmatched New symbols and
    /// unmatched shared Old symbols.
    fn open_symbols(&self, ctx: &Ctx) -> HashSet<u32> {
        let mut out = HashSet::new();
        for (r, &p) in self.rows.iter().enumerate() {
            let syms = ctx.row_syms(p);
            let w = ctx.row_weights(p);
            for (pos, cell) in self.cells[r].iter().enumerate() {
                if cell.is_none() && (p == NEW_ROW || w[pos] > 0.0) {
                    out.insert(syms[pos]);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Col(usize),
    Res { row: usize, pos: usize },
}

/// Best unification of one Old pattern into a partial alignment.
///
/// Only elements whose symbol occurs in the pattern ("candidates") matter.
/// Matching pattern position `j` to candidate `i` is legal iff `i` is not
/// an ancestor of any earlier match, so a state is the pattern position plus
/// the union of the ancestor sets of the matches so far.
struct Extender<'c> {
    pattern: &'c [u32],
    candidates: Vec<(Node, u32, f64)>,
    /// per candidate: candidates that precede it
    ancestors: Vec<u128>,
    /// per candidate: its bit in the pattern-symbol mask
    sym_bit: Vec<u64>,
    /// per pattern position: pattern-symbol mask from there on
    pattern_mask: Vec<u64>,
    /// per pattern position: (candidate, gain) pairs that may be matched
    options: Vec<Vec<(usize, f64)>>,
    memo: HashMap<(u16, u128), (f64, i32)>,
    overflow: bool,
}

impl<'c> Extender<'c> {
    /// `None` when there are too many candidates for the exact method.
    fn new(ctx: &'c Ctx<'c>, st: &State, pi: usize) -> Option<Self> {
        let pattern = &ctx.pat_syms[pi][..];
        let mut distinct: Vec<u32> = pattern.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let bit = |s: u32| -> u64 {
            match distinct.binary_search(&s) {
                Ok(i) if distinct.len() <= 64 => 1u64 << i,
                Ok(_) => u64::MAX,
                Err(_) => 0,
            }
        };

        let ncols = st.cols.len();
        let elements = linearize(&st.cells, ncols);
        let mut col_index = vec![0usize; ncols];
        let mut res_index: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, e) in elements.iter().enumerate() {
            match *e {
                Element::Column(c) => col_index[c] = k,
                Element::Residue { row, pos } => {
                    res_index.insert((row, pos), k);
                }
            }
        }
        // predecessors along each row
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); elements.len()];
        for (r, cells) in st.cells.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for (pos, cell) in cells.iter().enumerate() {
                let k = match cell {
                    Some(c) => col_index[*c],
                    None => res_index[&(r, pos)],
                };
                if let Some(p) = prev {
                    preds[k].push(p);
                }
                prev = Some(k);
            }
        }
        let element_info = |e: Element| -> (Node, u32, f64) {
            match e {
                Element::Column(c) => {
                    let (r, pos) = st.cols[c][0];
                    (Node::Col(c), ctx.row_syms(st.rows[r])[pos], 0.0)
                }
                Element::Residue { row, pos } => {
                    let p = st.rows[row];
                    (Node::Res { row, pos }, ctx.row_syms(p)[pos], ctx.row_weights(p)[pos])
                }
            }
        };

        let mut candidates = Vec::new();
        let mut cand_of = vec![usize::MAX; elements.len()];
        for (k, &e) in elements.iter().enumerate() {
            let info = element_info(e);
            if bit(info.1) != 0 {
                if candidates.len() == 128 {
                    return None;
                }
                cand_of[k] = candidates.len();
                candidates.push(info);
            }
        }
        // ancestor masks in topological order
        let mut anc = vec![0u128; elements.len()];
        for k in 0..elements.len() {
            let mut m = 0u128;
            for &p in &preds[k] {
                m |= anc[p];
                if cand_of[p] != usize::MAX {
                    m |= 1u128 << cand_of[p];
                }
            }
            anc[k] = m;
        }
        let ancestors = (0..elements.len()).filter(|&k| cand_of[k] != usize::MAX).map(|k| anc[k]).collect();

        let origins: Vec<Vec<(usize, usize)>> = st
            .cols
            .iter()
            .map(|col| col.iter().map(|&(r, pos)| (st.rows[r], pos)).collect())
            .collect();
        let pattern_w = &ctx.pat_shared_cost[pi];
        let options = (0..pattern.len())
            .map(|j| {
                candidates
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &(node, sym, w))| {
                        let gain = pattern_w[j] + w;
                        let legal = match node {
                            Node::Col(c) => origins[c].iter().all(|&o| ctx.may_unify((pi, j), o)),
                            Node::Res { row, pos } => ctx.may_unify((pi, j), (st.rows[row], pos)),
                        };
                        (sym == pattern[j] && gain > 0.0 && legal).then_some((i, gain))
                    })
                    .collect()
            })
            .collect();
        let mut pattern_mask = vec![0u64; pattern.len() + 1];
        for j in (0..pattern.len()).rev() {
            pattern_mask[j] = pattern_mask[j + 1] | bit(pattern[j]);
        }
        Some(Extender {
            pattern,
            sym_bit: candidates.iter().map(|c| bit(c.1)).collect(),
            candidates,
            ancestors,
            pattern_mask,
            options,
            memo: HashMap::new(),
            overflow: false,
        })
    }

    fn solve(&mut self, j: usize, taken: u128) -> f64 {
        if j == self.pattern.len() || self.overflow {
            return 0.0;
        }
        let mut open = 0u64;
        for (i, b) in self.sym_bit.iter().enumerate() {
            if taken & (1u128 << i) == 0 {
                open |= b;
            }
        }
        if open & self.pattern_mask[j] == 0 {
            return 0.0;
        }
        if let Some(&(v, _)) = self.memo.get(&(j as u16, taken)) {
            return v;
        }
        if self.memo.len() >= EXTENSION_STATE_BUDGET {
            self.overflow = true;
            return 0.0;
        }
        let mut best = (self.solve(j + 1, taken), -1i32);
        for k in 0..self.options[j].len() {
            let (i, gain) = self.options[j][k];
            if taken & (1u128 << i) != 0 {
                continue;
            }
            let v = gain + self.solve(j + 1, taken | self.ancestors[i] | (1u128 << i));
            if v > best.0 {
                best = (v, i as i32);
            }
        }
        self.memo.insert((j as u16, taken), best);
        best.0
    }

    /// Matched (pattern position, node) pairs along the best path, or `None`
    /// when the state budget was exhausted.
    fn run(mut self) -> Option<Vec<(usize, Node)>> {
        self.solve(0, 0);
        if self.overflow {
            return None;
        }
        let mut pairs = Vec::new();
        let mut taken = 0u128;
        for j in 0..self.pattern.len() {
            let Some(&(_, choice)) = self.memo.get(&(j as u16, taken)) else { break };
            if choice >= 0 {
                let i = choice as usize;
                pairs.push((j, self.candidates[i].0));
                taken |= self.ancestors[i] | (1u128 << i);
            }
        }
        Some(pairs)
    }
}

/// Matching against the fixed linearisation; always valid, not always best.
fn extend_by_projection(ctx: &Ctx, st: &State, pi: usize) -> Vec<(usize, Node)> {
    let pattern = &ctx.pat_syms[pi][..];
    let pattern_w = &ctx.pat_shared_cost[pi][..];
    let self_match = |j: usize, n: Node| match n {
        Node::Col(c) => st.cols[c].iter().any(|&(r, pos)| !ctx.may_unify((pi, j), (st.rows[r], pos))),
        Node::Res { row, pos } => !ctx.may_unify((pi, j), (st.rows[row], pos)),
    };
    let elements: Vec<Node> = linearize(&st.cells, st.cols.len())
        .into_iter()
        .map(|e| match e {
            Element::Column(c) => Node::Col(c),
            Element::Residue { row, pos } => Node::Res { row, pos },
        })
        .collect();
    let info = |n: Node| -> (u32, f64) {
        match n {
            Node::Col(c) => {
                let (r, pos) = st.cols[c][0];
                (ctx.row_syms(st.rows[r])[pos], 0.0)
            }
            Node::Res { row, pos } => {
                let p = st.rows[row];
                (ctx.row_syms(p)[pos], ctx.row_weights(p)[pos])
            }
        }
    };
    let (m, e) = (pattern.len(), elements.len());
    let mut dp = vec![0.0f64; (m + 1) * (e + 1)];
    let at = |j: usize, k: usize| j * (e + 1) + k;
    for j in (0..m).rev() {
        for k in (0..e).rev() {
            let mut v = dp[at(j + 1, k)].max(dp[at(j, k + 1)]);
            let (sym, w) = info(elements[k]);
            let gain = pattern_w[j] + w;
            if sym == pattern[j] && gain > 0.0 && !self_match(j, elements[k]) {
                v = v.max(gain + dp[at(j + 1, k + 1)]);
            }
            dp[at(j, k)] = v;
        }
    }
    let mut pairs = Vec::new();
    let (mut j, mut k) = (0, 0);
    while j < m && k < e {
        let (sym, w) = info(elements[k]);
        let gain = pattern_w[j] + w;
        if sym == pattern[j] && gain > 0.0 && !self_match(j, elements[k]) && dp[at(j, k)] == gain + dp[at(j + 1, k + 1)] {
            pairs.push((j, elements[k]));
            j += 1;
            k += 1;
        } else if dp[at(j, k)] == dp[at(j + 1, k)] {
            j += 1;
        } else {
            k += 1;
        }
    }
    pairs
}

/// Adds one row for store pattern `pi`, unified as profitably as possible.
/// `None` when nothing in the pattern can be matched.
pub(crate) fn extend(ctx: &Ctx, st: &State, pi: usize) -> Option<State> {
    let pattern = &ctx.pat_syms[pi];
    let pairs = match Extender::new(ctx, st, pi).and_then(Extender::run) {
        Some(pairs) => pairs,
        None => extend_by_projection(ctx, st, pi),
    };
    if pairs.is_empty() {
        return None;
    }
    let mut next = st.clone();
    let row = next.rows.len();
    next.rows.push(pi);
    next.cells.push(vec![None; pattern.len()]);
    for (j, node) in pairs {
        match node {
            Node::Col(c) => next.cols[c].push((row, j)),
            Node::Res { row: r, pos } => next.cols.push(vec![(r, pos), (row, j)]),
        }
    }
    Some(next.finish(ctx))
}

/// Ranking: larger compression difference, then fewer rows, then the
/// lexicographically smaller sorted list of row ids.
pub(crate) fn rank_key(ctx: &Ctx, st: &State) -> (f64, usize, Vec<String>) {
    let mut ids: Vec<String> = st.rows[1..]
        .iter()
        .map(|&p| ctx.store.patterns()[p].id().to_string())
        .collect();
    ids.sort();
    (st.encoded, st.rows.len(), ids)
}

pub(crate) fn sort_states(ctx: &Ctx, states: Vec<State>) -> Vec<State> {
    let mut keyed: Vec<_> = states
        .into_iter()
        .map(|s| {
            let rk = rank_key(ctx, &s);
            let k = s.key();
            (rk, k, s)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0 .0
            .total_cmp(&b.0 .0)
            .then(a.0 .1.cmp(&b.0 .1))
            .then_with(|| a.0 .2.cmp(&b.0 .2))
            .then_with(|| a.1.cmp(&b.1))
    });
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

pub(crate) fn finalize(ctx: &Ctx, states: Vec<State>, max_results: usize) -> Result<Vec<(MultipleAlignment, CompressionScore)>> {
    sort_states(ctx, states)
        .into_iter()
        .take(max_results)
        .map(|s| {
            let al = s.to_alignment(ctx);
            let score = score_alignment(ctx.store, &al)?;
            debug_assert_eq!(score.encoded_bits.bits().to_bits(), s.encoded.to_bits());
            Ok((al, score))
        })
        .collect()
}

/// Ranked alignments of `new` against the store, best first.
pub fn build_alignments(
    store: &PatternStore,
    new: &Pattern,
    params: &SearchParams,
) -> Result<Vec<(MultipleAlignment, CompressionScore)>> {
    params.validate()?;
    let ctx = Ctx::new(store, new)?;
    if params.exhaustive {
        return super::exhaustive::search(&ctx, params);
    }
    let pattern_sets: Vec<HashSet<u32>> = ctx.pat_syms.iter().map(|s| s.iter().copied().collect()).collect();

    let root = State::root(&ctx);
    let mut seen: HashSet<StateKey> = HashSet::new();
    seen.insert(root.key());
    let mut best = root.encoded;
    let mut stale = 0;
    let mut results = vec![root.clone()];
    let mut beam = vec![root];

    for _stage in 0..params.max_rows {
        let jobs: Vec<(usize, usize)> = beam
            .iter()
            .enumerate()
            .flat_map(|(b, st)| {
                let open = st.open_symbols(&ctx);
                pattern_sets
                    .iter()
                    .enumerate()
                    .filter(move |(_, set)| set.iter().any(|s| open.contains(s)))
                    .map(move |(pi, _)| (b, pi))
                    .collect::<Vec<_>>()
            })
            .collect();
        let extended: Vec<Option<State>> = jobs
            .par_iter()
            .map(|&(b, pi)| extend(&ctx, &beam[b], pi))
            .collect();
        let mut fresh = Vec::new();
        for st in extended.into_iter().flatten() {
            if seen.insert(st.key()) {
                fresh.push(st);
            }
        }
        if fresh.is_empty() {
            break;
        }
        let mut ranked = sort_states(&ctx, fresh);
        ranked.truncate(params.beam_width);
        if ranked[0].encoded < best {
            best = ranked[0].encoded;
            stale = 0;
        } else {
            stale += 1;
        }
        results.extend(ranked.iter().cloned());
        beam = ranked;
        if stale >= params.patience {
            break;
        }
    }
    finalize(&ctx, results, params.max_results)
}

/// Old patterns ranked by how well each one alone encodes the query.
/// Patterns sharing no symbol with the query are left out.
pub fn retrieve(
    store: &PatternStore,
    query: &Pattern,
    params: &SearchParams,
) -> Result<Vec<(Pattern, CompressionScore)>> {
    params.validate()?;
    let ctx = Ctx::new(store, query)?;
    let root = State::root(&ctx);
    let query_syms: HashSet<u32> = ctx.new_syms.iter().copied().collect();
    let mut hits: Vec<(usize, State)> = (0..store.len())
        .into_par_iter()
        .filter(|&pi| ctx.pat_syms[pi].iter().any(|s| query_syms.contains(s)))
        .filter_map(|pi| extend(&ctx, &root, pi).map(|st| (pi, st)))
        .collect();
    hits.sort_by(|a, b| a.1.encoded.total_cmp(&b.1.encoded).then(a.0.cmp(&b.0)));
    hits.into_iter()
        .take(params.max_results)
        .map(|(pi, st)| {
            let al = st.to_alignment(&ctx);
            Ok((store.patterns()[pi].clone(), score_alignment(store, &al)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::tokenize;

    fn new(s: &str) -> Pattern {
        Pattern::new_input(tokenize(s)).unwrap()
    }

    fn ids(al: &MultipleAlignment) -> Vec<String> {
        al.sorted_row_ids().iter().map(|i| i.to_string()).collect()
    }

    #[test]
    fn identity_parse() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let out = build_alignments(&store, &new("a b"), &SearchParams::default()).unwrap();
        let (al, score) = &out[0];
        assert_eq!(al.old_row_count(), 1);
        assert_eq!(al.columns().len(), 2);
        assert_eq!(score.compression_difference, score.raw_bits.bits());
    }

    #[test]
    fn nothing_shared() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let out = build_alignments(&store, &new("x y"), &SearchParams::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0.old_row_count(), 0);
        assert_eq!(out[0].1.compression_difference, 0.0);
    }

    #[test]
    fn rejects_old_input() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let old = store.patterns()[0].clone();
        assert!(build_alignments(&store, &old, &SearchParams::default()).is_err());
    }

    #[test]
    fn repeated_word_uses_two_rows() {
        let store = PatternStore::parse("2\tt h e\n1\tc a t\n").unwrap();
        let out = build_alignments(&store, &new("t h e c a t t h e"), &SearchParams::default()).unwrap();
        assert_eq!(ids(&out[0].0), ["P1", "P1", "P2"]);
        assert!(out[0].0.matched_new_positions().iter().all(|&m| m));
    }

    #[test]
    fn results_are_valid_ranked_and_distinct() {
        let store = fixtures::fig2_store();
        let out = build_alignments(&store, &Pattern::new_input(fixtures::fig2_features()).unwrap(), &SearchParams::default()).unwrap();
        assert!(out.len() > 1);
        for w in out.windows(2) {
            assert!(w[0].1.compression_difference >= w[1].1.compression_difference);
            assert_ne!(w[0].0, w[1].0);
        }
        for (al, _) in &out {
            assert_eq!(al.validate(), Ok(()));
        }
        assert_eq!(ids(&out[0].0), ["Tibs", "animal", "cat", "mammal"]);
    }

    #[test]
    fn deterministic() {
        let store = fixtures::fig2_store();
        let query = Pattern::new_input(fixtures::fig2_features()).unwrap();
        let a = build_alignments(&store, &query, &SearchParams::default()).unwrap();
        let b = build_alignments(&store, &query, &SearchParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_agrees_on_small_store() {
        let store = PatternStore::parse("2\ta b c\n1\tc d\n1\tb x d\n").unwrap();
        let params = SearchParams {
            max_rows: 3,
            ..SearchParams::default()
        };
        let query = new("a b c d");
        let beam = build_alignments(&store, &query, &params).unwrap();
        let full = build_alignments(&store, &query, &SearchParams { exhaustive: true, ..params }).unwrap();
        assert!(full[0].1.compression_difference >= beam[0].1.compression_difference - 1e-12);
        for (al, _) in &full {
            assert_eq!(al.validate(), Ok(()));
        }
    }

    #[test]
    fn exhaustive_refuses_large_instances() {
        let store = fixtures::fig1_store();
        let params = SearchParams {
            exhaustive: true,
            ..SearchParams::default()
        };
        let query = Pattern::new_input(fixtures::fig1_sentence()).unwrap();
        assert!(matches!(build_alignments(&store, &query, &params), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn retrieval() {
        let store = fixtures::fig2_store();
        let hits = retrieve(&store, &new("purrs"), &SearchParams::default()).unwrap();
        assert_eq!(hits[0].0.id().as_str(), "cat");
        assert!(retrieve(&store, &new("zebra"), &SearchParams::default()).unwrap().is_empty());

        let store = fixtures::fig1_store();
        let hits = retrieve(&store, &new("k i t t e n"), &SearchParams::default()).unwrap();
        assert_eq!(hits[0].0.symbols(), &tokenize("< Nr 5 k i t t e n >")[..]);
    }
}
