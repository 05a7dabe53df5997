use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BitCost, Pattern, PatternId, Provenance, Symbol};

/// An order-preserving pairing of positions in two sequences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    /// Total symbol cost of the matched symbols.
    pub score_hint: BitCost,
    /// Set when the sequences were too long for the exact search and a band
    /// around the diagonal was used instead.
    pub banded: bool,
}

/// One unified symbol shared by two or more rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Column {
    pub symbol: Symbol,
    /// row index -> position within that row's pattern
    pub entries: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub beam_width: usize,
    /// Cap on Old rows per alignment.
    pub max_rows: usize,
    pub max_results: usize,
    /// Enumerate every row multiset and align each exactly. Small inputs only.
    pub exhaustive: bool,
    /// Stop after this many consecutive stages without a new best score.
    pub patience: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            beam_width: 200,
            max_rows: 20,
            max_results: 10,
            exhaustive: false,
            patience: 8,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beam_width", self.beam_width),
            ("max_rows", self.max_rows),
            ("max_results", self.max_results),
            ("patience", self.patience),
        ] {
            if v == 0 {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Row 0 is the New pattern; rows 1.. are instances of Old patterns (the
/// same Old pattern may occupy several rows). Columns are kept in a total
/// order under which every row's positions increase.
///
/// Two restrictions apply to Old entries sharing a column: a symbol is never
/// unified with the same symbol of another instance of its own pattern, and
/// two Old patterns are never joined first symbol to first symbol or last
/// to last. Without them, copies of a pattern can absorb each other's
/// dangling symbols, and sibling patterns can share one pair of delimiters
/// instead of being attached to the structure that orders them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultipleAlignment {
    rows: Vec<Pattern>,
    columns: Vec<Column>,
}

/// An element of the linearised alignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Element {
    Column(usize),
    Residue { row: usize, pos: usize },
}

impl MultipleAlignment {
    /// The bare New pattern with no Old rows.
    pub fn new(new: Pattern) -> Result<Self> {
        if new.provenance() != Provenance::New {
            return Err(Error::InvalidPattern("row 0 must be a New pattern".into()));
        }
        Ok(MultipleAlignment {
            rows: vec![new],
            columns: Vec::new(),
        })
    }

    /// Builds and validates an alignment from explicit parts. Columns may be
    /// listed in any order; they are put into canonical order.
    pub fn from_parts(rows: Vec<Pattern>, columns: Vec<Column>) -> Result<Self> {
        let nrows = rows.len();
        let orderable = columns
            .iter()
            .all(|c| c.entries.len() >= 2 && c.entries.keys().all(|&r| r < nrows));
        let mut al = MultipleAlignment { rows, columns };
        if orderable {
            al = al
                .canonical()
                .ok_or_else(|| Error::InvalidPattern("columns cross in some row".into()))?;
        }
        al.validate().map_err(Error::InvalidPattern)?;
        Ok(al)
    }

    pub(crate) fn from_parts_unchecked(rows: Vec<Pattern>, columns: Vec<Column>) -> Self {
        MultipleAlignment { rows, columns }
    }

    pub fn rows(&self) -> &[Pattern] {
        &self.rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn new_pattern(&self) -> &Pattern {
        &self.rows[0]
    }

    pub fn old_rows(&self) -> impl Iterator<Item = (usize, &Pattern)> {
        self.rows.iter().enumerate().skip(1)
    }

    pub fn old_row_count(&self) -> usize {
        self.rows.len() - 1
    }

    /// Old row ids, sorted; used for tie-breaking and comparison.
    pub fn sorted_row_ids(&self) -> Vec<PatternId> {
        let mut ids: Vec<PatternId> = self.old_rows().map(|(_, p)| p.id().clone()).collect();
        ids.sort();
        ids
    }

    /// `cells[row][pos]` is the column holding that position, if any.
    pub fn cell_map(&self) -> Vec<Vec<Option<usize>>> {
        let mut cells: Vec<Vec<Option<usize>>> =
            self.rows.iter().map(|p| vec![None; p.len()]).collect();
        for (c, col) in self.columns.iter().enumerate() {
            for (&r, &pos) in &col.entries {
                cells[r][pos] = Some(c);
            }
        }
        cells
    }

    /// New symbols that appear in some column, by position.
    pub fn matched_new_positions(&self) -> Vec<bool> {
        self.cell_map()[0].iter().map(Option::is_some).collect()
    }

    /// Checks every structural invariant, returning a description of the
    /// first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.rows.is_empty() || self.rows[0].provenance() != Provenance::New {
            return Err("row 0 must be the New pattern".into());
        }
        if let Some((r, _)) = self.old_rows().find(|(_, p)| p.provenance() != Provenance::Old) {
            return Err(format!("row {r} is not an Old pattern"));
        }
        let mut seen: Vec<Vec<bool>> = self.rows.iter().map(|p| vec![false; p.len()]).collect();
        let mut last: Vec<Option<usize>> = vec![None; self.rows.len()];
        for (c, col) in self.columns.iter().enumerate() {
            if col.entries.len() < 2 {
                return Err(format!("column {c} has fewer than two entries"));
            }
            for (&r, &pos) in &col.entries {
                let row = self
                    .rows
                    .get(r)
                    .ok_or_else(|| format!("column {c} names missing row {r}"))?;
                let sym = row
                    .symbols()
                    .get(pos)
                    .ok_or_else(|| format!("column {c}: row {r} has no position {pos}"))?;
                if *sym != col.symbol {
                    return Err(format!(
                        "column {c} is `{}` but row {r} position {pos} is `{sym}`",
                        col.symbol
                    ));
                }
                if std::mem::replace(&mut seen[r][pos], true) {
                    return Err(format!("row {r} position {pos} is in two columns"));
                }
                if let Some(prev) = last[r] {
                    if pos <= prev {
                        return Err(format!("row {r} crosses at column {c}"));
                    }
                }
                last[r] = Some(pos);
            }
            let old: Vec<(&Pattern, usize)> = col
                .entries
                .iter()
                .filter(|(&r, _)| r > 0)
                .map(|(&r, &pos)| (&self.rows[r], pos))
                .collect();
            for (a, &(pa, ia)) in old.iter().enumerate() {
                for &(pb, ib) in &old[a + 1..] {
                    if pa.id() == pb.id() && ia == ib {
                        return Err(format!("column {c} matches a pattern symbol with itself"));
                    }
                    if ia == 0 && ib == 0 || ia + 1 == pa.len() && ib + 1 == pb.len() {
                        return Err(format!("column {c} joins two Old patterns at the same end"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Same structure with columns reordered deterministically: repeatedly
    /// take, among the columns whose predecessors are placed, the one whose
    /// lowest row has the smallest (row, position).
    pub(crate) fn canonical(mut self) -> Option<Self> {
        let entries: Vec<Vec<(usize, usize)>> = self
            .columns
            .iter()
            .map(|c| c.entries.iter().map(|(&r, &p)| (r, p)).collect())
            .collect();
        let order = canonical_column_order(self.rows.len(), &entries)?;
        let mut cols: Vec<Option<Column>> = std::mem::take(&mut self.columns).into_iter().map(Some).collect();
        self.columns = order.into_iter().map(|i| cols[i].take().unwrap()).collect();
        Some(self)
    }

    /// Linearisation: every column once, and each row's unmatched symbols
    /// placed in the gap next to the row's own nearest column (after its
    /// preceding column, or before its first column). Within a gap, residue
    /// is emitted row by row, row 0 first.
    pub(crate) fn elements(&self) -> Vec<Element> {
        linearize(&self.cell_map(), self.columns.len())
    }

    pub(crate) fn element_symbol(&self, e: Element) -> &Symbol {
        match e {
            Element::Column(c) => &self.columns[c].symbol,
            Element::Residue { row, pos } => &self.rows[row].symbols()[pos],
        }
    }
}

/// The merged symbol sequence of all rows; see [`MultipleAlignment`] for the
/// placement rule of unmatched symbols.
pub fn projection(al: &MultipleAlignment) -> Vec<Symbol> {
    al.elements()
        .into_iter()
        .map(|e| al.element_symbol(e).clone())
        .collect()
}

pub(crate) fn linearize(cells: &[Vec<Option<usize>>], ncols: usize) -> Vec<Element> {
    // gaps[g][r]: residue positions of row r placed before column g (g == ncols: at the end)
    let mut gaps: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); cells.len()]; ncols + 1];
    for (r, row_cells) in cells.iter().enumerate() {
        let first_col = row_cells.iter().flatten().next().copied();
        let mut current: Option<usize> = None;
        for (pos, cell) in row_cells.iter().enumerate() {
            match cell {
                Some(c) => current = Some(*c),
                None => {
                    let gap = match (current, first_col) {
                        (Some(c), _) => c + 1,
                        (None, Some(f)) => f,
                        (None, None) => ncols,
                    };
                    gaps[gap][r].push(pos);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (g, gap) in gaps.into_iter().enumerate() {
        for (r, positions) in gap.into_iter().enumerate() {
            out.extend(positions.into_iter().map(|pos| Element::Residue { row: r, pos }));
        }
        if g < ncols {
            out.push(Element::Column(g));
        }
    }
    out
}

/// Deterministic topological order of columns. `entries[c]` lists (row,
/// position) pairs of column `c` sorted by row.
/// `None` when the columns cannot be ordered without crossing some row.
pub(crate) fn canonical_column_order(nrows: usize, entries: &[Vec<(usize, usize)>]) -> Option<Vec<usize>> {
    let n = entries.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    // per row, columns sorted by position give the row's chain
    let mut per_row: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nrows];
    for (c, col) in entries.iter().enumerate() {
        for &(r, pos) in col {
            per_row[r].push((pos, c));
        }
    }
    for chain in &mut per_row {
        chain.sort_unstable();
        for w in chain.windows(2) {
            succ[w[0].1].push(w[1].1);
            indeg[w[1].1] += 1;
        }
    }
    let key = |c: usize| entries[c][0];
    let mut ready: std::collections::BTreeSet<((usize, usize), usize)> = (0..n)
        .filter(|&c| indeg[c] == 0)
        .map(|c| (key(c), c))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(first) = ready.iter().next().copied() {
        ready.remove(&first);
        let c = first.1;
        order.push(c);
        for &s in &succ[c] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.insert((key(s), s));
            }
        }
    }
    (order.len() == n).then_some(order)
}
