//! Plain-text and structured views of an alignment.
//!
//! The text layout gives each element of the linearised alignment its own
//! slot. Each row is printed on its own line with its symbols in their
//! slots, and the line between two consecutive rows carries a `|` under
//! every column that spans them.

use serde::Serialize;

use super::types::{Element, MultipleAlignment};
use crate::model::Provenance;
use crate::scoring::CompressionScore;

pub fn render_text(al: &MultipleAlignment) -> String {
    let elements = al.elements();
    let cells = al.cell_map();
    let widths: Vec<usize> = elements.iter().map(|&e| al.element_symbol(e).as_str().chars().count()).collect();
    let labels: Vec<String> = al
        .rows()
        .iter()
        .enumerate()
        .map(|(r, p)| format!("{r} {}", p.id()))
        .collect();
    let label_width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);

    let slot_of_row = |r: usize, e: Element| -> bool {
        match e {
            Element::Column(c) => cells[r].contains(&Some(c)),
            Element::Residue { row, .. } => row == r,
        }
    };
    // rows spanned by each column: (first, last)
    let span = |c: usize| -> (usize, usize) {
        let entries = &al.columns()[c].entries;
        (*entries.keys().next().unwrap(), *entries.keys().next_back().unwrap())
    };

    let mut out = String::new();
    for (r, label) in labels.iter().enumerate() {
        if r > 0 {
            let mut line = " ".repeat(label_width + 2);
            for (k, &e) in elements.iter().enumerate() {
                let tie = matches!(e, Element::Column(c) if { let (a, b) = span(c); a < r && r <= b });
                let mark = if tie { "|" } else { " " };
                line.push_str(&format!("{mark:<w$} ", w = widths[k]));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        let mut line = format!("{:<w$}  ", label, w = label_width);
        for (k, &e) in elements.iter().enumerate() {
            let text = if slot_of_row(r, e) { al.element_symbol(e).as_str() } else { "" };
            line.push_str(&format!("{text:<w$} ", w = widths[k]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RowView {
    pub index: usize,
    pub id: String,
    pub provenance: Provenance,
    pub symbols: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnView {
    pub symbol: String,
    /// (row, position) pairs, ascending by row
    pub entries: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentView {
    pub rows: Vec<RowView>,
    pub columns: Vec<ColumnView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<CompressionScore>,
}

pub fn structured(al: &MultipleAlignment, score: Option<CompressionScore>) -> AlignmentView {
    AlignmentView {
        rows: al
            .rows()
            .iter()
            .enumerate()
            .map(|(index, p)| RowView {
                index,
                id: p.id().to_string(),
                provenance: p.provenance(),
                symbols: p.symbols().iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
        columns: al
            .columns()
            .iter()
            .map(|c| ColumnView {
                symbol: c.symbol.to_string(),
                entries: c.entries.iter().map(|(&r, &p)| (r, p)).collect(),
            })
            .collect(),
        score,
    }
}
