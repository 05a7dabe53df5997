//! Reversible conversion between text and a corpus of word-level symbol
//! sequences, one sequence per line.
//!
//! Words are maximal runs of non-whitespace with `\` written as `\\`. A
//! single space between two words is implied; any other whitespace run
//! becomes its own symbol spelled with escapes (`\s` space, `\t` tab,
//! `\u{..}` anything else), so `corpus_to_text(text_to_corpus(t)) == t`
//! for every string `t`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::Symbol;

pub fn text_to_corpus(text: &str) -> Vec<Vec<Symbol>> {
    text.split('\n').map(line_to_symbols).collect()
}

pub fn corpus_to_text(corpus: &[Vec<Symbol>]) -> Result<String> {
    let lines = corpus
        .iter()
        .map(|seq| symbols_to_line(seq))
        .collect::<Result<Vec<_>>>()?;
    Ok(lines.join("\n"))
}

fn line_to_symbols(line: &str) -> Vec<Symbol> {
    let mut out = Vec::new();
    // maximal runs of whitespace / non-whitespace
    let mut runs: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    for (i, c) in line.char_indices() {
        let ws = c.is_whitespace();
        if i > start && runs_kind(&line[start..]) != ws {
            runs.push((!ws, &line[start..i]));
            start = i;
        }
    }
    if start < line.len() {
        runs.push((runs_kind(&line[start..]), &line[start..]));
    }
    for (k, &(ws, run)) in runs.iter().enumerate() {
        if ws {
            let between_words = k > 0 && k + 1 < runs.len();
            if between_words && run == " " {
                continue;
            }
            let mut sym = String::new();
            for c in run.chars() {
                match c {
                    ' ' => sym.push_str("\\s"),
                    '\t' => sym.push_str("\\t"),
                    other => {
                        let _ = write!(sym, "\\u{{{:x}}}", other as u32);
                    }
                }
            }
            out.push(Symbol::new(&sym).expect("escaped whitespace has no whitespace"));
        } else {
            out.push(Symbol::new(&run.replace('\\', "\\\\")).expect("word has no whitespace"));
        }
    }
    out
}

fn runs_kind(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_whitespace)
}

fn unescape(sym: &Symbol) -> Result<String> {
    let bad = || Error::InvalidSymbol(format!("{sym} (bad escape)"));
    let mut out = String::new();
    let mut chars = sym.as_str().chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next().ok_or_else(bad)? {
            '\\' => out.push('\\'),
            's' => out.push(' '),
            't' => out.push('\t'),
            'u' => {
                if chars.next() != Some('{') {
                    return Err(bad());
                }
                let hex: String = chars.by_ref().take_while(|&c| c != '}').collect();
                let code = u32::from_str_radix(&hex, 16).map_err(|_| bad())?;
                out.push(char::from_u32(code).ok_or_else(bad)?);
            }
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

fn symbols_to_line(seq: &[Symbol]) -> Result<String> {
    let mut out = String::new();
    let mut prev_word = false;
    for sym in seq {
        let text = unescape(sym)?;
        let word = !text.chars().all(char::is_whitespace);
        if word && prev_word {
            out.push(' ');
        }
        out.push_str(&text);
        prev_word = word;
    }
    Ok(out)
}
