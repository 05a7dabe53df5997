use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::cost::BitCost;
use super::pattern::{Pattern, PatternId, Provenance};
use super::symbol::Symbol;
use crate::error::{Error, Result};

/// The Old patterns plus the frequency statistics derived from them.
///
/// Immutable once built; learning produces a new store value.
#[derive(Clone, Debug, Default)]
pub struct PatternStore {
    patterns: Vec<Pattern>,
    index: HashMap<PatternId, usize>,
    total_pattern_frequency: u64,
    symbol_occurrences: BTreeMap<Symbol, u64>,
    total_symbol_occurrences: u64,
    /// Number of distinct patterns each symbol appears in.
    pattern_spread: BTreeMap<Symbol, usize>,
}

/// Stores are equal when they hold the same patterns in the same order; the
/// statistics follow from those.
impl PartialEq for PatternStore {
    fn eq(&self, other: &Self) -> bool {
        self.patterns == other.patterns
    }
}

impl PatternStore {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_patterns(patterns: Vec<Pattern>) -> Result<Self> {
        let mut index = HashMap::with_capacity(patterns.len());
        for (i, p) in patterns.iter().enumerate() {
            if p.provenance() != Provenance::Old {
                return Err(Error::InvalidPattern(format!(
                    "pattern {} is not an Old pattern",
                    p.id()
                )));
            }
            if index.insert(p.id().clone(), i).is_some() {
                return Err(Error::DuplicateId(p.id().to_string()));
            }
        }
        let (symbol_occurrences, pattern_spread) = derive_statistics(&patterns);
        Ok(PatternStore {
            total_pattern_frequency: patterns.iter().map(Pattern::frequency).sum(),
            total_symbol_occurrences: symbol_occurrences.values().sum(),
            patterns,
            index,
            symbol_occurrences,
            pattern_spread,
        })
    }

    /// Parses the pattern file format:
    /// `[<id>:]<frequency>\t<symbol> <symbol> ...`, `#` comments and blank
    /// lines ignored, ids default to `P<n>` for the n-th data line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut patterns = Vec::new();
        let mut ids: HashMap<PatternId, usize> = HashMap::new();
        let mut ordinal = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            ordinal += 1;
            let (head, body) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(lineno, "missing frequency (expected `<frequency>\\t<symbols>`)"))?;
            let (id, freq) = match head.split_once(':') {
                Some((id, freq)) => (
                    PatternId::new(id).map_err(|e| Error::parse(lineno, e.to_string()))?,
                    freq,
                ),
                None => (PatternId::new(&format!("P{ordinal}"))?, head),
            };
            let frequency: u64 = freq
                .parse()
                .ok()
                .filter(|&f| f > 0)
                .ok_or_else(|| Error::parse(lineno, format!("bad frequency {freq:?}")))?;
            if body.is_empty() {
                return Err(Error::parse(lineno, "empty symbol list"));
            }
            let symbols = body
                .split(' ')
                .map(|t| {
                    if t.is_empty() {
                        Err(Error::parse(lineno, "symbols must be separated by single spaces"))
                    } else {
                        Symbol::new(t).map_err(|e| Error::parse(lineno, e.to_string()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = ids.insert(id.clone(), lineno) {
                return Err(Error::DuplicateId(format!(
                    "{id} (lines {first} and {lineno})"
                )));
            }
            patterns.push(Pattern::new(id, symbols, frequency, Provenance::Old)?);
        }
        Self::from_patterns(patterns)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes in the pattern file format, always with explicit ids.
    pub fn to_pattern_file(&self) -> String {
        let mut out = String::new();
        for p in &self.patterns {
            let _ = writeln!(out, "{}:{}\t{}", p.id(), p.frequency(), p);
        }
        out
    }

    pub fn sha256_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_pattern_file().as_bytes()))
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, id: &PatternId) -> Option<&Pattern> {
        self.index.get(id).map(|&i| &self.patterns[i])
    }

    pub fn position(&self, id: &PatternId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn total_pattern_frequency(&self) -> u64 {
        self.total_pattern_frequency
    }

    pub fn symbol_occurrences(&self) -> &BTreeMap<Symbol, u64> {
        &self.symbol_occurrences
    }

    pub fn occurrences(&self, s: &Symbol) -> u64 {
        self.symbol_occurrences.get(s).copied().unwrap_or(0)
    }

    pub fn total_symbol_occurrences(&self) -> u64 {
        self.total_symbol_occurrences
    }

    pub fn distinct_symbols(&self) -> usize {
        self.symbol_occurrences.len()
    }

    /// True when the symbol appears in two or more distinct stored
    /// patterns. Such symbols are the points at which patterns attach to one
    /// another in an alignment.
    pub fn is_shared(&self, s: &Symbol) -> bool {
        self.pattern_spread.get(s).copied().unwrap_or(0) >= 2
    }

    /// Add-one smoothed code length of a symbol over store-wide occurrence
    /// counts: `log2((N + V) / (n(s) + 1))`. An empty store charges 1 bit.
    pub fn symbol_cost(&self, s: &Symbol) -> BitCost {
        let denom_total = (self.total_symbol_occurrences + self.distinct_symbols() as u64) as f64;
        if denom_total < 2.0 {
            return BitCost::new(1.0);
        }
        let n = self.occurrences(s) as f64;
        BitCost::new((denom_total / (n + 1.0)).log2())
    }

    /// Ideal code length for referencing a stored pattern.
    pub fn pattern_code_cost(&self, id: &PatternId) -> Result<BitCost> {
        let p = self
            .get(id)
            .ok_or_else(|| Error::UnknownPattern(id.to_string()))?;
        Ok(BitCost::new(
            (self.total_pattern_frequency as f64 / p.frequency() as f64).log2(),
        ))
    }

    /// Next free id of the form `L<n>`.
    pub fn next_learned_id(&self) -> PatternId {
        let n = self
            .patterns
            .iter()
            .filter_map(|p| p.id().as_str().strip_prefix('L')?.parse::<u64>().ok())
            .max()
            .unwrap_or(0);
        PatternId::new(&format!("L{}", n + 1)).expect("valid id")
    }

    pub fn find_by_symbols(&self, symbols: &[Symbol]) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.symbols() == symbols)
    }

    /// A new store with `increments` added to the named patterns' frequencies
    /// and `additions` appended. An addition whose symbol sequence already
    /// exists bumps that pattern's frequency instead of duplicating it.
    pub fn merged(&self, increments: &[PatternId], additions: &[Pattern]) -> Result<PatternStore> {
        let mut patterns = self.patterns.clone();
        for id in increments {
            let i = self
                .position(id)
                .ok_or_else(|| Error::UnknownPattern(id.to_string()))?;
            patterns[i] = patterns[i].with_frequency(patterns[i].frequency() + 1);
        }
        for add in additions {
            match patterns.iter().position(|p| p.symbols() == add.symbols()) {
                Some(i) => {
                    patterns[i] = patterns[i].with_frequency(patterns[i].frequency() + add.frequency())
                }
                None => patterns.push(add.clone()),
            }
        }
        PatternStore::from_patterns(patterns)
    }
}

fn derive_statistics(patterns: &[Pattern]) -> (BTreeMap<Symbol, u64>, BTreeMap<Symbol, usize>) {
    let mut occ = BTreeMap::new();
    let mut spread = BTreeMap::new();
    for p in patterns {
        let mut seen = std::collections::BTreeSet::new();
        for s in p.symbols() {
            *occ.entry(s.clone()).or_insert(0) += p.frequency();
            if seen.insert(s) {
                *spread.entry(s.clone()).or_insert(0) += 1;
            }
        }
    }
    (occ, spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s).unwrap()
    }

    #[test]
    fn loads_two_lines() {
        let store = PatternStore::parse("5\tk i t t e n\n3\tp l a y\n").unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.total_pattern_frequency(), 8);
        assert_eq!(store.patterns()[0].id().as_str(), "P1");
        assert_eq!(store.occurrences(&sym("t")), 10);
    }

    #[test]
    fn empty_file() {
        let store = PatternStore::parse("").unwrap();
        assert!(store.is_empty());
        assert_eq!(store.total_pattern_frequency(), 0);
        assert_eq!(store.total_symbol_occurrences(), 0);
        assert_eq!(store.symbol_cost(&sym("a")).bits(), 1.0);
    }

    #[test]
    fn comments_blank_and_explicit_ids() {
        let store = PatternStore::parse("# grammar\n\nN1:2\ta b\n1\tc\n").unwrap();
        let ids: Vec<_> = store.patterns().iter().map(|p| p.id().as_str()).collect();
        assert_eq!(ids, ["N1", "P2"]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = PatternStore::parse("1\ta\nk i t\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = PatternStore::parse("1\ta\n\n2\t\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = PatternStore::parse("0\ta\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = PatternStore::parse("1\ta  b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_ids() {
        let err = PatternStore::parse("P2:1\ta\n1\tb\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)), "{err}");
    }

    #[test]
    fn figure_one_rows() {
        let store = fixtures::fig1_store();
        assert_eq!(store.len(), 8);
        assert_eq!(store.patterns()[0].to_string(), "< Nr 5 k i t t e n >");
        assert_eq!(store.patterns()[7].to_string(), "Num PL ; Np Vp");
    }

    #[test]
    fn uniform_symbol_costs() {
        let store = PatternStore::parse("1\ta b c d\n").unwrap();
        for s in ["a", "b", "c", "d"] {
            assert!((store.symbol_cost(&sym(s)).bits() - 2.0).abs() < 1e-12);
        }
        let store = PatternStore::parse("1\ta a a\n").unwrap();
        assert_eq!(store.symbol_cost(&sym("a")).bits(), 0.0);
        // absent symbol gets log2(N + V)
        assert_eq!(store.symbol_cost(&sym("z")).bits(), 2.0);
    }

    #[test]
    fn code_costs() {
        let store = PatternStore::parse("1\ta\n1\tb\n").unwrap();
        let id = store.patterns()[0].id().clone();
        assert_eq!(store.pattern_code_cost(&id).unwrap().bits(), 1.0);

        let store = PatternStore::parse("3\ta\n1\tb\n").unwrap();
        let c0 = store.pattern_code_cost(store.patterns()[0].id()).unwrap().bits();
        let c1 = store.pattern_code_cost(store.patterns()[1].id()).unwrap().bits();
        assert!((c0 - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        assert!((c0 - 0.415).abs() < 1e-3);
        assert_eq!(c1, 2.0);

        let store = PatternStore::parse("7\ta b\n").unwrap();
        assert_eq!(store.pattern_code_cost(store.patterns()[0].id()).unwrap().bits(), 0.0);

        let missing = PatternId::new("Q9").unwrap();
        assert!(matches!(store.pattern_code_cost(&missing), Err(Error::UnknownPattern(_))));
    }

    #[test]
    fn serialization_round_trip() {
        let store = fixtures::fig2_store();
        let again = PatternStore::parse(&store.to_pattern_file()).unwrap();
        assert_eq!(store.to_pattern_file(), again.to_pattern_file());
        assert_eq!(store.sha256_hex(), again.sha256_hex());
    }

    #[test]
    fn merged_dedupes_by_symbols() {
        let store = PatternStore::parse("1\ta b\n").unwrap();
        let dup = Pattern::old("L1", vec![sym("a"), sym("b")], 1).unwrap();
        let fresh = Pattern::old("L2", vec![sym("c")], 1).unwrap();
        let m = store
            .merged(&[store.patterns()[0].id().clone()], &[dup, fresh])
            .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.patterns()[0].frequency(), 3);
        assert_eq!(m.next_learned_id().as_str(), "L3");
    }
}
