//! Learn patterns from a repetitive corpus and watch the two-part cost fall.

use sp_machine::alignment::SearchParams;
use sp_machine::learning::learn;
use sp_machine::model::{tokenize, PatternStore};

fn main() -> sp_machine::Result<()> {
    let corpus: Vec<_> = ["t h e c a t s a t", "t h e d o g s a t"]
        .iter()
        .cycle()
        .take(20)
        .map(|s| tokenize(s))
        .collect();
    let report = learn(&PatternStore::empty(), &corpus, 4, &SearchParams::default())?;
    println!("start   total {:.2} bits", report.initial.total_bits);
    for (i, c) in report.passes.iter().enumerate() {
        println!(
            "pass {}  grammar {:.2} + encoding {:.2} = {:.2} bits",
            i + 1,
            c.grammar_bits,
            c.encoding_bits,
            c.total_bits
        );
    }
    print!("{}", report.store.to_pattern_file());
    Ok(())
}
