//! Parse "two kittens play" with a small letter-level grammar and show the
//! best alignment.

use sp_machine::alignment::{build_alignments, render_text, SearchParams};
use sp_machine::fixtures;
use sp_machine::model::Pattern;
use sp_machine::scoring::alignment_probabilities;

fn main() -> sp_machine::Result<()> {
    let store = fixtures::fig1_store();
    let new = Pattern::new_input(fixtures::fig1_sentence())?;
    let ranked = build_alignments(&store, &new, &SearchParams::default())?;
    let probs = alignment_probabilities(&ranked);

    let (best, score) = &ranked[0];
    println!(
        "raw {:.2} bits, encoded {:.2} bits, p = {:.4}\n",
        score.raw_bits.bits(),
        score.encoded_bits.bits(),
        probs[0].p
    );
    print!("{}", render_text(best));
    Ok(())
}
