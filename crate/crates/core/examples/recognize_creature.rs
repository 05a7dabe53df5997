//! Recognise an unknown creature from a few features and list what the
//! recognition implies about it.

use sp_machine::alignment::{build_alignments, SearchParams};
use sp_machine::fixtures;
use sp_machine::model::Pattern;
use sp_machine::scoring::{aggregate_inferences, alignment_probabilities};

fn main() -> sp_machine::Result<()> {
    let store = fixtures::fig2_store();
    let new = Pattern::new_input(fixtures::fig2_features())?;
    let ranked = build_alignments(&store, &new, &SearchParams::default())?;
    let probs = alignment_probabilities(&ranked);

    let ids: Vec<String> = ranked[0].0.sorted_row_ids().iter().map(|id| id.to_string()).collect();
    println!("recognised as: {}", ids.join(", "));
    for inf in aggregate_inferences(&ranked, &probs)? {
        if inf.p > 0.5 && !inf.symbol.as_str().starts_with('#') {
            println!("  {:<18} p = {:.4}  (from {})", inf.symbol.as_str(), inf.p, inf.pattern);
        }
    }
    Ok(())
}
