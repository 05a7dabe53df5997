//! Query by example: which stored patterns best account for a fragment?

use sp_machine::alignment::{retrieve, SearchParams};
use sp_machine::fixtures;
use sp_machine::model::{tokenize, Pattern};

fn main() -> sp_machine::Result<()> {
    let store = fixtures::fig2_store();
    for query in ["purrs", "warm-blooded furry", "tabby"] {
        let hits = retrieve(&store, &Pattern::new_input(tokenize(query))?, &SearchParams::default())?;
        let ranked: Vec<String> = hits
            .iter()
            .map(|(p, s)| format!("{} ({:.1})", p.id(), s.compression_difference))
            .collect();
        println!("{query:<20} -> {}", ranked.join(", "));
    }
    Ok(())
}
