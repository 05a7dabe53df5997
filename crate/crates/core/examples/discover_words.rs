//! Find the words in a stream of letters with the spaces taken out.

use sp_machine::learning::{discover_chunks, word_stream};

fn main() {
    let ws = word_stream(0, 10, 200);
    println!("stream starts: {}...", &ws.text[..60]);
    let lex = discover_chunks(&ws.symbols(), 100, 3);

    for (p, uses) in lex.top(15) {
        let word: String = p.symbols().iter().map(|s| s.as_str()).collect();
        let mark = if ws.lexicon.contains(&word) { "*" } else { "" };
        println!("{uses:>4}  {word}{mark}");
    }
    let parse = lex.bracketed();
    println!("parse starts: {}...", parse.chars().take(120).collect::<String>());
}
