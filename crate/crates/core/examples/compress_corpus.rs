//! Compress a small corpus against a grammar, write the container and read
//! it back.

use sp_machine::alignment::SearchParams;
use sp_machine::codec::{compress_corpus, decompress_corpus, read_container, write_container, Container, GrammarSection};
use sp_machine::fixtures;
use sp_machine::model::tokenize;

fn main() -> sp_machine::Result<()> {
    let store = fixtures::fig1_store();
    let corpus = vec![
        fixtures::fig1_sentence(),
        tokenize("t w o k i t t e n s"),
        tokenize("p l a y"),
        tokenize("s o m e t h i n g e l s e"),
    ];
    let packed = compress_corpus(&store, &corpus, &SearchParams::default())?;
    println!(
        "raw {:.1} bits, alignments {:.1} bits, emitted encodings {:.1} bits",
        packed.raw_bits(),
        packed.alignment_bits(),
        packed.encoding_bits()
    );

    let text = write_container(&Container {
        grammar: GrammarSection::Detached { sha256: store.sha256_hex() },
        encodings: packed.encodings,
    });
    print!("{text}");

    let (store, encodings) = read_container(&text, Some(&store))?;
    assert_eq!(decompress_corpus(&store, &encodings)?, corpus);
    println!("round trip ok");
    Ok(())
}
