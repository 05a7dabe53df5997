//! Seeded word-stream generator with a known lexicon, for measuring chunk
//! discovery against ground truth.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{tokenize_chars, Symbol};

#[derive(Clone, Debug)]
pub struct WordStream {
    pub lexicon: Vec<String>,
    /// The sampled words concatenated without separators.
    pub text: String,
}

impl WordStream {
    pub fn symbols(&self) -> Vec<Symbol> {
        tokenize_chars(&self.text)
    }
}

/// `words` distinct lowercase words of 3 to 6 letters, then `samples` words
/// drawn uniformly from them.
pub fn word_stream(seed: u64, words: usize, samples: usize) -> WordStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lexicon: Vec<String> = Vec::with_capacity(words);
    while lexicon.len() < words {
        let len = rng.gen_range(3..=6);
        let w: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        if !lexicon.contains(&w) {
            lexicon.push(w);
        }
    }
    let mut text = String::new();
    for _ in 0..samples {
        text.push_str(lexicon.choose(&mut rng).expect("non-empty lexicon"));
    }
    WordStream { lexicon, text }
}
