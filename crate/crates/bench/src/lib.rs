//! Deterministic workloads shared by the benchmarks.

use gedkit_core::corpus_io::Provenance;
use gedkit_core::{Dictionary, ParallelPair, TokenSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pronounceable pseudo-words, distinct, with random frequencies.
pub fn dictionary(size: usize, seed: u64) -> Dictionary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let onsets = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "st", "tr"];
    let vowels = ["a", "e", "i", "o", "u", "ea", "ou"];
    let mut seen = std::collections::HashSet::new();
    let mut entries = Vec::with_capacity(size);
    while entries.len() < size {
        let mut w = String::new();
        for _ in 0..rng.gen_range(1..=4) {
            w.push_str(onsets[rng.gen_range(0..onsets.len())]);
            w.push_str(vowels[rng.gen_range(0..vowels.len())]);
        }
        if seen.insert(w.clone()) {
            entries.push((w, rng.gen_range(1..1000u64)));
        }
    }
    Dictionary::from_counts(entries)
}

pub fn sentences(dict: &Dictionary, n: usize, len: usize, seed: u64) -> Vec<TokenSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = dict.entries();
    (0..n)
        .map(|_| TokenSequence::new((0..len).map(|_| words[rng.gen_range(0..words.len())].0.clone())))
        .collect()
}

/// Pairs whose corrupted side has up to three random word edits.
pub fn pairs(dict: &Dictionary, n: usize, len: usize, seed: u64) -> Vec<ParallelPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    let words = dict.entries();
    sentences(dict, n, len, seed)
        .into_iter()
        .map(|orig| {
            let mut corr = orig.tokens.clone();
            for _ in 0..rng.gen_range(0..=3) {
                let i = rng.gen_range(0..corr.len());
                match rng.gen_range(0..3) {
                    0 => corr[i] = words[rng.gen_range(0..words.len())].0.clone(),
                    1 if corr.len() > 1 => {
                        corr.remove(i);
                    }
                    _ => corr.insert(i, words[rng.gen_range(0..words.len())].0.clone()),
                }
            }
            ParallelPair::new(orig, TokenSequence::new(corr), Provenance::SyntheticRules)
        })
        .collect()
}
