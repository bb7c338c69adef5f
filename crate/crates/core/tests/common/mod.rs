#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumdenoise::noising::SourcePair;
use sumdenoise::text::SummaryDoc;
use sumdenoise::{unigram_overlap, CorpusRecord};

const FUNCTION_WORDS: &[&str] = &["the", "a", "of", "in", "to", "and", "said", "on"];

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// A "fact" is six content words unique to its record.
fn fact(record: usize, idx: usize) -> Vec<String> {
    (0..6).map(|w| format!("w{record}x{idx}x{w}")).collect()
}

/// News-like synthetic pairs: every article sentence states one fact in
/// full, borrows half of the next fact, and adds two filler words; summary
/// sentences restate 2 to 4 of the facts with a couple of function words.
/// Summary sentences therefore share only function words with each other.
pub fn synthetic_pairs(n: usize, seed: u64) -> Vec<SourcePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let id = format!("s{i:05}");
            let facts: Vec<Vec<String>> = (0..8).map(|f| fact(i, f)).collect();
            let article: Vec<String> = (0..8)
                .map(|f| {
                    let mut words = facts[f].clone();
                    words.extend(facts[(f + 1) % 8][..3].iter().cloned());
                    words.push(format!("fill{}", rng.gen_range(0..500)));
                    words.push(FUNCTION_WORDS.choose(&mut rng).unwrap().to_string());
                    words.join(" ")
                })
                .collect();
            let k = rng.gen_range(2..=4);
            let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, 8, k).into_vec();
            picked.sort_unstable();
            let summary: Vec<String> = picked
                .iter()
                .map(|&f| {
                    let mut words = facts[f].clone();
                    for _ in 0..2 {
                        words.push(FUNCTION_WORDS.choose(&mut rng).unwrap().to_string());
                    }
                    words.join(" ")
                })
                .collect();
            SourcePair {
                article: SummaryDoc::from_sentences(id.clone(), &article).unwrap(),
                summary: SummaryDoc::from_sentences(id, &summary).unwrap(),
            }
        })
        .collect()
}

pub fn to_records(pairs: &[SourcePair]) -> Vec<CorpusRecord> {
    pairs
        .iter()
        .map(|p| CorpusRecord {
            id: p.id().to_string(),
            article: p.article.raw_sentences(),
            summary: p.summary.raw_sentences(),
            noisy: None,
            provenance: None,
        })
        .collect()
}

/// Largest directional overlap between two distinct sentences of `doc`.
pub fn max_pairwise_overlap(doc: &SummaryDoc) -> f64 {
    let mut max: f64 = 0.0;
    for (i, a) in doc.sentences.iter().enumerate() {
        for (j, b) in doc.sentences.iter().enumerate() {
            if i != j {
                max = max.max(unigram_overlap::<f64>(a, b));
            }
        }
    }
    max
}

/// Prints a single acceptance line and fails the test when `ok` is false.
pub fn report(id: &str, ok: bool, detail: impl std::fmt::Display) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{status}] {id}: {detail}");
    assert!(ok, "{id} failed: {detail}");
}
