//! Redundancy and quality metrics: Repeat rate, sentence repetition counts,
//! length statistics and ROUGE-1/2/L.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{harmonic_mean, Scalar};
use crate::text::{overlap_exceeds, SummaryDoc};

/// Overlap above which two sentences are considered repetitions.
pub const DEFAULT_REPETITION_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RougeScore<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Scalar> RougeScore<T> {
    pub fn new(precision: T, recall: T) -> Self {
        let f1 = harmonic_mean(precision.clone(), recall.clone());
        Self {
            precision,
            recall,
            f1,
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    fn from_counts(matches: usize, candidate_total: usize, reference_total: usize) -> Self {
        let frac = |den: usize| {
            if den == 0 {
                T::zero()
            } else {
                T::from_ratio(matches as u64, den as u64)
            }
        };
        Self::new(frac(candidate_total), frac(reference_total))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyReport<T> {
    /// Percentage in `[0, 100]`.
    pub repeat_rate: T,
    pub repetition_count: usize,
    pub sentence_count: usize,
    pub token_count: usize,
}

/// Mean, over sentences, of the fraction of each sentence's distinct unigrams
/// found anywhere else in the document; scaled to a percentage.
pub fn repeat_rate<T: Scalar>(s: &SummaryDoc) -> Result<T> {
    s.ensure_non_empty()?;
    // Number of sentences each type occurs in. A type of sentence i is in
    // the complement of i iff it occurs in at least one other sentence.
    let mut sentence_freq: HashMap<&str, usize> = HashMap::new();
    for sentence in &s.sentences {
        for t in sentence.token_types() {
            *sentence_freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut total = T::zero();
    for sentence in &s.sentences {
        let shared = sentence
            .token_types()
            .iter()
            .filter(|t| sentence_freq[t.as_str()] > 1)
            .count();
        total = total + T::from_ratio(shared as u64, sentence.type_count() as u64);
    }
    Ok(total * T::from_u64(100) / T::from_u64(s.len() as u64))
}

fn check_threshold(threshold: f64) -> Result<()> {
    if (0.0..=1.0).contains(&threshold) {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(threshold))
    }
}

/// Counts sentences whose overlap with some earlier sentence exceeds
/// `threshold`. The first member of a group of near-duplicates is not counted.
pub fn repetition_count(s: &SummaryDoc, threshold: f64) -> Result<usize> {
    check_threshold(threshold)?;
    s.ensure_non_empty()?;
    let count = s
        .sentences
        .iter()
        .enumerate()
        .filter(|(i, si)| {
            s.sentences[..*i]
                .iter()
                .any(|sj| overlap_exceeds(si, sj, threshold))
        })
        .count();
    Ok(count)
}

/// `(sentence count, token count)`.
pub fn summary_stats(s: &SummaryDoc) -> (usize, usize) {
    (s.len(), s.token_count())
}

pub fn redundancy_report<T: Scalar>(s: &SummaryDoc, threshold: f64) -> Result<RedundancyReport<T>> {
    let (sentence_count, token_count) = summary_stats(s);
    Ok(RedundancyReport {
        repeat_rate: repeat_rate(s)?,
        repetition_count: repetition_count(s, threshold)?,
        sentence_count,
        token_count,
    })
}

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram overlap over each document's flattened token sequence.
pub fn rouge_n<T: Scalar>(candidate: &SummaryDoc, reference: &SummaryDoc, n: usize) -> Result<RougeScore<T>> {
    if n == 0 {
        return Err(Error::InvalidNgramOrder);
    }
    candidate.ensure_non_empty()?;
    reference.ensure_non_empty()?;
    let cand: Vec<&str> = candidate.tokens().collect();
    let refr: Vec<&str> = reference.tokens().collect();
    if n > cand.len() && n > refr.len() {
        return Err(Error::ZeroNgrams { n });
    }
    let cand_total = (cand.len() + 1).saturating_sub(n);
    let ref_total = (refr.len() + 1).saturating_sub(n);
    let ref_counts = ngram_counts(&refr, n);
    let matches: usize = ngram_counts(&cand, n)
        .into_iter()
        .map(|(gram, count)| count.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    Ok(RougeScore::from_counts(matches, cand_total, ref_total))
}

/// Length of the longest common subsequence, two-row dynamic programme.
pub fn lcs_len<A: PartialEq>(a: &[A], b: &[A]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                curr[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// ROUGE-L over each document's whole flattened token sequence.
pub fn rouge_l<T: Scalar>(candidate: &SummaryDoc, reference: &SummaryDoc) -> Result<RougeScore<T>> {
    candidate.ensure_non_empty()?;
    reference.ensure_non_empty()?;
    let cand: Vec<&str> = candidate.tokens().collect();
    let refr: Vec<&str> = reference.tokens().collect();
    let lcs = lcs_len(&cand, &refr);
    Ok(RougeScore::from_counts(lcs, cand.len(), refr.len()))
}
