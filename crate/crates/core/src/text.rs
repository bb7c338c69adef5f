//! Sentence and document model: tokenization, sentence splitting and the
//! unigram-overlap primitive shared by metrics, noising and denoising.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Period-terminated units that do not end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "vs.", "no.", "gen.",
    "gov.", "sen.", "rep.", "lt.", "col.", "capt.", "sgt.", "rev.", "e.g.", "i.e.", "jan.",
    "feb.", "aug.", "sept.", "oct.", "nov.", "dec.",
];

/// Characters allowed between a terminator and the following whitespace.
const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}'];

/// One sentence: its surface form plus lowercased unigram tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    raw: String,
    tokens: Vec<String>,
    token_types: HashSet<String>,
}

impl TokenizedSentence {
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token_types(&self) -> &HashSet<String> {
        &self.token_types
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn type_count(&self) -> usize {
        self.token_types.len()
    }
}

/// Lowercases each whitespace-delimited unit and strips its leading and
/// trailing non-alphanumeric characters. Units that strip to nothing are
/// dropped. `raw` is kept verbatim.
pub fn tokenize(raw: &str) -> Result<TokenizedSentence> {
    let tokens: Vec<String> = raw
        .split_whitespace()
        .filter_map(|unit| {
            let lowered = unit.to_lowercase();
            let stripped = lowered.trim_matches(|c: char| !c.is_alphanumeric());
            (!stripped.is_empty()).then(|| stripped.to_string())
        })
        .collect();
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    let token_types = tokens.iter().cloned().collect();
    Ok(TokenizedSentence {
        raw: raw.to_string(),
        tokens,
        token_types,
    })
}

fn ends_sentence(unit: &str) -> bool {
    let body = unit.trim_end_matches(CLOSERS);
    let Some(last) = body.chars().last() else {
        return false;
    };
    match last {
        '!' | '?' => true,
        '.' => {
            let lowered = body.to_lowercase();
            if ABBREVIATIONS.contains(&lowered.as_str()) {
                return false;
            }
            // Initials such as "J." in "J. Smith".
            let mut chars = body.chars();
            !matches!((chars.next(), chars.next(), chars.next()), (Some(c), Some('.'), None) if c.is_uppercase())
        }
        _ => false,
    }
}

/// Splits running text on sentence-final punctuation followed by whitespace.
///
/// Whitespace inside each sentence is normalized to single spaces. Pieces
/// that contain no tokens (a stray "..." for example) are dropped.
pub fn split_sentences(raw_text: &str) -> Result<Vec<TokenizedSentence>> {
    let mut sentences = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut flush = |current: &mut Vec<&str>| {
        if current.is_empty() {
            return;
        }
        if let Ok(sentence) = tokenize(&current.join(" ")) {
            sentences.push(sentence);
        }
        current.clear();
    };
    for unit in raw_text.split_whitespace() {
        current.push(unit);
        if ends_sentence(unit) {
            flush(&mut current);
        }
    }
    flush(&mut current);
    if sentences.is_empty() {
        return Err(Error::EmptySentence);
    }
    Ok(sentences)
}

/// Number of distinct unigrams the two sentences share.
pub fn shared_types(a: &TokenizedSentence, b: &TokenizedSentence) -> usize {
    let (small, large) = if a.type_count() <= b.type_count() {
        (&a.token_types, &b.token_types)
    } else {
        (&b.token_types, &a.token_types)
    };
    small.iter().filter(|t| large.contains(*t)).count()
}

/// Fraction of `a`'s distinct unigrams that also occur in `b`.
pub fn unigram_overlap<T: Scalar>(a: &TokenizedSentence, b: &TokenizedSentence) -> T {
    T::from_ratio(shared_types(a, b) as u64, a.type_count() as u64)
}

/// `unigram_overlap(a, b) > threshold`, evaluated in `f64`.
pub fn overlap_exceeds(a: &TokenizedSentence, b: &TokenizedSentence, threshold: f64) -> bool {
    unigram_overlap::<f64>(a, b) > threshold
}

/// Harmonic mean of both directional overlaps. This reduces to
/// `2·shared / (|types(a)| + |types(b)|)`, which is what is computed so that
/// `f64` comparisons between candidates stay exact for realistic sizes.
pub fn similarity<T: Scalar>(a: &TokenizedSentence, b: &TokenizedSentence) -> T {
    let shared = shared_types(a, b) as u64;
    T::from_ratio(2 * shared, (a.type_count() + b.type_count()) as u64)
}

/// Index of the sentence in `candidates` most similar to `target`; ties go
/// to the lowest index. `None` when `candidates` is empty.
pub fn most_similar<'a, I>(target: &TokenizedSentence, candidates: I) -> Option<(usize, f64)>
where
    I: IntoIterator<Item = (usize, &'a TokenizedSentence)>,
{
    let mut best: Option<(usize, f64)> = None;
    for (idx, candidate) in candidates {
        let sim = similarity::<f64>(target, candidate);
        if best.is_none_or(|(_, s)| sim > s) {
            best = Some((idx, sim));
        }
    }
    best
}

/// An ordered list of sentences: a summary, a system output or an article.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SummaryDoc {
    pub source_id: String,
    pub sentences: Vec<TokenizedSentence>,
}

impl SummaryDoc {
    pub fn new(source_id: impl Into<String>, sentences: Vec<TokenizedSentence>) -> Self {
        Self {
            source_id: source_id.into(),
            sentences,
        }
    }

    /// Builds a document from pre-split sentence strings.
    pub fn from_sentences<I, S>(source_id: impl Into<String>, sentences: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sentences = sentences
            .into_iter()
            .map(|s| tokenize(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(source_id, sentences))
    }

    /// Builds a document by running the sentence splitter over `text`.
    pub fn from_text(source_id: impl Into<String>, text: &str) -> Result<Self> {
        Ok(Self::new(source_id, split_sentences(text)?))
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(String::as_str))
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(TokenizedSentence::len).sum()
    }

    pub fn raw_sentences(&self) -> Vec<String> {
        self.sentences.iter().map(|s| s.raw.clone()).collect()
    }

    pub(crate) fn ensure_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyDocument)
        } else {
            Ok(())
        }
    }
}
