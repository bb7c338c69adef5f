//! Classification of denoiser edits and before/after corpus reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{repeat_rate, repetition_count, rouge_l, rouge_n, RougeScore};
use crate::text::{similarity, SummaryDoc};

/// Minimum similarity for an output sentence to count as an edit of an input
/// sentence rather than new content.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    NoChange,
    Deleted,
    Modified,
    DeletedAndModified,
}

impl EditKind {
    pub const ALL: [EditKind; 4] = [
        EditKind::NoChange,
        EditKind::Deleted,
        EditKind::Modified,
        EditKind::DeletedAndModified,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::NoChange => "no_change",
            EditKind::Deleted => "deleted",
            EditKind::Modified => "modified",
            EditKind::DeletedAndModified => "deleted_and_modified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EditClassification {
    pub kind: EditKind,
    pub deleted_count: usize,
    pub modified_count: usize,
}

impl EditClassification {
    fn from_counts(deleted_count: usize, modified_count: usize) -> Self {
        let kind = match (deleted_count > 0, modified_count > 0) {
            (false, false) => EditKind::NoChange,
            (true, false) => EditKind::Deleted,
            (false, true) => EditKind::Modified,
            (true, true) => EditKind::DeletedAndModified,
        };
        Self {
            kind,
            deleted_count,
            modified_count,
        }
    }
}

/// Greedy alignment: each output sentence, in order, takes the most similar
/// still-unmatched input sentence (lowest index on ties) if the similarity
/// reaches `match_threshold`. Unmatched inputs are deletions; non-identical
/// matches and unmatched outputs are modifications.
pub fn classify_edit(
    before: &SummaryDoc,
    after: &SummaryDoc,
    match_threshold: f64,
) -> Result<EditClassification> {
    before.ensure_non_empty()?;
    after.ensure_non_empty()?;
    let mut matched = vec![false; before.len()];
    let mut modified = 0;
    for sentence in &after.sentences {
        let mut best: Option<(usize, f64)> = None;
        for (j, candidate) in before.sentences.iter().enumerate() {
            if matched[j] {
                continue;
            }
            let sim = similarity::<f64>(sentence, candidate);
            if best.is_none_or(|(_, s)| sim > s) {
                best = Some((j, sim));
            }
        }
        match best {
            Some((j, sim)) if sim >= match_threshold => {
                matched[j] = true;
                if sim < 1.0 {
                    modified += 1;
                }
            }
            _ => modified += 1,
        }
    }
    let deleted = matched.iter().filter(|m| !**m).count();
    Ok(EditClassification::from_counts(deleted, modified))
}

/// Per-kind tallies; merging is associative so partial counts from parallel
/// workers can be combined in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperationCounts {
    pub no_change: usize,
    pub deleted: usize,
    pub modified: usize,
    pub deleted_and_modified: usize,
}

impl OperationCounts {
    pub fn add(&mut self, kind: EditKind) {
        match kind {
            EditKind::NoChange => self.no_change += 1,
            EditKind::Deleted => self.deleted += 1,
            EditKind::Modified => self.modified += 1,
            EditKind::DeletedAndModified => self.deleted_and_modified += 1,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            no_change: self.no_change + other.no_change,
            deleted: self.deleted + other.deleted,
            modified: self.modified + other.modified,
            deleted_and_modified: self.deleted_and_modified + other.deleted_and_modified,
        }
    }

    pub fn total(&self) -> usize {
        self.no_change + self.deleted + self.modified + self.deleted_and_modified
    }

    pub fn distribution(&self) -> Result<OperationDistribution> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        let frac = |c: usize| c as f64 / total as f64;
        Ok(OperationDistribution {
            no_change: frac(self.no_change),
            deleted: frac(self.deleted),
            modified: frac(self.modified),
            deleted_and_modified: frac(self.deleted_and_modified),
            sample_count: total,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperationDistribution {
    pub no_change: f64,
    pub deleted: f64,
    pub modified: f64,
    pub deleted_and_modified: f64,
    pub sample_count: usize,
}

impl OperationDistribution {
    pub fn fraction(&self, kind: EditKind) -> f64 {
        match kind {
            EditKind::NoChange => self.no_change,
            EditKind::Deleted => self.deleted,
            EditKind::Modified => self.modified,
            EditKind::DeletedAndModified => self.deleted_and_modified,
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("operation\tfraction\n");
        for kind in EditKind::ALL {
            let _ = writeln!(out, "{}\t{:.4}", kind.as_str(), self.fraction(kind));
        }
        let _ = writeln!(out, "samples\t{}", self.sample_count);
        out
    }
}

pub fn aggregate_operations<'a, I>(pairs: I, match_threshold: f64) -> Result<OperationDistribution>
where
    I: IntoIterator<Item = (&'a SummaryDoc, &'a SummaryDoc)>,
{
    let mut counts = OperationCounts::default();
    for (before, after) in pairs {
        counts.add(classify_edit(before, after, match_threshold)?.kind);
    }
    counts.distribution()
}

/// One row of the evaluation table. ROUGE values are mean F1 scaled to
/// percentages and are absent when no references were supplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemRow {
    pub system: String,
    pub records: usize,
    pub rouge_1: Option<f64>,
    pub rouge_2: Option<f64>,
    pub rouge_l: Option<f64>,
    pub repeat_rate: f64,
    pub mean_sentences: f64,
    pub mean_tokens: f64,
    pub repetitions: usize,
}

/// Running sums for one system.
#[derive(Debug, Clone, Default)]
pub struct SystemAccumulator {
    records: usize,
    scored: usize,
    rouge: [f64; 3],
    repeat_rate: f64,
    sentences: usize,
    tokens: usize,
    repetitions: usize,
}

fn f1_or_zero(score: Result<RougeScore<f64>>) -> Result<f64> {
    match score {
        Ok(s) => Ok(s.f1),
        // Both sides too short for the n-gram order: nothing to match.
        Err(Error::ZeroNgrams { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

impl SystemAccumulator {
    pub fn add(&mut self, doc: &SummaryDoc, reference: Option<&SummaryDoc>, threshold: f64) -> Result<()> {
        let with_id = |e: Error| e.in_record(doc.source_id.clone());
        self.records += 1;
        self.repeat_rate += repeat_rate::<f64>(doc).map_err(with_id)?;
        self.repetitions += repetition_count(doc, threshold).map_err(with_id)?;
        self.sentences += doc.len();
        self.tokens += doc.token_count();
        if let Some(reference) = reference {
            self.scored += 1;
            self.rouge[0] += f1_or_zero(rouge_n(doc, reference, 1)).map_err(with_id)?;
            self.rouge[1] += f1_or_zero(rouge_n(doc, reference, 2)).map_err(with_id)?;
            self.rouge[2] += f1_or_zero(rouge_l(doc, reference)).map_err(with_id)?;
        }
        Ok(())
    }

    pub fn finish(&self, system: impl Into<String>) -> SystemRow {
        let n = self.records.max(1) as f64;
        let rouge = |i: usize| (self.scored > 0).then(|| 100.0 * self.rouge[i] / self.scored as f64);
        SystemRow {
            system: system.into(),
            records: self.records,
            rouge_1: rouge(0),
            rouge_2: rouge(1),
            rouge_l: rouge(2),
            repeat_rate: self.repeat_rate / n,
            mean_sentences: self.sentences as f64 / n,
            mean_tokens: self.tokens as f64 / n,
            repetitions: self.repetitions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rows: Vec<SystemRow>,
}

impl EvalReport {
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("system\trecords\trouge1\trouge2\trougeL\trepeat\tsent\ttok\trepetitions\n");
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{}",
                row.system,
                row.records,
                opt(row.rouge_1),
                opt(row.rouge_2),
                opt(row.rouge_l),
                row.repeat_rate,
                row.mean_sentences,
                row.mean_tokens,
                row.repetitions
            );
        }
        out
    }
}

pub(crate) fn check_aligned(expected: &SummaryDoc, actual: &SummaryDoc) -> Result<()> {
    if expected.source_id == actual.source_id {
        Ok(())
    } else {
        Err(Error::AlignmentError {
            id: actual.source_id.clone(),
        })
    }
}

/// Builds the before/after table. Streams must list the same ids in the
/// same order; references, when given, are aligned the same way.
pub fn eval_report(
    before: &[SummaryDoc],
    after: &[SummaryDoc],
    references: Option<&[SummaryDoc]>,
    threshold: f64,
) -> Result<EvalReport> {
    if before.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mismatch_len = |longer: &[SummaryDoc], at: usize| Error::AlignmentError {
        id: longer[at].source_id.clone(),
    };
    if before.len() != after.len() {
        let at = before.len().min(after.len());
        return Err(if before.len() > after.len() {
            mismatch_len(before, at)
        } else {
            mismatch_len(after, at)
        });
    }
    if let Some(refs) = references {
        if refs.len() != before.len() {
            let at = before.len().min(refs.len());
            return Err(if refs.len() > before.len() {
                mismatch_len(refs, at)
            } else {
                mismatch_len(before, at)
            });
        }
    }

    let mut b_acc = SystemAccumulator::default();
    let mut a_acc = SystemAccumulator::default();
    for (i, (b, a)) in before.iter().zip(after).enumerate() {
        check_aligned(b, a)?;
        let reference = match references {
            Some(refs) => {
                check_aligned(b, &refs[i])?;
                Some(&refs[i])
            }
            None => None,
        };
        b_acc.add(b, reference, threshold)?;
        a_acc.add(a, reference, threshold)?;
    }
    Ok(EvalReport {
        rows: vec![b_acc.finish("before"), a_acc.finish("after")],
    })
}
