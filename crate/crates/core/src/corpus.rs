//! JSON-lines corpus format.
//!
//! One record per line:
//!
//! ```json
//! {"id":"a1","article":["..."],"summary":["..."],"noisy":["..."],"provenance":{...}}
//! ```
//!
//! `noisy` and `provenance` are optional. With raw-text input, `article`,
//! `summary` and `noisy` are plain strings that go through the sentence
//! splitter instead.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noising::{NoisyRecord, Provenance, SourcePair};
use crate::text::{split_sentences, tokenize, SummaryDoc};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub article: Vec<String>,
    pub summary: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noisy: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTextRecord {
    id: String,
    article: String,
    summary: String,
    #[serde(default)]
    noisy: Option<String>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

fn split_field(field: &str, text: &str) -> std::result::Result<Vec<String>, String> {
    split_sentences(text)
        .map(|s| s.into_iter().map(|s| s.raw().to_string()).collect())
        .map_err(|_| format!("`{field}` contains no sentences"))
}

impl CorpusRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty `id`".into());
        }
        let mut fields = vec![("article", &self.article), ("summary", &self.summary)];
        if let Some(noisy) = &self.noisy {
            fields.push(("noisy", noisy));
        }
        for (name, sentences) in fields {
            if sentences.is_empty() {
                return Err(format!("`{name}` has no sentences"));
            }
            if let Some(i) = sentences.iter().position(|s| tokenize(s).is_err()) {
                return Err(format!("`{name}` sentence {i} has no tokens"));
            }
        }
        Ok(())
    }

    pub fn summary_doc(&self) -> SummaryDoc {
        self.doc_from(&self.summary)
    }

    pub fn article_doc(&self) -> SummaryDoc {
        self.doc_from(&self.article)
    }

    pub fn noisy_doc(&self) -> Option<SummaryDoc> {
        self.noisy.as_ref().map(|n| self.doc_from(n))
    }

    /// The text under evaluation: `noisy` when present, else `summary`.
    pub fn target_doc(&self) -> SummaryDoc {
        self.noisy_doc().unwrap_or_else(|| self.summary_doc())
    }

    pub fn source_pair(&self) -> SourcePair {
        SourcePair {
            article: self.article_doc(),
            summary: self.summary_doc(),
        }
    }

    /// Record for a noised summary. Its id is `<source id>#<variant>`.
    pub fn from_noisy(record: &NoisyRecord, article: &[String]) -> Self {
        Self {
            id: format!("{}#{}", record.source_id, record.variant_index),
            article: article.to_vec(),
            summary: record.clean.raw_sentences(),
            noisy: Some(record.noisy.raw_sentences()),
            provenance: Some(record.provenance()),
        }
    }

    fn doc_from(&self, sentences: &[String]) -> SummaryDoc {
        // Records are validated on read, so every sentence tokenizes.
        SummaryDoc::from_sentences(self.id.clone(), sentences).unwrap_or_else(|_| {
            SummaryDoc::new(
                self.id.clone(),
                sentences.iter().filter_map(|s| tokenize(s).ok()).collect(),
            )
        })
    }
}

/// Parses one line into a validated record.
pub fn parse_record(line: &str, line_no: usize, raw_text: bool) -> Result<CorpusRecord> {
    let malformed = |reason: String| Error::MalformedRecord {
        line: line_no,
        reason,
    };
    let record = if raw_text {
        let raw: RawTextRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        CorpusRecord {
            id: raw.id,
            article: split_field("article", &raw.article).map_err(malformed)?,
            summary: split_field("summary", &raw.summary).map_err(malformed)?,
            noisy: raw
                .noisy
                .map(|n| split_field("noisy", &n))
                .transpose()
                .map_err(malformed)?,
            provenance: raw.provenance,
        }
    } else {
        serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?
    };
    record.validate().map_err(malformed)?;
    Ok(record)
}

/// Streaming reader; blank lines are skipped and ids must be unique.
pub struct CorpusReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    raw_text: bool,
    seen: HashSet<String>,
    path: PathBuf,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, raw_text: bool) -> Self {
        Self {
            lines: reader.lines(),
            line_no: 0,
            raw_text,
            seen: HashSet::new(),
            path: PathBuf::from("<stream>"),
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<CorpusRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let record = match parse_record(&line, self.line_no, self.raw_text) {
                Ok(r) => r,
                Err(e) => return Some(Err(e)),
            };
            if !self.seen.insert(record.id.clone()) {
                return Some(Err(Error::DuplicateId {
                    line: self.line_no,
                    id: record.id,
                }));
            }
            return Some(Ok(record));
        }
    }
}

pub fn read_corpus(path: impl AsRef<Path>, raw_text: bool) -> Result<CorpusReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = CorpusReader::new(BufReader::new(file), raw_text);
    reader.path = path.to_path_buf();
    Ok(reader)
}

/// Line-at-a-time writer with a fixed field order.
pub struct CorpusWriter<W: Write> {
    inner: W,
    path: PathBuf,
}

impl CorpusWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            inner: BufWriter::new(file),
            path: path.to_path_buf(),
        })
    }
}

impl<W: Write> CorpusWriter<W> {
    pub fn new(inner: W) -> Self {
        Self {
            inner,
            path: PathBuf::from("<stream>"),
        }
    }

    pub fn write(&mut self, record: &CorpusRecord) -> Result<()> {
        serde_json::to_writer(&mut self.inner, record)?;
        self.inner
            .write_all(b"\n")
            .map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.inner)
    }
}

pub fn write_corpus<'a, I>(records: I, path: impl AsRef<Path>) -> Result<()>
where
    I: IntoIterator<Item = &'a CorpusRecord>,
{
    let mut writer = CorpusWriter::create(path)?;
    for record in records {
        writer.write(record)?;
    }
    writer.finish().map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noising::NoiseType;
    use proptest::prelude::*;

    fn read_str(s: &str, raw: bool) -> Vec<Result<CorpusRecord>> {
        CorpusReader::new(s.as_bytes(), raw).collect()
    }

    #[test]
    fn reads_valid_lines() {
        let data = r#"{"id":"a","article":["x y.","z."],"summary":["x y."]}

{"id":"b","article":["p"],"summary":["q"],"noisy":["q","q"]}
"#;
        let recs: Vec<_> = read_str(data, false).into_iter().map(Result::unwrap).collect();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].noisy.as_deref(), Some(&["q".to_string(), "q".to_string()][..]));
        assert_eq!(recs[1].target_doc().len(), 2);
        assert_eq!(recs[0].target_doc().len(), 1);
    }

    #[test]
    fn rejects_empty_summary() {
        let out = read_str(r#"{"id":"a","article":["x"],"summary":[]}"#, false);
        assert!(matches!(out[0], Err(Error::MalformedRecord { line: 1, .. })));
        let out = read_str(r#"{"id":"a","article":["x"],"summary":["..."]}"#, false);
        assert!(matches!(out[0], Err(Error::MalformedRecord { line: 1, .. })));
    }

    #[test]
    fn reports_line_numbers_and_duplicates() {
        let data = "{\"id\":\"a\",\"article\":[\"x\"],\"summary\":[\"y\"]}\nnot json\n{\"id\":\"a\",\"article\":[\"x\"],\"summary\":[\"y\"]}\n";
        let out = read_str(data, false);
        assert!(out[0].is_ok());
        assert!(matches!(out[1], Err(Error::MalformedRecord { line: 2, .. })));
        match &out[2] {
            Err(Error::DuplicateId { line, id }) => assert_eq!((*line, id.as_str()), (3, "a")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields() {
        let out = read_str(r#"{"id":"a","article":["x"],"summary":["y"],"extra":1}"#, false);
        assert!(out[0].is_err());
    }

    #[test]
    fn raw_text_mode_splits() {
        let out = read_str(
            r#"{"id":"a","article":"Mr. Smith ran. He won. Crowds cheered.","summary":"Smith won."}"#,
            true,
        );
        let rec = out.into_iter().next().unwrap().unwrap();
        assert_eq!(rec.article, ["Mr. Smith ran.", "He won.", "Crowds cheered."]);
        assert_eq!(rec.summary, ["Smith won."]);
        // List input is rejected in raw mode and vice versa.
        assert!(read_str(r#"{"id":"a","article":["x"],"summary":["y"]}"#, true)[0].is_err());
        assert!(read_str(r#"{"id":"a","article":"x","summary":"y"}"#, false)[0].is_err());
    }

    #[test]
    fn writes_fixed_field_order() {
        let rec = CorpusRecord {
            id: "a".into(),
            article: vec!["x".into()],
            summary: vec!["y".into()],
            noisy: Some(vec!["y".into(), "y".into()]),
            provenance: Some(Provenance {
                source_id: "a".into(),
                noise_type: NoiseType::Mixture,
                applied_type: NoiseType::Repeat,
                noised_indices: vec![1],
                variant_index: 0,
                seed: 42,
            }),
        };
        let mut w = CorpusWriter::new(Vec::new());
        w.write(&rec).unwrap();
        let bytes = w.finish().unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "{\"id\":\"a\",\"article\":[\"x\"],\"summary\":[\"y\"],\"noisy\":[\"y\",\"y\"],\
             \"provenance\":{\"source_id\":\"a\",\"noise_type\":\"mixture\",\"applied_type\":\"repeat\",\
             \"noised_indices\":[1],\"variant_index\":0,\"seed\":42}}\n"
        );
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let recs = vec![CorpusRecord {
            id: "z".into(),
            article: vec!["b a".into(), "c".into()],
            summary: vec!["c".into(), "b a".into()],
            noisy: None,
            provenance: None,
        }];
        write_corpus(&recs, &path).unwrap();
        let back: Vec<_> = read_corpus(&path, false).unwrap().map(Result::unwrap).collect();
        assert_eq!(back, recs);
        assert!(matches!(read_corpus(dir.path().join("missing"), false), Err(Error::Io { .. })));
    }

    fn sentence() -> impl Strategy<Value = String> {
        "[a-zA-Z0-9 \"\\\\é.,]{0,12}[a-z]"
    }

    fn record() -> impl Strategy<Value = CorpusRecord> {
        (
            "[a-z0-9#]{1,8}",
            prop::collection::vec(sentence(), 1..4),
            prop::collection::vec(sentence(), 1..4),
            prop::option::of(prop::collection::vec(sentence(), 1..4)),
        )
            .prop_map(|(id, article, summary, noisy)| CorpusRecord {
                id,
                article,
                summary,
                noisy,
                provenance: None,
            })
    }

    proptest! {
        #[test]
        fn serialize_round_trip(rec in record()) {
            let mut w = CorpusWriter::new(Vec::new());
            w.write(&rec).unwrap();
            let bytes = w.finish().unwrap();
            let back: Vec<_> = CorpusReader::new(&bytes[..], false).collect();
            let back = back.into_iter().next().unwrap().unwrap();
            prop_assert_eq!(&back, &rec);
            let mut again = CorpusWriter::new(Vec::new());
            again.write(&back).unwrap();
            prop_assert_eq!(again.finish().unwrap(), bytes);
            prop_assert_eq!(back.summary_doc().raw_sentences(), rec.summary);
        }
    }
}
