//! Denoisers: the rule-based overlap baseline and an adapter for external
//! line-oriented denoising programs.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::thread;

use crate::error::{Error, Result};
use crate::text::{overlap_exceeds, SummaryDoc};

/// Separator placed between sentences on the external denoiser channel.
pub const SENTENCE_SEPARATOR: &str = "<S>";

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseResult {
    pub output: SummaryDoc,
    /// Positions in the input that were removed, ascending.
    pub deleted_indices: Vec<usize>,
}

/// Deletes every sentence whose overlap with an earlier *retained* sentence
/// is strictly greater than `threshold`.
pub fn overlap_denoise(s: &SummaryDoc, threshold: f64) -> Result<DenoiseResult> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    s.ensure_non_empty()?;
    let mut kept = Vec::with_capacity(s.len());
    let mut deleted_indices = Vec::new();
    for (i, sentence) in s.sentences.iter().enumerate() {
        if kept
            .iter()
            .any(|retained| overlap_exceeds(sentence, retained, threshold))
        {
            deleted_indices.push(i);
        } else {
            kept.push(sentence.clone());
        }
    }
    Ok(DenoiseResult {
        output: SummaryDoc::new(s.source_id.clone(), kept),
        deleted_indices,
    })
}

/// Serializes one summary as a single channel line (no trailing newline).
pub fn encode_line(doc: &SummaryDoc, record: usize) -> Result<String> {
    let mut parts = Vec::with_capacity(doc.len());
    for sentence in &doc.sentences {
        let raw = sentence.raw();
        if raw.contains(SENTENCE_SEPARATOR) || raw.contains(['\n', '\r']) {
            return Err(Error::ReservedSeparator { record });
        }
        parts.push(raw.trim());
    }
    Ok(parts.join(&format!(" {SENTENCE_SEPARATOR} ")))
}

/// Parses a channel line back into a summary. Blank segments are skipped;
/// a line with no sentence at all is an error.
pub fn decode_line(source_id: &str, line: &str) -> Result<SummaryDoc> {
    let sentences: Vec<&str> = line
        .split(SENTENCE_SEPARATOR)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let doc = SummaryDoc::from_sentences(source_id, sentences)
        .map_err(|e| e.in_record(source_id))?;
    if doc.is_empty() {
        return Err(Error::EmptyDocument.in_record(source_id));
    }
    Ok(doc)
}

/// Reads one response line per request from `reader` and re-parses it.
/// Source ids are carried over from `requests` by position.
pub fn read_responses<R: BufRead>(requests: &[SummaryDoc], reader: R) -> Result<Vec<SummaryDoc>> {
    let mut outputs = Vec::with_capacity(requests.len());
    for line in reader.lines() {
        let line = line?;
        let Some(request) = requests.get(outputs.len()) else {
            return Err(Error::ProtocolViolation {
                record: outputs.len(),
                reason: format!("unexpected extra output line beyond {} records", requests.len()),
            });
        };
        outputs.push(decode_line(&request.source_id, &line)?);
    }
    if outputs.len() < requests.len() {
        return Err(Error::ProtocolViolation {
            record: outputs.len(),
            reason: format!(
                "expected {} output lines, got {}",
                requests.len(),
                outputs.len()
            ),
        });
    }
    Ok(outputs)
}

/// Runs a user-supplied shell command as a denoiser: one summary per line on
/// stdin, one denoised summary per line on stdout, same order.
#[derive(Debug, Clone)]
pub struct ExternalDenoiser {
    command: String,
}

impl ExternalDenoiser {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
        }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn denoise(&self, records: &[SummaryDoc]) -> Result<Vec<SummaryDoc>> {
        let mut payload = String::new();
        for (i, doc) in records.iter().enumerate() {
            payload.push_str(&encode_line(doc, i)?);
            payload.push('\n');
        }

        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let writer = thread::spawn(move || {
            // A denoiser that exits early closes the pipe; the line count
            // check below reports that case.
            let _ = stdin.write_all(payload.as_bytes());
        });
        let stdout = child.stdout.take().expect("stdout is piped");
        let responses = read_responses(records, BufReader::new(stdout));
        let _ = writer.join();
        let status = child.wait()?;
        let responses = responses?;
        if !status.success() {
            return Err(Error::ProtocolViolation {
                record: records.len(),
                reason: format!("denoiser command exited with {status}"),
            });
        }
        Ok(responses)
    }
}
