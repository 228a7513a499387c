//! Streaming corpus scoring: reader -> parallel scorers -> in-order sink.
//!
//! Records are pulled in fixed-size chunks, scored in parallel on the current
//! rayon pool, and handed to the sink in input order. Memory is bounded by one
//! chunk regardless of corpus size, and output does not depend on the number
//! of worker threads.

use rayon::prelude::*;

use crate::uncertainty::{score_sample_set, SampleSet, ScoringConfig, UncertaintyReport};
use crate::Result;

pub const DEFAULT_CHUNK: usize = 256;

/// Scores every record and calls `sink(set, report)` in input order. Stops at
/// the first reader, scoring or sink error.
pub fn score_stream<I, F>(records: I, config: &ScoringConfig, chunk: usize, mut sink: F) -> Result<usize>
where
    I: IntoIterator<Item = Result<SampleSet>>,
    F: FnMut(&SampleSet, &UncertaintyReport) -> Result<()>,
{
    let chunk = chunk.max(1);
    let mut records = records.into_iter();
    let mut buffer: Vec<SampleSet> = Vec::with_capacity(chunk);
    let mut scored = 0;
    loop {
        buffer.clear();
        let mut pending_err = None;
        for record in records.by_ref() {
            match record {
                Ok(set) => buffer.push(set),
                Err(e) => {
                    pending_err = Some(e);
                    break;
                }
            }
            if buffer.len() == chunk {
                break;
            }
        }
        let reports: Vec<Result<UncertaintyReport>> =
            buffer.par_iter().map(|set| score_sample_set(set, config)).collect();
        for (set, report) in buffer.iter().zip(reports) {
            sink(set, &report?)?;
            scored += 1;
        }
        if let Some(e) = pending_err {
            return Err(e);
        }
        if buffer.len() < chunk {
            return Ok(scored);
        }
    }
}

/// Scores an in-memory corpus, preserving order.
pub fn score_all(sets: &[SampleSet], config: &ScoringConfig) -> Result<Vec<UncertaintyReport>> {
    sets.par_iter().map(|s| score_sample_set(s, config)).collect()
}
