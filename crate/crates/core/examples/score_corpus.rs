//! Streams a JSONL corpus through the scorer and writes a report CSV to
//! stdout. Defaults to the bundled two-record fixture.
//!
//!     cargo run --example score_corpus -- path/to/corpus.jsonl

use std::io::stdout;

use bleuvar::corpusio::{read_corpus, ReadOptions, ReportWriter, RunConfig};
use bleuvar::pipeline::{score_stream, DEFAULT_CHUNK};

fn main() -> bleuvar::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/published_examples.jsonl").into());
    let config = RunConfig::default();
    let reader = read_corpus(&path, ReadOptions::default())?;
    let mut writer = ReportWriter::new(stdout().lock(), &config)?;
    let count = score_stream(reader, &config.scoring(), DEFAULT_CHUNK, |set, report| {
        eprintln!(
            "{}: median candidate {} of {}",
            set.doc_id,
            report.median_index,
            set.n()
        );
        writer.write(report)
    })?;
    drop(writer.finish()?);
    eprintln!("{count} documents");
    Ok(())
}
