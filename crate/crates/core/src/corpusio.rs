//! Corpus and report file formats.
//!
//! * Corpus: UTF-8 JSONL, one [`SampleSet`] per line with fields `doc_id`,
//!   `candidates`, `reference` and the optional `deterministic` and
//!   `document`. A leading byte-order mark is rejected.
//! * Reports: CSV with header
//!   `doc_id,n,bleuvar,bleuvarn,median_index,r1,r2,rl,det_r1,det_r2,det_rl`.
//! * Curves: CSV with header `fraction,value`.
//!
//! CSV outputs start with a `# run_config {...}` comment line holding the
//! serialized [`RunConfig`]. Floats are written with six decimals (exact ties
//! round half to even).

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{default_grid, RetentionCurve, ScoredRecord};
use crate::metrics::{RougeF1, DEFAULT_MAX_ORDER, SMOOTHING_ID};
use crate::uncertainty::{SampleSet, ScoringConfig, UncertaintyReport};
use crate::{Error, Result};

pub const REPORT_HEADER: [&str; 11] = [
    "doc_id",
    "n",
    "bleuvar",
    "bleuvarn",
    "median_index",
    "r1",
    "r2",
    "rl",
    "det_r1",
    "det_r2",
    "det_rl",
];

const CONFIG_PREFIX: &str = "# run_config ";

pub const TIE_BREAK_ID: &str = "lowest-index";

/// Settings that determine output bytes; written at the top of every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub max_order: usize,
    pub smoothing: String,
    pub tie_break: String,
    pub retention_grid: Vec<f64>,
    pub metric: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_order: DEFAULT_MAX_ORDER,
            smoothing: SMOOTHING_ID.to_string(),
            tie_break: TIE_BREAK_ID.to_string(),
            retention_grid: default_grid(),
            metric: "r1".to_string(),
        }
    }
}

impl RunConfig {
    pub fn scoring(&self) -> ScoringConfig {
        ScoringConfig {
            max_order: self.max_order,
        }
    }

    pub fn header_line(&self) -> String {
        format!(
            "{CONFIG_PREFIX}{}",
            serde_json::to_string(self).expect("config serializes")
        )
    }

    /// Parses a `# run_config {...}` line; `None` for any other line.
    pub fn from_header_line(line: &str) -> Option<Self> {
        serde_json::from_str(line.strip_prefix(CONFIG_PREFIX)?.trim_end()).ok()
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.6}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadOptions {
    /// Accept records whose candidate count differs from the first record's.
    pub allow_ragged: bool,
}

/// Streaming, validating JSONL corpus reader. Holds one line at a time plus
/// the set of doc ids seen so far.
pub struct CorpusReader<R> {
    path: PathBuf,
    lines: std::io::Lines<R>,
    line_no: usize,
    seen: HashSet<String>,
    expected_n: Option<usize>,
    options: ReadOptions,
}

pub fn read_corpus(path: impl AsRef<Path>, options: ReadOptions) -> Result<CorpusReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(CorpusReader::new(path, BufReader::new(file), options))
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(path: impl Into<PathBuf>, reader: R, options: ReadOptions) -> Self {
        CorpusReader {
            path: path.into(),
            lines: reader.lines(),
            line_no: 0,
            seen: HashSet::new(),
            expected_n: None,
            options,
        }
    }

    fn invalid(&self, message: impl Into<String>) -> Error {
        Error::Validation {
            path: self.path.clone(),
            line: self.line_no,
            message: message.into(),
        }
    }

    fn parse(&mut self, line: &str) -> Result<SampleSet> {
        if self.line_no == 1 && line.starts_with('\u{feff}') {
            return Err(self.invalid("byte-order mark is not allowed"));
        }
        let set: SampleSet = serde_json::from_str(line).map_err(|e| self.invalid(format!("malformed record: {e}")))?;
        if set.doc_id.is_empty() {
            return Err(self.invalid("`doc_id` must be non-empty"));
        }
        if set.candidates.len() < 2 {
            return Err(self.invalid(format!(
                "`candidates` of `{}` needs at least 2 entries, got {}",
                set.doc_id,
                set.candidates.len()
            )));
        }
        match self.expected_n {
            None => self.expected_n = Some(set.candidates.len()),
            Some(n) if n != set.candidates.len() && !self.options.allow_ragged => {
                return Err(self.invalid(format!(
                    "`{}` has {} candidates but earlier records have {n} (use --allow-ragged)",
                    set.doc_id,
                    set.candidates.len()
                )));
            }
            Some(_) => {}
        }
        if !self.seen.insert(set.doc_id.clone()) {
            return Err(self.invalid(format!("duplicate doc_id `{}`", set.doc_id)));
        }
        Ok(set)
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<SampleSet>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            let line = match line {
                Ok(line) => line,
                Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                    return Some(Err(self.invalid("not valid UTF-8")));
                }
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            if line.trim().is_empty() {
                continue;
            }
            return Some(self.parse(&line));
        }
    }
}

/// Writes sample sets as JSONL.
pub fn write_corpus<'a>(sets: impl IntoIterator<Item = &'a SampleSet>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for set in sets {
        let line = serde_json::to_string(set).expect("sample set serializes");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// The CSV-visible part of an [`UncertaintyReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub doc_id: String,
    pub n: usize,
    pub bleuvar: f64,
    pub bleuvarn: f64,
    pub median_index: usize,
    pub rouge: RougeF1,
    pub deterministic: Option<RougeF1>,
}

impl From<&UncertaintyReport> for ReportRow {
    fn from(r: &UncertaintyReport) -> Self {
        ReportRow {
            doc_id: r.doc_id.clone(),
            n: r.n,
            bleuvar: r.bleuvar,
            bleuvarn: r.bleuvarn,
            median_index: r.median_index,
            rouge: r.rouge_median.f1(),
            deterministic: r.rouge_deterministic.map(|t| t.f1()),
        }
    }
}

impl ReportRow {
    pub fn scored_record(&self) -> ScoredRecord {
        ScoredRecord {
            doc_id: self.doc_id.clone(),
            bleuvarn: self.bleuvarn,
            rouge_median: self.rouge,
            rouge_deterministic: self.deterministic,
        }
    }

    fn fields(&self) -> [String; 11] {
        let det = |f: fn(&RougeF1) -> f64| self.deterministic.as_ref().map(f).map(format_float).unwrap_or_default();
        [
            self.doc_id.clone(),
            self.n.to_string(),
            format_float(self.bleuvar),
            format_float(self.bleuvarn),
            self.median_index.to_string(),
            format_float(self.rouge.r1),
            format_float(self.rouge.r2),
            format_float(self.rouge.rl),
            det(|r| r.r1),
            det(|r| r.r2),
            det(|r| r.rl),
        ]
    }
}

/// Incremental report CSV writer; rows appear in the order they are written.
pub struct ReportWriter<W: Write> {
    csv: csv::Writer<W>,
}

impl ReportWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>, config: &RunConfig) -> Result<Self> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Self::new(BufWriter::new(file), config)
    }
}

impl<W: Write> ReportWriter<W> {
    pub fn new(mut sink: W, config: &RunConfig) -> Result<Self> {
        writeln!(sink, "{}", config.header_line()).map_err(csv::Error::from)?;
        let mut csv = csv::Writer::from_writer(sink);
        csv.write_record(REPORT_HEADER)?;
        Ok(ReportWriter { csv })
    }

    pub fn write_row(&mut self, row: &ReportRow) -> Result<()> {
        self.csv.write_record(row.fields())?;
        Ok(())
    }

    pub fn write(&mut self, report: &UncertaintyReport) -> Result<()> {
        self.write_row(&ReportRow::from(report))
    }

    pub fn finish(mut self) -> Result<W> {
        self.csv.flush().map_err(csv::Error::from)?;
        self.csv
            .into_inner()
            .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))
    }
}

pub fn write_reports<'a>(
    reports: impl IntoIterator<Item = &'a UncertaintyReport>,
    path: impl AsRef<Path>,
    config: &RunConfig,
) -> Result<()> {
    let mut writer = ReportWriter::create(path, config)?;
    for report in reports {
        writer.write(report)?;
    }
    writer.finish().map(|_| ())
}

/// Parses report CSV text. Returns the embedded run config when present.
pub fn parse_reports(text: &str, path: &Path) -> Result<(Option<RunConfig>, Vec<ReportRow>)> {
    let config = text.lines().next().and_then(RunConfig::from_header_line);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().ne(REPORT_HEADER) {
        return Err(Error::Validation {
            path: path.to_path_buf(),
            line: 0,
            message: format!(
                "unexpected report header `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let invalid = |message: String| Error::Validation {
            path: path.to_path_buf(),
            line,
            message,
        };
        let float = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| {
                invalid(format!(
                    "column `{}`: `{}` is not a number",
                    REPORT_HEADER[i], &record[i]
                ))
            })
        };
        let int = |i: usize| -> Result<usize> {
            record[i].parse::<usize>().map_err(|_| {
                invalid(format!(
                    "column `{}`: `{}` is not an integer",
                    REPORT_HEADER[i], &record[i]
                ))
            })
        };
        let det_present = (8..11).filter(|&i| !record[i].is_empty()).count();
        let deterministic = match det_present {
            0 => None,
            3 => Some(RougeF1 {
                r1: float(8)?,
                r2: float(9)?,
                rl: float(10)?,
            }),
            _ => return Err(invalid("deterministic columns must be all set or all empty".into())),
        };
        rows.push(ReportRow {
            doc_id: record[0].to_string(),
            n: int(1)?,
            bleuvar: float(2)?,
            bleuvarn: float(3)?,
            median_index: int(4)?,
            rouge: RougeF1 {
                r1: float(5)?,
                r2: float(6)?,
                rl: float(7)?,
            },
            deterministic,
        });
    }
    Ok((config, rows))
}

pub fn read_reports(path: impl AsRef<Path>) -> Result<(Option<RunConfig>, Vec<ReportRow>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_reports(&text, path)
}

pub fn format_curve(curve: &RetentionCurve, config: &RunConfig) -> Result<String> {
    if curve.points.is_empty() {
        return Err(Error::InvalidArgument("curve has no points".into()));
    }
    let mut out = config.header_line();
    out.push_str("\nfraction,value\n");
    for p in &curve.points {
        out.push_str(&format!("{},{}\n", format_float(p.fraction), format_float(p.value)));
    }
    Ok(out)
}

pub fn write_curve(curve: &RetentionCurve, path: impl AsRef<Path>, config: &RunConfig) -> Result<()> {
    let path = path.as_ref();
    let text = format_curve(curve, config)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn read_str(text: &str, options: ReadOptions) -> Vec<Result<SampleSet>> {
        CorpusReader::new("mem.jsonl", Cursor::new(text.as_bytes().to_vec()), options).collect()
    }

    #[test]
    fn minimal_record() {
        let sets = read_str(
            r#"{"doc_id":"d1","candidates":["a b","a c"],"reference":"a b"}"#,
            ReadOptions::default(),
        );
        let set = sets[0].as_ref().unwrap();
        assert_eq!(set.n(), 2);
        assert_eq!(set.reference, "a b");
        assert!(set.deterministic.is_none());
    }

    #[test]
    fn missing_reference_names_field_and_line() {
        let text = "{\"doc_id\":\"d1\",\"candidates\":[\"a\",\"b\"],\"reference\":\"a\"}\n{\"doc_id\":\"d2\",\"candidates\":[\"a\",\"b\"]}\n";
        let sets = read_str(text, ReadOptions::default());
        assert!(sets[0].is_ok());
        match &sets[1] {
            Err(Error::Validation { line, message, .. }) => {
                assert_eq!(*line, 2);
                assert!(message.contains("reference"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_failures() {
        let cases = [
            ("{not json", "malformed"),
            (r#"{"doc_id":"d","candidates":[],"reference":"a"}"#, "at least 2"),
            (r#"{"doc_id":"d","candidates":["x"],"reference":"a"}"#, "at least 2"),
            (r#"{"doc_id":"","candidates":["x","y"],"reference":"a"}"#, "non-empty"),
            (
                "\u{feff}{\"doc_id\":\"d\",\"candidates\":[\"x\",\"y\"],\"reference\":\"a\"}",
                "byte-order",
            ),
        ];
        for (text, needle) in cases {
            let sets = read_str(text, ReadOptions::default());
            match &sets[0] {
                Err(Error::Validation { line: 1, message, .. }) => assert!(message.contains(needle), "{message}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn duplicates_and_ragged() {
        let dup = "{\"doc_id\":\"d\",\"candidates\":[\"x\",\"y\"],\"reference\":\"a\"}\n{\"doc_id\":\"d\",\"candidates\":[\"x\",\"y\"],\"reference\":\"a\"}";
        assert!(matches!(
            &read_str(dup, ReadOptions::default())[1],
            Err(Error::Validation { line: 2, .. })
        ));

        let ragged = "{\"doc_id\":\"a\",\"candidates\":[\"x\",\"y\"],\"reference\":\"a\"}\n\n{\"doc_id\":\"b\",\"candidates\":[\"x\",\"y\",\"z\"],\"reference\":\"a\"}";
        let strict = read_str(ragged, ReadOptions::default());
        assert!(matches!(&strict[1], Err(Error::Validation { line: 3, .. })));
        let lenient = read_str(ragged, ReadOptions { allow_ragged: true });
        assert!(lenient.iter().all(|r| r.is_ok()));
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let mut bytes = b"{\"doc_id\":\"a\",\"candidates\":[\"x\",\"y\"],\"reference\":\"a\"}\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xfe, b'\n']);
        let sets: Vec<_> = CorpusReader::new("m", Cursor::new(bytes), ReadOptions::default()).collect();
        assert!(matches!(&sets[1], Err(Error::Validation { line: 2, .. })));
    }

    #[test]
    fn empty_report_stream_is_header_only() {
        let config = RunConfig::default();
        let writer = ReportWriter::new(Vec::new(), &config).unwrap();
        let text = String::from_utf8(writer.finish().unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("# run_config {"));
        assert_eq!(lines[1], REPORT_HEADER.join(","));
        let (parsed, rows) = parse_reports(&text, Path::new("m")).unwrap();
        assert_eq!(parsed, Some(config));
        assert!(rows.is_empty());
    }

    #[test]
    fn six_decimal_half_even() {
        assert_eq!(format_float(0.625), "0.625000");
        assert_eq!(format_float(0.0000005), "0.000000");
        assert_eq!(format_float(1.0), "1.000000");
    }

    #[test]
    fn row_without_deterministic_has_empty_columns() {
        let row = ReportRow {
            doc_id: "x,y".into(),
            n: 3,
            bleuvar: 1.5,
            bleuvarn: 0.25,
            median_index: 2,
            rouge: RougeF1 {
                r1: 0.5,
                r2: 0.25,
                rl: 0.5,
            },
            deterministic: None,
        };
        let mut w = ReportWriter::new(Vec::new(), &RunConfig::default()).unwrap();
        w.write_row(&row).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert!(
            text.ends_with("\"x,y\",3,1.500000,0.250000,2,0.500000,0.250000,0.500000,,,\n"),
            "{text}"
        );
        let (_, rows) = parse_reports(&text, Path::new("m")).unwrap();
        assert_eq!(rows, vec![row]);
    }

    #[test]
    fn curve_formatting() {
        use crate::analysis::{CurvePoint, SortKey};
        let curve = RetentionCurve {
            metric_name: "r1".into(),
            sort_key: SortKey::BleuvarnDesc,
            points: vec![
                CurvePoint {
                    fraction: 0.0,
                    value: 0.35,
                },
                CurvePoint {
                    fraction: 0.25,
                    value: 1.3 / 3.0,
                },
            ],
        };
        let text = format_curve(&curve, &RunConfig::default()).unwrap();
        let body: Vec<_> = text.lines().skip(1).collect();
        assert_eq!(body, ["fraction,value", "0.000000,0.350000", "0.250000,0.433333"]);

        let empty = RetentionCurve {
            points: vec![],
            ..curve
        };
        assert!(format_curve(&empty, &RunConfig::default()).is_err());
    }

    #[test]
    fn config_header_round_trip() {
        let config = RunConfig {
            retention_grid: vec![0.0, 0.5],
            metric: "rl".into(),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_header_line(&config.header_line()), Some(config));
        assert_eq!(RunConfig::from_header_line("doc_id,n"), None);
    }
}
