//! Corpus-level analyses over scored documents.
//!
//! Retention curves discard the `floor(k * M)` most uncertain records
//! (highest BLEUVarN, ties by ascending `doc_id`) for each fraction `k` on a
//! grid and average a ROUGE F1 over the rest. The quality curve goes the other
//! way: it discards the lowest ROUGE-1 records and averages BLEUVarN.
//!
//! Means sum their values in ascending order, so a mean depends only on the
//! multiset of values. This makes every curve independent of input order and
//! makes the fraction-0 point equal [`corpus_means`] bit for bit.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::{RougeF1, RougeVariant};
use crate::uncertainty::UncertaintyReport;
use crate::{Error, Result};

/// Per-document projection of an [`UncertaintyReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub doc_id: String,
    pub bleuvarn: f64,
    pub rouge_median: RougeF1,
    pub rouge_deterministic: Option<RougeF1>,
}

impl From<&UncertaintyReport> for ScoredRecord {
    fn from(report: &UncertaintyReport) -> Self {
        ScoredRecord {
            doc_id: report.doc_id.clone(),
            bleuvarn: report.bleuvarn,
            rouge_median: report.rouge_median.f1(),
            rouge_deterministic: report.rouge_deterministic.map(|t| t.f1()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SortKey {
    /// Most uncertain first: highest BLEUVarN is discarded first.
    #[serde(rename = "bleuvarn-desc")]
    BleuvarnDesc,
    /// Worst first: lowest ROUGE-1 is discarded first.
    #[serde(rename = "rouge-asc")]
    RougeAsc,
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortKey::BleuvarnDesc => "bleuvarn-desc",
            SortKey::RougeAsc => "rouge-asc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionCurve {
    pub metric_name: String,
    pub sort_key: SortKey,
    pub points: Vec<CurvePoint>,
}

impl RetentionCurve {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// `0, 0.05, ..., 0.95`.
pub fn default_grid() -> Vec<f64> {
    (0..20).map(|i| i as f64 / 20.0).collect()
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    let first = *grid
        .first()
        .ok_or_else(|| Error::InvalidArgument("retention grid is empty".into()))?;
    if let Some(&bad) = grid.iter().find(|f| !(0.0..1.0).contains(*f)) {
        return Err(Error::InvalidFraction(bad));
    }
    if first != 0.0 {
        return Err(Error::InvalidArgument("retention grid must start at 0".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "retention grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Number of records discarded at `fraction`: `floor(fraction * total)`.
/// The small slack absorbs products like `0.29 * 100 = 28.999...`.
pub fn discard_count(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64) + 1e-9).floor() as usize
}

/// Mean of `values`, summed in ascending order.
pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

fn order_records(records: &[ScoredRecord], key: SortKey) -> Vec<&ScoredRecord> {
    let mut sorted: Vec<&ScoredRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        let primary = match key {
            SortKey::BleuvarnDesc => b.bleuvarn.total_cmp(&a.bleuvarn),
            SortKey::RougeAsc => a.rouge_median.r1.total_cmp(&b.rouge_median.r1),
        };
        match primary {
            Ordering::Equal => a.doc_id.cmp(&b.doc_id),
            other => other,
        }
    });
    sorted
}

fn curve_over<F>(
    records: &[ScoredRecord],
    key: SortKey,
    grid: &[f64],
    metric_name: String,
    statistic: F,
) -> Result<RetentionCurve>
where
    F: Fn(&[&ScoredRecord]) -> f64 + Sync,
{
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    validate_grid(grid)?;
    let sorted = order_records(records, key);
    let points = grid
        .par_iter()
        .map(|&fraction| CurvePoint {
            fraction,
            value: statistic(&sorted[discard_count(fraction, sorted.len())..]),
        })
        .collect();
    Ok(RetentionCurve {
        metric_name,
        sort_key: key,
        points,
    })
}

/// Mean ROUGE F1 of the median summaries after discarding the most uncertain
/// records.
pub fn retention_curve(records: &[ScoredRecord], variant: RougeVariant, grid: &[f64]) -> Result<RetentionCurve> {
    curve_over(
        records,
        SortKey::BleuvarnDesc,
        grid,
        variant.name().to_string(),
        |kept| mean(kept.iter().map(|r| r.rouge_median.get(variant))),
    )
}

/// Mean BLEUVarN after discarding the lowest ROUGE-1 records.
pub fn uncertainty_vs_quality_curve(records: &[ScoredRecord], grid: &[f64]) -> Result<RetentionCurve> {
    curve_over(records, SortKey::RougeAsc, grid, "bleuvarn".to_string(), |kept| {
        mean(kept.iter().map(|r| r.bleuvarn))
    })
}

/// Median-summary mean minus deterministic mean over the retained records,
/// discarding by highest BLEUVarN.
pub fn difference_curve(records: &[ScoredRecord], variant: RougeVariant, grid: &[f64]) -> Result<RetentionCurve> {
    if let Some(missing) = records.iter().find(|r| r.rouge_deterministic.is_none()) {
        return Err(Error::MissingDeterministic(missing.doc_id.clone()));
    }
    curve_over(
        records,
        SortKey::BleuvarnDesc,
        grid,
        format!("{}-diff", variant.name()),
        |kept| {
            let median = mean(kept.iter().map(|r| r.rouge_median.get(variant)));
            let det = mean(
                kept.iter()
                    .map(|r| r.rouge_deterministic.expect("checked above").get(variant)),
            );
            median - det
        },
    )
}

/// Percent increase of each ROUGE mean at one discard fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentIncrease {
    pub fraction: f64,
    pub r1: f64,
    pub r2: f64,
    pub rl: f64,
}

pub const DEFAULT_INCREASE_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];

/// `100 * (mean_retained - mean_full) / mean_full` per ROUGE variant.
pub fn percent_increase(records: &[ScoredRecord], fractions: &[f64]) -> Result<Vec<PercentIncrease>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if let Some(&bad) = fractions.iter().find(|f| !(0.0..1.0).contains(*f)) {
        return Err(Error::InvalidFraction(bad));
    }
    let sorted = order_records(records, SortKey::BleuvarnDesc);
    let mut baseline = [0.0; 3];
    for (slot, variant) in baseline.iter_mut().zip(RougeVariant::ALL) {
        *slot = mean(sorted.iter().map(|r| r.rouge_median.get(variant)));
        if *slot == 0.0 {
            return Err(Error::UndefinedBaseline(variant.label()));
        }
    }
    Ok(fractions
        .iter()
        .map(|&fraction| {
            let kept = &sorted[discard_count(fraction, sorted.len())..];
            let pct = |idx: usize, variant: RougeVariant| {
                let m = mean(kept.iter().map(|r| r.rouge_median.get(variant)));
                100.0 * (m - baseline[idx]) / baseline[idx]
            };
            PercentIncrease {
                fraction,
                r1: pct(0, RougeVariant::R1),
                r2: pct(1, RougeVariant::R2),
                rl: pct(2, RougeVariant::RL),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusMeans {
    pub count: usize,
    /// Mean F1 of the median summaries, on the `[0, 1]` scale.
    pub median: RougeF1,
    /// Present only when every record carries deterministic scores.
    pub deterministic: Option<RougeF1>,
}

impl CorpusMeans {
    /// `R-1/R-2/R-L` as percentages with two decimals, e.g. `62.50/40.00/62.50`.
    pub fn format_percent(scores: &RougeF1) -> String {
        format!(
            "{:.2}/{:.2}/{:.2}",
            scores.r1 * 100.0,
            scores.r2 * 100.0,
            scores.rl * 100.0
        )
    }
}

pub fn corpus_means(records: &[ScoredRecord]) -> Result<CorpusMeans> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let triple = |get: &dyn Fn(&ScoredRecord) -> RougeF1| RougeF1 {
        r1: mean(records.iter().map(|r| get(r).r1)),
        r2: mean(records.iter().map(|r| get(r).r2)),
        rl: mean(records.iter().map(|r| get(r).rl)),
    };
    let deterministic = records
        .iter()
        .all(|r| r.rouge_deterministic.is_some())
        .then(|| triple(&|r| r.rouge_deterministic.expect("checked")));
    Ok(CorpusMeans {
        count: records.len(),
        median: triple(&|r| r.rouge_median),
        deterministic,
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("length mismatch".into()));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let (mx, my) = (mean(rx.iter().copied()), mean(ry.iter().copied()));
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (vx * vy).sqrt())
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let rank = (start + end - 1) as f64 / 2.0 + 1.0;
        for &i in &idx[start..end] {
            out[i] = rank;
        }
        start = end;
    }
    out
}
