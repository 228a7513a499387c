//! Corpus-level analyses on a small hand-made set of scored records.

use bleuvar::analysis::{
    corpus_means, difference_curve, percent_increase, retention_curve, uncertainty_vs_quality_curve, CorpusMeans,
    ScoredRecord, DEFAULT_INCREASE_FRACTIONS,
};
use bleuvar::metrics::{RougeF1, RougeVariant};

fn record(id: &str, bleuvarn: f64, median: f64, deterministic: f64) -> ScoredRecord {
    let f1 = |x: f64| RougeF1 {
        r1: x,
        r2: x * 0.5,
        rl: x * 0.9,
    };
    ScoredRecord {
        doc_id: id.into(),
        bleuvarn,
        rouge_median: f1(median),
        rouge_deterministic: Some(f1(deterministic)),
    }
}

fn main() -> bleuvar::Result<()> {
    let records = vec![
        record("a", 0.92, 0.18, 0.20),
        record("b", 0.75, 0.25, 0.22),
        record("c", 0.61, 0.31, 0.30),
        record("d", 0.40, 0.38, 0.35),
        record("e", 0.33, 0.45, 0.41),
        record("f", 0.12, 0.52, 0.50),
        record("g", 0.05, 0.61, 0.55),
        record("h", 0.02, 0.70, 0.66),
    ];
    let grid = [0.0, 0.25, 0.5, 0.75];

    let means = corpus_means(&records)?;
    println!("median summaries: {}", CorpusMeans::format_percent(&means.median));
    if let Some(det) = &means.deterministic {
        println!("deterministic:    {}", CorpusMeans::format_percent(det));
    }

    let curve = retention_curve(&records, RougeVariant::R1, &grid)?;
    println!("\nROUGE-1 after discarding the most uncertain:");
    for p in &curve.points {
        println!("  {:>4.0}%  {:.4}", p.fraction * 100.0, p.value);
    }

    println!("\npercent increase (R-1/R-2/R-L):");
    for row in percent_increase(&records, &DEFAULT_INCREASE_FRACTIONS)? {
        println!(
            "  {:>4.0}%  {:.2}/{:.2}/{:.2}",
            row.fraction * 100.0,
            row.r1,
            row.r2,
            row.rl
        );
    }

    let quality = uncertainty_vs_quality_curve(&records, &grid)?;
    let diff = difference_curve(&records, RougeVariant::R1, &grid)?;
    println!("\nfraction  mean BLEUVarN (worst discarded)  ROUGE-1 median - deterministic");
    for (q, d) in quality.points.iter().zip(&diff.points) {
        println!("  {:>4.0}%  {:.4}  {:+.4}", q.fraction * 100.0, q.value, d.value);
    }
    Ok(())
}
