//! Generates a noise-graded synthetic corpus from the bundled references,
//! scores it and checks that uncertainty tracks the injected noise.
//!
//!     cargo run --release --example synthetic_pipeline -- [seed]

use bleuvar::analysis::{default_grid, retention_curve, spearman, uncertainty_vs_quality_curve, ScoredRecord};
use bleuvar::metrics::RougeVariant;
use bleuvar::pipeline::score_all;
use bleuvar::synthgen::{generate_corpus, parse_level_metadata, LevelSchedule, NoiseSpec};
use bleuvar::uncertainty::ScoringConfig;

fn main() -> bleuvar::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let text = include_str!("../tests/fixtures/refs50.txt");
    let references: Vec<String> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect();

    let noise = NoiseSpec::new(0.0, seed, None)?;
    let corpus = generate_corpus(&references, 10, &LevelSchedule::Uniform, &noise)?;
    let reports = score_all(&corpus, &ScoringConfig::default())?;
    let records: Vec<ScoredRecord> = reports.iter().map(ScoredRecord::from).collect();

    for (set, report) in corpus.iter().zip(&reports).step_by(7) {
        let level = set.document.as_deref().unwrap_or("");
        println!(
            "{}  {level}  BLEUVarN {:.3}  ROUGE-1 {:.3}",
            set.doc_id, report.bleuvarn, report.rouge_median.r1.f1
        );
        println!("    {}", set.candidates[report.median_index]);
    }

    let levels: Vec<f64> = corpus
        .iter()
        .filter_map(|s| s.document.as_deref().and_then(parse_level_metadata))
        .collect();
    let uncertainty: Vec<f64> = records.iter().map(|r| r.bleuvarn).collect();
    println!(
        "\nSpearman(noise level, BLEUVarN) = {:.4}",
        spearman(&levels, &uncertainty)?
    );

    let grid = default_grid();
    let r1 = retention_curve(&records, RougeVariant::R1, &grid)?;
    let quality = uncertainty_vs_quality_curve(&records, &grid)?;
    println!("fraction  ROUGE-1 retained  BLEUVarN retained");
    for (a, b) in r1.points.iter().zip(&quality.points) {
        println!("  {:.2}      {:.4}            {:.4}", a.fraction, a.value, b.value);
    }
    Ok(())
}
