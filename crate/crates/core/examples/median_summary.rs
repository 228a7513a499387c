//! Pairwise BLEU matrix, BLEUVar/BLEUVarN and the median summary for one
//! in-memory set of sampled summaries.

use bleuvar::metrics::DEFAULT_MAX_ORDER;
use bleuvar::textnorm::tokenize;
use bleuvar::uncertainty::{
    bleuvar, bleuvarn, median_summary, pairwise_bleu, score_sample_set, SampleSet, ScoringConfig,
};

fn main() -> bleuvar::Result<()> {
    let set = SampleSet::new(
        "harbour",
        vec![
            "The harbour reopened on Monday after storm repairs.".into(),
            "The harbour reopened on Monday following repairs to storm damage.".into(),
            "Storm repairs kept the harbour closed until Monday.".into(),
            "Fishing boats returned to the harbour on Monday.".into(),
        ],
        "The town's harbour reopened on Monday after weeks of storm repairs.",
    )?;

    let samples: Vec<_> = set.candidates.iter().map(|c| tokenize(c)).collect();
    let matrix = pairwise_bleu(&samples, DEFAULT_MAX_ORDER)?;
    println!("pairwise BLEU (row = candidate, column = reference):");
    for i in 0..matrix.n() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| format!("{v:.3}")).collect();
        println!("  {}", row.join("  "));
    }
    println!("BLEUVar  {:.4}", bleuvar(&matrix));
    println!("BLEUVarN {:.4}", bleuvarn(&matrix));
    let median = median_summary(&matrix);
    println!("median summary: [{median}] {}", set.candidates[median]);

    let report = score_sample_set(&set, &ScoringConfig::default())?;
    println!(
        "ROUGE-1 F1 of the median vs reference: {:.4}",
        report.rouge_median.r1.f1
    );
    Ok(())
}
