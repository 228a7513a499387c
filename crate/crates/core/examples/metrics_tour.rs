//! Tokenization, sentence BLEU and ROUGE on a pair of sentences.
//!
//!     cargo run --example metrics_tour -- "candidate text" "reference text"

use bleuvar::metrics::{bleu, RougeTriple, DEFAULT_MAX_ORDER};
use bleuvar::textnorm::tokenize;

fn main() -> bleuvar::Result<()> {
    let mut args = std::env::args().skip(1);
    let candidate = args.next().unwrap_or_else(|| "The cat sat on the mat.".into());
    let reference = args.next().unwrap_or_else(|| "A cat was sitting on the mat!".into());

    let c = tokenize(&candidate);
    let r = tokenize(&reference);
    println!("candidate tokens: {c}");
    println!("reference tokens: {r}");

    let score = bleu(&c, &r, DEFAULT_MAX_ORDER)?;
    println!(
        "\nBLEU {:.4}  (brevity penalty {:.4})",
        score.value, score.brevity_penalty
    );
    for (n, (p, s)) in score.precisions.iter().zip(&score.smoothed_precisions).enumerate() {
        println!("  {}-gram precision {p:.4}, smoothed {s:.4}", n + 1);
    }

    let rouge = RougeTriple::compute(&c, &r);
    for (name, s) in [("ROUGE-1", rouge.r1), ("ROUGE-2", rouge.r2), ("ROUGE-L", rouge.rl)] {
        println!("{name}: P {:.4} R {:.4} F1 {:.4}", s.precision, s.recall, s.f1);
    }
    Ok(())
}
