//! Sentence-level BLEU and ROUGE-1/2/L.
//!
//! BLEU is the similarity kernel behind every uncertainty score, ROUGE is the
//! quality metric the analyses report. Both operate on [`TokenSequence`]s.
//!
//! BLEU details that matter for reproducibility:
//!
//! * effective order is `min(max_order, |candidate|, |reference|)`;
//! * `p_1` is the plain clipped unigram precision, orders `>= 2` use add-one
//!   smoothing `(m + 1) / (t + 1)`, so fully disjoint pairs score exactly 0;
//! * brevity penalty `exp(1 - |r| / |c|)` when `|c| < |r|`;
//! * `bleu(empty, empty) = 1`, `bleu(empty, x) = bleu(x, empty) = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::textnorm::{ngrams, NGramCounts, TokenSequence};
use crate::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 4;

/// Identifier of the smoothing rule above, recorded in run headers.
pub const SMOOTHING_ID: &str = "add-one-orders-2plus";

#[derive(Debug, Clone, PartialEq)]
pub struct BleuScore {
    pub value: f64,
    /// Clipped modified precisions for orders `1..=k`, before smoothing.
    pub precisions: Vec<f64>,
    /// Precisions entering the geometric mean.
    pub smoothed_precisions: Vec<f64>,
    pub brevity_penalty: f64,
}

impl BleuScore {
    fn degenerate(value: f64) -> Self {
        BleuScore {
            value,
            precisions: Vec::new(),
            smoothed_precisions: Vec::new(),
            brevity_penalty: 1.0,
        }
    }
}

/// Per-order n-gram counts of one sequence, built once and reused across
/// many BLEU evaluations.
#[derive(Debug, Clone)]
pub struct NGramProfile<'a> {
    len: usize,
    orders: Vec<NGramCounts<'a>>,
}

impl<'a> NGramProfile<'a> {
    pub fn new(seq: &'a TokenSequence, max_order: usize) -> Result<Self> {
        check_order(max_order)?;
        let top = max_order.min(seq.len());
        let orders = (1..=top).map(|n| ngrams(seq, n)).collect::<Result<Vec<_>>>()?;
        Ok(NGramProfile { len: seq.len(), orders })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

fn check_order(max_order: usize) -> Result<()> {
    if max_order == 0 {
        return Err(Error::InvalidArgument("BLEU max order must be >= 1".into()));
    }
    Ok(())
}

pub fn bleu(candidate: &TokenSequence, reference: &TokenSequence, max_order: usize) -> Result<BleuScore> {
    let cand = NGramProfile::new(candidate, max_order)?;
    let refr = NGramProfile::new(reference, max_order)?;
    Ok(bleu_profiles(&cand, &refr, max_order))
}

/// BLEU between two precomputed profiles. Orders above the ones a profile was
/// built with are not used.
pub fn bleu_profiles(candidate: &NGramProfile<'_>, reference: &NGramProfile<'_>, max_order: usize) -> BleuScore {
    match (candidate.is_empty(), reference.is_empty()) {
        (true, true) => return BleuScore::degenerate(1.0),
        (true, false) | (false, true) => return BleuScore::degenerate(0.0),
        (false, false) => {}
    }

    // orders.len() is min(built order, len)
    let order = max_order.min(candidate.orders.len()).min(reference.orders.len());
    let mut precisions = Vec::with_capacity(order);
    let mut smoothed = Vec::with_capacity(order);
    let mut log_sum = 0.0;
    for n in 1..=order {
        let cand = &candidate.orders[n - 1];
        let matches = cand.clipped_overlap(&reference.orders[n - 1]) as f64;
        let total = cand.total() as f64;
        precisions.push(matches / total);
        let p = if n == 1 {
            matches / total
        } else {
            (matches + 1.0) / (total + 1.0)
        };
        smoothed.push(p);
        log_sum += p.ln();
    }

    let brevity_penalty = if candidate.len < reference.len {
        (1.0 - reference.len as f64 / candidate.len as f64).exp()
    } else {
        1.0
    };
    let value = if smoothed[0] == 0.0 {
        0.0
    } else {
        (brevity_penalty * (log_sum / order as f64).exp()).clamp(0.0, 1.0)
    };

    BleuScore {
        value,
        precisions,
        smoothed_precisions: smoothed,
        brevity_penalty,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    /// Scores from a match count and the two totals; zero when either side
    /// is empty.
    pub fn from_counts(matches: usize, candidate_total: usize, reference_total: usize) -> Self {
        if candidate_total == 0 || reference_total == 0 {
            return RougeScore::default();
        }
        let precision = matches as f64 / candidate_total as f64;
        let recall = matches as f64 / reference_total as f64;
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        RougeScore { precision, recall, f1 }
    }
}

pub fn rouge_n(candidate: &TokenSequence, reference: &TokenSequence, n: usize) -> Result<RougeScore> {
    let cand = ngrams(candidate, n)?;
    let refr = ngrams(reference, n)?;
    Ok(RougeScore::from_counts(
        cand.clipped_overlap(&refr),
        cand.total(),
        refr.total(),
    ))
}

/// Length of the longest common subsequence, O(|a|·|b|) time and
/// O(min(|a|, |b|)) memory.
pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { above.max(row[j]) };
            diag = above;
        }
    }
    row[short.len()]
}

pub fn rouge_l(candidate: &TokenSequence, reference: &TokenSequence) -> RougeScore {
    let lcs = lcs_len(candidate.tokens(), reference.tokens());
    RougeScore::from_counts(lcs, candidate.len(), reference.len())
}

/// ROUGE-1, ROUGE-2 and ROUGE-L of one candidate against one reference.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RougeTriple {
    pub r1: RougeScore,
    pub r2: RougeScore,
    pub rl: RougeScore,
}

impl RougeTriple {
    pub fn compute(candidate: &TokenSequence, reference: &TokenSequence) -> Self {
        RougeTriple {
            r1: rouge_n(candidate, reference, 1).expect("order 1 is valid"),
            r2: rouge_n(candidate, reference, 2).expect("order 2 is valid"),
            rl: rouge_l(candidate, reference),
        }
    }

    pub fn f1(&self) -> RougeF1 {
        RougeF1 {
            r1: self.r1.f1,
            r2: self.r2.f1,
            rl: self.rl.f1,
        }
    }
}

/// F1 values only, the per-document projection used by the analyses.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RougeF1 {
    pub r1: f64,
    pub r2: f64,
    pub rl: f64,
}

impl RougeF1 {
    pub fn get(&self, variant: RougeVariant) -> f64 {
        match variant {
            RougeVariant::R1 => self.r1,
            RougeVariant::R2 => self.r2,
            RougeVariant::RL => self.rl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RougeVariant {
    R1,
    R2,
    RL,
}

impl RougeVariant {
    pub const ALL: [RougeVariant; 3] = [RougeVariant::R1, RougeVariant::R2, RougeVariant::RL];

    pub fn name(self) -> &'static str {
        match self {
            RougeVariant::R1 => "r1",
            RougeVariant::R2 => "r2",
            RougeVariant::RL => "rl",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RougeVariant::R1 => "ROUGE-1",
            RougeVariant::R2 => "ROUGE-2",
            RougeVariant::RL => "ROUGE-L",
        }
    }
}

impl fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RougeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r1" | "rouge1" | "rouge-1" => Ok(RougeVariant::R1),
            "r2" | "rouge2" | "rouge-2" => Ok(RougeVariant::R2),
            "rl" | "rougel" | "rouge-l" => Ok(RougeVariant::RL),
            other => Err(Error::InvalidArgument(format!("unknown ROUGE variant `{other}`"))),
        }
    }
}
