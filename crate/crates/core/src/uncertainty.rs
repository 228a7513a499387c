//! Pairwise BLEU disagreement among sampled summaries.
//!
//! For `N` samples `y_1..y_N` of the same input:
//!
//! ```text
//! BLEUVar  = sum_i sum_{j != i} (1 - BLEU(y_i, y_j))^2
//! BLEUVarN = BLEUVar / (N (N - 1))
//! median   = argmax_i sum_{j != i} BLEU(y_i, y_j) + BLEU(y_j, y_i)
//! ```
//!
//! BLEU is asymmetric, so the full matrix is computed and both orderings of
//! every pair are summed. The diagonal is stored as 1 and never summed.
//! Median ties go to the lowest index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::{bleu_profiles, NGramProfile, RougeTriple, DEFAULT_MAX_ORDER};
use crate::textnorm::{tokenize, TokenSequence};
use crate::{Error, Result};

/// One document's sampled summaries plus its reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub doc_id: String,
    pub candidates: Vec<String>,
    pub reference: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deterministic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
}

impl SampleSet {
    pub fn new(doc_id: impl Into<String>, candidates: Vec<String>, reference: impl Into<String>) -> Result<Self> {
        let set = SampleSet {
            doc_id: doc_id.into(),
            candidates,
            reference: reference.into(),
            deterministic: None,
            document: None,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn with_deterministic(mut self, summary: impl Into<String>) -> Self {
        self.deterministic = Some(summary.into());
        self
    }

    pub fn with_document(mut self, document: impl Into<String>) -> Self {
        self.document = Some(document.into());
        self
    }

    pub fn n(&self) -> usize {
        self.candidates.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.candidates.len() < 2 {
            return Err(Error::InsufficientSamples(self.candidates.len()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub max_order: usize,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

/// `N x N` sentence-BLEU scores, `get(i, j) = BLEU(y_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseBleuMatrix {
    n: usize,
    scores: Vec<f64>,
}

impl PairwiseBleuMatrix {
    /// Builds a matrix from row-major scores. Requires `n >= 2`, `n * n`
    /// entries in `[0, 1]` and a unit diagonal.
    pub fn from_scores(n: usize, scores: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InsufficientSamples(n));
        }
        if scores.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} scores for a {n}x{n} matrix, got {}",
                n * n,
                scores.len()
            )));
        }
        if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidArgument(format!("score {bad} outside [0, 1]")));
        }
        if (0..n).any(|i| scores[i * n + i] != 1.0) {
            return Err(Error::InvalidArgument("diagonal entries must be 1".into()));
        }
        Ok(PairwiseBleuMatrix { n, scores })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.scores[i * self.n..(i + 1) * self.n]
    }

    /// Off-diagonal ordered pairs `(i, j, score)`, row-major.
    fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(move |(i, j)| (i, j, self.scores[i * n + j]))
    }
}

pub fn pairwise_bleu(samples: &[TokenSequence], max_order: usize) -> Result<PairwiseBleuMatrix> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples(n));
    }
    let profiles = samples
        .iter()
        .map(|s| NGramProfile::new(s, max_order))
        .collect::<Result<Vec<_>>>()?;
    let scores = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                1.0
            } else {
                bleu_profiles(&profiles[i], &profiles[j], max_order).value
            }
        })
        .collect();
    Ok(PairwiseBleuMatrix { n, scores })
}

pub fn bleuvar(matrix: &PairwiseBleuMatrix) -> f64 {
    matrix.off_diagonal().map(|(_, _, s)| (1.0 - s) * (1.0 - s)).sum()
}

pub fn bleuvarn(matrix: &PairwiseBleuMatrix) -> f64 {
    let n = matrix.n as f64;
    bleuvar(matrix) / (n * (n - 1.0))
}

/// Index of the sample with the largest summed symmetric BLEU against the
/// others; lowest index on ties.
pub fn median_summary(matrix: &PairwiseBleuMatrix) -> usize {
    let mut sums = vec![0.0; matrix.n];
    for (i, j, s) in matrix.off_diagonal() {
        sums[i] += s;
        sums[j] += s;
    }
    let mut best = 0;
    for (i, &s) in sums.iter().enumerate().skip(1) {
        if s > sums[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub doc_id: String,
    pub n: usize,
    pub bleuvar: f64,
    pub bleuvarn: f64,
    pub median_index: usize,
    pub rouge_median: RougeTriple,
    pub rouge_deterministic: Option<RougeTriple>,
}

pub fn score_sample_set(set: &SampleSet, config: &ScoringConfig) -> Result<UncertaintyReport> {
    set.validate()?;
    let samples: Vec<TokenSequence> = set.candidates.iter().map(|c| tokenize(c)).collect();
    let matrix = pairwise_bleu(&samples, config.max_order)?;
    let median_index = median_summary(&matrix);
    let reference = tokenize(&set.reference);
    let bleuvar = bleuvar(&matrix);
    let n = matrix.n as f64;
    Ok(UncertaintyReport {
        doc_id: set.doc_id.clone(),
        n: matrix.n,
        bleuvar,
        bleuvarn: bleuvar / (n * (n - 1.0)),
        median_index,
        rouge_median: RougeTriple::compute(&samples[median_index], &reference),
        rouge_deterministic: set
            .deterministic
            .as_deref()
            .map(|d| RougeTriple::compute(&tokenize(d), &reference)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seqs(texts: &[&str]) -> Vec<TokenSequence> {
        texts.iter().map(|t| tokenize(t)).collect()
    }

    fn uniform(n: usize, off: f64) -> PairwiseBleuMatrix {
        let scores = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { off }).collect();
        PairwiseBleuMatrix::from_scores(n, scores).unwrap()
    }

    #[test]
    fn identical_samples() {
        let m = pairwise_bleu(&seqs(&["a b c", "a b c", "a b c"]), 4).unwrap();
        assert!((0..3).all(|i| m.row(i).iter().all(|&s| s == 1.0)));
        assert_eq!(bleuvar(&m), 0.0);
        assert_eq!(bleuvarn(&m), 0.0);
    }

    #[test]
    fn disjoint_samples() {
        let m = pairwise_bleu(&seqs(&["a b", "c d"]), 4).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(1, 0), 0.0);

        let ten = uniform(10, 0.0);
        assert_eq!(bleuvar(&ten), 90.0);
        assert_eq!(bleuvarn(&ten), 1.0);
    }

    #[test]
    fn half_similarity() {
        let m = uniform(3, 0.5);
        assert_eq!(bleuvar(&m), 1.5);
        assert_eq!(bleuvarn(&m), 0.25);
    }

    #[test]
    fn rejects_single_sample() {
        assert!(matches!(
            pairwise_bleu(&seqs(&["a"]), 4),
            Err(Error::InsufficientSamples(1))
        ));
        assert!(matches!(
            SampleSet::new("d", vec!["a".into()], "a"),
            Err(Error::InsufficientSamples(1))
        ));
        assert!(PairwiseBleuMatrix::from_scores(1, vec![1.0]).is_err());
    }

    #[test]
    fn from_scores_validation() {
        assert!(PairwiseBleuMatrix::from_scores(2, vec![1.0, 0.5, 0.5]).is_err());
        assert!(PairwiseBleuMatrix::from_scores(2, vec![1.0, 1.5, 0.5, 1.0]).is_err());
        assert!(PairwiseBleuMatrix::from_scores(2, vec![0.9, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn two_distinct_samples_tie_to_zero() {
        let m = pairwise_bleu(&seqs(&["the cat sat", "a dog ran off"]), 4).unwrap();
        assert_eq!(median_summary(&m), 0);
        let m = pairwise_bleu(&seqs(&["the cat sat here", "the cat sat"]), 4).unwrap();
        assert_eq!(median_summary(&m), 0);
    }

    #[test]
    fn score_identical_to_reference() {
        let set = SampleSet::new("d", vec!["Torquay United win.".into(); 4], "torquay united win").unwrap();
        let report = score_sample_set(&set, &ScoringConfig::default()).unwrap();
        assert_eq!(report.bleuvarn, 0.0);
        assert_eq!(report.rouge_median.r1.f1, 1.0);
        assert_eq!(report.rouge_median.r2.f1, 1.0);
        assert_eq!(report.rouge_median.rl.f1, 1.0);
        assert!(report.rouge_deterministic.is_none());
    }

    #[test]
    fn deterministic_scored_when_present() {
        let set = SampleSet::new("d", vec!["a b".into(), "a c".into()], "a b")
            .unwrap()
            .with_deterministic("a b");
        let report = score_sample_set(&set, &ScoringConfig::default()).unwrap();
        assert_eq!(report.rouge_deterministic.unwrap().r1.f1, 1.0);
    }

    #[test]
    fn unsampled_record_is_rejected_by_scoring() {
        let set = SampleSet {
            doc_id: "x".into(),
            candidates: vec![],
            reference: "r".into(),
            deterministic: None,
            document: None,
        };
        assert!(matches!(
            score_sample_set(&set, &ScoringConfig::default()),
            Err(Error::InsufficientSamples(0))
        ));
    }

    fn text_list() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec(proptest::collection::vec("[a-e]", 0..7).prop_map(|w| w.join(" ")), 2..7)
    }

    proptest! {
        #[test]
        fn bounds_and_normalization(texts in text_list()) {
            let m = pairwise_bleu(&texts.iter().map(|t| tokenize(t)).collect::<Vec<_>>(), 4).unwrap();
            let n = m.n() as f64;
            let var = bleuvar(&m);
            prop_assert!(var >= 0.0 && var <= n * (n - 1.0));
            let varn = bleuvarn(&m);
            prop_assert_eq!(varn, var / (n * (n - 1.0)));
            prop_assert!((0.0..=1.0).contains(&varn));
        }

        #[test]
        fn permutation_equivariance(texts in text_list(), seed in any::<u64>()) {
            let n = texts.len();
            let mut perm: Vec<usize> = (0..n).collect();
            // Fisher-Yates with a tiny LCG keeps the test self-contained
            let mut state = seed;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (state >> 33) as usize % (i + 1));
            }
            let seqs: Vec<_> = texts.iter().map(|t| tokenize(t)).collect();
            let permuted: Vec<_> = perm.iter().map(|&p| seqs[p].clone()).collect();
            let a = pairwise_bleu(&seqs, 4).unwrap();
            let b = pairwise_bleu(&permuted, 4).unwrap();
            prop_assert!((bleuvar(&a) - bleuvar(&b)).abs() < 1e-9);
            prop_assert!((bleuvarn(&a) - bleuvarn(&b)).abs() < 1e-12);

            // the permuted median must be a sample whose objective equals the original optimum
            let objective = |m: &PairwiseBleuMatrix, i: usize| -> f64 {
                (0..m.n()).filter(|&j| j != i).map(|j| m.get(i, j) + m.get(j, i)).sum()
            };
            let best_a = objective(&a, median_summary(&a));
            let picked = median_summary(&b);
            prop_assert!((objective(&b, picked) - best_a).abs() < 1e-9);
            if (0..n).filter(|&i| (objective(&a, i) - best_a).abs() < 1e-9).count() == 1 {
                prop_assert_eq!(perm[picked], median_summary(&a));
            }
        }

        // Holds when the distinct summaries share no tokens; with overlapping
        // vocabularies a summary close to many peers can outscore a duplicate.
        #[test]
        fn duplicates_dominate(
            texts in proptest::collection::vec(proptest::collection::vec("[a-d]", 1..5), 2..6),
            dup in 0usize..6,
            k in 2usize..4,
        ) {
            let seqs: Vec<TokenSequence> = texts
                .iter()
                .enumerate()
                .map(|(i, words)| tokenize(&words.iter().map(|w| format!("{w}{i}")).collect::<Vec<_>>().join(" ")))
                .collect();
            let dup = dup % seqs.len();
            let mut all = seqs.clone();
            for _ in 1..k {
                all.push(seqs[dup].clone());
            }
            let m = pairwise_bleu(&all, 4).unwrap();
            prop_assert_eq!(&all[median_summary(&m)], &seqs[dup]);
        }
    }

    #[test]
    fn duplicating_identical_samples_keeps_zero() {
        let base = seqs(&["x y z"; 3]);
        let doubled: Vec<_> = base.iter().chain(base.iter()).cloned().collect();
        for s in [&base, &doubled] {
            assert_eq!(bleuvarn(&pairwise_bleu(s, 4).unwrap()), 0.0);
        }
        let mixed = seqs(&["x y z", "p q r"]);
        let mixed2: Vec<_> = mixed.iter().chain(mixed.iter()).cloned().collect();
        let (a, b) = (pairwise_bleu(&mixed, 4).unwrap(), pairwise_bleu(&mixed2, 4).unwrap());
        assert_ne!(bleuvar(&a), bleuvar(&b));
    }
}
