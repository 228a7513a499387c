//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's metric code paths.

#![allow(dead_code)]

use std::path::PathBuf;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Random token list over a small alphabet so n-gram overlaps are common.
    pub fn words(&mut self, max_len: usize, alphabet: usize) -> Vec<String> {
        let len = self.below(max_len + 1);
        (0..len)
            .map(|_| ((b'a' + self.below(alphabet) as u8) as char).to_string())
            .collect()
    }
}

/// Occurrences of `gram` in `seq`, by direct scanning.
fn occurrences(seq: &[String], gram: &[String]) -> usize {
    if gram.len() > seq.len() {
        return 0;
    }
    (0..=seq.len() - gram.len())
        .filter(|&p| seq[p..p + gram.len()] == *gram)
        .count()
}

/// Clipped n-gram matches: each distinct candidate n-gram counted once, at
/// its first position.
pub fn clipped_matches(cand: &[String], refr: &[String], n: usize) -> (usize, usize) {
    if cand.len() < n {
        return (0, 0);
    }
    let total = cand.len() - n + 1;
    let mut matches = 0;
    for p in 0..total {
        let gram = &cand[p..p + n];
        let first = (0..p).all(|q| cand[q..q + n] != *gram);
        if first {
            matches += occurrences(cand, gram).min(occurrences(refr, gram));
        }
    }
    (matches, total)
}

/// Sentence BLEU with the crate's documented conventions, from scratch.
pub fn bleu_oracle(cand: &[String], refr: &[String], max_order: usize) -> f64 {
    if cand.is_empty() && refr.is_empty() {
        return 1.0;
    }
    if cand.is_empty() || refr.is_empty() {
        return 0.0;
    }
    let k = max_order.min(cand.len()).min(refr.len());
    let mut product = 1.0f64;
    for n in 1..=k {
        let (m, t) = clipped_matches(cand, refr, n);
        let p = if n == 1 {
            m as f64 / t as f64
        } else {
            (m as f64 + 1.0) / (t as f64 + 1.0)
        };
        if p == 0.0 {
            return 0.0;
        }
        product *= p;
    }
    let bp = if cand.len() < refr.len() {
        (1.0 - refr.len() as f64 / cand.len() as f64).exp()
    } else {
        1.0
    };
    bp * product.powf(1.0 / k as f64)
}

fn is_subsequence(needle: &[&String], hay: &[String]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|w| it.any(|h| h == *w))
}

/// LCS length by enumerating every subsequence of the shorter side.
pub fn lcs_bruteforce(a: &[String], b: &[String]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    assert!(short.len() <= 16, "brute force LCS is exponential");
    let mut best = 0;
    for mask in 0u32..(1 << short.len()) {
        let picked: Vec<&String> = (0..short.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &short[i])
            .collect();
        if picked.len() > best && is_subsequence(&picked, long) {
            best = picked.len();
        }
    }
    best
}

pub fn f1(matches: usize, cand: usize, refr: usize) -> f64 {
    if cand == 0 || refr == 0 || matches == 0 {
        return 0.0;
    }
    2.0 * matches as f64 / (cand + refr) as f64
}

pub fn rouge_l_oracle(cand: &[String], refr: &[String]) -> f64 {
    f1(lcs_bruteforce(cand, refr), cand.len(), refr.len())
}

pub fn rouge_n_oracle(cand: &[String], refr: &[String], n: usize) -> f64 {
    let (m, t) = clipped_matches(cand, refr, n);
    let rt = refr.len().saturating_sub(n - 1).min(refr.len());
    let rt = if refr.len() >= n { rt } else { 0 };
    f1(m, t, rt)
}

/// Exhaustive evaluation of the median objective on a row-major matrix.
pub fn median_oracle(n: usize, scores: &[f64]) -> usize {
    let objective = |i: usize| -> f64 {
        let mut total = 0.0;
        for j in 0..n {
            if j != i {
                total += scores[i * n + j] + scores[j * n + i];
            }
        }
        total
    };
    let values: Vec<f64> = (0..n).map(objective).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..n).find(|&i| values[i] == best).unwrap()
}

pub fn bleuvar_oracle(n: usize, scores: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += (1.0 - scores[i * n + j]).powi(2);
            }
        }
    }
    total
}

/// Oracle record: (doc_id, bleuvarn, r1, r2, rl).
#[derive(Clone, Debug)]
pub struct Row {
    pub id: String,
    pub bleuvarn: f64,
    pub rouge: [f64; 3],
}

/// Sort by key, drop the first `discard` rows, plain-average column `col`.
pub fn naive_curve_point(rows: &[Row], by_uncertainty: bool, discard: usize, col: Option<usize>) -> f64 {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| {
        let primary = if by_uncertainty {
            b.bleuvarn.partial_cmp(&a.bleuvarn).unwrap()
        } else {
            a.rouge[0].partial_cmp(&b.rouge[0]).unwrap()
        };
        primary.then_with(|| a.id.cmp(&b.id))
    });
    let kept = &sorted[discard..];
    let total: f64 = kept
        .iter()
        .map(|r| match col {
            Some(c) => r.rouge[c],
            None => r.bleuvarn,
        })
        .sum();
    total / kept.len() as f64
}
