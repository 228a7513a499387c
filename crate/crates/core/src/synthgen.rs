//! Deterministic synthetic corpora with a controllable noise level.
//!
//! Each candidate is an independently perturbed copy of a reference. With
//! noise level `p`, every word position is perturbed with probability `p` by
//! one of the enabled operations that applies to it:
//!
//! * drop: the word is removed,
//! * swap: the word trades places with the next one,
//! * synonym: the word is replaced from a synonym table,
//! * duplicate: the word is emitted twice.
//!
//! Randomness comes from ChaCha20 streams. The 32-byte key of stream
//! `(seed, doc_id, draw_index)` is
//! `SHA-256(seed as u64 LE || doc_id UTF-8 || 0x00 || draw_index as u64 LE)`.
//! Uniform floats are `(next_u64 >> 11) * 2^-53`, choices are
//! `next_u64 % count`. Output is therefore identical across platforms and
//! independent of generation order.

use std::collections::BTreeMap;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::uncertainty::SampleSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NoiseOp {
    Drop,
    Swap,
    Synonym,
    Duplicate,
}

impl std::str::FromStr for NoiseOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(NoiseOp::Drop),
            "swap" => Ok(NoiseOp::Swap),
            "synonym" => Ok(NoiseOp::Synonym),
            "duplicate" | "dup" => Ok(NoiseOp::Duplicate),
            other => Err(Error::InvalidArgument(format!("unknown noise operation `{other}`"))),
        }
    }
}

/// Word -> replacement candidates, loaded from a two-column TSV.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    entries: BTreeMap<String, Vec<String>>,
}

impl SynonymTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(word), Some(syn), None) if !word.is_empty() && !syn.is_empty() => {
                    entries.entry(word.to_string()).or_default().push(syn.to_string());
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "synonym table line {}: expected `word<TAB>synonym`",
                        i + 1
                    )))
                }
            }
        }
        Ok(SynonymTable { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn lookup(&self, word: &str) -> Option<&[String]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub level: f64,
    pub ops: Vec<NoiseOp>,
    pub synonyms: Option<SynonymTable>,
    pub rng_seed: u64,
}

impl NoiseSpec {
    /// Drop, swap and duplicate, plus synonym substitution when a table is
    /// given.
    pub fn new(level: f64, rng_seed: u64, synonyms: Option<SynonymTable>) -> Result<Self> {
        let mut ops = vec![NoiseOp::Drop, NoiseOp::Swap, NoiseOp::Duplicate];
        if synonyms.is_some() {
            ops.insert(2, NoiseOp::Synonym);
        }
        Self::with_ops(level, rng_seed, ops, synonyms)
    }

    pub fn with_ops(level: f64, rng_seed: u64, mut ops: Vec<NoiseOp>, synonyms: Option<SynonymTable>) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::InvalidArgument(format!("noise level {level} outside [0, 1]")));
        }
        ops.sort();
        ops.dedup();
        if synonyms.is_none() {
            ops.retain(|&op| op != NoiseOp::Synonym);
        }
        Ok(NoiseSpec {
            level,
            ops,
            synonyms,
            rng_seed,
        })
    }

    fn at_level(&self, level: f64) -> Self {
        NoiseSpec { level, ..self.clone() }
    }
}

/// Portable random stream for one `(seed, doc_id, draw_index)`.
pub struct Substream {
    rng: ChaCha20Rng,
}

impl Substream {
    pub fn new(seed: u64, doc_id: &str, draw_index: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(doc_id.as_bytes());
        hasher.update([0u8]);
        hasher.update(draw_index.to_le_bytes());
        Substream {
            rng: ChaCha20Rng::from_seed(hasher.finalize().into()),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn choose(&mut self, count: usize) -> usize {
        (self.next_u64() % count as u64) as usize
    }
}

/// One perturbed copy of `reference`, deterministic in
/// `(spec.rng_seed, doc_id, draw_index)`. Works on whitespace-separated
/// words, so a draw that perturbs nothing returns `reference` verbatim.
pub fn perturb(reference: &str, spec: &NoiseSpec, doc_id: &str, draw_index: u64) -> String {
    let words: Vec<&str> = reference.split_whitespace().collect();
    let mut rng = Substream::new(spec.rng_seed, doc_id, draw_index);
    let mut out: Vec<&str> = Vec::with_capacity(words.len() + 4);
    let mut changed = false;
    let mut i = 0;
    while i < words.len() {
        let word = words[i];
        // one uniform per position keeps the stream aligned across levels
        let hit = rng.next_f64() < spec.level;
        if !hit {
            out.push(word);
            i += 1;
            continue;
        }
        let applicable: Vec<NoiseOp> = spec
            .ops
            .iter()
            .copied()
            .filter(|op| match op {
                NoiseOp::Swap => i + 1 < words.len(),
                NoiseOp::Synonym => spec
                    .synonyms
                    .as_ref()
                    .and_then(|t| t.lookup(&word.to_lowercase()))
                    .is_some(),
                NoiseOp::Drop | NoiseOp::Duplicate => true,
            })
            .collect();
        if applicable.is_empty() {
            out.push(word);
            i += 1;
            continue;
        }
        changed = true;
        match applicable[rng.choose(applicable.len())] {
            NoiseOp::Drop => i += 1,
            NoiseOp::Duplicate => {
                out.extend([word, word]);
                i += 1;
            }
            NoiseOp::Swap => {
                out.extend([words[i + 1], word]);
                i += 2;
            }
            NoiseOp::Synonym => {
                let options = spec
                    .synonyms
                    .as_ref()
                    .and_then(|t| t.lookup(&word.to_lowercase()))
                    .expect("filtered above");
                out.push(&options[rng.choose(options.len())]);
                i += 1;
            }
        }
    }
    if changed {
        out.join(" ")
    } else {
        reference.to_string()
    }
}

/// How noise levels are assigned to the documents of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSchedule {
    /// Evenly spaced on `[0, 1]`: document `i` of `M` gets `i / (M - 1)`.
    Uniform,
    /// Independent uniform draws on `[0, 1]` from the corpus seed.
    Random,
    Constant(f64),
    Explicit(Vec<f64>),
}

impl LevelSchedule {
    pub fn levels(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        let levels = match self {
            LevelSchedule::Uniform if count == 1 => vec![0.0],
            LevelSchedule::Uniform => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
            LevelSchedule::Random => {
                let mut rng = Substream::new(seed, "__levels__", 0);
                (0..count).map(|_| rng.next_f64()).collect()
            }
            LevelSchedule::Constant(level) => vec![*level; count],
            LevelSchedule::Explicit(levels) => {
                if levels.len() != count {
                    return Err(Error::InvalidArgument(format!(
                        "{} noise levels for {count} references",
                        levels.len()
                    )));
                }
                levels.clone()
            }
        };
        if let Some(bad) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::InvalidArgument(format!("noise level {bad} outside [0, 1]")));
        }
        Ok(levels)
    }
}

impl std::str::FromStr for LevelSchedule {
    type Err = Error;

    /// `uniform`, `random`, a single number, or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(LevelSchedule::Uniform),
            "random" => Ok(LevelSchedule::Random),
            _ => {
                let parsed = s
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse noise levels `{s}`")))?;
                Ok(match parsed.as_slice() {
                    [single] => LevelSchedule::Constant(*single),
                    _ => LevelSchedule::Explicit(parsed),
                })
            }
        }
    }
}

pub fn doc_id_for(index: usize) -> String {
    format!("synth-{index:05}")
}

/// Metadata string stored in the `document` field of generated records.
pub fn level_metadata(level: f64) -> String {
    format!("noise_level={level:.6}")
}

/// Reads the noise level back from [`level_metadata`] output.
pub fn parse_level_metadata(document: &str) -> Option<f64> {
    document.strip_prefix("noise_level=")?.parse().ok()
}

/// One record per reference: `n_samples` candidates (draws `0..n`), a
/// deterministic stand-in (draw `n`) at the same level, and the level in
/// `document`.
pub fn generate_corpus(
    references: &[String],
    n_samples: usize,
    schedule: &LevelSchedule,
    noise: &NoiseSpec,
) -> Result<Vec<SampleSet>> {
    if n_samples < 2 {
        return Err(Error::InsufficientSamples(n_samples));
    }
    let levels = schedule.levels(references.len(), noise.rng_seed)?;
    Ok(references
        .par_iter()
        .zip(levels.par_iter())
        .enumerate()
        .map(|(idx, (reference, &level))| {
            let doc_id = doc_id_for(idx);
            let spec = noise.at_level(level);
            let candidates = (0..n_samples as u64)
                .map(|draw| perturb(reference, &spec, &doc_id, draw))
                .collect();
            SampleSet {
                deterministic: Some(perturb(reference, &spec, &doc_id, n_samples as u64)),
                document: Some(level_metadata(level)),
                doc_id,
                candidates,
                reference: reference.clone(),
            }
        })
        .collect())
}
