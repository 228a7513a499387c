//! Text normalization, tokenization and n-gram counting.
//!
//! Every metric in the crate consumes [`TokenSequence`]s produced by
//! [`tokenize`], so all scores share one notion of "word":
//!
//! 1. Unicode NFC normalization,
//! 2. lowercasing,
//! 3. every character that is not a letter or digit becomes a space, except an
//!    apostrophe sitting between two alphanumerics (`singapore's` stays whole),
//! 4. split on whitespace runs.
//!
//! Hyphenated words split (`non-contract` -> `non`, `contract`). There is no
//! stemming and no stopword removal.

use std::collections::HashMap;
use std::fmt;

use unicode_normalization::UnicodeNormalization;

use crate::{Error, Result};

/// Normalized tokens of one text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

pub fn tokenize(text: &str) -> TokenSequence {
    let chars: Vec<char> = text.nfc().flat_map(char::to_lowercase).collect();
    let mut cleaned = String::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cleaned.push(c);
        } else if is_apostrophe(c)
            && i > 0
            && chars[i - 1].is_alphanumeric()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            cleaned.push('\'');
        } else {
            cleaned.push(' ');
        }
    }
    TokenSequence {
        tokens: cleaned.split_whitespace().map(str::to_owned).collect(),
    }
}

/// Multiset of contiguous n-grams of one fixed order, borrowing from the
/// sequence it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts<'a> {
    order: usize,
    counts: HashMap<&'a [String], usize>,
}

impl<'a> NGramCounts<'a> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, ngram: &[String]) -> usize {
        self.counts.get(ngram).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a [String], usize)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }

    /// Number of distinct n-grams.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Total n-gram mass, `max(0, len - order + 1)` for the source sequence.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sum over n-grams of `min(self[g], other[g])`.
    pub fn clipped_overlap(&self, other: &NGramCounts<'_>) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.counts.iter().map(|(g, &c)| c.min(large.get(g))).sum()
    }
}

pub fn ngrams(seq: &TokenSequence, order: usize) -> Result<NGramCounts<'_>> {
    if order == 0 {
        return Err(Error::InvalidArgument("n-gram order must be >= 1".into()));
    }
    let mut counts = HashMap::new();
    if seq.len() >= order {
        for window in seq.tokens.windows(order) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    Ok(NGramCounts { order, counts })
}
