//! Uncertainty estimation for abstractive summarization from Monte-Carlo
//! sampled summaries.
//!
//! Given `N` summaries sampled for the same input (for example by running a
//! summarization model with dropout left on at inference time), this crate
//! measures how much they disagree and picks a single representative:
//!
//! * [`uncertainty::bleuvar`] sums `(1 - BLEU(y_i, y_j))^2` over all ordered
//!   pairs, and [`uncertainty::bleuvarn`] normalizes it by `N(N-1)` into `[0, 1]`.
//! * [`uncertainty::median_summary`] returns the sample with the largest summed
//!   symmetric BLEU against the others.
//! * [`analysis`] turns per-document scores into retention curves and
//!   percent-increase tables, the usual selective-prediction views.
//!
//! Corpora are exchanged as JSONL (one [`uncertainty::SampleSet`] per line) and
//! results as CSV; see [`corpusio`]. [`synthgen`] builds synthetic corpora with
//! a controllable noise level so the whole pipeline can be exercised without a
//! neural model.
//!
//! ```
//! use bleuvar::uncertainty::{score_sample_set, SampleSet, ScoringConfig};
//!
//! let set = SampleSet::new(
//!     "doc-1",
//!     vec!["the cat sat on the mat".into(), "the cat sat on a mat".into()],
//!     "the cat sat on the mat",
//! )?;
//! let report = score_sample_set(&set, &ScoringConfig::default())?;
//! assert!(report.bleuvarn > 0.0 && report.bleuvarn < 1.0);
//! # Ok::<(), bleuvar::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod corpusio;
mod error;
pub mod metrics;
pub mod pipeline;
pub mod synthgen;
pub mod textnorm;
pub mod uncertainty;

pub use error::{Error, Result};
