//! Corpus-level BLEU, chr-F and TER.
//!
//! The three scorers reproduce SacreBLEU's default settings on lowercased,
//! already tokenized text: BLEU-4 with exponential smoothing, chrF with
//! character order 6 and β = 2, and TER with Tercom-style greedy shifts.
//! A single reference is used per hypothesis.

mod bleu;
mod chrf;
mod ter;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Execution, Result};

pub use bleu::{bleu_from_stats, BleuStats};
pub use chrf::{chrf_from_stats, ChrfStats, CHRF_BETA, CHRF_ORDER};
pub use ter::{ter_edits, TerStats};

pub const BLEU_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu: f64,
    pub chrf: f64,
    /// Percent; can exceed 100.
    pub ter: f64,
    pub n_pairs: usize,
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BLEU {:.3}  chr-F {:.3}  TER {:.3}  ({} segments)",
            self.bleu, self.chrf, self.ter, self.n_pairs
        )
    }
}

fn check<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<()> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            hypotheses: hyps.len(),
            references: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::InsufficientData("cannot score an empty corpus".into()));
    }
    Ok(())
}

pub fn bleu<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    check(hyps, refs)?;
    let stats = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| BleuStats::segment(h.as_ref(), r.as_ref()))
        .fold(BleuStats::default(), |acc, s| acc + s);
    Ok(bleu_from_stats(&stats))
}

pub fn chrf<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    check(hyps, refs)?;
    let stats = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| ChrfStats::segment(h.as_ref(), r.as_ref()))
        .fold(ChrfStats::default(), |acc, s| acc + s);
    Ok(chrf_from_stats(&stats))
}

pub fn ter<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    check(hyps, refs)?;
    let stats = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| TerStats::segment(h.as_ref(), r.as_ref()))
        .fold(TerStats::default(), |acc, s| acc + s);
    stats.score()
}

/// All three metrics, with per-segment statistics computed by `exec`.
///
/// Statistics are integer counts, so the sum does not depend on the order in
/// which segments are processed.
pub fn score_corpus<H, R>(hyps: &[H], refs: &[R], exec: Execution) -> Result<MetricReport>
where
    H: AsRef<str> + Sync,
    R: AsRef<str> + Sync,
{
    check(hyps, refs)?;
    let per_segment = exec.map_range(hyps.len(), |i| {
        let (h, r) = (hyps[i].as_ref(), refs[i].as_ref());
        (BleuStats::segment(h, r), ChrfStats::segment(h, r), TerStats::segment(h, r))
    });
    let (b, c, t) = per_segment.into_iter().fold(
        (BleuStats::default(), ChrfStats::default(), TerStats::default()),
        |(b, c, t), (sb, sc, st)| (b + sb, c + sc, t + st),
    );
    Ok(MetricReport {
        bleu: bleu_from_stats(&b),
        chrf: chrf_from_stats(&c),
        ter: t.score()?,
        n_pairs: hyps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_corpus_is_perfect() {
        let refs = ["venel atelinas dedicated this vase", "mi aveles", "a b c d e f"];
        let report = score_corpus(&refs, &refs, Execution::Sequential).unwrap();
        assert_eq!(report.bleu, 100.0);
        assert_eq!(report.chrf, 100.0);
        assert_eq!(report.ter, 0.0);
        assert_eq!(report.n_pairs, 3);
    }

    #[test]
    fn length_mismatch_and_empty() {
        assert!(matches!(bleu(&["a"], &["a", "b"]), Err(Error::LengthMismatch { .. })));
        let empty: [&str; 0] = [];
        assert!(chrf(&empty, &empty).is_err());
        assert!(ter(&empty, &empty).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let hyps = ["the cat", "a b d", "", "x y z w"];
        let refs = ["the cat sat", "a b c", "a b", "w x y z"];
        assert_eq!(
            score_corpus(&hyps, &refs, Execution::Sequential).unwrap(),
            score_corpus(&hyps, &refs, Execution::Parallel).unwrap()
        );
    }
}
