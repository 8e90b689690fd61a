use std::collections::HashMap;
use std::ops::Add;

use super::BLEU_ORDER;

/// Sufficient statistics for corpus BLEU.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub hyp_len: usize,
    pub ref_len: usize,
    pub correct: [usize; BLEU_ORDER],
    pub total: [usize; BLEU_ORDER],
}

fn ngram_counts<'a, 'b>(tokens: &'b [&'a str]) -> HashMap<&'b [&'a str], usize> {
    let mut counts = HashMap::new();
    for n in 1..=BLEU_ORDER {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

impl BleuStats {
    pub fn segment(hyp: &str, reference: &str) -> Self {
        let h: Vec<&str> = hyp.split_whitespace().collect();
        let r: Vec<&str> = reference.split_whitespace().collect();
        let ref_counts = ngram_counts(&r);
        let mut stats = BleuStats {
            hyp_len: h.len(),
            ref_len: r.len(),
            ..Default::default()
        };
        for (gram, count) in ngram_counts(&h) {
            let n = gram.len() - 1;
            stats.total[n] += count;
            if let Some(&rc) = ref_counts.get(gram) {
                stats.correct[n] += count.min(rc);
            }
        }
        stats
    }
}

impl Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, rhs: BleuStats) -> BleuStats {
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
        for n in 0..BLEU_ORDER {
            self.correct[n] += rhs.correct[n];
            self.total[n] += rhs.total[n];
        }
        self
    }
}

/// Log of a precision, with the large negative stand-in SacreBLEU uses for 0.
fn log_precision(p: f64) -> f64 {
    if p == 0.0 {
        -9_999_999_999.0
    } else {
        p.ln()
    }
}

/// BLEU in [0, 100] from aggregated statistics, exponential smoothing.
pub fn bleu_from_stats(stats: &BleuStats) -> f64 {
    let bp = if stats.hyp_len < stats.ref_len {
        if stats.hyp_len > 0 {
            (1.0 - stats.ref_len as f64 / stats.hyp_len as f64).exp()
        } else {
            0.0
        }
    } else {
        1.0
    };
    if stats.correct.iter().all(|&c| c == 0) {
        return 0.0;
    }
    let mut precisions = [0.0; BLEU_ORDER];
    let mut smooth = 1.0;
    for (n, precision) in precisions.iter_mut().enumerate() {
        if stats.total[n] == 0 {
            break;
        }
        *precision = if stats.correct[n] == 0 {
            smooth *= 2.0;
            1.0 / (smooth * stats.total[n] as f64)
        } else {
            stats.correct[n] as f64 / stats.total[n] as f64
        };
    }
    let mean_log = precisions.iter().map(|&p| log_precision(p)).sum::<f64>() / BLEU_ORDER as f64;
    100.0 * bp * mean_log.exp()
}
