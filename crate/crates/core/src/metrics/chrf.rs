use std::collections::HashMap;
use std::ops::Add;

pub const CHRF_ORDER: usize = 6;
pub const CHRF_BETA: f64 = 2.0;

/// Per-order `[hyp, ref, match]` character n-gram counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChrfStats {
    pub counts: [[usize; 3]; CHRF_ORDER],
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], usize> {
    let mut counts = HashMap::new();
    for gram in chars.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

impl ChrfStats {
    /// Whitespace is removed before extracting n-grams.
    pub fn segment(hyp: &str, reference: &str) -> Self {
        let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
        let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
        let mut stats = ChrfStats::default();
        for n in 1..=CHRF_ORDER {
            let hg = char_ngrams(&h, n);
            let rg = char_ngrams(&r, n);
            let mut hyp_count = 0;
            let mut matched = 0;
            for (gram, &c) in &hg {
                hyp_count += c;
                if let Some(&rc) = rg.get(gram) {
                    matched += c.min(rc);
                }
            }
            let ref_count: usize = rg.values().sum();
            // hypothesis n-grams only count when the reference has n-grams of this order
            stats.counts[n - 1] = [if rg.is_empty() { 0 } else { hyp_count }, ref_count, matched];
        }
        stats
    }
}

impl Add for ChrfStats {
    type Output = ChrfStats;

    fn add(mut self, rhs: ChrfStats) -> ChrfStats {
        for (a, b) in self.counts.iter_mut().zip(rhs.counts) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
        self
    }
}

/// chrF in [0, 100]: precision and recall are averaged over the orders that
/// have both hypothesis and reference n-grams, then combined with β.
pub fn chrf_from_stats(stats: &ChrfStats) -> f64 {
    let factor = CHRF_BETA * CHRF_BETA;
    let (mut avg_prec, mut avg_rec, mut effective) = (0.0, 0.0, 0usize);
    for &[n_hyp, n_ref, n_match] in &stats.counts {
        if n_hyp > 0 && n_ref > 0 {
            avg_prec += n_match as f64 / n_hyp as f64;
            avg_rec += n_match as f64 / n_ref as f64;
            effective += 1;
        }
    }
    if effective == 0 {
        return 0.0;
    }
    avg_prec /= effective as f64;
    avg_rec /= effective as f64;
    if avg_prec + avg_rec == 0.0 {
        return 0.0;
    }
    100.0 * (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
}
