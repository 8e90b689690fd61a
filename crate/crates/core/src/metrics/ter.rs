//! Translation edit rate with Tercom-style block shifts.
//!
//! Mirrors the shift search of SacreBLEU's TER implementation: shifts are
//! applied greedily while they reduce the edit distance, candidates are
//! ranked by (gain, length, earliest start, earliest target), and the word
//! edit distance is computed inside a diagonal beam.

use std::cmp::Ordering;
use std::ops::Add;

use crate::{Error, Result};

const MAX_SHIFT_SIZE: usize = 10;
const MAX_SHIFT_DIST: usize = 50;
const BEAM_WIDTH: usize = 25;
const MAX_SHIFT_CANDIDATES: usize = 1000;
const INFINITY: u64 = 10_000_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Nop,
    Sub,
    Ins,
    Del,
    Undef,
}

/// Word edit distance between `hyp` and `reference`, with the operation trace
/// (read as rewriting the hypothesis into the reference).
fn beam_edit_distance(hyp: &[&str], reference: &[&str]) -> (u64, Vec<Op>) {
    let n_h = hyp.len();
    let n_r = reference.len();
    let mut dist = vec![vec![(INFINITY, Op::Undef); n_r + 1]; n_h + 1];
    for (j, cell) in dist[0].iter_mut().enumerate() {
        *cell = (j as u64, Op::Ins);
    }

    let ratio = if n_h > 0 { n_r as f64 / n_h as f64 } else { 1.0 };
    let beam = if (BEAM_WIDTH as f64) < ratio / 2.0 {
        (ratio / 2.0 + BEAM_WIDTH as f64).ceil() as i64
    } else {
        BEAM_WIDTH as i64
    };

    for i in 1..=n_h {
        let diag = (i as f64 * ratio).floor() as i64;
        let min_j = (diag - beam).max(0) as usize;
        let max_j = if i == n_h {
            n_r + 1
        } else {
            ((diag + beam).max(0) as usize).min(n_r + 1)
        };
        for j in min_j..max_j {
            if j == 0 {
                dist[i][0] = (dist[i - 1][0].0 + 1, Op::Del);
                continue;
            }
            let (sub_cost, sub_op) = if hyp[i - 1] == reference[j - 1] {
                (0, Op::Nop)
            } else {
                (1, Op::Sub)
            };
            // preference order: match/substitution, deletion, insertion
            let candidates = [
                (dist[i - 1][j - 1].0 + sub_cost, sub_op),
                (dist[i - 1][j].0 + 1, Op::Del),
                (dist[i][j - 1].0 + 1, Op::Ins),
            ];
            for (cost, op) in candidates {
                if dist[i][j].0 > cost {
                    dist[i][j] = (cost, op);
                }
            }
        }
    }

    let mut trace = Vec::with_capacity(n_h + n_r);
    let (mut i, mut j) = (n_h, n_r);
    while i > 0 || j > 0 {
        let op = dist[i][j].1;
        trace.push(op);
        match op {
            Op::Nop | Op::Sub => {
                i -= 1;
                j -= 1;
            }
            Op::Ins => j -= 1,
            Op::Del => i -= 1,
            Op::Undef => unreachable!("edit distance trace left the beam"),
        }
    }
    trace.reverse();
    (dist[n_h][n_r].0, trace)
}

struct Alignment {
    /// Hypothesis position aligned to each reference position (-1 before the start).
    align: Vec<i64>,
    ref_err: Vec<u8>,
    hyp_err: Vec<u8>,
}

/// Alignment from the trace rewriting the reference into the hypothesis,
/// i.e. the edit trace with insertions and deletions swapped.
fn alignment(trace: &[Op]) -> Alignment {
    let mut pos_hyp: i64 = -1;
    let mut pos_ref: i64 = -1;
    let mut out = Alignment {
        align: Vec::new(),
        ref_err: Vec::new(),
        hyp_err: Vec::new(),
    };
    for op in trace {
        let flipped = match op {
            Op::Ins => Op::Del,
            Op::Del => Op::Ins,
            other => *other,
        };
        match flipped {
            Op::Nop | Op::Sub => {
                let err = u8::from(flipped == Op::Sub);
                pos_hyp += 1;
                pos_ref += 1;
                out.align.push(pos_hyp);
                out.hyp_err.push(err);
                out.ref_err.push(err);
            }
            Op::Ins => {
                pos_hyp += 1;
                out.hyp_err.push(1);
            }
            Op::Del => {
                pos_ref += 1;
                out.align.push(pos_hyp);
                out.ref_err.push(1);
            }
            Op::Undef => unreachable!(),
        }
        debug_assert_eq!(out.align.len() as i64, pos_ref + 1);
    }
    out
}

fn slice<'a, 'b>(words: &'b [&'a str], from: usize, to: usize) -> &'b [&'a str] {
    let to = to.min(words.len());
    let from = from.min(to);
    &words[from..to]
}

fn perform_shift<'a>(words: &[&'a str], start: usize, length: usize, target: usize) -> Vec<&'a str> {
    let end = start + length;
    let parts: [&[&str]; 4] = if target < start {
        [slice(words, 0, target), slice(words, start, end), slice(words, target, start), slice(words, end, words.len())]
    } else if target > end {
        [slice(words, 0, start), slice(words, end, target), slice(words, start, end), slice(words, target, words.len())]
    } else {
        [
            slice(words, 0, start),
            slice(words, end, length + target),
            slice(words, start, end),
            slice(words, length + target, words.len()),
        ]
    };
    parts.concat()
}

/// Matching sub-sequences `(start_h, start_r, length)`, shortest first for
/// each start pair.
fn shifted_pairs(hyp: &[&str], reference: &[&str]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for start_h in 0..hyp.len() {
        for start_r in 0..reference.len() {
            if start_r.abs_diff(start_h) > MAX_SHIFT_DIST {
                continue;
            }
            let mut length = 0;
            while hyp[start_h + length] == reference[start_r + length] && length < MAX_SHIFT_SIZE {
                length += 1;
                out.push((start_h, start_r, length));
                if start_h + length == hyp.len() || start_r + length == reference.len() {
                    break;
                }
            }
        }
    }
    out
}

struct Candidate<'a> {
    gain: i64,
    length: usize,
    start_h: usize,
    target: usize,
    words: Vec<&'a str>,
}

impl Candidate<'_> {
    /// Higher gain, then longer, then earlier start, then earlier target.
    fn rank(&self, other: &Self) -> Ordering {
        self.gain
            .cmp(&other.gain)
            .then(self.length.cmp(&other.length))
            .then(other.start_h.cmp(&self.start_h))
            .then(other.target.cmp(&self.target))
            .then_with(|| self.words.cmp(&other.words))
    }
}

/// Best shift of `hyp`, returning its gain in edit distance and the shifted
/// words, plus the updated candidate counter.
fn best_shift<'a>(hyp: &[&'a str], reference: &[&str], mut checked: usize) -> (i64, Vec<&'a str>, usize) {
    let (pre_score, trace) = beam_edit_distance(hyp, reference);
    let Alignment { align, ref_err, hyp_err } = alignment(&trace);
    let mut best: Option<Candidate<'a>> = None;

    for (start_h, start_r, length) in shifted_pairs(hyp, reference) {
        if hyp_err[start_h..start_h + length].iter().all(|&e| e == 0) {
            continue;
        }
        if ref_err[start_r..start_r + length].iter().all(|&e| e == 0) {
            continue;
        }
        let aligned = align[start_r];
        if start_h as i64 <= aligned && aligned < (start_h + length) as i64 {
            continue;
        }

        let mut prev_idx: i64 = -1;
        for offset in -1..length as i64 {
            let pos = start_r as i64 + offset;
            let idx = if pos == -1 {
                0
            } else if (pos as usize) < align.len() {
                align[pos as usize] + 1
            } else {
                break;
            };
            if idx == prev_idx {
                continue;
            }
            prev_idx = idx;

            let words = perform_shift(hyp, start_h, length, idx as usize);
            let gain = pre_score as i64 - beam_edit_distance(&words, reference).0 as i64;
            let candidate = Candidate {
                gain,
                length,
                start_h,
                target: idx as usize,
                words,
            };
            checked += 1;
            if best.as_ref().is_none_or(|b| candidate.rank(b) == Ordering::Greater) {
                best = Some(candidate);
            }
        }
        if checked >= MAX_SHIFT_CANDIDATES {
            break;
        }
    }

    match best {
        Some(b) => (b.gain, b.words, checked),
        None => (0, hyp.to_vec(), checked),
    }
}

/// Number of edits (shifts included) turning `hyp` into `reference`.
pub fn ter_edits(hyp: &[&str], reference: &[&str]) -> usize {
    if reference.is_empty() {
        return hyp.len();
    }
    let mut words = hyp.to_vec();
    let mut shifts = 0;
    let mut checked = 0;
    loop {
        let (gain, shifted, now_checked) = best_shift(&words, reference, checked);
        checked = now_checked;
        if checked >= MAX_SHIFT_CANDIDATES || gain <= 0 {
            break;
        }
        shifts += 1;
        words = shifted;
    }
    shifts + beam_edit_distance(&words, reference).0 as usize
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TerStats {
    pub edits: usize,
    pub ref_len: usize,
}

impl TerStats {
    pub fn segment(hyp: &str, reference: &str) -> Self {
        let h: Vec<&str> = hyp.split_whitespace().collect();
        let r: Vec<&str> = reference.split_whitespace().collect();
        TerStats {
            edits: ter_edits(&h, &r),
            ref_len: r.len(),
        }
    }

    /// Edits per reference word, in percent.
    pub fn score(&self) -> Result<f64> {
        if self.ref_len == 0 {
            return Err(Error::InsufficientData("references contain no words".into()));
        }
        Ok(100.0 * self.edits as f64 / self.ref_len as f64)
    }
}

impl Add for TerStats {
    type Output = TerStats;

    fn add(self, rhs: TerStats) -> TerStats {
        TerStats {
            edits: self.edits + rhs.edits,
            ref_len: self.ref_len + rhs.ref_len,
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn score(h: &str, r: &str) -> f64 {
        TerStats::segment(h, r).score().unwrap()
    }

    #[test]
    fn hand_computed() {
        assert_eq!(score("a b c", "a b c"), 0.0);
        assert_abs_diff_eq!(score("a b d", "a b c"), 100.0 / 3.0, epsilon = 1e-9);
        assert_eq!(score("", "a b"), 100.0);
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert!(TerStats::segment("a", "").score().is_err());
        assert_eq!(TerStats::segment("a b", "").edits, 2);
    }

    #[test]
    fn shifts_match_sacrebleu() {
        // values from SacreBLEU 2.6.0
        assert_eq!(score("c a b d", "a b c d"), 25.0);
        assert_eq!(score("d e a b c", "a b c d e"), 20.0);
        assert_abs_diff_eq!(score("b c a x y z", "a b c x y z"), 16.666666666666664, epsilon = 1e-9);
        assert_abs_diff_eq!(score("the cat sat on the mat", "the mat sat on the cat"), 33.33333333333333, epsilon = 1e-9);
        assert_eq!(score("a", "a b c d e"), 80.0);
    }

    #[test]
    fn perform_shift_cases() {
        let w = ["a", "b", "c", "d", "e"];
        assert_eq!(perform_shift(&w, 3, 2, 0), ["d", "e", "a", "b", "c"]);
        assert_eq!(perform_shift(&w, 0, 2, 4), ["c", "d", "a", "b", "e"]);
        assert_eq!(perform_shift(&w, 1, 2, 2), ["a", "d", "b", "c", "e"]);
    }
}
