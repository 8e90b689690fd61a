use std::cmp::Ordering;

use super::{eng_window, ett_window, ContextMode, ContextModel};
use crate::tokenizer::{Token, TokenSequence};
use crate::{Error, Result, EOS, PAD};

#[derive(Debug, Clone)]
struct Hypothesis {
    tokens: Vec<u32>,
    score: f64,
}

/// Higher score first, then shorter, then lexicographically smaller. Token
/// ids follow the sorted vocabulary, so comparing ids compares strings.
fn rank(a: &Hypothesis, b: &Hypothesis) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.tokens.len().cmp(&b.tokens.len()))
        .then_with(|| a.tokens.cmp(&b.tokens))
}

/// Decodes `source` position by position, keeping the `beams` best partial
/// hypotheses.
///
/// Without English context all hypotheses see the same distribution, so the
/// result equals greedy decoding. With English context a hypothesis ends when
/// it emits `EOS`. Decoding stops after `min(len(source), max_len)` positions.
/// `PAD` and `EOS` never appear in the output.
pub fn beam_translate<M: ContextModel + ?Sized>(
    model: &M,
    source: &TokenSequence,
    beams: usize,
    max_len: usize,
) -> Result<TokenSequence> {
    if beams < 1 {
        return Err(Error::invalid("beam count must be at least 1"));
    }
    let vocab = model.vocab();
    let n = model.order();
    let stop_at_eos = model.mode() == ContextMode::EttEng;
    let eos = vocab.id(EOS);
    let pad = vocab.id(PAD);
    let src: Vec<&str> = source.iter_str().collect();
    let steps = src.len().min(max_len);

    let mut live = vec![Hypothesis { tokens: Vec::new(), score: 0.0 }];
    let mut done: Vec<Hypothesis> = Vec::new();
    for i in 0..steps {
        let ett = ett_window(&src, i, n);
        let mut expansions = Vec::with_capacity(live.len() * beams);
        for h in &live {
            let eng = if stop_at_eos {
                let history: Vec<&str> = h.tokens.iter().map(|&t| vocab.token(t)).collect();
                model.log_probs(&ett, &eng_window(&history, i, n))
            } else {
                model.log_probs(&ett, &[])
            };
            let mut order: Vec<u32> = (0..eng.len() as u32).collect();
            let best = |a: &u32, b: &u32| eng[*b as usize].total_cmp(&eng[*a as usize]).then(a.cmp(b));
            if order.len() > beams + 1 {
                order.select_nth_unstable_by(beams, best);
                order.truncate(beams + 1);
            }
            order.sort_unstable_by(best);
            for id in order {
                let mut tokens = h.tokens.clone();
                tokens.push(id);
                let cand = Hypothesis { tokens, score: h.score + eng[id as usize] };
                if stop_at_eos && Some(id) == eos {
                    done.push(cand);
                } else {
                    expansions.push(cand);
                }
            }
        }
        expansions.sort_by(rank);
        expansions.truncate(beams);
        live = expansions;
        done.sort_by(rank);
        done.truncate(1);
        match (done.first(), live.first()) {
            (Some(d), Some(l)) if d.score >= l.score => break,
            (_, None) => break,
            _ => {}
        }
    }
    done.extend(live);
    done.sort_by(rank);
    let words: Vec<Token> = done
        .first()
        .map(|h| {
            h.tokens
                .iter()
                .filter(|&&t| Some(t) != eos && Some(t) != pad)
                .map(|&t| Token::word(vocab.token(t)))
                .collect()
        })
        .unwrap_or_default();
    Ok(words.into_iter().collect())
}
