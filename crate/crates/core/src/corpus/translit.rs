//! Transliteration of Etruscan transcriptions into the reduced Latin alphabet.
//!
//! Output alphabet is `a-z`, `-` (damaged character) and single spaces. The
//! mapping is many-to-one and cannot be inverted.

/// Characters that separate words in the transcriptions.
const SEPARATORS: &[char] = &[
    '\u{00B7}', // ·
    '\u{2022}', // •
    '\u{22C5}', // ⋅
    '\u{2027}', // ‧
    ':',
    '\u{2236}', // ∶
    '\u{22EE}', // ⋮
    '\u{205D}', // ⁝
    '\u{205E}', // ⁞
    '|',
];

/// Marks that turn a preceding sibilant into `sh`.
const SIBILANT_ACCENTS: &[char] = &[
    '\u{0301}', // combining acute
    '\'',
    '\u{2019}', // ’
    '\u{00B4}', // ´
    '\u{02BC}', // ʼ
    '\u{02B9}', // ʹ
];

/// Normalize an Etruscan transcription.
///
/// Never fails; the empty string is a legal result.
pub fn normalize(raw: &str) -> String {
    normalize_counting(raw).0
}

/// Normalize and also return how many input characters had no mapping and
/// were dropped.
pub fn normalize_counting(raw: &str) -> (String, usize) {
    let lowered = raw.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    let mut dropped = 0;
    let mut chars = lowered.chars().peekable();

    while let Some(c) = chars.next() {
        match c {
            's' | 'σ' | 'ς' => {
                if chars.peek().is_some_and(|n| SIBILANT_ACCENTS.contains(n)) {
                    chars.next();
                    out.push_str("sh");
                } else {
                    out.push('s');
                }
            }
            'a'..='z' | '-' => out.push(c),
            'ś' | 'š' => out.push_str("sh"),
            'θ' | 'ϑ' => out.push_str("th"),
            'φ' | 'ϕ' => out.push_str("ph"),
            'χ' => out.push_str("kh"),
            '⊞' => out.push('s'),
            c if c.is_whitespace() || SEPARATORS.contains(&c) => out.push(' '),
            _ => dropped += 1,
        }
    }

    (collapse_spaces(&out), dropped)
}

/// Normalize an English translation: lowercase, punctuation to spaces,
/// whitespace collapsed.
pub fn normalize_english(raw: &str) -> String {
    let mapped: String = raw
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    collapse_spaces(&mapped)
}

fn collapse_spaces(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// True when `s` only uses the normalized alphabet and has no stray spaces.
pub fn is_normalized(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_lowercase() || c == '-' || c == ' ')
        && !s.starts_with(' ')
        && !s.ends_with(' ')
        && !s.contains("  ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_becomes_th() {
        assert_eq!(normalize("mi karkanas θahvna"), "mi karkanas thahvna");
    }

    #[test]
    fn empty_input() {
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("  ·· "), "");
    }

    #[test]
    fn separators_become_spaces() {
        assert_eq!(
            normalize("cleusinas : laris · larisal"),
            "cleusinas laris larisal"
        );
        assert_eq!(normalize("a⋮b⁝c"), "a b c");
    }

    #[test]
    fn pipe_line_breaks_are_separators() {
        assert_eq!(
            normalize("eca : σ'uθic : velus : ezpus | clensi : cerine"),
            "eca shuthic velus ezpus clensi cerine"
        );
    }

    #[test]
    fn sibilant_variants() {
        assert_eq!(normalize("σ"), "s");
        assert_eq!(normalize("ς"), "s");
        assert_eq!(normalize("ś"), "sh");
        assert_eq!(normalize("s\u{0301}"), "sh");
        assert_eq!(normalize("ς\u{0301}"), "sh");
        assert_eq!(normalize("š"), "sh");
        assert_eq!(normalize("⊞"), "s");
        assert_eq!(normalize("fulu.ς\u{0301}.la"), "fulushla");
    }

    #[test]
    fn aspirates() {
        assert_eq!(normalize("φersu χalχas"), "phersu khalkhas");
        assert_eq!(normalize("ΘANA"), "thana");
    }

    #[test]
    fn damage_marks_survive() {
        assert_eq!(normalize("a--l-----"), "a--l-----");
        assert_eq!(normalize("--an cla-"), "--an cla-");
    }

    #[test]
    fn unmapped_characters_are_counted() {
        let (s, dropped) = normalize_counting("mi.n.pi 12 [x]");
        assert_eq!(s, "minpi x");
        assert_eq!(dropped, 6);
    }

    #[test]
    fn english_lowercases_and_strips_punctuation() {
        assert_eq!(
            normalize_english("Laris Cleusinas, son of Laris."),
            "laris cleusinas son of laris"
        );
        assert_eq!(
            normalize_english("I (am) the container of Karkana"),
            "i am the container of karkana"
        );
        assert_eq!(normalize_english("..."), "");
    }
}
