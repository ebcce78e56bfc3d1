//! Sentence splitting, tokenization and noun-phrase term detection.
//!
//! The chunker is lexicon-backed: a bundled token->tag table plus suffix
//! heuristics and a noun-by-default rule for unknown tokens. Detected terms
//! are maximal noun phrases with stop words filtered out; numbers attach to
//! an adjacent month or head a quantity phrase ("june 2008", "10 days") and
//! standalone numbers are discarded. All spans are character offsets into
//! the original text, so replacing every span with its own surface
//! reproduces the input exactly.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::corpus::canonicalize;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A detected candidate sensitive term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectedTerm {
    /// Original substring of the message.
    pub surface: String,
    /// `canonicalize(surface)`.
    pub canonical: String,
    /// Character offsets `[start, end)` in the message.
    pub span: (usize, usize),
    pub sentence_index: usize,
}

/// A token with its character span in the string it was cut from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub span: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Noun,
    Verb,
    Adj,
    Adv,
    Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenClass {
    Noun,
    Adj,
    Month,
    Number,
    /// Stop words, verbs, adverbs, punctuation: all of them close the
    /// current chunk.
    Break,
}

/// Lexicon plus stop-word list driving the tagger.
#[derive(Debug, Clone)]
pub struct TextEngine {
    lexicon: HashMap<String, Tag>,
    stopwords: HashSet<String>,
}

impl TextEngine {
    pub fn load(lexicon_path: &Path, stopwords_path: &Path) -> Result<Self, TextError> {
        let lex = fs::read_to_string(lexicon_path).map_err(|source| TextError::Io {
            path: lexicon_path.display().to_string(),
            source,
        })?;
        let stop = fs::read_to_string(stopwords_path).map_err(|source| TextError::Io {
            path: stopwords_path.display().to_string(),
            source,
        })?;
        Self::parse(&lex, &stop)
    }

    pub fn parse(lexicon_tsv: &str, stopwords: &str) -> Result<Self, TextError> {
        let mut lexicon = HashMap::new();
        for (idx, raw) in lexicon_tsv.lines().enumerate() {
            let line = raw.trim_end();
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (token, tag) = line.split_once('\t').ok_or(TextError::Parse {
                line: idx + 1,
                msg: "expected token<TAB>tag".into(),
            })?;
            let tag = match tag.trim() {
                "noun" => Tag::Noun,
                "verb" => Tag::Verb,
                "adj" => Tag::Adj,
                "adv" => Tag::Adv,
                "month" => Tag::Month,
                other => {
                    return Err(TextError::Parse {
                        line: idx + 1,
                        msg: format!("unknown tag {other:?}"),
                    })
                }
            };
            lexicon.insert(token.trim().to_lowercase(), tag);
        }
        let stopwords = stopwords
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Ok(Self { lexicon, stopwords })
    }

    fn classify(&self, token: &str) -> TokenClass {
        let chars: Vec<char> = token.chars().collect();
        if chars.iter().all(|c| c.is_ascii_digit()) {
            return TokenClass::Number;
        }
        if is_ordinal(&chars) {
            return TokenClass::Number;
        }
        if !chars[0].is_alphanumeric() {
            return TokenClass::Break; // punctuation and contraction parts
        }
        let lower = token.to_lowercase();
        if self.stopwords.contains(&lower) {
            return TokenClass::Break;
        }
        if let Some(tag) = self.lexicon.get(&lower) {
            return match tag {
                Tag::Noun => TokenClass::Noun,
                Tag::Adj => TokenClass::Adj,
                Tag::Month => TokenClass::Month,
                Tag::Verb | Tag::Adv => TokenClass::Break,
            };
        }
        if lower.len() > 4 && (lower.ends_with("ing") || lower.ends_with("ed")) {
            return TokenClass::Break;
        }
        if lower.len() > 3 && lower.ends_with("ly") {
            return TokenClass::Break;
        }
        // unknown tokens (capitalized or not) default to noun: unknown means
        // potentially sensitive, so err toward detection
        TokenClass::Noun
    }

    /// Maximal noun phrases of `text` with stop words filtered, in reading
    /// order, spans non-overlapping.
    pub fn detect_terms(&self, text: &str) -> Vec<DetectedTerm> {
        let mut terms = Vec::new();
        for (sentence_index, &(s_start, s_end)) in split_sentences(text).iter().enumerate() {
            let sentence: String = slice_chars(text, s_start, s_end);
            let tokens = tokenize(&sentence);
            let mut chunk: Vec<(TokenClass, (usize, usize))> = Vec::new();
            let flush = |chunk: &mut Vec<(TokenClass, (usize, usize))>,
                             terms: &mut Vec<DetectedTerm>| {
                let has_head = chunk
                    .iter()
                    .any(|(c, _)| matches!(c, TokenClass::Noun | TokenClass::Month));
                if has_head {
                    let start = s_start + chunk.first().unwrap().1 .0;
                    let end = s_start + chunk.last().unwrap().1 .1;
                    let surface = slice_chars(text, start, end);
                    terms.push(DetectedTerm {
                        canonical: canonicalize(&surface),
                        surface,
                        span: (start, end),
                        sentence_index,
                    });
                }
                chunk.clear();
            };
            for token in &tokens {
                let class = self.classify(&token.text);
                match class {
                    TokenClass::Noun | TokenClass::Adj | TokenClass::Month => {
                        chunk.push((class, token.span));
                    }
                    TokenClass::Number => {
                        match chunk.last() {
                            // month + number forms a date term
                            Some((TokenClass::Month, _)) => {
                                chunk.push((class, token.span));
                                flush(&mut chunk, &mut terms);
                            }
                            // a number after an ordinary phrase starts a new
                            // quantity phrase ("pneumonia 3 times")
                            Some(_) => {
                                flush(&mut chunk, &mut terms);
                                chunk.push((class, token.span));
                            }
                            None => chunk.push((class, token.span)),
                        }
                    }
                    TokenClass::Break => flush(&mut chunk, &mut terms),
                }
            }
            flush(&mut chunk, &mut terms);
        }
        terms
    }
}

fn is_ordinal(chars: &[char]) -> bool {
    if chars.len() < 3 {
        return false;
    }
    let digits = &chars[..chars.len() - 2];
    let suffix: String = chars[chars.len() - 2..].iter().collect();
    digits.iter().all(|c| c.is_ascii_digit())
        && matches!(suffix.to_lowercase().as_str(), "st" | "nd" | "rd" | "th")
}

/// Character-offset slice helper; spans throughout this crate are char
/// offsets, not byte offsets.
pub fn slice_chars(s: &str, start: usize, end: usize) -> String {
    s.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// Sentence spans (character offsets), split on `.`, `!`, `?`. Leading and
/// trailing whitespace is excluded; terminators stay with their sentence.
pub fn split_sentences(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        if i >= chars.len() {
            break;
        }
        let start = i;
        while i < chars.len() && !matches!(chars[i], '.' | '!' | '?') {
            i += 1;
        }
        while i < chars.len() && matches!(chars[i], '.' | '!' | '?') {
            i += 1;
        }
        let mut end = i;
        while end > start && chars[end - 1].is_whitespace() {
            end -= 1;
        }
        if end > start {
            spans.push((start, end));
        }
    }
    spans
}

const CONTRACTIONS: &[&str] = &["n't", "'ve", "'re", "'ll", "'d", "'s", "'m"];

/// Tokens of a sentence, with contraction separation ("I've" -> "I", "'ve")
/// and punctuation split off. Spans are char offsets into the input.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_alphanumeric() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '\'' || chars[i] == '-')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let lower = word.to_lowercase();
            let mut split_at = None;
            for suffix in CONTRACTIONS {
                if lower.ends_with(suffix) && lower.len() > suffix.len() {
                    split_at = Some(word.chars().count() - suffix.chars().count());
                    break;
                }
            }
            match split_at {
                Some(cut) => {
                    tokens.push(Token {
                        text: chars[start..start + cut].iter().collect(),
                        span: (start, start + cut),
                    });
                    tokens.push(Token {
                        text: chars[start + cut..i].iter().collect(),
                        span: (start + cut, i),
                    });
                }
                None => tokens.push(Token {
                    text: word,
                    span: (start, i),
                }),
            }
        } else {
            tokens.push(Token {
                text: ch.to_string(),
                span: (i, i + 1),
            });
            i += 1;
        }
    }
    tokens
}

fn default_engine() -> &'static TextEngine {
    static ENGINE: OnceLock<TextEngine> = OnceLock::new();
    ENGINE.get_or_init(crate::fixtures::text_engine)
}

/// Term detection with the bundled lexicon.
pub fn detect_terms(text: &str) -> Vec<DetectedTerm> {
    default_engine().detect_terms(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEALTHCARE_MSG: &str = "I've got HIV in 2008. In June 2008 I've got a pharyngitis \
that stayed for 10 days. After that, I had several ulcers in the mouth. Suspecting an \
infection, I went to the hospital and the physician asked for an HIV testing that was \
positive. My immune system was very weak, I got pneumonia 3 times.";

    const MICROBLOG_MSG: &str = "I will be visiting Barcelona on June 16th to assist to the \
Accenture Digital Conference with Accenture Spain and key stakeholders.";

    #[test]
    fn sentence_splitting() {
        let spans = split_sentences(HEALTHCARE_MSG);
        assert_eq!(spans.len(), 5);
        let first = slice_chars(HEALTHCARE_MSG, spans[0].0, spans[0].1);
        assert_eq!(first, "I've got HIV in 2008.");
        assert_eq!(split_sentences(""), vec![]);
        assert_eq!(split_sentences("no punctuation").len(), 1);
        assert_eq!(split_sentences("  \n  "), vec![]);
    }

    #[test]
    fn tokenize_contractions_and_punct() {
        let toks: Vec<String> = tokenize("I've got HIV").into_iter().map(|t| t.text).collect();
        assert_eq!(toks, ["I", "'ve", "got", "HIV"]);
        let toks: Vec<String> = tokenize("10 days").into_iter().map(|t| t.text).collect();
        assert_eq!(toks, ["10", "days"]);
        assert!(tokenize("").is_empty());
        let toks: Vec<String> = tokenize("weak, I").into_iter().map(|t| t.text).collect();
        assert_eq!(toks, ["weak", ",", "I"]);
    }

    #[test]
    fn tokenize_spans_cover_sources() {
        for (tok, expect) in tokenize("I've got HIV").iter().zip(["I", "'ve", "got", "HIV"]) {
            assert_eq!(slice_chars("I've got HIV", tok.span.0, tok.span.1), expect);
        }
    }

    #[test]
    fn healthcare_analysis_matches_expected_terms() {
        let terms = detect_terms(HEALTHCARE_MSG);
        let surfaces: Vec<&str> = terms.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(
            surfaces,
            [
                "HIV",
                "June 2008",
                "pharyngitis",
                "10 days",
                "several ulcers",
                "mouth",
                "infection",
                "hospital",
                "physician",
                "HIV testing",
                "immune system",
                "pneumonia",
                "3 times",
            ]
        );
    }

    #[test]
    fn microblog_analysis_matches_expected_terms() {
        let terms = detect_terms(MICROBLOG_MSG);
        let surfaces: Vec<&str> = terms.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(
            surfaces,
            [
                "Barcelona",
                "June 16th",
                "Accenture Digital Conference",
                "Accenture Spain",
                "key stakeholders",
            ]
        );
    }

    #[test]
    fn walkthrough_message_detects_lung_cancer() {
        let terms = detect_terms("I have a lung cancer");
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].surface, "lung cancer");
        assert_eq!(terms[0].canonical, "lung cancer");
    }

    #[test]
    fn all_stop_words_yields_nothing() {
        assert!(detect_terms("and or the").is_empty());
    }

    #[test]
    fn standalone_numbers_are_not_terms() {
        assert!(detect_terms("in 2008.").is_empty());
    }

    #[test]
    fn spans_reproduce_input() {
        for msg in [HEALTHCARE_MSG, MICROBLOG_MSG, "I have a lung cancer"] {
            for term in detect_terms(msg) {
                assert_eq!(slice_chars(msg, term.span.0, term.span.1), term.surface);
                assert_eq!(canonicalize(&term.surface), term.canonical);
            }
        }
    }

    #[test]
    fn spans_ascending_and_disjoint() {
        let terms = detect_terms(HEALTHCARE_MSG);
        for pair in terms.windows(2) {
            assert!(pair[0].span.1 <= pair[1].span.0);
        }
    }

    #[test]
    fn sentence_indices_recorded() {
        let terms = detect_terms(HEALTHCARE_MSG);
        assert_eq!(terms[0].sentence_index, 0); // HIV
        assert_eq!(terms[1].sentence_index, 1); // June 2008
        assert_eq!(terms.last().unwrap().sentence_index, 4); // 3 times
    }

    #[test]
    fn unicode_offsets_are_character_based() {
        let terms = detect_terms("café has pneumonia");
        let pneumonia = terms.iter().find(|t| t.canonical == "pneumonia").unwrap();
        assert_eq!(
            slice_chars("café has pneumonia", pneumonia.span.0, pneumonia.span.1),
            "pneumonia"
        );
    }
}
