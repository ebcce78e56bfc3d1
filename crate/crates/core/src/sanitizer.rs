//! Message sanitization: classify detected terms against the tier
//! thresholds, build the published text plus per-level term sets, and
//! reconstruct level-specific messages.
//!
//! The published text carries, for every detected term, either the term
//! itself (public terms), its most general admissible generalization, or
//! nothing (removal). Each protected tier gets an ordered set of slots, one
//! per detected term: a literal that replaces the published span at that
//! tier, or a marker that the published content already is the best this
//! tier may see. Slot order matches detection order, so reconstruction is a
//! positional splice guided by the offset table.

use thiserror::Error;

use crate::corpus::{canonicalize, HitSource};
use crate::requirements::{Classification, PrivacyRequirements};
use crate::taxonomy::Taxonomy;
use crate::textproc::{slice_chars, split_sentences, tokenize, DetectedTerm, TextEngine};

#[derive(Debug, Error)]
pub enum SanitizerError {
    #[error("slot count {slots} does not match offset count {offsets}")]
    CountMismatch { slots: usize, offsets: usize },
    #[error("slot literal contains a NUL byte")]
    NulInLiteral,
    #[error("malformed level-set encoding: {0}")]
    BadEncoding(String),
}

/// One reconstruction slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// Replace the published span with this text at this tier.
    Literal(String),
    /// The published text already carries this tier's best content.
    SameAsPublished,
}

/// Ordered slots for one protected tier (level index >= 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub level_index: usize,
    pub slots: Vec<Slot>,
}

/// How a removed span interacts with neighbouring whitespace, so that
/// reinserting a literal reproduces the original spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    None,
    /// Insert a space before the literal.
    SpaceBefore,
    /// Insert a space after the literal.
    SpaceAfter,
}

/// Character span of one term's published replacement (empty for removals).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffsetEntry {
    pub start: usize,
    pub end: usize,
    pub pad: PadMode,
}

/// Per-term report data kept alongside the plan.
#[derive(Debug, Clone)]
pub struct TermInfo {
    pub surface: String,
    pub canonical: String,
    pub ic: f64,
    pub classification: Classification,
}

/// Everything produced by one sanitization run.
#[derive(Debug, Clone)]
pub struct SanitizationPlan {
    pub published_message: String,
    pub placeholder_offsets: Vec<OffsetEntry>,
    /// S_1 .. S_{n-1}, ascending.
    pub level_sets: Vec<LevelSet>,
    pub terms: Vec<TermInfo>,
    /// Published replacement per term (None = removed).
    pub published_labels: Vec<Option<String>>,
    /// Per level 0..n-1: the IC visible at that level for each term
    /// (None = nothing visible).
    visible_ics: Vec<Vec<Option<f64>>>,
    n_levels: usize,
}

impl SanitizationPlan {
    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    /// The message a reader entitled to `level` reconstructs.
    pub fn reconstruct_level(&self, level: usize) -> Result<String, SanitizerError> {
        if level == 0 || self.level_sets.is_empty() {
            return Ok(self.published_message.clone());
        }
        let idx = level.min(self.level_sets.len());
        reconstruct(
            &self.published_message,
            &self.placeholder_offsets,
            &self.level_sets[idx - 1],
        )
    }

    /// Per-level visible informativeness per term (None = nothing visible).
    pub fn visible_ics(&self) -> &[Vec<Option<f64>>] {
        &self.visible_ics
    }

    /// Information preservation percentage at a level.
    pub fn preservation(&self, level: usize) -> f64 {
        let original: Vec<f64> = self.terms.iter().map(|t| t.ic).collect();
        information_preservation(&original, &self.visible_ics[level.min(self.n_levels - 1)])
    }

    /// Structured text dump of each term, its informativeness, tier and
    /// per-level slots. Generalizations render upper-case here (and only
    /// here) to stand out.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (i, term) in self.terms.iter().enumerate() {
            let level = match term.classification {
                Classification::Level(l) => l.to_string(),
                Classification::AboveTop => "above-top".to_string(),
            };
            let published = match &self.published_labels[i] {
                Some(label) if label.eq_ignore_ascii_case(&term.surface) => label.clone(),
                Some(label) => label.to_uppercase(),
                None => "(removed)".to_string(),
            };
            out.push_str(&format!(
                "term {i}: {:?} ic={:.3} level={level} published={published}",
                term.surface, term.ic
            ));
            for set in &self.level_sets {
                let cell = match &set.slots[i] {
                    Slot::SameAsPublished => "\\0".to_string(),
                    Slot::Literal(s) if s.eq_ignore_ascii_case(&term.surface) => s.clone(),
                    Slot::Literal(s) => s.to_uppercase(),
                };
                out.push_str(&format!(" S{}={cell}", set.level_index));
            }
            out.push('\n');
        }
        out
    }
}

fn uppercase_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Sanitize with the bundled lexicon.
pub fn sanitize<H: HitSource>(
    message: &str,
    req: &PrivacyRequirements,
    corpus: &H,
    tax: &Taxonomy,
) -> SanitizationPlan {
    sanitize_with_engine(&crate::fixtures::text_engine(), message, req, corpus, tax)
}

/// Split compound chunks that neither the corpus nor the taxonomy knows
/// into their largest known parts (single unknown tokens stay as their own
/// terms). Keeps republished output stable: adjacent generalizations like
/// "disease times" re-chunk as one compound, but classify as their known
/// parts.
fn decompose_unknown<H: HitSource>(
    terms: Vec<DetectedTerm>,
    corpus: &H,
    tax: &Taxonomy,
) -> Vec<DetectedTerm> {
    let known = |canon: &str| corpus.hits(canon).is_some() || !tax.senses_of(canon).is_empty();
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        if known(&term.canonical) {
            out.push(term);
            continue;
        }
        let tokens = tokenize(&term.surface);
        if tokens.len() <= 1 {
            out.push(term);
            continue;
        }
        let base = term.span.0;
        let mut i = 0;
        while i < tokens.len() {
            let mut taken = None;
            for j in (i..tokens.len()).rev() {
                let surface = slice_chars(&term.surface, tokens[i].span.0, tokens[j].span.1);
                if j == i || known(&canonicalize(&surface)) {
                    taken = Some((j, surface));
                    break;
                }
            }
            let (j, surface) = taken.expect("token range is non-empty");
            out.push(DetectedTerm {
                canonical: canonicalize(&surface),
                surface,
                span: (base + tokens[i].span.0, base + tokens[j].span.1),
                sentence_index: term.sentence_index,
            });
            i = j + 1;
        }
    }
    out
}

pub fn sanitize_with_engine<H: HitSource>(
    engine: &TextEngine,
    message: &str,
    req: &PrivacyRequirements,
    corpus: &H,
    tax: &Taxonomy,
) -> SanitizationPlan {
    let n = req.n_levels();
    let terms = decompose_unknown(engine.detect_terms(message), corpus, tax);
    let sentence_starts: Vec<usize> = split_sentences(message).iter().map(|s| s.0).collect();
    let chars: Vec<char> = message.chars().collect();

    // per-term classification and replacement decisions
    let mut infos = Vec::with_capacity(terms.len());
    let mut published_labels: Vec<Option<String>> = Vec::with_capacity(terms.len());
    let mut slot_rows: Vec<Vec<Slot>> = Vec::with_capacity(terms.len());
    let mut visible: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(terms.len()); n];

    for (i, term) in terms.iter().enumerate() {
        let context: Vec<String> = terms
            .iter()
            .enumerate()
            .filter(|(j, other)| *j != i && other.sentence_index == term.sentence_index)
            .map(|(_, other)| other.canonical.clone())
            .collect();
        let ic = corpus.information_content(&term.canonical);
        let classification = req.level_for_ic(ic);

        // a generalization failure (unknown term) means removal: fail closed
        let generalize = |threshold: f64| -> Option<String> {
            tax.generalize_to_threshold(corpus, &term.canonical, threshold, &context)
                .ok()
                .flatten()
        };

        let (published, row, vis_row) = match classification {
            Classification::Level(0) => {
                let row = vec![Slot::SameAsPublished; n.saturating_sub(1)];
                (Some(term.surface.clone()), row, vec![Some(ic); n])
            }
            _ => {
                let g0 = generalize(req.threshold(0));
                let g0_ic = g0
                    .as_ref()
                    .map(|label| corpus.information_content(label));
                let mut row = Vec::with_capacity(n - 1);
                let mut vis_row = vec![g0_ic.filter(|v| v.is_finite()); n];
                for level in 1..n {
                    let visible_here = match classification {
                        Classification::Level(l) => level >= l,
                        Classification::AboveTop => false,
                    };
                    if visible_here {
                        row.push(Slot::Literal(term.surface.clone()));
                        vis_row[level] = Some(ic);
                    } else {
                        let g = generalize(req.threshold(level));
                        if g == g0 {
                            row.push(Slot::SameAsPublished);
                            vis_row[level] = vis_row[0];
                        } else {
                            let label = g.expect("a generalization admissible at a lower tier stays admissible above");
                            vis_row[level] = Some(corpus.information_content(&label));
                            row.push(Slot::Literal(label));
                        }
                    }
                }
                (g0, row, vis_row)
            }
        };
        for (level, v) in vis_row.into_iter().enumerate() {
            visible[level].push(v);
        }
        published_labels.push(published);
        slot_rows.push(row);
        infos.push(TermInfo {
            surface: term.surface.clone(),
            canonical: term.canonical.clone(),
            ic,
            classification,
        });
    }

    // splice the published message together, recording offsets as we go
    let mut out: Vec<char> = Vec::with_capacity(chars.len());
    let mut offsets = Vec::with_capacity(terms.len());
    let mut cursor = 0usize; // char position in the original
    for (i, term) in terms.iter().enumerate() {
        out.extend_from_slice(&chars[cursor..term.span.0]);
        cursor = term.span.1;
        match &published_labels[i] {
            Some(label) => {
                let rendered = if infos[i].classification == Classification::Level(0) {
                    label.clone()
                } else if sentence_starts.contains(&term.span.0) {
                    uppercase_first(label)
                } else {
                    label.clone()
                };
                let start = out.len();
                out.extend(rendered.chars());
                offsets.push(OffsetEntry {
                    start,
                    end: out.len(),
                    pad: PadMode::None,
                });
                if infos[i].classification != Classification::Level(0) {
                    published_labels[i] = Some(rendered);
                }
            }
            None => {
                // removal: absorb one adjacent space so the gap collapses;
                // the preceding space stays if an earlier offset already
                // ends at it (popping would invalidate that entry)
                let boundary_taken = offsets
                    .last()
                    .is_some_and(|e: &OffsetEntry| e.end == out.len());
                let pad = if cursor < chars.len() && chars[cursor] == ' ' {
                    cursor += 1;
                    PadMode::SpaceAfter
                } else if out.last() == Some(&' ') && !boundary_taken {
                    out.pop();
                    PadMode::SpaceBefore
                } else {
                    PadMode::None
                };
                let pos = out.len();
                offsets.push(OffsetEntry {
                    start: pos,
                    end: pos,
                    pad,
                });
            }
        }
    }
    out.extend_from_slice(&chars[cursor..]);

    let level_sets = (1..n)
        .map(|level_index| LevelSet {
            level_index,
            slots: slot_rows.iter().map(|row| row[level_index - 1].clone()).collect(),
        })
        .collect();

    SanitizationPlan {
        published_message: out.into_iter().collect(),
        placeholder_offsets: offsets,
        level_sets,
        terms: infos,
        published_labels,
        visible_ics: visible,
        n_levels: n,
    }
}

/// Byte encoding of a level set: each literal terminated by 0x00, a bare
/// 0x00 for same-as-published slots.
pub fn encode_level_set(set: &LevelSet) -> Result<Vec<u8>, SanitizerError> {
    let mut out = Vec::new();
    for slot in &set.slots {
        if let Slot::Literal(s) = slot {
            if s.as_bytes().contains(&0) {
                return Err(SanitizerError::NulInLiteral);
            }
            out.extend_from_slice(s.as_bytes());
        }
        out.push(0);
    }
    Ok(out)
}

/// Inverse of [`encode_level_set`]; the slot count comes from the offset
/// table transported alongside the set body.
pub fn decode_level_set(
    bytes: &[u8],
    level_index: usize,
    expected_slots: usize,
) -> Result<LevelSet, SanitizerError> {
    let mut slots = Vec::with_capacity(expected_slots);
    let mut rest = bytes;
    for _ in 0..expected_slots {
        let nul = rest
            .iter()
            .position(|&b| b == 0)
            .ok_or_else(|| SanitizerError::BadEncoding("missing slot terminator".into()))?;
        if nul == 0 {
            slots.push(Slot::SameAsPublished);
        } else {
            let text = std::str::from_utf8(&rest[..nul])
                .map_err(|_| SanitizerError::BadEncoding("literal is not UTF-8".into()))?;
            slots.push(Slot::Literal(text.to_string()));
        }
        rest = &rest[nul + 1..];
    }
    if !rest.is_empty() {
        return Err(SanitizerError::BadEncoding("trailing bytes after slots".into()));
    }
    Ok(LevelSet { level_index, slots })
}

/// Replace the k-th placeholder span with the k-th slot literal.
pub fn reconstruct(
    published: &str,
    offsets: &[OffsetEntry],
    set: &LevelSet,
) -> Result<String, SanitizerError> {
    if offsets.len() != set.slots.len() {
        return Err(SanitizerError::CountMismatch {
            slots: set.slots.len(),
            offsets: offsets.len(),
        });
    }
    let sentence_starts: Vec<usize> = split_sentences(published).iter().map(|s| s.0).collect();
    let mut out: Vec<char> = published.chars().collect();
    let mut delta = 0isize;
    for (entry, slot) in offsets.iter().zip(&set.slots) {
        let Slot::Literal(text) = slot else { continue };
        let mut rendered = text.clone();
        if sentence_starts.contains(&entry.start) {
            rendered = uppercase_first(&rendered);
        }
        let rendered = match entry.pad {
            PadMode::None => rendered,
            PadMode::SpaceBefore => format!(" {rendered}"),
            PadMode::SpaceAfter => format!("{rendered} "),
        };
        let start = (entry.start as isize + delta) as usize;
        let end = (entry.end as isize + delta) as usize;
        if end > out.len() || start > end {
            return Err(SanitizerError::CountMismatch {
                slots: set.slots.len(),
                offsets: offsets.len(),
            });
        }
        let replacement: Vec<char> = rendered.chars().collect();
        delta += replacement.len() as isize - (end - start) as isize;
        out.splice(start..end, replacement);
    }
    Ok(out.into_iter().collect())
}

/// Eq-style preservation ratio: summed visible IC over summed original IC,
/// as a percentage. Terms with non-finite original IC are excluded from
/// both sums; removed terms contribute zero to the numerator. An empty (or
/// all-excluded) original sum reports 100: there was nothing to lose.
pub fn information_preservation(original: &[f64], visible: &[Option<f64>]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (orig, vis) in original.iter().zip(visible) {
        if !orig.is_finite() {
            continue;
        }
        den += orig;
        if let Some(v) = vis {
            if v.is_finite() {
                num += v;
            }
        }
    }
    if den == 0.0 {
        return 100.0;
    }
    100.0 * (num / den)
}
