//! Term occurrence snapshot and information content.
//!
//! A [`CorpusSnapshot`] stands in for live web hit counts: a table of
//! canonical terms with their occurrence counts plus the total number of
//! indexed resources. The informativeness of a term is `-log2(hits / N)`
//! bits; terms absent from the snapshot resolve to a configurable
//! missing-term value (infinity by default, so unknown terms are treated as
//! maximally sensitive).

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read snapshot {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate term {term:?}")]
    DuplicateTerm { line: usize, term: String },
    #[error("total resource count must be positive")]
    InvalidTotal,
    #[error("line {line}: term {term:?} has {hits} hits, above the total {total}")]
    HitsAboveTotal {
        line: usize,
        term: String,
        hits: u64,
        total: u64,
    },
}

/// Anything that can answer "how often does this canonical term occur".
///
/// The snapshot implements it; a live search-engine backend could too.
pub trait HitSource {
    fn hits(&self, term: &str) -> Option<u64>;
    fn total_resources(&self) -> u64;

    /// Information content in bits: `-log2(hits / N)`.
    ///
    /// Missing terms map to `missing_term_ic` (infinite by default).
    fn information_content(&self, term: &str) -> f64 {
        match self.hits(term) {
            Some(0) | None => self.missing_term_ic(),
            Some(h) => -((h as f64) / (self.total_resources() as f64)).log2(),
        }
    }

    fn missing_term_ic(&self) -> f64 {
        f64::INFINITY
    }
}

/// Immutable term -> hit-count table with the total resource count.
#[derive(Debug, Clone)]
pub struct CorpusSnapshot {
    entries: HashMap<String, u64>,
    total: u64,
    missing_ic: f64,
}

impl CorpusSnapshot {
    /// Default total when building snapshots programmatically: 17e9 indexed
    /// resources.
    pub const DEFAULT_TOTAL: u64 = 17_000_000_000;

    pub fn new(total: u64) -> Result<Self, CorpusError> {
        if total == 0 {
            return Err(CorpusError::InvalidTotal);
        }
        Ok(Self {
            entries: HashMap::new(),
            total,
            missing_ic: f64::INFINITY,
        })
    }

    /// Override the IC reported for terms absent from the snapshot.
    pub fn with_missing_term_ic(mut self, ic: f64) -> Self {
        self.missing_ic = ic;
        self
    }

    pub fn insert(&mut self, term: &str, hits: u64) -> Result<(), CorpusError> {
        let canon = canonicalize(term);
        if hits > self.total {
            return Err(CorpusError::HitsAboveTotal {
                line: 0,
                term: canon,
                hits,
                total: self.total,
            });
        }
        if self.entries.contains_key(&canon) {
            return Err(CorpusError::DuplicateTerm {
                line: 0,
                term: canon,
            });
        }
        self.entries.insert(canon, hits);
        Ok(())
    }

    /// Load a snapshot file: `#N=<total>` on the first data line, then
    /// `term<TAB>hits` lines. `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut total: Option<u64> = None;
        let mut entries = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if let Some(rest) = line.strip_prefix("#N=") {
                let n: i64 = rest.trim().parse().map_err(|_| CorpusError::Parse {
                    line: line_no,
                    msg: format!("invalid total resource count {rest:?}"),
                })?;
                if n <= 0 {
                    return Err(CorpusError::InvalidTotal);
                }
                total = Some(n as u64);
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let total = total.ok_or(CorpusError::Parse {
                line: line_no,
                msg: "entry before the #N= header".into(),
            })?;
            let (term, hits) = line.split_once('\t').ok_or(CorpusError::Parse {
                line: line_no,
                msg: "expected term<TAB>hits".into(),
            })?;
            let canon = canonicalize(term);
            if canon.is_empty() {
                return Err(CorpusError::Parse {
                    line: line_no,
                    msg: "empty term".into(),
                });
            }
            let hits: u64 = hits.trim().parse().map_err(|_| CorpusError::Parse {
                line: line_no,
                msg: format!("invalid hit count {hits:?}"),
            })?;
            if hits > total {
                return Err(CorpusError::HitsAboveTotal {
                    line: line_no,
                    term: canon,
                    hits,
                    total,
                });
            }
            if entries.insert(canon.clone(), hits).is_some() {
                return Err(CorpusError::DuplicateTerm {
                    line: line_no,
                    term: canon,
                });
            }
        }
        let total = total.ok_or(CorpusError::InvalidTotal)?;
        Ok(Self {
            entries,
            total,
            missing_ic: f64::INFINITY,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.entries.contains_key(term)
    }
}

impl HitSource for CorpusSnapshot {
    fn hits(&self, term: &str) -> Option<u64> {
        self.entries.get(term).copied()
    }

    fn total_resources(&self) -> u64 {
        self.total
    }

    fn missing_term_ic(&self) -> f64 {
        self.missing_ic
    }
}

/// Canonical form used everywhere terms are compared: lowercased, internal
/// whitespace collapsed to single spaces, trimmed.
pub fn canonicalize(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            for low in ch.to_lowercase() {
                out.push(low);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize("  HIV  Testing "), "hiv testing");
        assert_eq!(canonicalize("Barcelona"), "barcelona");
        assert_eq!(canonicalize(""), "");
        assert_eq!(canonicalize("a\t b\nc"), "a b c");
    }

    #[test]
    fn single_entry_snapshot() {
        let snap = CorpusSnapshot::parse("#N=17000000000\nhiv\t15000000\n").unwrap();
        assert_eq!(snap.len(), 1);
        let ic = snap.information_content("hiv");
        assert!((ic - 10.14).abs() < 0.01, "ic = {ic}");
    }

    #[test]
    fn empty_snapshot_is_valid() {
        let snap = CorpusSnapshot::parse("#N=1\n").unwrap();
        assert!(snap.is_empty());
        assert_eq!(snap.total_resources(), 1);
    }

    #[test]
    fn duplicate_term_rejected() {
        let err = CorpusSnapshot::parse("#N=10\nfoo\t1\nfoo\t2\n").unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateTerm { line: 3, .. }));
    }

    #[test]
    fn non_positive_total_rejected() {
        assert!(matches!(
            CorpusSnapshot::parse("#N=0\n"),
            Err(CorpusError::InvalidTotal)
        ));
        assert!(matches!(
            CorpusSnapshot::parse("#N=-5\n"),
            Err(CorpusError::InvalidTotal)
        ));
    }

    #[test]
    fn hits_above_total_rejected() {
        let err = CorpusSnapshot::parse("#N=10\nfoo\t11\n").unwrap_err();
        assert!(matches!(err, CorpusError::HitsAboveTotal { .. }));
    }

    #[test]
    fn parse_error_reports_line() {
        let err = CorpusSnapshot::parse("#N=10\nfoo 1\n").unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hits_equal_total_gives_zero_ic() {
        let snap = CorpusSnapshot::parse("#N=42\neverything\t42\n").unwrap();
        assert_eq!(snap.information_content("everything"), 0.0);
    }

    #[test]
    fn missing_term_policy_defaults_to_infinity() {
        let snap = CorpusSnapshot::parse("#N=10\n").unwrap();
        assert!(snap.information_content("unknown").is_infinite());
        let capped = snap.with_missing_term_ic(20.0);
        assert_eq!(capped.information_content("unknown"), 20.0);
    }

    #[test]
    fn monotone_in_hits() {
        let mut snap = CorpusSnapshot::new(1000).unwrap();
        snap.insert("common", 500).unwrap();
        snap.insert("rare", 2).unwrap();
        assert!(snap.information_content("common") < snap.information_content("rare"));
    }
}
