//! Privacy requirements: ordered reader tiers with per-tier disclosure
//! thresholds, built from questionnaire answers.
//!
//! Each answer names an anchor term whose information content becomes the
//! disclosure bound for that tier (or the specials NONE = 0 bits and
//! ALL = unlimited). With several topics, the strictest (lowest) answer per
//! tier wins. Thresholds must be non-decreasing with trust.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::{canonicalize, HitSource};
use crate::taxonomy::Taxonomy;

#[derive(Debug, Error)]
pub enum RequirementsError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("need at least two levels (one protected tier above the public one)")]
    TooFewLevels,
    #[error("thresholds not monotone: level {level} ({name}) allows {threshold} bits, below level {prev_level}'s {prev_threshold}")]
    NonMonotone {
        level: usize,
        name: String,
        threshold: f64,
        prev_level: usize,
        prev_threshold: f64,
    },
    #[error("anchor {0:?} resolves to no corpus entry or taxonomy label")]
    UnresolvableAnchor(String),
    #[error("no answer selected for topic {topic:?} at level {level}")]
    MissingAnswer { topic: String, level: usize },
    #[error("topic {topic:?} has no option {option:?}")]
    UnknownOption { topic: String, option: String },
}

/// One questionnaire answer option: what the anchor discloses at most.
#[derive(Debug, Clone, PartialEq)]
pub enum AnswerAnchor {
    /// Disclose nothing: threshold 0.
    Nothing,
    /// Disclose everything: unlimited threshold.
    All,
    /// Disclose at most as much as this term reveals.
    Term(String),
}

#[derive(Debug, Clone)]
pub struct Topic {
    pub name: String,
    pub question: String,
    /// Option key -> anchor, in file order.
    pub options: Vec<(String, AnswerAnchor)>,
    /// Preselected option key per level.
    pub defaults: Vec<Option<String>>,
}

impl Topic {
    pub fn option(&self, key: &str) -> Option<&AnswerAnchor> {
        self.options
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, anchor)| anchor)
    }
}

/// A questionnaire with its reader tiers, parsed from a scenario pack.
#[derive(Debug, Clone)]
pub struct Questionnaire {
    pub scenario: String,
    /// Tier names, index 0 = untrusted external readers and the operator.
    pub level_names: Vec<String>,
    pub topics: Vec<Topic>,
    /// Free-form scenario settings (stego cell size, tree height, ...).
    pub settings: BTreeMap<String, String>,
}

impl Questionnaire {
    pub fn load(path: &Path) -> Result<Self, RequirementsError> {
        let text = fs::read_to_string(path).map_err(|source| RequirementsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parse the key/value section format of scenario packs.
    pub fn parse(text: &str) -> Result<Self, RequirementsError> {
        let mut scenario = String::new();
        let mut levels: BTreeMap<usize, String> = BTreeMap::new();
        let mut topics: Vec<Topic> = Vec::new();
        let mut settings = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].to_string();
                if let Some(topic) = section.strip_prefix("topic.") {
                    topics.push(Topic {
                        name: topic.to_string(),
                        question: String::new(),
                        options: Vec::new(),
                        defaults: Vec::new(),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(RequirementsError::Parse {
                line: line_no,
                msg: "expected key = value".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            match section.as_str() {
                "scenario" => match key {
                    "name" => scenario = value.to_string(),
                    _ => {
                        settings.insert(key.to_string(), value.to_string());
                    }
                },
                "levels" => {
                    let level: usize = key.parse().map_err(|_| RequirementsError::Parse {
                        line: line_no,
                        msg: format!("invalid level index {key:?}"),
                    })?;
                    levels.insert(level, value.to_string());
                }
                s if s.starts_with("topic.") => {
                    let topic = topics.last_mut().expect("topic section opened");
                    if key == "question" {
                        topic.question = value.to_string();
                    } else if let Some(opt) = key.strip_prefix("option.") {
                        let anchor = match value {
                            "NONE" => AnswerAnchor::Nothing,
                            "ALL" => AnswerAnchor::All,
                            term => AnswerAnchor::Term(canonicalize(term)),
                        };
                        topic.options.push((opt.to_string(), anchor));
                    } else if let Some(level) = key.strip_prefix("default.") {
                        let level: usize =
                            level.parse().map_err(|_| RequirementsError::Parse {
                                line: line_no,
                                msg: format!("invalid default level {level:?}"),
                            })?;
                        if topic.defaults.len() <= level {
                            topic.defaults.resize(level + 1, None);
                        }
                        topic.defaults[level] = Some(value.to_string());
                    } else {
                        return Err(RequirementsError::Parse {
                            line: line_no,
                            msg: format!("unknown topic key {key:?}"),
                        });
                    }
                }
                _ => {
                    return Err(RequirementsError::Parse {
                        line: line_no,
                        msg: format!("key outside a known section: {key:?}"),
                    })
                }
            }
        }
        // level indices must be contiguous from 0
        let mut level_names = Vec::new();
        for (expect, (idx, name)) in levels.into_iter().enumerate() {
            if idx != expect {
                return Err(RequirementsError::Parse {
                    line: 0,
                    msg: format!("level indices must be contiguous from 0, missing {expect}"),
                });
            }
            level_names.push(name);
        }
        Ok(Self {
            scenario,
            level_names,
            topics,
            settings,
        })
    }

    /// The pack's preselected answers: option key per (topic, level).
    pub fn default_answers(&self) -> Result<Vec<Vec<String>>, RequirementsError> {
        self.topics
            .iter()
            .map(|t| {
                (0..self.level_names.len())
                    .map(|lvl| {
                        t.defaults
                            .get(lvl)
                            .cloned()
                            .flatten()
                            .ok_or(RequirementsError::MissingAnswer {
                                topic: t.name.clone(),
                                level: lvl,
                            })
                    })
                    .collect()
            })
            .collect()
    }
}

/// How a term's informativeness relates to the configured tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Visible to readers of this level and above.
    Level(usize),
    /// More informative than even the most trusted tier allows.
    AboveTop,
}

/// Ordered tiers with their disclosure thresholds in bits.
#[derive(Debug, Clone)]
pub struct PrivacyRequirements {
    levels: Vec<(String, f64)>,
}

impl PrivacyRequirements {
    pub fn from_thresholds(levels: Vec<(String, f64)>) -> Result<Self, RequirementsError> {
        if levels.len() < 2 {
            return Err(RequirementsError::TooFewLevels);
        }
        for i in 1..levels.len() {
            if levels[i].1 < levels[i - 1].1 {
                return Err(RequirementsError::NonMonotone {
                    level: i,
                    name: levels[i].0.clone(),
                    threshold: levels[i].1,
                    prev_level: i - 1,
                    prev_threshold: levels[i - 1].1,
                });
            }
        }
        Ok(Self { levels })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn threshold(&self, level: usize) -> f64 {
        self.levels[level].1
    }

    pub fn level_name(&self, level: usize) -> &str {
        &self.levels[level].0
    }

    pub fn levels(&self) -> impl Iterator<Item = (&str, f64)> {
        self.levels.iter().map(|(n, t)| (n.as_str(), *t))
    }

    /// Tier of a contact-type name, if configured.
    pub fn level_of_name(&self, name: &str) -> Option<usize> {
        self.levels.iter().position(|(n, _)| n == name)
    }

    /// Smallest level whose threshold admits the given informativeness.
    pub fn level_for_ic(&self, ic: f64) -> Classification {
        for (i, (_, t)) in self.levels.iter().enumerate() {
            if ic <= *t {
                return Classification::Level(i);
            }
        }
        Classification::AboveTop
    }

    /// Serialize to the saved-requirements text format.
    pub fn to_text(&self, scenario: &str) -> String {
        let mut out = String::from("[requirements]\n");
        out.push_str(&format!("scenario = {scenario}\n"));
        for (i, (name, t)) in self.levels.iter().enumerate() {
            out.push_str(&format!("\n[level.{i}]\nname = {name}\n"));
            if t.is_infinite() {
                out.push_str("threshold = inf\n");
            } else {
                out.push_str(&format!("threshold = {t}\n"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<(Self, String), RequirementsError> {
        let mut scenario = String::new();
        let mut levels: BTreeMap<usize, (Option<String>, Option<f64>)> = BTreeMap::new();
        let mut current: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "[requirements]" {
                current = None;
                continue;
            }
            if let Some(rest) = line.strip_prefix("[level.") {
                let n = rest.trim_end_matches(']').parse().map_err(|_| {
                    RequirementsError::Parse {
                        line: line_no,
                        msg: "invalid level section".into(),
                    }
                })?;
                levels.entry(n).or_insert((None, None));
                current = Some(n);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(RequirementsError::Parse {
                line: line_no,
                msg: "expected key = value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match (current, key) {
                (None, "scenario") => scenario = value.to_string(),
                (Some(n), "name") => levels.get_mut(&n).unwrap().0 = Some(value.to_string()),
                (Some(n), "threshold") => {
                    let t = if value == "inf" {
                        f64::INFINITY
                    } else {
                        value.parse().map_err(|_| RequirementsError::Parse {
                            line: line_no,
                            msg: format!("invalid threshold {value:?}"),
                        })?
                    };
                    levels.get_mut(&n).unwrap().1 = Some(t);
                }
                _ => {
                    return Err(RequirementsError::Parse {
                        line: line_no,
                        msg: format!("unexpected key {key:?}"),
                    })
                }
            }
        }
        let mut out = Vec::new();
        for (expect, (idx, (name, t))) in levels.into_iter().enumerate() {
            if idx != expect {
                return Err(RequirementsError::Parse {
                    line: 0,
                    msg: format!("missing level {expect}"),
                });
            }
            match (name, t) {
                (Some(name), Some(t)) => out.push((name, t)),
                _ => {
                    return Err(RequirementsError::Parse {
                        line: 0,
                        msg: format!("level {idx} missing name or threshold"),
                    })
                }
            }
        }
        Ok((Self::from_thresholds(out)?, scenario))
    }
}

fn resolve_anchor<H: HitSource>(
    anchor: &AnswerAnchor,
    corpus: &H,
    tax: &Taxonomy,
) -> Result<f64, RequirementsError> {
    match anchor {
        AnswerAnchor::Nothing => Ok(0.0),
        AnswerAnchor::All => Ok(f64::INFINITY),
        AnswerAnchor::Term(term) => {
            let direct = corpus.information_content(term);
            if direct.is_finite() {
                return Ok(direct);
            }
            // fall back to the taxonomy: a surface form whose sense label is
            // in the corpus still anchors a threshold
            for sense in tax.senses_of(term) {
                let ic = corpus.information_content(&sense.label);
                if ic.is_finite() {
                    return Ok(ic);
                }
            }
            Err(RequirementsError::UnresolvableAnchor(term.clone()))
        }
    }
}

/// Build requirements from one selected option key per (topic, level).
///
/// The threshold of a level is the minimum anchor informativeness across
/// topics; the result must be monotone in trust or an error names the
/// offending levels.
pub fn build_requirements<H: HitSource>(
    q: &Questionnaire,
    answers: &[Vec<String>],
    corpus: &H,
    tax: &Taxonomy,
) -> Result<PrivacyRequirements, RequirementsError> {
    let n = q.level_names.len();
    if n < 2 {
        return Err(RequirementsError::TooFewLevels);
    }
    let mut thresholds = vec![f64::INFINITY; n];
    for (topic, topic_answers) in q.topics.iter().zip(answers) {
        for (level, threshold) in thresholds.iter_mut().enumerate() {
            let key =
                topic_answers
                    .get(level)
                    .ok_or_else(|| RequirementsError::MissingAnswer {
                        topic: topic.name.clone(),
                        level,
                    })?;
            let anchor = topic.option(key).ok_or_else(|| RequirementsError::UnknownOption {
                topic: topic.name.clone(),
                option: key.clone(),
            })?;
            let ic = resolve_anchor(anchor, corpus, tax)?;
            if ic < *threshold {
                *threshold = ic;
            }
        }
    }
    if q.topics.is_empty() {
        return Err(RequirementsError::Parse {
            line: 0,
            msg: "questionnaire has no topics".into(),
        });
    }
    PrivacyRequirements::from_thresholds(
        q.level_names
            .iter()
            .cloned()
            .zip(thresholds)
            .collect::<Vec<_>>(),
    )
}
