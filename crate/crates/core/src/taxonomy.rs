//! Generalization hierarchies with multi-sense terms.
//!
//! The taxonomy is a forest of single-parent trees. Walking from a sense
//! toward its root yields ever more general labels; the privacy-preserving
//! generalization of a term under a threshold is the first ancestor whose
//! information content fits under it. Multi-sense surface forms are
//! disambiguated against the sentence context with an IC-weighted
//! common-ancestor similarity.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::{canonicalize, HitSource};

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("failed to read taxonomy {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate sense id {0:?}")]
    DuplicateSense(String),
    #[error("sense {child:?} names unknown parent {parent:?}")]
    DanglingParent { child: String, parent: String },
    #[error("cycle through sense {0:?}")]
    Cycle(String),
    #[error("unknown sense {0:?}")]
    UnknownSense(String),
    #[error("no sense covers term {0:?}")]
    NoSense(String),
    #[error("edge {parent:?} -> {child:?} is not monotone: parent IC {parent_ic} > child IC {child_ic}")]
    NonMonotoneEdge {
        parent: String,
        child: String,
        parent_ic: f64,
        child_ic: f64,
    },
}

/// Opaque sense identifier from the taxonomy file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SenseId(pub String);

impl std::fmt::Display for SenseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// One sense of a surface form: the label is published when the sense is
/// used as a generalization.
#[derive(Debug, Clone)]
pub struct Sense {
    pub id: SenseId,
    pub label: String,
    pub surface_forms: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    senses: Vec<Sense>,
    parent: Vec<Option<usize>>,
    by_id: HashMap<String, usize>,
    surface_index: HashMap<String, Vec<usize>>,
}

impl Taxonomy {
    /// Load a taxonomy file: `sense_id<TAB>label<TAB>parent_id|-<TAB>s1;s2;…`
    /// per line, `#` comments. Fails on duplicate ids, dangling parents,
    /// cycles and empty labels.
    pub fn load(path: &Path) -> Result<Self, TaxonomyError> {
        let text = fs::read_to_string(path).map_err(|source| TaxonomyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut senses = Vec::new();
        let mut parent_names: Vec<Option<String>> = Vec::new();
        let mut by_id = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(TaxonomyError::Parse {
                    line: line_no,
                    msg: "expected sense_id<TAB>label<TAB>parent<TAB>surfaces".into(),
                });
            }
            let id = fields[0].trim().to_string();
            let label = canonicalize(fields[1]);
            if label.is_empty() {
                return Err(TaxonomyError::Parse {
                    line: line_no,
                    msg: "empty label".into(),
                });
            }
            if by_id.contains_key(&id) {
                return Err(TaxonomyError::DuplicateSense(id));
            }
            let parent = match fields[2].trim() {
                "-" => None,
                p => Some(p.to_string()),
            };
            let surface_forms: Vec<String> = fields[3]
                .split(';')
                .map(canonicalize)
                .filter(|s| !s.is_empty())
                .collect();
            by_id.insert(id.clone(), senses.len());
            senses.push(Sense {
                id: SenseId(id),
                label,
                surface_forms,
            });
            parent_names.push(parent);
        }

        let mut parent = vec![None; senses.len()];
        for (i, name) in parent_names.iter().enumerate() {
            if let Some(name) = name {
                let p = *by_id.get(name).ok_or_else(|| TaxonomyError::DanglingParent {
                    child: senses[i].id.0.clone(),
                    parent: name.clone(),
                })?;
                parent[i] = Some(p);
            }
        }

        // cycle check: follow parent links, no chain may exceed the node count
        for start in 0..senses.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                cur = p;
                steps += 1;
                if steps > senses.len() {
                    return Err(TaxonomyError::Cycle(senses[start].id.0.clone()));
                }
            }
        }

        let mut surface_index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, sense) in senses.iter().enumerate() {
            for surface in &sense.surface_forms {
                surface_index.entry(surface.clone()).or_default().push(i);
            }
        }

        Ok(Self {
            senses,
            parent,
            by_id,
            surface_index,
        })
    }

    /// Check that no parent is more informative than its child. Required for
    /// the threshold walk to return the most informative admissible ancestor.
    pub fn validate_against<H: HitSource>(&self, corpus: &H) -> Result<(), TaxonomyError> {
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                let child_ic = corpus.information_content(&self.senses[i].label);
                let parent_ic = corpus.information_content(&self.senses[p].label);
                if parent_ic > child_ic {
                    return Err(TaxonomyError::NonMonotoneEdge {
                        parent: self.senses[p].label.clone(),
                        child: self.senses[i].label.clone(),
                        parent_ic,
                        child_ic,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn sense(&self, id: &SenseId) -> Option<&Sense> {
        self.by_id.get(&id.0).map(|&i| &self.senses[i])
    }

    /// All senses whose surface forms include the term, in file order.
    pub fn senses_of(&self, term: &str) -> Vec<&Sense> {
        match self.surface_index.get(term) {
            Some(ids) => ids.iter().map(|&i| &self.senses[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Generalization chain from the sense itself up to its root.
    pub fn ancestor_chain(&self, sense: &Sense) -> Result<Vec<&Sense>, TaxonomyError> {
        let mut cur = *self
            .by_id
            .get(&sense.id.0)
            .ok_or_else(|| TaxonomyError::UnknownSense(sense.id.0.clone()))?;
        let mut chain = vec![&self.senses[cur]];
        while let Some(p) = self.parent[cur] {
            chain.push(&self.senses[p]);
            cur = p;
        }
        Ok(chain)
    }

    fn index_of(&self, sense: &Sense) -> Option<usize> {
        self.by_id.get(&sense.id.0).copied()
    }

    /// IC-weighted common-ancestor similarity in [0, 1]. Senses in disjoint
    /// trees score 0; a sense scores 1 against itself.
    pub fn semantic_similarity<H: HitSource>(&self, corpus: &H, a: &Sense, b: &Sense) -> f64 {
        let (ia, ib) = match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) => (ia, ib),
            _ => return 0.0,
        };
        if ia == ib {
            return 1.0;
        }
        // deepest common ancestor: a's chain as a set, first hit on b's chain
        let mut a_chain = Vec::new();
        let mut cur = Some(ia);
        while let Some(i) = cur {
            a_chain.push(i);
            cur = self.parent[i];
        }
        let mut dca = None;
        let mut cur = Some(ib);
        'outer: while let Some(i) = cur {
            for &ai in &a_chain {
                if ai == i {
                    dca = Some(i);
                    break 'outer;
                }
            }
            cur = self.parent[i];
        }
        let Some(dca) = dca else { return 0.0 };
        let ic_dca = corpus.information_content(&self.senses[dca].label);
        let ic_a = corpus.information_content(&a.label);
        let ic_b = corpus.information_content(&b.label);
        let denom = ic_a + ic_b;
        if !ic_dca.is_finite() || !denom.is_finite() || denom <= 0.0 {
            return 0.0;
        }
        (2.0 * ic_dca / denom).clamp(0.0, 1.0)
    }

    /// Pick the sense of `term` most similar, on average, to the first
    /// available sense of each context term. Empty context and ties resolve
    /// to the first-listed sense.
    pub fn disambiguate<'a, H: HitSource>(
        &'a self,
        corpus: &H,
        term: &str,
        context: &[String],
    ) -> Result<&'a Sense, TaxonomyError> {
        let candidates = self.senses_of(term);
        if candidates.is_empty() {
            return Err(TaxonomyError::NoSense(term.to_string()));
        }
        if candidates.len() == 1 {
            return Ok(candidates[0]);
        }
        let context_senses: Vec<&Sense> = context
            .iter()
            .filter(|c| canonicalize(c) != term)
            .filter_map(|c| self.senses_of(c).into_iter().next())
            .collect();
        if context_senses.is_empty() {
            return Ok(candidates[0]);
        }
        let mut best = candidates[0];
        let mut best_score = f64::NEG_INFINITY;
        for cand in candidates {
            let total: f64 = context_senses
                .iter()
                .map(|ctx| self.semantic_similarity(corpus, cand, ctx))
                .sum();
            let mean = total / context_senses.len() as f64;
            if mean > best_score {
                best_score = mean;
                best = cand;
            }
        }
        Ok(best)
    }

    /// Most informative generalization of `term` whose IC fits under the
    /// threshold: the term itself when it already fits, `None` when no
    /// ancestor qualifies (the caller removes the term).
    pub fn generalize_to_threshold<H: HitSource>(
        &self,
        corpus: &H,
        term: &str,
        threshold: f64,
        context: &[String],
    ) -> Result<Option<String>, TaxonomyError> {
        if corpus.information_content(term) <= threshold {
            return Ok(Some(term.to_string()));
        }
        let sense = self.disambiguate(corpus, term, context)?;
        for ancestor in self.ancestor_chain(sense)? {
            if corpus.information_content(&ancestor.label) <= threshold {
                return Ok(Some(ancestor.label.clone()));
            }
        }
        Ok(None)
    }
}
