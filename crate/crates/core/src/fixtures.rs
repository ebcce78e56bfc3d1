//! Bundled fixture data: corpus snapshot, taxonomy, lexicon, stop words and
//! scenario packs. These files are versioned test surface — golden tests
//! depend on their exact contents (see fixtures/tools/derive_counts.py).

use crate::corpus::CorpusSnapshot;
use crate::taxonomy::Taxonomy;
use crate::textproc::TextEngine;

pub const CORPUS_TSV: &str = include_str!("../fixtures/corpus.tsv");
pub const TAXONOMY_TSV: &str = include_str!("../fixtures/taxonomy.tsv");
pub const LEXICON_TSV: &str = include_str!("../fixtures/lexicon.tsv");
pub const STOPWORDS_TXT: &str = include_str!("../fixtures/stopwords.txt");

pub const SCENARIO_HEALTHCARE: &str = include_str!("../fixtures/scenarios/healthcare.txt");
pub const SCENARIO_MICROBLOG: &str = include_str!("../fixtures/scenarios/microblog.txt");
pub const SCENARIO_BASIC: &str = include_str!("../fixtures/scenarios/basic.txt");

/// The bundled corpus snapshot. Panics only if the bundled file is broken,
/// which the fixture tests catch.
pub fn corpus() -> CorpusSnapshot {
    CorpusSnapshot::parse(CORPUS_TSV).expect("bundled corpus fixture is valid")
}

pub fn taxonomy() -> Taxonomy {
    Taxonomy::parse(TAXONOMY_TSV).expect("bundled taxonomy fixture is valid")
}

pub fn text_engine() -> TextEngine {
    TextEngine::parse(LEXICON_TSV, STOPWORDS_TXT).expect("bundled lexicon fixture is valid")
}

/// Scenario pack source by name.
pub fn scenario(name: &str) -> Option<&'static str> {
    match name {
        "healthcare" => Some(SCENARIO_HEALTHCARE),
        "microblog" => Some(SCENARIO_MICROBLOG),
        "basic" => Some(SCENARIO_BASIC),
        _ => None,
    }
}

pub fn scenario_names() -> &'static [&'static str] {
    &["healthcare", "microblog", "basic"]
}
