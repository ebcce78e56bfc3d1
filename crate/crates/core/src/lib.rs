//! Core sanitization toolkit: corpus-backed informativeness, generalization
//! taxonomy with sense disambiguation, noun-phrase term detection, privacy
//! requirements, and the sanitizer that turns a message into a published
//! text plus per-level term sets.

pub mod corpus;
pub mod fixtures;
pub mod requirements;
pub mod sanitizer;
pub mod taxonomy;
pub mod textproc;

pub use corpus::{canonicalize, CorpusError, CorpusSnapshot, HitSource};
pub use requirements::{
    AnswerAnchor, Classification, PrivacyRequirements, Questionnaire, RequirementsError,
};
pub use sanitizer::{
    encode_level_set, information_preservation, reconstruct, sanitize, LevelSet, OffsetEntry,
    PadMode, SanitizationPlan, SanitizerError, Slot,
};
pub use taxonomy::{Sense, SenseId, Taxonomy, TaxonomyError};
pub use textproc::{detect_terms, split_sentences, tokenize, DetectedTerm, TextEngine};
