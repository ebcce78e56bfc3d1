//! Simulated social network: a local store plays the honest-but-curious
//! operator, accounts hold the privacy requirements and key trees, and the
//! publish/read pipeline runs sanitization, sealing and embedding end to
//! end.

pub mod account;
pub mod pipeline;
pub mod store;

use thiserror::Error;

pub use account::{Account, AccountSettings, Contact};
pub use pipeline::{operator_view, publish, read_post, report, Post, ReadOutcome, Report};
pub use store::Store;

#[derive(Debug, Error)]
pub enum NetsimError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("contact {0:?} already exists")]
    DuplicateContact(String),
    #[error("unknown contact {0:?}")]
    UnknownContact(String),
    #[error("unknown relationship {0:?}")]
    UnknownRelationship(String),
    #[error("relationship {0:?} carries no credentials (public tier)")]
    PublicTierContact(String),
    #[error("contact slots exhausted at level {level} (capacity {capacity})")]
    CapacityFull { level: usize, capacity: u32 },
    #[error("unknown post {0:?}")]
    UnknownPost(String),
    #[error("store is not initialized (run init first)")]
    NotInitialized,
    #[error("owner credentials required: {0}")]
    Denied(String),
    #[error("store corrupt: {0}")]
    Corrupt(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Requirements(#[from] sani_core::RequirementsError),
    #[error(transparent)]
    Corpus(#[from] sani_core::CorpusError),
    #[error(transparent)]
    Taxonomy(#[from] sani_core::TaxonomyError),
    #[error(transparent)]
    Sanitizer(#[from] sani_core::SanitizerError),
    #[error(transparent)]
    Bcast(#[from] sani_bcast::BcastError),
    #[error(transparent)]
    Stego(#[from] sani_stego::StegoError),
}

impl NetsimError {
    /// CLI exit code: 2 validation, 3 capacity, 4 access denied,
    /// 5 corruption.
    pub fn exit_code(&self) -> i32 {
        use NetsimError::*;
        match self {
            UnknownScenario(_) | DuplicateContact(_) | UnknownContact(_)
            | UnknownRelationship(_) | PublicTierContact(_) | UnknownPost(_)
            | NotInitialized | Requirements(_) | Corpus(_) | Taxonomy(_) => 2,
            CapacityFull { .. } => 3,
            Denied(_) => 4,
            Corrupt(_) | Io { .. } | Sanitizer(_) => 5,
            Bcast(e) => match e {
                sani_bcast::BcastError::Revoked | sani_bcast::BcastError::NoAccess => 4,
                _ => 5,
            },
            Stego(e) => match e {
                sani_stego::StegoError::CapacityExceeded { .. }
                | sani_stego::StegoError::NoSuitableCover { .. } => 3,
                sani_stego::StegoError::InvalidConfig(_) => 2,
                _ => 5,
            },
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> NetsimError {
    NetsimError::Io {
        path: path.display().to_string(),
        source,
    }
}
