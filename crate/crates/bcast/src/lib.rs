//! Tiered key management: subset-difference broadcast encryption with
//! revocation, media key blocks, and the sealed payload format carrying the
//! per-tier term sets.

pub mod crypto;
pub mod keyfile;
pub mod mkb;
pub mod payload;
pub mod sd;

use thiserror::Error;

pub use crypto::{Key, KEY_LEN, NONCE_LEN, TAG_LEN};
pub use keyfile::KeyExport;
pub use mkb::{build_mkb, mkb_size_bits, recover_session_key, MediaKeyBlock, DEFAULT_CONTACTS};
pub use payload::{seal_payload, LevelSeal, ProtectedPayload};
pub use sd::{compute_cover, SdSystem, Subset, UserKeyMaterial};

#[derive(Debug, Error)]
pub enum BcastError {
    #[error("tree height {0} outside the supported 1..=16 range")]
    HeightOutOfRange(u8),
    #[error("credentials revoked for this block")]
    Revoked,
    #[error("no credentials grant access to any level")]
    NoAccess,
    #[error("payload failed authentication")]
    Integrity,
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error("payload too large: {0}")]
    TooLarge(String),
    #[error("invalid key file: {0}")]
    KeyFile(String),
}
