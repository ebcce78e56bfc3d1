//! The sealed payload hidden inside cover images.
//!
//! Binary layout (little-endian lengths):
//!
//! ```text
//! magic "SPP1"
//! u8  level count (tiers 1..=count, ascending)
//! per level:
//!   u16 cover size
//!   per cover entry: u8 i-depth, u8 j-depth, u16 i-index, u16 j-index,
//!                    16-byte ciphertext
//!   u32 body length, 16-byte nonce, body ciphertext, 16-byte tag
//! ```
//!
//! Each level's body is the authenticated encryption, under that level's
//! session key, of the offset table plus the encoded slot set produced by
//! the sanitizer.

use std::collections::BTreeSet;

use crate::crypto::{self, Key, NONCE_LEN, TAG_LEN};
use crate::mkb::{build_mkb, recover_as_authority, recover_session_key, MediaKeyBlock};
use crate::sd::{SdSystem, Subset, UserKeyMaterial};
use crate::BcastError;

pub const MAGIC: &[u8; 4] = b"SPP1";

/// Maximum body bytes per level record; parsing rejects anything larger.
pub const MAX_BODY_LEN: u32 = 1 << 24;

#[derive(Debug, Clone)]
pub struct LevelRecord {
    pub mkb: MediaKeyBlock,
    pub nonce: [u8; NONCE_LEN],
    pub ciphertext: Vec<u8>,
    pub tag: [u8; TAG_LEN],
}

#[derive(Debug, Clone)]
pub struct ProtectedPayload {
    /// Index 0 is tier 1.
    pub records: Vec<LevelRecord>,
}

/// Everything needed to seal one tier's record. The caller supplies the
/// randomness (fresh session key and nonce per post per tier).
pub struct LevelSeal<'a> {
    pub system: &'a SdSystem,
    pub revoked: &'a BTreeSet<u32>,
    pub session_key: Key,
    pub nonce: [u8; NONCE_LEN],
    pub plaintext: &'a [u8],
}

pub fn seal_payload(levels: &[LevelSeal<'_>]) -> Result<ProtectedPayload, BcastError> {
    if levels.len() > u8::MAX as usize {
        return Err(BcastError::TooLarge("more than 255 levels".into()));
    }
    let mut records = Vec::with_capacity(levels.len());
    for level in levels {
        if level.plaintext.len() as u64 > u64::from(MAX_BODY_LEN) {
            return Err(BcastError::TooLarge(format!(
                "level body of {} bytes exceeds the {} byte limit",
                level.plaintext.len(),
                MAX_BODY_LEN
            )));
        }
        let mkb = build_mkb(level.system, &level.session_key, level.revoked);
        if mkb.cover_size() > u16::MAX as usize {
            return Err(BcastError::TooLarge("cover does not fit a u16".into()));
        }
        let (ciphertext, tag) = crypto::seal(&level.session_key, &level.nonce, level.plaintext);
        records.push(LevelRecord {
            mkb,
            nonce: level.nonce,
            ciphertext,
            tag,
        });
    }
    Ok(ProtectedPayload { records })
}

impl ProtectedPayload {
    pub fn n_levels(&self) -> usize {
        self.records.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(self.records.len() as u8);
        for record in &self.records {
            out.extend_from_slice(&(record.mkb.cover_size() as u16).to_le_bytes());
            for (subset, ct) in &record.mkb.entries {
                let (di, dj, ii, jj) = subset.encode();
                out.push(di);
                out.push(dj);
                out.extend_from_slice(&ii.to_le_bytes());
                out.extend_from_slice(&jj.to_le_bytes());
                out.extend_from_slice(ct);
            }
            out.extend_from_slice(&(record.ciphertext.len() as u32).to_le_bytes());
            out.extend_from_slice(&record.nonce);
            out.extend_from_slice(&record.ciphertext);
            out.extend_from_slice(&record.tag);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BcastError> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != MAGIC {
            return Err(BcastError::Malformed("bad payload magic".into()));
        }
        let count = r.u8()?;
        let mut records = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let cover = r.u16()?;
            let mut entries = Vec::with_capacity(cover as usize);
            for _ in 0..cover {
                let di = r.u8()?;
                let dj = r.u8()?;
                let ii = r.u16()?;
                let jj = r.u16()?;
                let mut ct = [0u8; 16];
                ct.copy_from_slice(r.take(16)?);
                entries.push((Subset::decode(di, dj, ii, jj)?, ct));
            }
            let body_len = r.u32()?;
            if body_len > MAX_BODY_LEN {
                return Err(BcastError::Malformed("body length out of range".into()));
            }
            let mut nonce = [0u8; NONCE_LEN];
            nonce.copy_from_slice(r.take(NONCE_LEN)?);
            let ciphertext = r.take(body_len as usize)?.to_vec();
            let mut tag = [0u8; TAG_LEN];
            tag.copy_from_slice(r.take(TAG_LEN)?);
            records.push(LevelRecord {
                mkb: MediaKeyBlock { entries },
                nonce,
                ciphertext,
                tag,
            });
        }
        if !r.is_empty() {
            return Err(BcastError::Malformed("trailing bytes after payload".into()));
        }
        Ok(Self { records })
    }

    /// Decrypt the highest tier the credentials can open. Returns the tier
    /// index (1-based) with the plaintext body.
    pub fn open(
        &self,
        credentials: &[(usize, UserKeyMaterial)],
    ) -> Result<(usize, Vec<u8>), BcastError> {
        if credentials.is_empty() {
            return Err(BcastError::NoAccess);
        }
        for level in (1..=self.records.len()).rev() {
            let Some((_, material)) = credentials.iter().find(|(l, _)| *l == level) else {
                continue;
            };
            let record = &self.records[level - 1];
            match recover_session_key(&record.mkb, material) {
                Ok(session_key) => {
                    let body =
                        crypto::open(&session_key, &record.nonce, &record.ciphertext, &record.tag)
                            .ok_or(BcastError::Integrity)?;
                    return Ok((level, body));
                }
                Err(BcastError::Revoked) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(BcastError::NoAccess)
    }

    /// Decrypt a specific tier with the tree owner's secrets.
    pub fn open_as_authority(
        &self,
        level: usize,
        sys: &SdSystem,
    ) -> Result<Vec<u8>, BcastError> {
        let record = self
            .records
            .get(level.wrapping_sub(1))
            .ok_or_else(|| BcastError::Malformed(format!("no record for level {level}")))?;
        let session_key = recover_as_authority(&record.mkb, sys)?;
        crypto::open(&session_key, &record.nonce, &record.ciphertext, &record.tag)
            .ok_or(BcastError::Integrity)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], BcastError> {
        if self.pos + n > self.bytes.len() {
            return Err(BcastError::Malformed("truncated payload".into()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, BcastError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, BcastError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, BcastError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn is_empty(&self) -> bool {
        self.pos == self.bytes.len()
    }
}
