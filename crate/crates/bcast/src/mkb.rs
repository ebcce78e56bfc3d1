//! Media key blocks: one single-block ciphertext of the session key per
//! cover subset.

use std::collections::BTreeSet;

use crate::crypto::{self, Key};
use crate::sd::{compute_cover, SdSystem, Subset, UserKeyMaterial};
use crate::BcastError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaKeyBlock {
    pub entries: Vec<(Subset, Key)>,
}

impl MediaKeyBlock {
    pub fn cover_size(&self) -> usize {
        self.entries.len()
    }
}

/// Encrypt a session key toward every non-revoked leaf.
pub fn build_mkb(sys: &SdSystem, session_key: &Key, revoked: &BTreeSet<u32>) -> MediaKeyBlock {
    let entries = compute_cover(sys, revoked)
        .into_iter()
        .map(|subset| {
            let ct = crypto::encrypt_block(&sys.subset_key(&subset), session_key);
            (subset, ct)
        })
        .collect();
    MediaKeyBlock { entries }
}

/// A leaf holder finds the unique subset containing it and decrypts;
/// revoked leaves find none.
pub fn recover_session_key(
    mkb: &MediaKeyBlock,
    keys: &UserKeyMaterial,
) -> Result<Key, BcastError> {
    for (subset, ciphertext) in &mkb.entries {
        if let Some(key) = keys.subset_key(subset) {
            return Ok(crypto::decrypt_block(&key, ciphertext));
        }
    }
    Err(BcastError::Revoked)
}

/// The tree owner can derive any subset key directly.
pub fn recover_as_authority(mkb: &MediaKeyBlock, sys: &SdSystem) -> Result<Key, BcastError> {
    match mkb.entries.first() {
        Some((subset, ciphertext)) => {
            Ok(crypto::decrypt_block(&sys.subset_key(subset), ciphertext))
        }
        None => Err(BcastError::Revoked),
    }
}

/// Expected media-key-block footprint in bits for `n_levels` tiers over
/// `contacts` contacts split evenly: each tier's block serves contacts/n
/// readers and treats the rest as revoked, costing an average 1.38
/// single-block ciphertexts per revoked contact.
pub fn mkb_size_bits(n_levels: u32, contacts: f64) -> f64 {
    let n = f64::from(n_levels);
    n * 128.0 * 1.38 * (contacts - contacts / n)
}

/// The study's reference contact count.
pub const DEFAULT_CONTACTS: f64 = 190.0;

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(height: u8) -> SdSystem {
        SdSystem::new(height, [11u8; 16]).unwrap()
    }

    #[test]
    fn empty_revocation_single_ciphertext() {
        let s = sys(3);
        let mkb = build_mkb(&s, &[1u8; 16], &BTreeSet::new());
        assert_eq!(mkb.cover_size(), 1);
        for leaf in 0..8 {
            assert_eq!(
                recover_session_key(&mkb, &s.key_material(leaf)).unwrap(),
                [1u8; 16]
            );
        }
    }

    #[test]
    fn revoked_leaf_cannot_recover() {
        let s = sys(3);
        let revoked = BTreeSet::from([3u32]);
        let mkb = build_mkb(&s, &[2u8; 16], &revoked);
        assert_eq!(mkb.cover_size(), 1);
        for leaf in 0..8u32 {
            let got = recover_session_key(&mkb, &s.key_material(leaf));
            if leaf == 3 {
                assert!(matches!(got, Err(BcastError::Revoked)));
            } else {
                assert_eq!(got.unwrap(), [2u8; 16]);
            }
        }
    }

    #[test]
    fn authority_always_recovers() {
        let s = sys(4);
        let revoked: BTreeSet<u32> = (0..9).collect();
        let mkb = build_mkb(&s, &[9u8; 16], &revoked);
        assert_eq!(recover_as_authority(&mkb, &s).unwrap(), [9u8; 16]);
    }

    #[test]
    fn heavy_revocation_respects_bound() {
        let s = sys(8);
        // 190 used slots, 127 of them revoked
        let revoked: BTreeSet<u32> = (0..190u32).filter(|l| l % 3 != 0).collect();
        assert_eq!(revoked.len(), 126);
        let mut all_revoked = revoked.clone();
        all_revoked.extend(190..256); // unused slots are permanently revoked
        let mkb = build_mkb(&s, &[7u8; 16], &all_revoked);
        let r = all_revoked.len();
        assert!(mkb.cover_size() < 2 * r);
        for leaf in 0..256u32 {
            let got = recover_session_key(&mkb, &s.key_material(leaf));
            assert_eq!(got.is_ok(), !all_revoked.contains(&leaf), "leaf {leaf}");
        }
    }

    #[test]
    fn size_formula_reference_points() {
        let kb = |n| mkb_size_bits(n, DEFAULT_CONTACTS) / 8.0 / 1024.0;
        assert!((kb(3) - 8.2).abs() / 8.2 <= 0.01, "{}", kb(3));
        assert!((kb(2) - 4.09).abs() / 4.09 <= 0.01, "{}", kb(2));
        assert!((kb(5) - 16.38).abs() / 16.38 <= 0.01, "{}", kb(5));
        assert!((kb(10) - 36.87).abs() / 36.87 <= 0.01, "{}", kb(10));
    }
}
