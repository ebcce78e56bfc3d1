//! Fixed-size key derivation and authenticated encryption primitives.
//!
//! The label expansion is a keyed block-cipher construction: the 16-byte
//! input keys AES-128 and the left/middle/right branches encrypt three
//! distinct constant blocks. Record bodies use AES-128-CTR with
//! encrypt-then-MAC (HMAC-SHA256 truncated to 16 bytes); the encryption and
//! MAC keys are the left and right branches of the session key.

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{BlockDecrypt, BlockEncrypt, KeyInit, KeyIvInit, StreamCipher};
use aes::Aes128;
use hmac::{Hmac, Mac};
use sha2::Sha256;

type Aes128Ctr = ctr::Ctr128BE<Aes128>;
type HmacSha256 = Hmac<Sha256>;

pub const KEY_LEN: usize = 16;
pub const NONCE_LEN: usize = 16;
pub const TAG_LEN: usize = 16;

pub type Key = [u8; KEY_LEN];

const BRANCH_LEFT: u8 = 0x4c;
const BRANCH_MIDDLE: u8 = 0x4d;
const BRANCH_RIGHT: u8 = 0x52;

fn branch(input: &Key, tag: u8) -> Key {
    let cipher = Aes128::new(GenericArray::from_slice(input));
    let mut block = [tag; KEY_LEN];
    cipher.encrypt_block(GenericArray::from_mut_slice(&mut block));
    block
}

/// Left branch of the length-tripling expansion.
pub fn expand_left(input: &Key) -> Key {
    branch(input, BRANCH_LEFT)
}

/// Middle branch: turns a label into the key actually used to encrypt.
pub fn expand_middle(input: &Key) -> Key {
    branch(input, BRANCH_MIDDLE)
}

/// Right branch of the length-tripling expansion.
pub fn expand_right(input: &Key) -> Key {
    branch(input, BRANCH_RIGHT)
}

/// Deterministic per-purpose label from a root secret: AES over a block
/// encoding the purpose byte and a 32-bit argument.
pub fn derive_label(root: &Key, purpose: u8, arg: u32) -> Key {
    let cipher = Aes128::new(GenericArray::from_slice(root));
    let mut block = [0u8; KEY_LEN];
    block[0] = purpose;
    block[1..5].copy_from_slice(&arg.to_le_bytes());
    cipher.encrypt_block(GenericArray::from_mut_slice(&mut block));
    block
}

/// Single-block encryption of one key under another.
pub fn encrypt_block(key: &Key, plaintext: &Key) -> Key {
    let cipher = Aes128::new(GenericArray::from_slice(key));
    let mut block = *plaintext;
    cipher.encrypt_block(GenericArray::from_mut_slice(&mut block));
    block
}

pub fn decrypt_block(key: &Key, ciphertext: &Key) -> Key {
    let cipher = Aes128::new(GenericArray::from_slice(key));
    let mut block = *ciphertext;
    cipher.decrypt_block(GenericArray::from_mut_slice(&mut block));
    block
}

fn mac(key: &Key, nonce: &[u8; NONCE_LEN], ciphertext: &[u8]) -> [u8; TAG_LEN] {
    let mut mac = <HmacSha256 as Mac>::new_from_slice(key).expect("hmac accepts any key length");
    mac.update(nonce);
    mac.update(ciphertext);
    let digest = mac.finalize().into_bytes();
    let mut tag = [0u8; TAG_LEN];
    tag.copy_from_slice(&digest[..TAG_LEN]);
    tag
}

/// Counter-mode encryption with a keyed integrity tag.
pub fn seal(session_key: &Key, nonce: &[u8; NONCE_LEN], plaintext: &[u8]) -> (Vec<u8>, [u8; TAG_LEN]) {
    let enc_key = expand_left(session_key);
    let mac_key = expand_right(session_key);
    let mut buf = plaintext.to_vec();
    let mut ctr = Aes128Ctr::new(
        GenericArray::from_slice(&enc_key),
        GenericArray::from_slice(nonce),
    );
    ctr.apply_keystream(&mut buf);
    let tag = mac(&mac_key, nonce, &buf);
    (buf, tag)
}

/// Verify-then-decrypt; `None` when the tag does not match.
pub fn open(
    session_key: &Key,
    nonce: &[u8; NONCE_LEN],
    ciphertext: &[u8],
    tag: &[u8; TAG_LEN],
) -> Option<Vec<u8>> {
    let enc_key = expand_left(session_key);
    let mac_key = expand_right(session_key);
    let expect = mac(&mac_key, nonce, ciphertext);
    // constant-time comparison
    let mut diff = 0u8;
    for (a, b) in expect.iter().zip(tag) {
        diff |= a ^ b;
    }
    if diff != 0 {
        return None;
    }
    let mut buf = ciphertext.to_vec();
    let mut ctr = Aes128Ctr::new(
        GenericArray::from_slice(&enc_key),
        GenericArray::from_slice(nonce),
    );
    ctr.apply_keystream(&mut buf);
    Some(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_are_distinct_and_deterministic() {
        let k = [7u8; 16];
        let (l, m, r) = (expand_left(&k), expand_middle(&k), expand_right(&k));
        assert_ne!(l, m);
        assert_ne!(m, r);
        assert_ne!(l, r);
        assert_eq!(l, expand_left(&k));
    }

    #[test]
    fn block_round_trip() {
        let key = [1u8; 16];
        let pt = [9u8; 16];
        assert_eq!(decrypt_block(&key, &encrypt_block(&key, &pt)), pt);
    }

    #[test]
    fn seal_open_round_trip() {
        let key = [3u8; 16];
        let nonce = [5u8; 16];
        let (ct, tag) = seal(&key, &nonce, b"hello payload");
        assert_eq!(
            open(&key, &nonce, &ct, &tag).as_deref(),
            Some(&b"hello payload"[..])
        );
    }

    #[test]
    fn open_rejects_tampering() {
        let key = [3u8; 16];
        let nonce = [5u8; 16];
        let (mut ct, tag) = seal(&key, &nonce, b"hello payload");
        ct[0] ^= 1;
        assert!(open(&key, &nonce, &ct, &tag).is_none());
        let (ct, mut tag) = seal(&key, &nonce, b"hello payload");
        tag[0] ^= 1;
        assert!(open(&key, &nonce, &ct, &tag).is_none());
    }

    #[test]
    fn pinned_vectors() {
        // regression pins for the concrete construction; recorded from the
        // implementation itself once the design was frozen
        let k = [0u8; 16];
        assert_eq!(
            hex(&expand_left(&k)),
            "1d983819e4212f50292694f1d3d534a9"
        );
        assert_eq!(
            hex(&derive_label(&k, 1, 2)),
            "efcd2290b9aee186b696f7ff3d408bb2"
        );
    }

    fn hex(bytes: &[u8]) -> String {
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}
