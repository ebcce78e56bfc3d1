//! Subset-difference tree: deterministic label hierarchy, cover
//! computation over revocation sets, and per-leaf key material.
//!
//! Nodes are heap-indexed (root 1, children 2i and 2i+1); leaves of a
//! height-h tree are nodes 2^h .. 2^{h+1}. A subset (i, j) holds every leaf
//! below i that is not below j. Labels: every node i owns a start label,
//! and within i's subtree a GGM walk assigns a label to each descendant j;
//! the subset key is the middle expansion of that label. A leaf receives,
//! for every ancestor i, the labels hanging just off its path inside i's
//! subtree — enough to derive the key of every subset containing it and of
//! no other.

use std::collections::BTreeSet;

use crate::crypto::{self, Key};
use crate::BcastError;

const LABEL_NODE: u8 = 1;
const LABEL_ALL: u8 = 2;

pub const MIN_HEIGHT: u8 = 1;
pub const MAX_HEIGHT: u8 = 16;

/// One SD subset: leaves below `i` but not below `j`, or the whole tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    /// Degenerate subset used when nothing is revoked.
    AllLeaves,
    Diff { i: u32, j: u32 },
}

impl Subset {
    /// Wire form: i-depth, j-depth, i-index, j-index (indices within their
    /// depth level). The all-leaves subset encodes as four zeros, which no
    /// real difference subset can produce.
    pub fn encode(&self) -> (u8, u8, u16, u16) {
        match self {
            Subset::AllLeaves => (0, 0, 0, 0),
            Subset::Diff { i, j } => {
                let (di, dj) = (depth(*i), depth(*j));
                (di, dj, (*i - (1 << di)) as u16, (*j - (1 << dj)) as u16)
            }
        }
    }

    pub fn decode(di: u8, dj: u8, ii: u16, jj: u16) -> Result<Self, BcastError> {
        if (di, dj, ii, jj) == (0, 0, 0, 0) {
            return Ok(Subset::AllLeaves);
        }
        if di > MAX_HEIGHT || dj > MAX_HEIGHT || dj <= di {
            return Err(BcastError::Malformed("subset descriptor out of range".into()));
        }
        let i = (1u32 << di) + u32::from(ii);
        let j = (1u32 << dj) + u32::from(jj);
        if ii >= (1 << di) || jj >= (1 << dj) || !is_strict_descendant(j, i) {
            return Err(BcastError::Malformed("subset descriptor not a tree edge".into()));
        }
        Ok(Subset::Diff { i, j })
    }

    /// Does this subset contain the given leaf node?
    pub fn contains(&self, leaf_node: u32) -> bool {
        match self {
            Subset::AllLeaves => true,
            Subset::Diff { i, j } => {
                is_descendant_or_self(leaf_node, *i) && !is_descendant_or_self(leaf_node, *j)
            }
        }
    }
}

pub fn depth(node: u32) -> u8 {
    debug_assert!(node >= 1);
    (31 - node.leading_zeros()) as u8
}

fn is_descendant_or_self(node: u32, ancestor: u32) -> bool {
    let (dn, da) = (depth(node), depth(ancestor));
    dn >= da && (node >> (dn - da)) == ancestor
}

fn is_strict_descendant(node: u32, ancestor: u32) -> bool {
    node != ancestor && is_descendant_or_self(node, ancestor)
}

/// Deterministic label tree over 2^height contact slots.
#[derive(Debug, Clone)]
pub struct SdSystem {
    height: u8,
    root_secret: Key,
}

impl SdSystem {
    pub fn new(height: u8, root_secret: Key) -> Result<Self, BcastError> {
        if !(MIN_HEIGHT..=MAX_HEIGHT).contains(&height) {
            return Err(BcastError::HeightOutOfRange(height));
        }
        Ok(Self { height, root_secret })
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn leaf_count(&self) -> u32 {
        1 << self.height
    }

    pub fn leaf_node(&self, leaf: u32) -> u32 {
        debug_assert!(leaf < self.leaf_count());
        (1 << self.height) + leaf
    }

    fn node_start_label(&self, node: u32) -> Key {
        crypto::derive_label(&self.root_secret, LABEL_NODE, node)
    }

    fn all_label(&self) -> Key {
        crypto::derive_label(&self.root_secret, LABEL_ALL, 0)
    }

    /// Label of node `j` within the GGM walk rooted at node `i`.
    fn subtree_label(&self, i: u32, j: u32) -> Key {
        walk_label(self.node_start_label(i), i, j)
    }

    /// Key a subset's ciphertext is encrypted under.
    pub fn subset_key(&self, subset: &Subset) -> Key {
        match subset {
            Subset::AllLeaves => crypto::expand_middle(&self.all_label()),
            Subset::Diff { i, j } => crypto::expand_middle(&self.subtree_label(*i, *j)),
        }
    }

    /// Key material handed to the holder of one leaf slot.
    pub fn key_material(&self, leaf: u32) -> UserKeyMaterial {
        let leaf_node = self.leaf_node(leaf);
        let mut entries = Vec::new();
        // every proper ancestor i of the leaf contributes the labels of the
        // siblings hanging off the path i -> leaf
        for anc_depth in 0..self.height {
            let i = leaf_node >> (self.height - anc_depth);
            let mut path_node = leaf_node;
            while path_node != i {
                let sibling = path_node ^ 1;
                entries.push(LabelEntry {
                    subtree_root: i,
                    hang_node: sibling,
                    label: self.subtree_label(i, sibling),
                });
                path_node >>= 1;
            }
        }
        UserKeyMaterial {
            height: self.height,
            leaf,
            entries,
            all_label: self.all_label(),
        }
    }
}

/// Continue the GGM walk from a known label at `from` down to `to`.
fn walk_label(mut label: Key, from: u32, to: u32) -> Key {
    let hops = depth(to) - depth(from);
    for step in (0..hops).rev() {
        let bit = (to >> step) & 1;
        label = if bit == 0 {
            crypto::expand_left(&label)
        } else {
            crypto::expand_right(&label)
        };
    }
    label
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelEntry {
    pub subtree_root: u32,
    pub hang_node: u32,
    pub label: Key,
}

/// A leaf's O(h^2) labels: enough to derive the key of every subset that
/// contains the leaf, and of none that excludes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserKeyMaterial {
    pub height: u8,
    pub leaf: u32,
    pub entries: Vec<LabelEntry>,
    pub all_label: Key,
}

impl UserKeyMaterial {
    pub fn leaf_node(&self) -> u32 {
        (1u32 << self.height) + self.leaf
    }

    /// Derive the key of a subset containing this leaf; `None` when the
    /// subset excludes the leaf (no usable label exists by construction).
    pub fn subset_key(&self, subset: &Subset) -> Option<Key> {
        match subset {
            Subset::AllLeaves => Some(crypto::expand_middle(&self.all_label)),
            Subset::Diff { i, j } => {
                if !subset.contains(self.leaf_node()) {
                    return None;
                }
                let entry = self.entries.iter().find(|e| {
                    e.subtree_root == *i && is_descendant_or_self(*j, e.hang_node)
                })?;
                let label = walk_label(entry.label, entry.hang_node, *j);
                Some(crypto::expand_middle(&label))
            }
        }
    }
}

/// Disjoint subsets covering exactly the non-revoked leaves.
///
/// Empty revocation yields the degenerate all-leaves subset; full
/// revocation yields an empty cover. Otherwise the standard reduction over
/// the revoked leaves' Steiner tree applies: every anchor (revoked leaf or
/// branching node) contributes at most one subset toward its nearest
/// anchor ancestor, so the cover never exceeds 2R-1 subsets.
pub fn compute_cover(sys: &SdSystem, revoked: &BTreeSet<u32>) -> Vec<Subset> {
    let n = sys.leaf_count();
    debug_assert!(revoked.iter().all(|&r| r < n));
    if revoked.is_empty() {
        return vec![Subset::AllLeaves];
    }
    if revoked.len() as u32 == n {
        return Vec::new();
    }

    let mut steiner: BTreeSet<u32> = BTreeSet::new();
    for &leaf in revoked {
        let mut node = sys.leaf_node(leaf);
        while node >= 1 {
            if !steiner.insert(node) {
                break;
            }
            if node == 1 {
                break;
            }
            node >>= 1;
        }
    }

    let is_anchor = |node: u32| -> bool {
        if depth(node) == sys.height {
            return true; // a revoked leaf
        }
        steiner.contains(&(node << 1)) && steiner.contains(&((node << 1) | 1))
    };

    let mut cover = Vec::new();
    for &b in steiner.iter().filter(|&&n| is_anchor(n)) {
        // nearest proper ancestor that is an anchor
        let mut a = b >> 1;
        while a >= 1 && !is_anchor(a) {
            a >>= 1;
        }
        if a >= 1 {
            // child of a on the path toward b
            let u = b >> (depth(b) - depth(a) - 1);
            if u != b {
                cover.push(Subset::Diff { i: u, j: b });
            }
        } else if b != 1 {
            // b is the top anchor below a bare chain from the root
            cover.push(Subset::Diff { i: 1, j: b });
        }
    }
    cover
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(height: u8) -> SdSystem {
        SdSystem::new(height, [42u8; 16]).unwrap()
    }

    #[test]
    fn height_bounds() {
        assert!(SdSystem::new(0, [0; 16]).is_err());
        assert!(SdSystem::new(17, [0; 16]).is_err());
        assert_eq!(sys(3).leaf_count(), 8);
        assert_eq!(sys(8).leaf_count(), 256);
    }

    #[test]
    fn deterministic_from_root_secret() {
        let a = SdSystem::new(4, [9; 16]).unwrap();
        let b = SdSystem::new(4, [9; 16]).unwrap();
        let sub = Subset::Diff { i: 2, j: 9 };
        assert_eq!(a.subset_key(&sub), b.subset_key(&sub));
        assert_eq!(a.key_material(3), b.key_material(3));
    }

    #[test]
    fn material_size_is_quadratic() {
        let s = sys(8);
        let m = s.key_material(0);
        assert_eq!(m.entries.len(), 8 * 9 / 2);
    }

    #[test]
    fn empty_revocation_covers_all_leaves() {
        let s = sys(3);
        let cover = compute_cover(&s, &BTreeSet::new());
        assert_eq!(cover, vec![Subset::AllLeaves]);
    }

    #[test]
    fn full_revocation_gives_empty_cover() {
        let s = sys(2);
        let all: BTreeSet<u32> = (0..4).collect();
        assert!(compute_cover(&s, &all).is_empty());
    }

    #[test]
    fn single_revocation_height3() {
        let s = sys(3);
        let cover = compute_cover(&s, &BTreeSet::from([3u32]));
        assert_eq!(cover.len(), 1);
        let covered: Vec<u32> = (0..8).filter(|&l| cover[0].contains(s.leaf_node(l))).collect();
        assert_eq!(covered, vec![0, 1, 2, 4, 5, 6, 7]);
    }

    #[test]
    fn holder_derives_only_containing_subsets() {
        let s = sys(3);
        let m = s.key_material(0);
        let containing = Subset::Diff { i: 2, j: 11 }; // leaf 0 under 2, not under 11
        let excluding = Subset::Diff { i: 2, j: 8 }; // excludes leaf 0 itself
        assert_eq!(m.subset_key(&containing), Some(s.subset_key(&containing)));
        assert_eq!(m.subset_key(&excluding), None);
    }

    #[test]
    fn descriptor_round_trip() {
        for sub in [
            Subset::AllLeaves,
            Subset::Diff { i: 1, j: 5 },
            Subset::Diff { i: 2, j: 9 },
        ] {
            let (a, b, c, d) = sub.encode();
            assert_eq!(Subset::decode(a, b, c, d).unwrap(), sub);
        }
        // j must be strictly below i
        assert!(Subset::decode(2, 2, 0, 1).is_err());
    }

    #[test]
    fn decode_rejects_non_descendant() {
        // i = node 2 (depth 1, index 0), j = node 7 (depth 2, index 3): 7 is
        // below node 3, not node 2
        assert!(Subset::decode(1, 2, 0, 3).is_err());
    }
}
