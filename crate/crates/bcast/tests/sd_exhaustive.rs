//! Exhaustive oracle over small trees: for every height up to 4 and every
//! possible revocation set, the cover must partition exactly the
//! non-revoked leaves within the size bound, every non-revoked leaf must
//! recover the session key, and every revoked leaf must fail.

use std::collections::BTreeSet;

use sani_bcast::mkb::{build_mkb, recover_session_key};
use sani_bcast::sd::{compute_cover, SdSystem};
use sani_bcast::BcastError;

#[test]
fn exhaustive_cover_partition_and_recovery() {
    let session_key = [0xA5u8; 16];
    for height in 1..=4u8 {
        let sys = SdSystem::new(height, [height; 16]).unwrap();
        let n = sys.leaf_count();
        let materials: Vec<_> = (0..n).map(|leaf| sys.key_material(leaf)).collect();

        for mask in 0u32..(1 << n) {
            let revoked: BTreeSet<u32> = (0..n).filter(|&l| mask & (1 << l) != 0).collect();
            let r = revoked.len();
            let cover = compute_cover(&sys, &revoked);

            // size bound: one subset when nothing is revoked, else 2R-1
            let bound = if r == 0 { 1 } else { 2 * r - 1 };
            assert!(
                cover.len() <= bound.max(1),
                "h={height} mask={mask:b}: cover {} > bound {bound}",
                cover.len()
            );

            // exact disjoint partition of the non-revoked leaves
            for leaf in 0..n {
                let node = sys.leaf_node(leaf);
                let containing = cover.iter().filter(|s| s.contains(node)).count();
                let expected = usize::from(!revoked.contains(&leaf));
                assert_eq!(
                    containing, expected,
                    "h={height} mask={mask:b} leaf={leaf}: covered by {containing} subsets"
                );
            }

            // recovery matches revocation exactly
            let mkb = build_mkb(&sys, &session_key, &revoked);
            for leaf in 0..n {
                match recover_session_key(&mkb, &materials[leaf as usize]) {
                    Ok(key) => {
                        assert!(!revoked.contains(&leaf), "h={height} mask={mask:b}: revoked leaf {leaf} recovered");
                        assert_eq!(key, session_key);
                    }
                    Err(BcastError::Revoked) => {
                        assert!(revoked.contains(&leaf), "h={height} mask={mask:b}: entitled leaf {leaf} failed");
                    }
                    Err(other) => panic!("unexpected error {other:?}"),
                }
            }
        }
    }
}

#[test]
fn measured_mean_cover_size_stays_reasonable() {
    // not asserting the literature's 1.38R average, only that random
    // revocation patterns stay well under the 2R-1 worst case
    let sys = SdSystem::new(8, [3u8; 16]).unwrap();
    let mut state = 0x12345678u64;
    let mut rand = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as u32
    };
    let mut total_cover = 0usize;
    let mut total_r = 0usize;
    for _ in 0..200 {
        let r = 1 + rand() % 200;
        let mut revoked = BTreeSet::new();
        while revoked.len() < r as usize {
            revoked.insert(rand() % 256);
        }
        let cover = compute_cover(&sys, &revoked);
        assert!(cover.len() < 2 * revoked.len());
        total_cover += cover.len();
        total_r += revoked.len();
    }
    let mean_ratio = total_cover as f64 / total_r as f64;
    assert!(mean_ratio < 2.0, "mean cover/R ratio {mean_ratio}");
}
