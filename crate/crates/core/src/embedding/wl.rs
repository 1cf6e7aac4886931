//! Hash backend: keys are a stable digest of the star's canonical triple.
//!
//! Stars admit a trivial canonical form (center label, anchor label, sorted
//! leaf labels), so one refinement round of label hashing is already a
//! complete invariant: isomorphic stars always collide, non-isomorphic
//! stars collide only if the digest does.

use sha2::{Digest, Sha256};

use crate::feature::AnchoredStar;

use super::{BackendTag, EmbeddingKey};

/// Key for a star under the canonical-form hash backend.
pub fn wl_hash_key(star: &AnchoredStar) -> EmbeddingKey {
    let mut hasher = Sha256::new();
    hasher.update(star.center_label.0.to_le_bytes());
    hasher.update(star.anchor_label.0.to_le_bytes());
    hasher.update((star.leaf_labels.len() as u64).to_le_bytes());
    for leaf in &star.leaf_labels {
        hasher.update(leaf.0.to_le_bytes());
    }
    let out = hasher.finalize();
    let components = (0..3)
        .map(|i| i64::from_le_bytes(out[i * 8..(i + 1) * 8].try_into().unwrap()))
        .collect();
    EmbeddingKey { components, backend: BackendTag::Wl, model_digest: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;

    #[test]
    fn leaf_permutations_collide() {
        let a = AnchoredStar::new(Label(3), Label(1), vec![Label(0), Label(2), Label(0)]);
        let b = AnchoredStar::new(Label(3), Label(1), vec![Label(2), Label(0), Label(0)]);
        assert_eq!(wl_hash_key(&a), wl_hash_key(&b));
    }

    #[test]
    fn bare_edges_with_equal_labels_collide() {
        let a = AnchoredStar::new(Label(1), Label(4), vec![]);
        let b = AnchoredStar::new(Label(1), Label(4), vec![]);
        assert_eq!(wl_hash_key(&a), wl_hash_key(&b));
    }

    #[test]
    fn all_small_stars_have_distinct_keys() {
        // Exhaustive: every star with <= 4 leaves over 3 labels. Distinct
        // canonical triples must give distinct keys.
        let mut stars = Vec::new();
        for center in 0..3u32 {
            for anchor in 0..3u32 {
                let mut stack: Vec<Vec<Label>> = vec![vec![]];
                while let Some(leaves) = stack.pop() {
                    stars.push(AnchoredStar::new(Label(center), Label(anchor), leaves.clone()));
                    if leaves.len() < 4 {
                        let start = leaves.last().map_or(0, |l| l.0);
                        for next in start..3 {
                            let mut more = leaves.clone();
                            more.push(Label(next));
                            stack.push(more);
                        }
                    }
                }
            }
        }
        for (i, a) in stars.iter().enumerate() {
            for b in &stars[i + 1..] {
                assert_ne!(wl_hash_key(a), wl_hash_key(b), "{a:?} vs {b:?}");
            }
        }
    }
}
