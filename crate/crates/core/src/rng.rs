//! Seeded randomness and counter-mode seed derivation.

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed `index` of `master` within the namespace `label`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

/// Uniform random `k`-subset of `items`, in random order.
pub fn sample_k<T: Copy>(items: &[T], k: usize, r: &mut Rng) -> Vec<T> {
    let k = k.min(items.len());
    rand::seq::index::sample(r, items.len(), k).into_iter().map(|i| items[i]).collect()
}

pub fn shuffled<T: Copy>(items: &[T], r: &mut Rng) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(r);
    v
}

/// Independent Bernoulli(p) subset, order preserved.
pub fn bernoulli_subset(items: &[usize], p: f64, r: &mut Rng) -> Vec<usize> {
    items.iter().copied().filter(|_| r.gen::<f64>() < p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_and_repeat() {
        assert_eq!(derive_seed(7, "a", 3), derive_seed(7, "a", 3));
        assert_ne!(derive_seed(7, "a", 3), derive_seed(7, "a", 4));
        assert_ne!(derive_seed(7, "a", 3), derive_seed(7, "b", 3));
    }

    #[test]
    fn sample_k_is_subset() {
        let mut r = rng(1);
        let s = sample_k(&[1, 2, 3, 4, 5], 3, &mut r);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| (1..=5).contains(x)));
    }
}
