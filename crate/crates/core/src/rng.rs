//! Deterministic randomness.
//!
//! All randomness flows from a single 64-bit root seed. Per-task streams are
//! derived from `(root, tag, index...)`, so sampling loops can run in any
//! order (or in parallel) and still produce bit-identical results.

pub use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::scalar::Real;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a root seed and a tag path.
pub fn child_seed(root: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix(root);
    for &t in tags {
        s = splitmix(s ^ splitmix(t));
    }
    s
}

/// FNV-1a 64-bit hash; used for check tags and config digests.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hex digest of [`fnv64`].
pub fn fnv_hex(bytes: &[u8]) -> String {
    format!("{:016x}", fnv64(bytes))
}

/// Deterministic stream for `(root, tags...)`.
pub fn stream(root: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(root, tags))
}

/// Uniform in `[0, 1)` from the top 53 bits of `next_u64`; bit-stable.
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[-1, 1)`.
pub fn symmetric<R: Real>(rng: &mut impl RngCore) -> R {
    R::of(2.0 * unit_f64(rng) - 1.0)
}

/// Uniform over `[lo, hi)` in log scale; `lo, hi > 0`.
pub fn log_uniform<R: Real>(rng: &mut impl RngCore, lo: f64, hi: f64) -> R {
    let u = unit_f64(rng);
    R::of((lo.ln() + u * (hi.ln() - lo.ln())).exp())
}

/// A nonzero vector with coordinates uniform in `[-1, 1)`; resamples the rare
/// all-tiny draw so callers can normalize safely.
pub fn sample_vector<R: Real>(rng: &mut impl RngCore, dim: usize) -> Vec<R> {
    loop {
        let v: Vec<R> = (0..dim).map(|_| symmetric(rng)).collect();
        if v.iter().any(|c| c.abs() > R::of(1e-3)) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_seed_depends_on_path() {
        assert_ne!(child_seed(1, &[2, 3]), child_seed(1, &[3, 2]));
        assert_eq!(child_seed(7, &[1, 2]), child_seed(7, &[1, 2]));
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = stream(42, &[1]);
        let mut b = stream(42, &[1]);
        for _ in 0..32 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn unit_range() {
        let mut rng = stream(9, &[0]);
        for _ in 0..1000 {
            let u = unit_f64(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv_hex(b"a"), format!("{:016x}", fnv64(b"a")));
    }
}
