//! Shared inputs for the benchmarks.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eigentransfer::spectral::TruncatedCompactOperator;

/// An n×n operator whose row i is divisible by p^i, entries mod p^prec.
pub fn random_operator(p: u64, n: usize, prec: u32, seed: u64) -> TruncatedCompactOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|i| (0..n).map(|_| BigInt::from(rng.gen_range(0..1000i64)) * BigInt::from(p).pow(i as u32)).collect())
        .collect();
    TruncatedCompactOperator::new(p, prec, rows, (0..n as i64).collect(), None).expect("valid operator")
}
