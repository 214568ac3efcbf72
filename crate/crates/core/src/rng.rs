//! Counter-based random streams.
//!
//! Every unit of Monte Carlo work gets its own ChaCha8 stream, addressed by
//! the master seed and a 64-bit stream id built from logical indices. The
//! draws of a unit never depend on which thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const REP_BITS: u32 = 48;

/// Generator for stream `stream` under `master`.
pub fn child_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Stream id of replication `rep` in grid cell `(beta_idx, n_idx)`.
///
/// Panics if an index does not fit its bit field (8 / 8 / 48 bits).
pub fn cell_stream(beta_idx: usize, n_idx: usize, rep: usize) -> u64 {
    assert!(beta_idx < 256 && n_idx < 256, "grid index exceeds 8 bits");
    assert!((rep as u64) < (1 << REP_BITS), "replication index exceeds 48 bits");
    ((beta_idx as u64) << 56) | ((n_idx as u64) << REP_BITS) | rep as u64
}
