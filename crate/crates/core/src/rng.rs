//! Counter-based random streams.
//!
//! Every waveform draws from its own ChaCha8 stream keyed by the dataset seed
//! and a purpose salt, with the waveform index as the stream id. Any waveform
//! can be regenerated independently of the others, so generation order and
//! thread count never change the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Salt for the per-waveform data stream (bits, noise, channel).
pub const WAVEFORM_SALT: u64 = 0x4f46_444d_5741_5645;

/// Deterministic generator for `(seed, salt, index)`.
pub fn derived_rng(seed: u64, salt: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&salt.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
