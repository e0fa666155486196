//! Keyed random streams.
//!
//! Every consumer asks for a stream by `(seed, stream_id)`. Streams with the
//! same seed and different ids are disjoint ChaCha20 substreams, so parallel
//! replicas are reproducible regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// A deterministic random stream identified by a seed and a stream id.
pub type RngStream = ChaCha20Rng;

/// Opens stream `stream_id` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream_id: u64) -> RngStream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
