//! Per-session random streams derived from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SessionRng = ChaCha8Rng;

/// Independent stream for `session`: the master seed keys the generator and
/// the session index selects a disjoint stream of it.
pub fn session_rng(master_seed: u64, session: u64) -> SessionRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(session);
    rng
}
