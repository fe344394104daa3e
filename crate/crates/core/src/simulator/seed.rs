use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sub-stream identifiers for seed fan-out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum SeedLabel {
    Intensity = 1,
    Photons = 2,
    BeamSplitter = 3,
    DetectorStart = 4,
    DetectorStop = 5,
}

/// Derives an independent component seed from a master seed.
///
/// The label is mixed into the master seed with the SplitMix64 finalizer,
/// so distinct labels give decorrelated ChaCha keys.
pub fn derive_seed(master: u64, label: SeedLabel) -> u64 {
    splitmix64(master ^ splitmix64(label as u64))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
