//! Deterministic uniform streams, one per subpopulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Source of uniform reals in `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

impl<T: UniformSource + ?Sized> UniformSource for &mut T {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

/// Seeded ChaCha8 stream. Identical seeds give identical sequences.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for subpopulation `subpop_id` of a run seeded with `base_seed`.
    pub fn for_subpopulation(base_seed: u64, subpop_id: usize) -> Self {
        RngStream::new(subpop_seed(base_seed, subpop_id))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl UniformSource for RngStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn subpop_seed(base_seed: u64, subpop_id: usize) -> u64 {
    mix64(mix64(base_seed) ^ (subpop_id as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Always returns the same value. Handy for exercising the update rule's edge cases.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSource(pub f64);

impl UniformSource for ConstantSource {
    fn next_uniform(&mut self) -> f64 {
        self.0
    }
}

/// Wraps a source and records every draw.
#[derive(Debug, Clone)]
pub struct Recorder<S> {
    pub inner: S,
    pub tape: Vec<f64>,
}

impl<S: UniformSource> Recorder<S> {
    pub fn new(inner: S) -> Self {
        Recorder {
            inner,
            tape: Vec::new(),
        }
    }
}

impl<S: UniformSource> UniformSource for Recorder<S> {
    fn next_uniform(&mut self) -> f64 {
        let v = self.inner.next_uniform();
        self.tape.push(v);
        v
    }
}

/// Replays a recorded tape. Panics when the tape runs out.
#[derive(Debug, Clone)]
pub struct Tape {
    values: Vec<f64>,
    pos: usize,
}

impl Tape {
    pub fn new(values: Vec<f64>) -> Self {
        Tape { values, pos: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.values.len() - self.pos
    }
}

impl UniformSource for Tape {
    fn next_uniform(&mut self) -> f64 {
        let v = self.values[self.pos];
        self.pos += 1;
        v
    }
}
