//! Shared fixtures for the criterion benchmarks.

use subvec::embed::EmbeddingSpace;
use subvec::synth::planted_space;

/// Vocabulary size used by the scan benchmarks; large enough that the
/// parallel scans dominate setup cost.
pub const VOCAB: usize = 20_000;

/// Embedding width matching the pretrained files the library targets.
pub const DIM: usize = 300;

/// A planted space: rows 0..99 share a direction (so roots over them are
/// valid and queries have signal), the rest is uniform noise.
pub fn bench_space() -> EmbeddingSpace {
    planted_space(100, VOCAB - 100, DIM, 0xBE_5C41E)
}
