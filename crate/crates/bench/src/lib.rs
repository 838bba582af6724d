//! Shared fixtures for the benchmarks.

use ptpolar_core::{rm_construct, BitVector, CodeSpec, PreTransform};

/// The RM(32,16) code used by the reproduction tables.
pub fn rm_32_16() -> CodeSpec {
    rm_construct(5, 16).expect("RM(32,16) is a valid code")
}

/// The two-row design `T_{8,17}, T_{8,18}` on RM(32,16).
pub fn designed_transform() -> PreTransform {
    PreTransform::custom(32, [(8, 17), (8, 18)]).expect("entries are above the diagonal")
}

/// A deterministic dense input of length `2^n` for the transform benchmarks.
pub fn pattern(n: u32) -> BitVector {
    let len = 1usize << n;
    BitVector::from_bits(
        &(0..len)
            .map(|i| (i * 7 + i / 3) % 5 < 2)
            .collect::<Vec<_>>(),
    )
}
