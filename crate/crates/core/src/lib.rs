//! Pre-transformed polar and Reed-Muller codes.
//!
//! Codes are `X = U · T · H_N` with `H_N = F^{⊗n}` and `T` unit-diagonal upper
//! triangular. The crate builds information sets ([`code`]), pre-transforms
//! ([`pretransform`]), exact weight spectra by exhaustive enumeration ([`spectrum`]),
//! and designs of `T` that reduce the number of minimum-weight codewords without
//! lowering the minimum distance ([`design`]).
//!
//! All row and column indices exposed by the API are 1-based.

pub mod bitlinalg;
pub mod code;
pub mod design;
mod error;
pub mod pretransform;
pub mod spectrum;

pub use bitlinalg::{kronecker_power, row_support, BitVector, GeneratorMatrix};
pub use code::{polar_construct, rm_construct, CodeSpec, Family};
pub use design::{
    combination_support, count_pattern, theorem2_design, theorem3_search, Combination,
    DesignMethod, DesignResult, PatternCount, SearchOptions,
};
pub use error::{Error, Result};
pub use pretransform::{encode, ParityEquation, PreTransform, TransformKind};
pub use spectrum::{
    enumerate_spectrum, min_weight_codebook, verify_dmin_preserved, DminReport, EnumerationOptions,
    MinWeightCodebook, WeightSpectrum,
};
