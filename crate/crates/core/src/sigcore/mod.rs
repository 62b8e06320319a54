//! Truncated signatures of piecewise-linear paths.
//!
//! A signature truncated at level `n` of a `d`-dimensional path is stored as
//! `n` contiguous blocks, block `k` holding the `d^k` iterated integrals of
//! order `k` in lexicographic multi-index order. The zeroth term is always 1
//! and is never stored.

mod bruteforce;
mod path;
mod signature;

pub use bruteforce::signature_bruteforce;
pub use path::DiscretePath;
pub use signature::{
    chen_concat, levy_area, path_signature, segment_signature, signature_dimension,
    TruncatedSignature,
};
pub(crate) use signature::{signature_into, Scratch};
