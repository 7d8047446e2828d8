//! Sequence-reconstruction codes for single-edit channels.
//!
//! A word is sent once and read back `N` times, each read passing through an
//! error ball `B`. A code is an `(n, N; B)`-reconstruction code when no two
//! codewords share `N` or more reads. This crate builds the error balls,
//! characterizes when two words share many reads, constructs and checks the
//! code families that exploit this, searches exact optima at tiny lengths, and
//! simulates a multi-read decoder over a probabilistic edit channel.

pub mod analysis;
pub mod balls;
pub mod channel;
pub mod codebooks;
pub mod confusability;
pub mod decoder;
pub mod error;
pub mod sim;
pub mod words;

pub use analysis::{
    optimal_code_size, read_coverage, verify_reconstruction, CoverageMethod, CoverageReport,
    OptimalSearchResult, Verification,
};
pub use balls::{ball, intersection_size, levenshtein_radius, BallKind};
pub use channel::{generate_reads, transmit, ChannelParams, ReadSet};
pub use codebooks::{Codebook, CodebookSpec, Family};
pub use confusability::{predicted_intersection, type_a_confusable, type_b_confusable, Verdict};
pub use decoder::{candidate_list, decode, DecodeOutcome, DecodeResult};
pub use error::{Error, Result};
pub use sim::{run_simulation, SimConfig, SimReport, SimRow};
pub use words::{hamming_distance, inversions, Word};
