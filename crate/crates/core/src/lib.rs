//! Indexing and pattern matching over weighted (uncertain) sequences.
//!
//! A weighted sequence assigns every position a probability distribution
//! over an alphabet instead of a single letter. A pattern `P` *occurs* at
//! position `i` with threshold `1/z` when the product of the per-position
//! letter probabilities along the window is at least `1/z`.
//!
//! The crate answers occurrence queries through an estimation family: a set
//! of `⌊z⌋` ordinary strings, each paired with a property array that limits
//! how far a match may extend from every position. Counting the family
//! strings that match `P` at `i` within their property bounds recovers
//! `⌊z · probability⌋` exactly, so decision, counting, and reporting reduce
//! to plain string matching with properties.
//!
//! The main entry points:
//!
//! * [`WeightedSequence`] with [`parse_weighted_sequence`]: the probability
//!   model and its text format.
//! * [`build_z_estimation`]: the family of `⌊z⌋` strings plus properties.
//! * [`SuffixTree`] and [`PropertySuffixTree`]: suffix structures over
//!   plain strings, the latter restricted by a property array.
//! * [`WeightedIndex`]: the queryable index over a weighted sequence,
//!   with binary (de)serialization.
//! * [`ApproxIndex`]: a smaller index that trades a one-sided probability
//!   slack `eps` for size, queried with a per-query threshold.
//! * [`randomized`]: Monte Carlo family construction by sampling.
//! * [`oracle`]: brute-force reference implementations used as ground
//!   truth in tests and by the `verify` command.

pub mod alphabet;
pub mod approx;
pub mod error;
pub mod index;
pub mod oracle;
pub mod prob;
pub mod property;
pub mod pst;
pub mod randomized;
pub mod seq;
pub mod suffix_tree;
pub mod zest;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use alphabet::Alphabet;
pub use approx::ApproxIndex;
pub use error::{Error, Result};
pub use index::{
    load_index, LoadedIndex, QueryContext, SpecialWeightedSequence, WeightedIndex,
};
pub use prob::Prob;
pub use property::PropertyArray;
pub use pst::{PropertySuffixTree, PstStats};
pub use randomized::{
    build_randomized_approx_family, build_randomized_approx_index, build_randomized_family,
    build_randomized_index, random_weighted_sequence, sample_string, RandomizedConfig,
    SampledFamily, SampleMode,
};
pub use seq::{
    factor_counts, match_probability, parse_weighted_sequence, parse_weighted_sequence_with,
    ParseOptions, Threshold, WeightedSequence,
};
pub use suffix_tree::SuffixTree;
pub use zest::{
    build_z_estimation, build_z_estimation_with_stats, verify_z_estimation, BuildStats,
    EstimationBuilder, ZEstimation,
};
