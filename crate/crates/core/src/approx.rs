//! Approximate reporting with a fixed accuracy parameter.
//!
//! The index is the exact one built at threshold `z = 1/ε`. A query fixes
//! its own threshold `z′` and returns every position whose block frequency
//! at the pattern's locus reaches `⌊z/z′⌋`. The answer contains every
//! position with occurrence probability at least `1/z′` and nothing below
//! `1/z′ − ε`; queries with `1/z′` below the accuracy are trivially the
//! whole position set.

use crate::error::{Error, Result};
use crate::index::{QueryContext, WeightedIndex};
use crate::prob::CMP_SLACK;
use crate::seq::{Threshold, WeightedSequence};

pub struct ApproxIndex {
    wi: WeightedIndex,
    eps: f64,
}

impl ApproxIndex {
    /// Builds the index for accuracy `eps` over `x`, with internal
    /// threshold `1/eps`.
    pub fn build(x: &WeightedSequence, eps: f64) -> Result<ApproxIndex> {
        if !(eps > 0.0 && eps <= 1.0) || !eps.is_finite() {
            return Err(Error::validation(format!(
                "accuracy must lie in (0, 1], got {eps}"
            )));
        }
        let z = Threshold::new(1.0 / eps)?;
        let wi = WeightedIndex::build(x, z)?;
        Ok(ApproxIndex { wi, eps })
    }

    /// Wraps an index over an already constructed family, for sampled
    /// constructions sharing the query path.
    pub fn from_family(
        alphabet: crate::alphabet::Alphabet,
        fam: &crate::zest::ZEstimation,
        eps: f64,
    ) -> Result<ApproxIndex> {
        if !(eps > 0.0 && eps <= 1.0) || !eps.is_finite() {
            return Err(Error::validation(format!(
                "accuracy must lie in (0, 1], got {eps}"
            )));
        }
        let wi = WeightedIndex::from_family(alphabet, fam, 1.0 / eps)?;
        Ok(ApproxIndex { wi, eps })
    }

    pub(crate) fn from_parts(wi: WeightedIndex, eps: f64) -> ApproxIndex {
        ApproxIndex { wi, eps }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Length of the indexed weighted sequence.
    pub fn len(&self) -> usize {
        self.wi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wi.is_empty()
    }

    pub fn alphabet(&self) -> &crate::alphabet::Alphabet {
        self.wi.alphabet()
    }

    pub fn blocks(&self) -> usize {
        self.wi.blocks()
    }

    pub fn query_context(&self) -> QueryContext {
        self.wi.query_context()
    }

    /// Sorted positions reported for `pattern` at query threshold
    /// `zprime`: a superset of the positions with probability ≥ 1/zprime
    /// and a subset of those with probability ≥ 1/zprime − ε.
    pub fn report(
        &self,
        pattern: &[u8],
        zprime: f64,
        ctx: &mut QueryContext,
    ) -> Result<Vec<usize>> {
        if !zprime.is_finite() || zprime < 1.0 {
            return Err(Error::validation(format!(
                "query threshold must be ≥ 1, got {zprime}"
            )));
        }
        if 1.0 / zprime < self.eps {
            return Ok((1..=self.wi.len()).collect());
        }
        let ell = (self.wi.z() / zprime + CMP_SLACK).floor() as u32;
        debug_assert!(ell >= 1);
        Ok(self.wi.report_frequent(pattern, ell, ctx))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        crate::index::encode(
            self.wi.alphabet(),
            self.wi.len(),
            self.wi.blocks(),
            self.wi.z(),
            self.eps,
            true,
            self.wi.pst(),
        )
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ApproxIndex> {
        match crate::index::load_index(bytes)? {
            crate::index::LoadedIndex::Approximate(a) => Ok(a),
            crate::index::LoadedIndex::Exact(_) => {
                Err(Error::format("index is exact; load it as such"))
            }
        }
    }
}
