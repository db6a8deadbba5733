//! Index answering pattern queries against a weighted sequence.
//!
//! The `⌊z⌋` family strings are concatenated, their property bounds shifted
//! into concatenation coordinates, and a property suffix tree is built over
//! the result. A pattern's occurrence positions in the original sequence
//! are then the distinct per-block images of the terminal entries below its
//! locus: membership is a tree descent, counting reads a precomputed
//! distinct-position count, and reporting scans the locus range with an
//! epoch-marked seen set so duplicates across blocks collapse.

use std::collections::HashSet;

use crate::alphabet::Alphabet;
use crate::approx::ApproxIndex;
use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::property::PropertyArray;
use crate::pst::PropertySuffixTree;
use crate::seq::{Threshold, WeightedSequence};
use crate::zest::{build_z_estimation, ZEstimation};

const MAGIC: &[u8; 4] = b"WIX1";
const VERSION: u32 = 1;
const FLAG_APPROXIMATE: u32 = 1;

/// Reusable scratch for reporting queries: an epoch-stamped seen set plus
/// per-position counters. Create one per thread of queries; never share.
#[derive(Debug, Clone)]
pub struct QueryContext {
    epoch: u64,
    marks: Vec<u64>,
    counts: Vec<u32>,
}

impl QueryContext {
    pub fn new(n: usize) -> QueryContext {
        QueryContext {
            epoch: 0,
            marks: vec![0; n + 1],
            counts: vec![0; n + 1],
        }
    }

    fn begin(&mut self, n: usize) {
        if self.marks.len() < n + 1 {
            self.marks.resize(n + 1, 0);
            self.counts.resize(n + 1, 0);
        }
        self.epoch += 1;
    }

    /// Returns how many times `pos` has been seen this query, marking it.
    fn bump(&mut self, pos: usize) -> u32 {
        if self.marks[pos] != self.epoch {
            self.marks[pos] = self.epoch;
            self.counts[pos] = 0;
        }
        self.counts[pos] += 1;
        self.counts[pos]
    }
}

pub struct WeightedIndex {
    alphabet: Alphabet,
    n: usize,
    k: usize,
    z: f64,
    pst: PropertySuffixTree,
    /// Original position for each flattened terminal entry.
    docs: Vec<u32>,
    /// Distinct original positions below each node.
    distinct: Vec<u32>,
}

impl WeightedIndex {
    /// Builds the exact index: an estimation family for `z`, concatenated
    /// and indexed.
    pub fn build(x: &WeightedSequence, z: Threshold) -> Result<WeightedIndex> {
        let fam = build_z_estimation(x, z);
        WeightedIndex::from_family(x.alphabet().clone(), &fam, z.z())
    }

    /// Builds the index over an already constructed family (estimation or
    /// sampled), with `z` recorded as the query threshold.
    pub fn from_family(alphabet: Alphabet, fam: &ZEstimation, z: f64) -> Result<WeightedIndex> {
        let n = fam.len();
        let k = fam.size();
        if k == 0 {
            return Err(Error::validation("family has no strings"));
        }
        let mut concat = Vec::with_capacity(k * n);
        let mut ends = Vec::with_capacity(k * n);
        for (j, (s, pi)) in fam.strings().iter().zip(fam.props()).enumerate() {
            let base = j * n;
            concat.extend_from_slice(s);
            for i in 1..=n {
                ends.push((base + pi.end(i)).min(base + n));
            }
        }
        let pi = PropertyArray::new(ends, k * n)?;
        let pst = PropertySuffixTree::build(&concat, &pi, alphabet.size())?;
        Ok(Self::assemble(alphabet, n, k, z, pst))
    }

    fn assemble(
        alphabet: Alphabet,
        n: usize,
        k: usize,
        z: f64,
        pst: PropertySuffixTree,
    ) -> WeightedIndex {
        let docs: Vec<u32> = pst
            .entries()
            .iter()
            .map(|&p| ((p as usize - 1) % n + 1) as u32)
            .collect();

        // Distinct originals per subtree, merged small-to-large upward.
        // Children precede parents in reverse id order, so one sweep works.
        let node_count = pst.node_count();
        let mut sets: Vec<Option<HashSet<u32>>> = (0..node_count).map(|_| None).collect();
        let mut distinct = vec![0u32; node_count];
        for v in (0..node_count as u32).rev() {
            let mut acc: Option<HashSet<u32>> = None;
            for c in pst.children(v) {
                let child = sets[c as usize].take().expect("child set missing");
                acc = Some(match acc {
                    None => child,
                    Some(mut a) => {
                        let mut b = child;
                        if a.len() < b.len() {
                            std::mem::swap(&mut a, &mut b);
                        }
                        a.extend(b);
                        a
                    }
                });
            }
            let mut acc = acc.unwrap_or_default();
            let (lo, _) = pst.entry_range(v);
            for idx in lo..lo + pst.own_entries(v).len() {
                acc.insert(docs[idx]);
            }
            distinct[v as usize] = acc.len() as u32;
            sets[v as usize] = Some(acc);
        }
        debug_assert_eq!(distinct[0] as usize, n);

        WeightedIndex {
            alphabet,
            n,
            k,
            z,
            pst,
            docs,
            distinct,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Length of the indexed weighted sequence.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of concatenated family strings.
    pub fn blocks(&self) -> usize {
        self.k
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub(crate) fn pst(&self) -> &PropertySuffixTree {
        &self.pst
    }

    pub fn query_context(&self) -> QueryContext {
        QueryContext::new(self.n)
    }

    /// Whether the pattern occurs anywhere with probability ≥ 1/z.
    pub fn decide(&self, pattern: &[u8]) -> bool {
        self.pst.locate(pattern).is_some()
    }

    /// Number of distinct positions where the pattern occurs with
    /// probability ≥ 1/z.
    pub fn count(&self, pattern: &[u8]) -> usize {
        self.pst
            .locate(pattern)
            .map_or(0, |v| self.distinct[v as usize] as usize)
    }

    /// Sorted positions where the pattern occurs with probability ≥ 1/z.
    pub fn report(&self, pattern: &[u8], ctx: &mut QueryContext) -> Vec<usize> {
        let Some(v) = self.pst.locate(pattern) else {
            return Vec::new();
        };
        ctx.begin(self.n);
        let (lo, hi) = self.pst.entry_range(v);
        let mut out = Vec::new();
        for idx in lo..hi {
            let pos = self.docs[idx] as usize;
            if ctx.bump(pos) == 1 {
                out.push(pos);
            }
        }
        out.sort_unstable();
        out
    }

    /// Positions whose per-block occurrence frequency in the locus range is
    /// at least `threshold`, sorted.
    pub(crate) fn report_frequent(
        &self,
        pattern: &[u8],
        threshold: u32,
        ctx: &mut QueryContext,
    ) -> Vec<usize> {
        let Some(v) = self.pst.locate(pattern) else {
            return Vec::new();
        };
        ctx.begin(self.n);
        let (lo, hi) = self.pst.entry_range(v);
        let mut out = Vec::new();
        for idx in lo..hi {
            let pos = self.docs[idx] as usize;
            if ctx.bump(pos) == threshold {
                out.push(pos);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode(
            &self.alphabet,
            self.n,
            self.k,
            self.z,
            0.0,
            false,
            &self.pst,
        )
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<WeightedIndex> {
        match load_index(bytes)? {
            LoadedIndex::Exact(wi) => Ok(wi),
            LoadedIndex::Approximate(_) => {
                Err(Error::format("index is approximate; load it as such"))
            }
        }
    }
}

/// A deserialized index file of either kind.
pub enum LoadedIndex {
    Exact(WeightedIndex),
    Approximate(ApproxIndex),
}

pub(crate) fn encode(
    alphabet: &Alphabet,
    n: usize,
    k: usize,
    z: f64,
    eps: f64,
    approximate: bool,
    pst: &PropertySuffixTree,
) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let flags = if approximate { FLAG_APPROXIMATE } else { 0 };
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(k as u64).to_le_bytes());
    out.extend_from_slice(&z.to_le_bytes());
    out.extend_from_slice(&eps.to_le_bytes());
    let letters = alphabet.letters();
    out.extend_from_slice(&(letters.len() as u32).to_le_bytes());
    out.extend_from_slice(letters);
    let blob = pst.to_bytes();
    out.extend_from_slice(&(blob.len() as u64).to_le_bytes());
    out.extend_from_slice(&blob);
    out
}

/// Parses a `WIX1` file into whichever index kind it holds.
pub fn load_index(bytes: &[u8]) -> Result<LoadedIndex> {
    let need = |at: usize, len: usize| -> Result<&[u8]> {
        bytes
            .get(at..at + len)
            .ok_or_else(|| Error::format("truncated input"))
    };
    if need(0, 4)? != MAGIC {
        return Err(Error::format("bad magic"));
    }
    let u32_at = |at: usize| -> Result<u32> {
        Ok(u32::from_le_bytes(need(at, 4)?.try_into().unwrap()))
    };
    let u64_at = |at: usize| -> Result<u64> {
        Ok(u64::from_le_bytes(need(at, 8)?.try_into().unwrap()))
    };
    if u32_at(4)? != VERSION {
        return Err(Error::format("unsupported version"));
    }
    let flags = u32_at(8)?;
    if flags & !FLAG_APPROXIMATE != 0 {
        return Err(Error::format("unknown flags"));
    }
    let n = u64_at(12)? as usize;
    let k = u64_at(20)? as usize;
    let z = f64::from_le_bytes(need(28, 8)?.try_into().unwrap());
    let eps = f64::from_le_bytes(need(36, 8)?.try_into().unwrap());
    let alpha_len = u32_at(44)? as usize;
    let letters = need(48, alpha_len)?;
    let alphabet = Alphabet::new(letters)?;
    let mut at = 48 + alpha_len;
    let blob_len = u64_at(at)? as usize;
    at += 8;
    let blob = need(at, blob_len)?;
    at += blob_len;
    if at != bytes.len() {
        return Err(Error::format("trailing bytes"));
    }

    if n == 0 || k == 0 {
        return Err(Error::format("empty index dimensions"));
    }
    if !z.is_finite() || z < 1.0 {
        return Err(Error::format("threshold out of range"));
    }
    let approximate = flags & FLAG_APPROXIMATE != 0;
    if approximate {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::format("accuracy out of range"));
        }
    } else if eps != 0.0 {
        return Err(Error::format("unexpected accuracy field"));
    }
    let pst = PropertySuffixTree::from_bytes(blob)?;
    if pst.sigma() != alphabet.size() {
        return Err(Error::format("alphabet size mismatch"));
    }
    if pst.text().len() != n * k {
        return Err(Error::format("text length mismatch"));
    }
    let wi = WeightedIndex::assemble(alphabet, n, k, z, pst);
    if approximate {
        Ok(LoadedIndex::Approximate(ApproxIndex::from_parts(wi, eps)))
    } else {
        Ok(LoadedIndex::Exact(wi))
    }
}

/// A weighted sequence in which every position admits at most one letter,
/// with probabilities that need not sum to one. Concatenating a family's
/// blocks with zero-probability separators yields one whose in-block solid
/// factors are exactly those of the original sequence.
pub struct SpecialWeightedSequence {
    alphabet: Alphabet,
    n: usize,
    k: usize,
    /// Letter per position; separators hold `None`.
    letters: Vec<Option<u8>>,
    /// log2 probability of the position's letter; −∞ at separators.
    log2: Vec<f64>,
}

impl SpecialWeightedSequence {
    /// Concatenates the family's strings, letter probabilities taken from
    /// `x`, with one zero-probability position between adjacent blocks.
    pub fn new(x: &WeightedSequence, fam: &ZEstimation) -> Result<SpecialWeightedSequence> {
        let n = x.len();
        if fam.len() != n {
            return Err(Error::validation("family length mismatch"));
        }
        let k = fam.size();
        if k == 0 {
            return Err(Error::validation("family has no strings"));
        }
        let mut letters = Vec::with_capacity(k * n + k - 1);
        let mut log2 = Vec::with_capacity(k * n + k - 1);
        for (j, s) in fam.strings().iter().enumerate() {
            if j > 0 {
                letters.push(None);
                log2.push(f64::NEG_INFINITY);
            }
            for (i, &c) in s.iter().enumerate() {
                letters.push(Some(c));
                log2.push(x.log2_prob(i + 1, c));
            }
        }
        Ok(SpecialWeightedSequence {
            alphabet: x.alphabet().clone(),
            n,
            k,
            letters,
            log2,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of concatenated blocks.
    pub fn blocks(&self) -> usize {
        self.k
    }

    /// Total length, `⌊z⌋·n + ⌊z⌋ − 1`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letter admitted at 1-based position `p`, if any.
    pub fn letter(&self, p: usize) -> Option<u8> {
        self.letters[p - 1]
    }

    /// Maps a 1-based position to `(block, original position)`, or `None`
    /// for separators.
    pub fn block_position(&self, p: usize) -> Option<(usize, usize)> {
        let span = self.n + 1;
        let j = (p - 1) / span;
        let off = (p - 1) % span;
        (off < self.n).then_some((j, off + 1))
    }

    /// Occurrence probability of `pattern` at 1-based position `p`.
    pub fn match_probability(&self, pattern: &[u8], p: usize) -> Result<Prob> {
        let m = pattern.len();
        if p < 1 || p + m > self.len() + 1 {
            return Err(Error::WindowOutOfRange {
                start: p,
                end: p + m,
                len: self.len(),
            });
        }
        let mut log2 = 0.0f64;
        for (t, &c) in pattern.iter().enumerate() {
            let at = p - 1 + t;
            if self.letters[at] != Some(c) {
                return Ok(Prob::ZERO);
            }
            log2 += self.log2[at];
        }
        Ok(Prob::from_log2(log2))
    }

    /// All 1-based positions where `pattern` occurs with probability
    /// ≥ 1/z, by direct scan.
    pub fn occurrences(&self, z: Threshold, pattern: &[u8]) -> Vec<usize> {
        let m = pattern.len();
        if m > self.len() {
            return Vec::new();
        }
        (1..=self.len() - m + 1)
            .filter(|&p| {
                self.match_probability(pattern, p)
                    .map(|q| q.meets(z.z()))
                    .unwrap_or(false)
            })
            .collect()
    }

    /// Distinct original positions of the in-block occurrences of
    /// `pattern`, sorted.
    pub fn original_occurrences(&self, z: Threshold, pattern: &[u8]) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .occurrences(z, pattern)
            .iter()
            .filter_map(|&p| self.block_position(p).map(|(_, i)| i))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
