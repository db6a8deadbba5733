//! The weighted sequence model and its text format.
//!
//! A file holds one sequence:
//!
//! ```text
//! WSEQ <n> <alphabet>
//! <letter>:<prob> [<letter>:<prob> ...]     # one line per position
//! ```
//!
//! Probabilities are decimal with at most 12 significant digits; letters
//! omitted from a line have probability zero. Full-line comments start with
//! `#`, blank lines are skipped. Each line's probabilities must sum to one
//! within `1e-6` unless renormalization is requested.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::prob::{Prob, CMP_SLACK, SUM_TOLERANCE};

/// A sequence of per-position probability distributions over an alphabet.
///
/// Positions are 1-based throughout the public API.
#[derive(Debug, Clone)]
pub struct WeightedSequence {
    alphabet: Alphabet,
    n: usize,
    // Row-major n * sigma, linear and log2 domain.
    linear: Vec<f64>,
    log2: Vec<f64>,
}

impl WeightedSequence {
    /// Builds a sequence from row-major linear probabilities
    /// (`rows[i][rank]`).
    pub fn from_rows(alphabet: Alphabet, rows: &[Vec<f64>]) -> Result<WeightedSequence> {
        let sigma = alphabet.size();
        let mut linear = Vec::with_capacity(rows.len() * sigma);
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != sigma {
                return Err(Error::validation(format!(
                    "position {} has {} probabilities for alphabet of size {sigma}",
                    idx + 1,
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0 + CMP_SLACK).contains(&p) {
                    return Err(Error::validation(format!(
                        "probability {p} at position {} out of range",
                        idx + 1
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::validation(format!(
                    "probabilities at position {} sum to {sum}",
                    idx + 1
                )));
            }
            linear.extend_from_slice(row);
        }
        let log2 = linear
            .iter()
            .map(|&p| if p == 0.0 { f64::NEG_INFINITY } else { p.log2() })
            .collect();
        Ok(WeightedSequence {
            alphabet,
            n: rows.len(),
            linear,
            log2,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Linear probability of `rank` at 1-based position `i`.
    pub fn prob(&self, i: usize, rank: u8) -> f64 {
        self.linear[(i - 1) * self.alphabet.size() + rank as usize]
    }

    /// Base-2 log probability of `rank` at 1-based position `i`.
    pub fn log2_prob(&self, i: usize, rank: u8) -> f64 {
        self.log2[(i - 1) * self.alphabet.size() + rank as usize]
    }

    /// The rank with the largest probability at position `i`; ties go to
    /// the smallest rank.
    pub fn heavy_rank(&self, i: usize) -> u8 {
        let sigma = self.alphabet.size();
        let row = &self.linear[(i - 1) * sigma..i * sigma];
        let mut best = 0u8;
        for (c, &p) in row.iter().enumerate().skip(1) {
            if p > row[best as usize] {
                best = c as u8;
            }
        }
        best
    }
}

/// A probability threshold `1/z`, carried as the value `z ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    z: f64,
}

impl Threshold {
    pub fn new(z: f64) -> Result<Threshold> {
        if !z.is_finite() || (z + CMP_SLACK).floor() < 1.0 {
            return Err(Error::validation(format!(
                "threshold parameter z must be at least 1, got {z}"
            )));
        }
        Ok(Threshold { z })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `⌊z⌋`, the family size.
    pub fn floor(&self) -> usize {
        (self.z + CMP_SLACK).floor() as usize
    }
}

/// Options for [`parse_weighted_sequence_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Scale each position's probabilities to sum to one instead of
    /// rejecting sums outside the tolerance.
    pub renormalize: bool,
}

/// Parses the text format with default options.
pub fn parse_weighted_sequence(text: &str) -> Result<WeightedSequence> {
    parse_weighted_sequence_with(text, ParseOptions::default())
}

pub fn parse_weighted_sequence_with(text: &str, opts: ParseOptions) -> Result<WeightedSequence> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("WSEQ") {
        return Err(Error::parse(header_no, "expected WSEQ header"));
    }
    let n: usize = fields
        .next()
        .ok_or_else(|| Error::parse(header_no, "missing sequence length"))?
        .parse()
        .map_err(|_| Error::parse(header_no, "sequence length is not a number"))?;
    let letters = fields
        .next()
        .ok_or_else(|| Error::parse(header_no, "missing alphabet"))?;
    if fields.next().is_some() {
        return Err(Error::parse(header_no, "trailing fields in header"));
    }
    if n == 0 {
        return Err(Error::parse(header_no, "sequence length must be positive"));
    }
    let alphabet = Alphabet::from_str(letters)?;
    let sigma = alphabet.size();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut row_lines = Vec::with_capacity(n);
    for (line_no, line) in lines {
        if rows.len() == n {
            return Err(Error::parse(line_no, "more data lines than header length"));
        }
        let mut row = vec![0.0f64; sigma];
        let mut seen = vec![false; sigma];
        for field in line.split_whitespace() {
            let (letter, prob) = field
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, format!("malformed entry {field:?}")))?;
            let mut chars = letter.bytes();
            let (c, extra) = (chars.next(), chars.next());
            let c = match (c, extra) {
                (Some(c), None) => c,
                _ => return Err(Error::parse(line_no, format!("malformed letter {letter:?}"))),
            };
            let rank = alphabet.rank(c).ok_or_else(|| {
                Error::parse(line_no, format!("letter {:?} not in alphabet", c as char))
            })? as usize;
            if seen[rank] {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate letter {:?}", c as char),
                ));
            }
            seen[rank] = true;
            let p: f64 = prob
                .parse()
                .map_err(|_| Error::parse(line_no, format!("malformed probability {prob:?}")))?;
            if !(0.0..=1.0 + CMP_SLACK).contains(&p) {
                return Err(Error::parse(
                    line_no,
                    format!("probability {prob} out of range"),
                ));
            }
            row[rank] = p;
        }
        rows.push(row);
        row_lines.push(line_no);
    }
    if rows.len() < n {
        return Err(Error::parse(
            text.lines().count(),
            format!("expected {n} data lines, found {}", rows.len()),
        ));
    }

    if opts.renormalize {
        for (row, &line_no) in rows.iter_mut().zip(&row_lines) {
            let sum: f64 = row.iter().sum();
            if sum <= 0.0 {
                return Err(Error::parse(line_no, "cannot renormalize an all-zero line"));
            }
            for p in row.iter_mut() {
                *p /= sum;
            }
        }
    }

    WeightedSequence::from_rows(alphabet, &rows)
}

/// Probability that `pattern` (rank-encoded) matches at 1-based position `i`.
///
/// The window `i ..= i + |pattern| - 1` must lie inside the sequence.
/// Letters outside the alphabet never appear in rank encoding; use
/// [`Alphabet::encode`] first and treat `None` as probability zero.
pub fn match_probability(x: &WeightedSequence, pattern: &[u8], i: usize) -> Result<Prob> {
    let n = x.len();
    let m = pattern.len();
    if i < 1 || i + m > n + 1 {
        return Err(Error::WindowOutOfRange {
            start: i,
            end: i + m.max(1) - 1,
            len: n,
        });
    }
    let mut log2 = 0.0f64;
    for (j, &c) in pattern.iter().enumerate() {
        log2 += x.log2_prob(i + j, c);
    }
    Ok(Prob::from_log2(log2))
}

/// For pattern `P` at position `i` under threshold `z`, returns
/// `(t, m)` where `t = ⌊prob · z⌋` and `m` is `t` minus the same quantity
/// summed over all one-letter extensions of `P`. Extensions whose window
/// would leave the sequence contribute zero.
pub fn factor_counts(
    x: &WeightedSequence,
    z: Threshold,
    pattern: &[u8],
    i: usize,
) -> Result<(u64, u64)> {
    let p = match_probability(x, pattern, i)?;
    let t = p.scaled_floor(z.z());
    let mut ext = 0u64;
    let next = i + pattern.len();
    if next <= x.len() {
        for c in 0..x.alphabet().size() as u8 {
            ext += p.mul(Prob::from_log2(x.log2_prob(next, c))).scaled_floor(z.z());
        }
    }
    // Scaled floors are superadditive, so the extensions never overshoot.
    debug_assert!(ext <= t, "extension floors {ext} exceed {t}");
    Ok((t, t.saturating_sub(ext)))
}
