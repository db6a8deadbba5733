use crate::error::{Error, Result};

/// A property array bounding how far a match may extend from each position.
///
/// For a string of length `n`, entry `i` (1-based) is the last position the
/// window starting at `i` may cover, with `pi[i] = i - 1` denoting the empty
/// window. Entries are non-decreasing and never exceed `n`.
///
/// The stored value doubles as the 0-based exclusive end of the window
/// starting at 0-based index `i - 1`, so internal code can slice with it
/// directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyArray {
    ends: Vec<usize>,
    len: usize,
}

impl PropertyArray {
    /// Validates and wraps 1-based inclusive window ends for a string of
    /// length `n`.
    pub fn new(ends: Vec<usize>, n: usize) -> Result<PropertyArray> {
        if ends.len() != n {
            return Err(Error::validation(format!(
                "property array has {} entries for a string of length {n}",
                ends.len()
            )));
        }
        let mut prev = 0usize;
        for (idx, &e) in ends.iter().enumerate() {
            let i = idx + 1;
            if e + 1 < i || e > n {
                return Err(Error::validation(format!(
                    "property entry {i} is {e}, expected between {} and {n}",
                    i - 1
                )));
            }
            if e < prev {
                return Err(Error::validation(format!(
                    "property entries must be non-decreasing, entry {i} is {e} after {prev}"
                )));
            }
            prev = e;
        }
        Ok(PropertyArray { ends, len: n })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// 1-based inclusive end of the window starting at 1-based `i`.
    pub fn end(&self, i: usize) -> usize {
        self.ends[i - 1]
    }

    /// Length of the window starting at 1-based `i`.
    pub fn window_len(&self, i: usize) -> usize {
        self.ends[i - 1] + 1 - i
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.ends
    }
}
