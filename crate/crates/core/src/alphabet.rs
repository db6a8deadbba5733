use crate::error::{Error, Result};

/// An ordered alphabet of up to 128 printable ASCII letters.
///
/// Letters are stored sorted ascending; the index of a letter in that order
/// is its *rank*, and all sequence and pattern data inside the crate is
/// rank-encoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<u8>,
    rank_of: [u8; 256],
}

const NO_RANK: u8 = u8::MAX;

impl Alphabet {
    /// Builds an alphabet from its letters, which must be distinct printable
    /// ASCII characters given in ascending order.
    pub fn new(letters: &[u8]) -> Result<Alphabet> {
        if letters.is_empty() {
            return Err(Error::validation("alphabet must not be empty"));
        }
        if letters.len() > 128 {
            return Err(Error::validation(format!(
                "alphabet has {} letters, limit is 128",
                letters.len()
            )));
        }
        let mut rank_of = [NO_RANK; 256];
        for (r, &c) in letters.iter().enumerate() {
            if !c.is_ascii_graphic() {
                return Err(Error::validation(format!(
                    "alphabet letter {:#04x} is not printable ASCII",
                    c
                )));
            }
            if r > 0 && letters[r - 1] >= c {
                return Err(Error::validation(
                    "alphabet letters must be distinct and sorted ascending",
                ));
            }
            rank_of[c as usize] = r as u8;
        }
        Ok(Alphabet {
            letters: letters.to_vec(),
            rank_of,
        })
    }

    pub fn from_str(letters: &str) -> Result<Alphabet> {
        if !letters.is_ascii() {
            return Err(Error::validation("alphabet letters must be ASCII"));
        }
        Alphabet::new(letters.as_bytes())
    }

    pub fn size(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn letter(&self, rank: u8) -> u8 {
        self.letters[rank as usize]
    }

    pub fn rank(&self, letter: u8) -> Option<u8> {
        match self.rank_of[letter as usize] {
            NO_RANK => None,
            r => Some(r),
        }
    }

    /// Rank-encodes a pattern. `None` when it contains a letter outside the
    /// alphabet, which for queries means the pattern can never occur.
    pub fn encode(&self, pattern: &str) -> Option<Vec<u8>> {
        pattern.bytes().map(|b| self.rank(b)).collect()
    }

    /// Decodes a rank string back into letters.
    pub fn decode(&self, ranks: &[u8]) -> String {
        ranks.iter().map(|&r| self.letter(r) as char).collect()
    }
}
