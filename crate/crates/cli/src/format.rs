//! WSEQ text output and the letter pool for generated sequences.

use anyhow::{bail, Result};
use std::fmt::Write as _;
use wseq_core::{Alphabet, WeightedSequence};

/// Picks `sigma` letters for a generated sequence, preferring uppercase, then
/// lowercase, then digits, then the remaining printable ASCII characters.
/// `:` and `#` are excluded because the WSEQ format reserves them.
pub fn letter_pool(sigma: usize) -> Result<Vec<u8>> {
    let mut pool: Vec<u8> = Vec::new();
    pool.extend(b'A'..=b'Z');
    pool.extend(b'a'..=b'z');
    pool.extend(b'0'..=b'9');
    pool.extend((b'!'..=b'~').filter(|c| !c.is_ascii_alphanumeric() && *c != b':' && *c != b'#'));
    if sigma == 0 || sigma > pool.len() {
        bail!("alphabet size must be between 1 and {}", pool.len());
    }
    let mut letters = pool[..sigma].to_vec();
    letters.sort_unstable();
    Ok(letters)
}

pub fn alphabet_for(sigma: usize) -> Result<Alphabet> {
    Ok(Alphabet::new(&letter_pool(sigma)?)?)
}

/// Renders a weighted sequence in the WSEQ text format. Probabilities are
/// written with nine decimals, well inside the parser's sum tolerance.
pub fn write_wseq(x: &WeightedSequence) -> String {
    let a = x.alphabet();
    let mut out = format!(
        "WSEQ {} {}\n",
        x.len(),
        String::from_utf8_lossy(a.letters())
    );
    for i in 1..=x.len() {
        let mut first = true;
        for r in 0..a.size() as u8 {
            let p = x.prob(i, r);
            if p > 0.0 {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{}:{:.9}", a.letter(r) as char, p);
                first = false;
            }
        }
        out.push('\n');
    }
    out
}
