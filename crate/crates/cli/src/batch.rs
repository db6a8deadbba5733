//! Query batch parsing and execution.
//!
//! A batch is text with one query per line, `<mode> <pattern> [z]`, where
//! mode is `decide`, `count`, `report`, or `approx`. Only `approx` takes the
//! trailing threshold. Blank lines and `#` comments are skipped.

use anyhow::{anyhow, bail, Result};
use std::fmt::Write as _;
use wseq_core::{Alphabet, LoadedIndex};

/// Stand-in rank for pattern letters outside the index alphabet. Text ranks
/// are below 128, so these letters simply never match.
const FOREIGN_RANK: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decide,
    Count,
    Report,
    Approx,
}

impl Mode {
    fn parse(word: &str) -> Option<Mode> {
        match word {
            "decide" => Some(Mode::Decide),
            "count" => Some(Mode::Count),
            "report" => Some(Mode::Report),
            "approx" => Some(Mode::Approx),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Decide => "decide",
            Mode::Count => "count",
            Mode::Report => "report",
            Mode::Approx => "approx",
        }
    }
}

#[derive(Debug, Clone)]
pub struct QueryLine {
    pub line_no: usize,
    pub mode: Mode,
    pub pattern: String,
    pub ranks: Vec<u8>,
    pub zprime: Option<f64>,
}

pub fn parse_batch(text: &str, alphabet: &Alphabet) -> Result<Vec<QueryLine>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let mode_word = words.next().unwrap();
        let mode = Mode::parse(mode_word)
            .ok_or_else(|| anyhow!("line {line_no}: unknown mode '{mode_word}'"))?;
        let pattern = words
            .next()
            .ok_or_else(|| anyhow!("line {line_no}: missing pattern"))?
            .to_string();
        let zprime = match (mode, words.next()) {
            (Mode::Approx, Some(word)) => Some(
                word.parse::<f64>()
                    .map_err(|_| anyhow!("line {line_no}: bad threshold '{word}'"))?,
            ),
            (Mode::Approx, None) => {
                bail!("line {line_no}: approx query needs a threshold")
            }
            (_, None) => None,
            (_, Some(word)) => bail!("line {line_no}: unexpected argument '{word}'"),
        };
        if let Some(word) = words.next() {
            bail!("line {line_no}: unexpected argument '{word}'");
        }
        let ranks = pattern
            .bytes()
            .map(|b| alphabet.rank(b).unwrap_or(FOREIGN_RANK))
            .collect();
        out.push(QueryLine {
            line_no,
            mode,
            pattern,
            ranks,
            zprime,
        });
    }
    Ok(out)
}

fn push_positions(out: &mut String, positions: &[usize]) {
    for p in positions {
        let _ = write!(out, " {p}");
    }
    out.push('\n');
}

/// Answers every query in input order. Exact indexes take `decide`, `count`,
/// and `report`; approximate indexes take `approx` and lead with a header
/// line naming their accuracy.
pub fn run_batch(index: &LoadedIndex, lines: &[QueryLine]) -> Result<String> {
    let mut out = String::new();
    match index {
        LoadedIndex::Exact(wi) => {
            let mut ctx = wi.query_context();
            for q in lines {
                match q.mode {
                    Mode::Decide => {
                        let _ = writeln!(out, "decide {} {}", q.pattern, wi.decide(&q.ranks));
                    }
                    Mode::Count => {
                        let _ = writeln!(out, "count {} {}", q.pattern, wi.count(&q.ranks));
                    }
                    Mode::Report => {
                        let _ = write!(out, "report {}", q.pattern);
                        push_positions(&mut out, &wi.report(&q.ranks, &mut ctx));
                    }
                    Mode::Approx => bail!(
                        "line {}: approx query requires an approximate index",
                        q.line_no
                    ),
                }
            }
        }
        LoadedIndex::Approximate(ai) => {
            let _ = writeln!(out, "approximate eps={}", ai.eps());
            let mut ctx = ai.query_context();
            for q in lines {
                match q.mode {
                    Mode::Approx => {
                        let positions = ai
                            .report(&q.ranks, q.zprime.unwrap(), &mut ctx)
                            .map_err(|e| anyhow!("line {}: {e}", q.line_no))?;
                        let _ = write!(out, "approx {}", q.pattern);
                        push_positions(&mut out, &positions);
                    }
                    mode => bail!(
                        "line {}: {} query requires an exact index",
                        q.line_no,
                        mode.name()
                    ),
                }
            }
        }
    }
    Ok(out)
}
