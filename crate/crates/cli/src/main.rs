use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use wseq_cli::{cmd_build, cmd_gen, cmd_query, cmd_verify, BuildOptions, VerifyOptions};

#[derive(Parser)]
#[command(name = "wseq", version, about = "Index and query weighted sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random weighted sequence in WSEQ format
    Gen {
        /// Sequence length
        n: usize,
        /// Alphabet size
        sigma: usize,
        /// Generator seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (standard output when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build an index from a WSEQ file
    Build {
        /// Input file, or - for standard input
        input: PathBuf,
        /// Occurrence-probability threshold 1/z
        #[arg(long)]
        z: Option<f64>,
        /// Accuracy of an approximate index
        #[arg(long, conflicts_with = "z")]
        eps: Option<f64>,
        /// Output file (derived from the input name when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Build from sampled strings instead of the deterministic family
        #[arg(long)]
        randomized: bool,
        /// Confidence constant for --randomized
        #[arg(long, default_value_t = 2)]
        confidence: u32,
        /// Sampling seed for --randomized
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a query batch against a saved index
    Query {
        /// Index file
        index: PathBuf,
        /// Batch file, one `<mode> <pattern> [z]` per line (standard input when omitted)
        batch: Option<PathBuf>,
    },
    /// Check the estimation family and index against brute force
    Verify {
        /// Input file, or - for standard input
        input: PathBuf,
        /// Occurrence-probability threshold 1/z
        #[arg(long)]
        z: f64,
        /// Also check the sampling construction over this many seeds
        #[arg(long, default_value_t = 0)]
        seeds: u32,
        /// Confidence constant for --seeds
        #[arg(long, default_value_t = 2)]
        confidence: u32,
    },
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn default_output(input: &Path, approximate: bool) -> PathBuf {
    let ext = if approximate { "awix" } else { "wix" };
    if input.as_os_str() == "-" {
        PathBuf::from(format!("index.{ext}"))
    } else {
        input.with_extension(ext)
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Gen {
            n,
            sigma,
            seed,
            output,
        } => {
            let text = cmd_gen(n, sigma, seed)?;
            match output {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Build {
            input,
            z,
            eps,
            output,
            randomized,
            confidence,
            seed,
        } => {
            let text = read_text(&input)?;
            let opts = BuildOptions {
                z,
                eps,
                randomized,
                confidence,
                seed,
            };
            let (bytes, stats) = cmd_build(&text, &opts)?;
            let path = output.unwrap_or_else(|| default_output(&input, eps.is_some()));
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            eprint!("{stats}");
            Ok(0)
        }
        Command::Query { index, batch } => {
            let bytes =
                fs::read(&index).with_context(|| format!("reading {}", index.display()))?;
            let text = read_text(&batch.unwrap_or_else(|| PathBuf::from("-")))?;
            print!("{}", cmd_query(&bytes, &text)?);
            Ok(0)
        }
        Command::Verify {
            input,
            z,
            seeds,
            confidence,
        } => {
            let text = read_text(&input)?;
            let report = cmd_verify(
                &text,
                &VerifyOptions {
                    z,
                    seeds,
                    confidence,
                },
            )?;
            print!("{}", report.lines);
            eprint!("{}", report.stats);
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
