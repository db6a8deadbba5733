//! The four subcommands, as functions from parsed inputs to output text.

use anyhow::{bail, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use wseq_core::oracle::{naive_weighted_occurrences, solid_factors};
use wseq_core::{
    build_randomized_approx_index, build_randomized_family, build_randomized_index,
    build_z_estimation, build_z_estimation_with_stats, load_index, parse_weighted_sequence,
    random_weighted_sequence, verify_z_estimation, ApproxIndex, LoadedIndex, RandomizedConfig,
    Threshold, WeightedIndex, WeightedSequence,
};

use crate::batch::{parse_batch, run_batch};
use crate::format::{alphabet_for, write_wseq};

/// Generates a reproducible random weighted sequence, as WSEQ text.
pub fn cmd_gen(n: usize, sigma: usize, seed: u64) -> Result<String> {
    let alphabet = alphabet_for(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_weighted_sequence(&alphabet, n, &mut rng)?;
    Ok(write_wseq(&x))
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub z: Option<f64>,
    pub eps: Option<f64>,
    pub randomized: bool,
    pub confidence: u32,
    pub seed: u64,
}

/// Builds an index from WSEQ text. Returns the serialized index and the
/// `key=value` stats lines describing the construction.
pub fn cmd_build(input: &str, opts: &BuildOptions) -> Result<(Vec<u8>, String)> {
    let x = parse_weighted_sequence(input)?;
    let eps = match (opts.z, opts.eps) {
        (Some(_), None) => None,
        (None, Some(eps)) => {
            if !(eps > 0.0 && eps <= 1.0) || !eps.is_finite() {
                bail!("eps must lie in (0, 1], got {eps}");
            }
            Some(eps)
        }
        _ => bail!("exactly one of --z and --eps is required"),
    };
    let z = Threshold::new(opts.z.unwrap_or_else(|| 1.0 / eps.unwrap()))?;

    let mut stats = String::new();
    let bytes = if opts.randomized {
        let cfg = RandomizedConfig::new(opts.seed, opts.confidence)?;
        let (bytes, blocks) = match eps {
            None => {
                let wi = build_randomized_index(&x, z, cfg)?;
                (wi.to_bytes(), wi.blocks())
            }
            Some(eps) => {
                let ai = build_randomized_approx_index(&x, eps, cfg)?;
                (ai.to_bytes(), ai.blocks())
            }
        };
        let _ = writeln!(stats, "blocks={blocks}");
        let _ = writeln!(stats, "block_len={}", x.len());
        bytes
    } else {
        let (fam, built) = build_z_estimation_with_stats(&x, z);
        let _ = writeln!(stats, "blocks={}", fam.size());
        let _ = writeln!(stats, "block_len={}", fam.len());
        let _ = writeln!(stats, "nodes_created={}", built.nodes_created);
        let _ = writeln!(stats, "nodes_deleted={}", built.nodes_deleted);
        let _ = writeln!(stats, "token_steps={}", built.token_steps);
        match eps {
            None => WeightedIndex::from_family(x.alphabet().clone(), &fam, z.z())?.to_bytes(),
            Some(eps) => ApproxIndex::from_family(x.alphabet().clone(), &fam, eps)?.to_bytes(),
        }
    };
    Ok((bytes, stats))
}

/// Loads a serialized index and answers a query batch.
pub fn cmd_query(index_bytes: &[u8], batch_text: &str) -> Result<String> {
    let loaded = load_index(index_bytes)?;
    let alphabet = match &loaded {
        LoadedIndex::Exact(wi) => wi.alphabet().clone(),
        LoadedIndex::Approximate(ai) => ai.alphabet().clone(),
    };
    let lines = parse_batch(batch_text, &alphabet)?;
    run_batch(&loaded, &lines)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub z: f64,
    pub seeds: u32,
    pub confidence: u32,
}

#[derive(Debug)]
pub struct VerifyReport {
    /// One `<check> pass|fail` line per check run.
    pub lines: String,
    /// `key=value` stats lines.
    pub stats: String,
    pub passed: bool,
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Checks the estimation family and the index built from it against brute
/// force, optionally exercising the sampling construction over many seeds.
pub fn cmd_verify(input: &str, opts: &VerifyOptions) -> Result<VerifyReport> {
    let x = parse_weighted_sequence(input)?;
    let z = Threshold::new(opts.z)?;
    let mut lines = String::new();
    let mut stats = String::new();
    let mut passed = true;

    let fam = build_z_estimation(&x, z);
    let def1 = verify_z_estimation(&x, z, &fam)?;
    let _ = writeln!(lines, "definition1 {}", pass_fail(def1));
    passed &= def1;

    let wi = WeightedIndex::from_family(x.alphabet().clone(), &fam, z.z())?;
    let index_ok = index_matches_oracle(&x, z, &wi);
    let _ = writeln!(lines, "index_oracle {}", pass_fail(index_ok));
    passed &= index_ok;

    if opts.seeds > 0 {
        let oracle: BTreeSet<(usize, Vec<u8>)> = solid_factors(&x, z).into_iter().collect();
        let mut sound = 0u32;
        let mut reproduced = 0u32;
        for seed in 1..=u64::from(opts.seeds) {
            let cfg = RandomizedConfig::new(seed, opts.confidence)?;
            let sampled = sampled_factor_set(build_randomized_family(&x, z, cfg).family());
            if sampled.is_subset(&oracle) {
                sound += 1;
            }
            if sampled == oracle {
                reproduced += 1;
            }
        }
        let _ = writeln!(stats, "seeds={}", opts.seeds);
        let _ = writeln!(stats, "sound={sound}");
        let _ = writeln!(stats, "reproduced={reproduced}");
        let rand_ok = sound == opts.seeds && u64::from(reproduced) * 100 >= u64::from(opts.seeds) * 99;
        let _ = writeln!(lines, "randomized {}", pass_fail(rand_ok));
        passed &= rand_ok;
    }

    Ok(VerifyReport {
        lines,
        stats,
        passed,
    })
}

fn sampled_factor_set(fam: &wseq_core::ZEstimation) -> BTreeSet<(usize, Vec<u8>)> {
    let mut set = BTreeSet::new();
    for i in 1..=fam.len() {
        for j in 0..fam.size() {
            let w = fam.window(j, i);
            for len in 1..=w.len() {
                set.insert((i, w[..len].to_vec()));
            }
        }
    }
    set
}

fn index_matches_oracle(x: &WeightedSequence, z: Threshold, wi: &WeightedIndex) -> bool {
    let fam = build_z_estimation(x, z);
    let mut patterns: BTreeSet<Vec<u8>> = BTreeSet::new();
    patterns.insert(Vec::new());
    for j in 0..fam.size() {
        for i in 1..=fam.len() {
            patterns.insert(fam.window(j, i).to_vec());
        }
    }
    let sigma = x.alphabet().size() as u8;
    let extended: Vec<Vec<u8>> = patterns
        .iter()
        .flat_map(|p| {
            (0..sigma).map(move |c| {
                let mut q = p.clone();
                q.push(c);
                q
            })
        })
        .collect();
    patterns.extend(extended);

    let mut ctx = wi.query_context();
    patterns.iter().all(|p| {
        let expect = naive_weighted_occurrences(x, z, p);
        wi.report(p, &mut ctx) == expect
            && wi.count(p) == expect.len()
            && wi.decide(p) == !expect.is_empty()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "\
WSEQ 6 AB
A:1.0
A:0.5 B:0.5
A:0.75 B:0.25
A:0.8 B:0.2
A:0.5 B:0.5
A:0.25 B:0.75
";

    fn build(opts: &BuildOptions) -> (Vec<u8>, String) {
        cmd_build(TABLE, opts).unwrap()
    }

    fn exact_opts(z: f64) -> BuildOptions {
        BuildOptions {
            z: Some(z),
            eps: None,
            randomized: false,
            confidence: 2,
            seed: 1,
        }
    }

    #[test]
    fn build_then_query_matches_contract() {
        let (bytes, stats) = build(&exact_opts(4.0));
        assert!(stats.contains("blocks=4\n"), "{stats}");
        assert!(stats.contains("block_len=6\n"), "{stats}");
        assert!(stats.contains("nodes_created="), "{stats}");
        let batch = "report AA\ndecide BAB\ncount AA\nreport BB\n";
        let out = cmd_query(&bytes, batch).unwrap();
        assert_eq!(
            out,
            "report AA 1 2 3 4\ndecide BAB false\ncount AA 4\nreport BB 5\n"
        );
    }

    #[test]
    fn approximate_build_reports_with_header() {
        let opts = BuildOptions {
            z: None,
            eps: Some(0.25),
            ..exact_opts(0.0)
        };
        let (bytes, _) = build(&opts);
        let out = cmd_query(&bytes, "approx A 2\napprox AAB 4\n").unwrap();
        assert_eq!(
            out,
            "approximate eps=0.25\napprox A 1 2 3 4 5\napprox AAB 3 4\n"
        );
    }

    #[test]
    fn mode_and_index_kind_must_agree() {
        let (exact, _) = build(&exact_opts(4.0));
        let err = cmd_query(&exact, "approx A 2\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let opts = BuildOptions {
            z: None,
            eps: Some(0.25),
            ..exact_opts(0.0)
        };
        let (approx, _) = build(&opts);
        let err = cmd_query(&approx, "decide A\n").unwrap_err();
        assert!(err.to_string().contains("exact index"), "{err}");
    }

    #[test]
    fn rejects_bad_thresholds() {
        assert!(cmd_build(TABLE, &exact_opts(0.5)).is_err());
        let mut opts = exact_opts(4.0);
        opts.eps = Some(0.25);
        assert!(cmd_build(TABLE, &opts).is_err());
        opts.z = None;
        opts.eps = None;
        assert!(cmd_build(TABLE, &opts).is_err());
        opts.eps = Some(1.5);
        assert!(cmd_build(TABLE, &opts).is_err());
    }

    #[test]
    fn randomized_builds_are_seed_deterministic() {
        let mut opts = exact_opts(4.0);
        opts.randomized = true;
        let (a, stats) = build(&opts);
        let (b, _) = build(&opts);
        assert_eq!(a, b);
        assert!(stats.contains("blocks=51\n"), "{stats}");
        opts.seed = 2;
        let (c, _) = build(&opts);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_sequences_parse_and_reproduce() {
        let a = cmd_gen(6, 2, 1).unwrap();
        let b = cmd_gen(6, 2, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, cmd_gen(6, 2, 2).unwrap());
        let x = parse_weighted_sequence(&a).unwrap();
        assert_eq!(x.len(), 6);
        assert_eq!(x.alphabet().letters(), b"AB");
        assert!(cmd_gen(0, 2, 1).is_err());
        assert!(cmd_gen(6, 0, 1).is_err());
    }

    #[test]
    fn verify_passes_on_fixture() {
        let report = cmd_verify(
            TABLE,
            &VerifyOptions {
                z: 4.0,
                seeds: 5,
                confidence: 2,
            },
        )
        .unwrap();
        assert!(report.passed, "{}", report.lines);
        assert_eq!(
            report.lines,
            "definition1 pass\nindex_oracle pass\nrandomized pass\n"
        );
        assert!(report.stats.contains("sound=5\n"), "{}", report.stats);
    }

    #[test]
    fn verify_rejects_corrupt_input() {
        let broken = TABLE.replace("A:0.5 B:0.5", "A:0.9 B:0.5");
        let err = cmd_verify(
            &broken,
            &VerifyOptions {
                z: 4.0,
                seeds: 0,
                confidence: 2,
            },
        );
        assert!(err.is_err());
    }
}
