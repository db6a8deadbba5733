//! The nine acceptance checks for the whole pipeline, run in order within a
//! single test so the timing-sensitive ones are never distorted by parallel
//! siblings. One pass/fail line is printed per criterion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};
use wseq_cli::batch::{parse_batch, run_batch};
use wseq_core::oracle::{naive_property_occurrences, naive_weighted_occurrences, solid_factors};
use wseq_core::{
    build_randomized_family, build_z_estimation, build_z_estimation_with_stats, load_index,
    match_probability, parse_weighted_sequence, verify_z_estimation, Alphabet, ApproxIndex,
    LoadedIndex, Prob, PropertyArray, PropertySuffixTree, RandomizedConfig,
    SpecialWeightedSequence, Threshold, WeightedIndex, WeightedSequence, ZEstimation,
};
use wseq_core::{random_weighted_sequence, seq::factor_counts};

const TABLE: &str = "\
WSEQ 6 AB
A:1.0
A:0.5 B:0.5
A:0.75 B:0.25
A:0.8 B:0.2
A:0.5 B:0.5
A:0.25 B:0.75
";

type Check = std::result::Result<(), String>;

struct Outcome {
    name: &'static str,
    result: Check,
    elapsed: Duration,
    budget: Duration,
}

fn run_criterion(name: &'static str, budget_secs: u64, f: fn() -> Check) -> Outcome {
    let start = Instant::now();
    let result = f();
    Outcome {
        name,
        result,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget_secs),
    }
}

#[test]
fn acceptance() {
    let outcomes = [
        run_criterion("1 fixture-tables", 1, fixture_tables),
        run_criterion("2 family-definition", 30, family_definition),
        run_criterion("3 pst-oracle", 30, pst_oracle),
        run_criterion("4 index-oracle", 60, index_oracle),
        run_criterion("5 approx-sandwich", 60, approx_sandwich),
        run_criterion("6 complexity-scaling", 300, complexity_scaling),
        run_criterion("7 randomized-family", 60, randomized_family),
        run_criterion("8 special-sequence", 30, special_sequence),
        run_criterion("9 round-trip", 10, round_trip),
    ];
    let mut failures = Vec::new();
    for o in &outcomes {
        let on_time = o.elapsed <= o.budget;
        let ok = o.result.is_ok() && on_time;
        println!(
            "criterion {}: {} ({:.2?} of {:?})",
            o.name,
            if ok { "pass" } else { "fail" },
            o.elapsed,
            o.budget
        );
        if let Err(msg) = &o.result {
            failures.push(format!("criterion {}: {msg}", o.name));
        } else if !on_time {
            failures.push(format!(
                "criterion {}: took {:.2?}, budget {:?}",
                o.name, o.elapsed, o.budget
            ));
        }
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}

fn table() -> WeightedSequence {
    parse_weighted_sequence(TABLE).unwrap()
}

fn err<T>(msg: String) -> std::result::Result<T, String> {
    Err(msg)
}

/// Factor multiset of the family at position `i`, decoded to letters.
fn factor_multiset(fam: &ZEstimation, alphabet: &Alphabet, i: usize) -> Vec<String> {
    let mut v: Vec<String> = (0..fam.size())
        .map(|j| alphabet.decode(fam.window(j, i)))
        .collect();
    v.sort();
    v
}

fn fixture_tables() -> Check {
    let x = table();
    let z = Threshold::new(4.0).unwrap();
    let fam = build_z_estimation(&x, z);
    if !verify_z_estimation(&x, z, &fam).map_err(|e| e.to_string())? {
        return err("family fails the defining count condition".into());
    }

    let expected: [&[&str]; 6] = [
        &["AA", "AAAA", "ABAA", "AB"],
        &["A", "AAA", "BAA", "B"],
        &["A", "AAA", "AAB", "B"],
        &["A", "AAB", "ABB", ""],
        &["A", "AB", "BB", "B"],
        &["A", "B", "B", "B"],
    ];
    for (idx, want) in expected.iter().enumerate() {
        let i = idx + 1;
        let got = factor_multiset(&fam, x.alphabet(), i);
        let mut want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        want.sort();
        if got != want {
            return err(format!("factor multiset at {i}: got {got:?}, want {want:?}"));
        }
        let mut got_lens: Vec<usize> = got.iter().map(|s| s.len()).collect();
        let mut want_lens: Vec<usize> = want.iter().map(|s| s.len()).collect();
        got_lens.sort_unstable();
        want_lens.sort_unstable();
        if got_lens != want_lens {
            return err(format!("length multiset at {i}: {got_lens:?} vs {want_lens:?}"));
        }
    }

    for (pattern, want) in [("", 4), ("A", 3), ("AA", 2), ("AAA", 1), ("AAB", 1), ("B", 1)] {
        let ranks = x.alphabet().encode(pattern).unwrap();
        let (t, _) = factor_counts(&x, z, &ranks, 3).map_err(|e| e.to_string())?;
        if t != want {
            return err(format!("scaled count of {pattern:?} at 3: got {t}, want {want}"));
        }
        let fc = wseq_core::oracle::family_count(fam.strings(), fam.props(), &ranks, 3) as u64;
        if fc != want {
            return err(format!("family count of {pattern:?} at 3: got {fc}, want {want}"));
        }
    }
    Ok(())
}

fn family_definition() -> Check {
    let alphabet = Alphabet::from_str("AB").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let zs = [1.0, 2.0, 3.5, 4.0, 8.0];
    for case in 0..200 {
        let n = rng.gen_range(1..=8);
        let z = Threshold::new(zs[case % zs.len()]).unwrap();
        let x = random_weighted_sequence(&alphabet, n, &mut rng).map_err(|e| e.to_string())?;
        let fam = build_z_estimation(&x, z);
        let ok = verify_z_estimation(&x, z, &fam).map_err(|e| e.to_string())?;
        if !ok {
            return err(format!("case {case}: n={n} z={} fails the count condition", z.z()));
        }
    }
    Ok(())
}

fn pst_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    for case in 0..200 {
        let n = rng.gen_range(1..=64usize);
        let sigma = rng.gen_range(1..=4usize);
        let s: Vec<u8> = (0..n).map(|_| rng.gen_range(0..sigma as u8)).collect();
        let mut ends = Vec::with_capacity(n);
        let mut prev = 0usize;
        for i in 1..=n {
            let e = rng.gen_range(prev.max(i - 1)..=n);
            prev = e;
            ends.push(e);
        }
        let pi = PropertyArray::new(ends, n).map_err(|e| e.to_string())?;
        let pst = PropertySuffixTree::build(&s, &pi, sigma).map_err(|e| e.to_string())?;

        let mut patterns: BTreeSet<Vec<u8>> = BTreeSet::new();
        patterns.insert(Vec::new());
        let mut max_window = 0usize;
        for i in 1..=n {
            let end = pi.end(i);
            max_window = max_window.max(end + 1 - i);
            for stop in i..=end {
                patterns.insert(s[i - 1..stop].to_vec());
            }
        }
        let mut non_factors = Vec::new();
        let mut attempts = 0;
        while non_factors.len() < 50 && attempts < 2000 {
            attempts += 1;
            let len = rng.gen_range(1..=(n + 2).min(8));
            let p: Vec<u8> = (0..len).map(|_| rng.gen_range(0..sigma as u8)).collect();
            if !patterns.contains(&p) {
                non_factors.push(p);
            }
        }
        while non_factors.len() < 50 {
            let len = max_window + 1 + rng.gen_range(0..4);
            non_factors.push((0..len).map(|_| rng.gen_range(0..sigma as u8)).collect());
        }
        patterns.extend(non_factors);

        for p in &patterns {
            let expect = naive_property_occurrences(&s, &pi, p);
            if pst.report(p) != expect
                || pst.count(p) != expect.len()
                || pst.decide(p) != !expect.is_empty()
            {
                return err(format!("case {case}: n={n} sigma={sigma} pattern {p:?}"));
            }
        }
    }
    Ok(())
}

fn index_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let zs = [1.0, 2.0, 4.0, 7.5, 16.0];
    for case in 0..100 {
        let n = rng.gen_range(1..=48usize);
        let sigma = rng.gen_range(1..=4usize);
        let alphabet = Alphabet::new(&b"ABCD"[..sigma]).unwrap();
        let z = Threshold::new(zs[case % zs.len()]).unwrap();
        let x = random_weighted_sequence(&alphabet, n, &mut rng).map_err(|e| e.to_string())?;
        let wi = WeightedIndex::build(&x, z).map_err(|e| e.to_string())?;
        let fam = build_z_estimation(&x, z);

        let mut patterns: BTreeSet<Vec<u8>> = BTreeSet::new();
        patterns.insert(Vec::new());
        for j in 0..fam.size() {
            for i in 1..=fam.len() {
                patterns.insert(fam.window(j, i).to_vec());
            }
        }
        let extensions: Vec<Vec<u8>> = patterns
            .iter()
            .flat_map(|p| {
                (0..sigma as u8).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
        patterns.extend(extensions);
        for _ in 0..30 {
            let len = rng.gen_range(1..=6);
            patterns.insert((0..len).map(|_| rng.gen_range(0..sigma as u8)).collect());
        }

        let mut ctx = wi.query_context();
        for p in &patterns {
            let expect = naive_weighted_occurrences(&x, z, p);
            if wi.report(p, &mut ctx) != expect
                || wi.count(p) != expect.len()
                || wi.decide(p) != !expect.is_empty()
            {
                return err(format!(
                    "case {case}: n={n} sigma={sigma} z={} pattern {p:?}",
                    z.z()
                ));
            }
        }
    }
    Ok(())
}

/// Positions where `pattern` occurs with probability at least `t`, reading
/// the probability as zero when the window leaves the sequence.
fn exact_at_least(x: &WeightedSequence, pattern: &[u8], t: f64) -> Vec<usize> {
    (1..=x.len())
        .filter(|&i| {
            match_probability(x, pattern, i)
                .unwrap_or(Prob::ZERO)
                .at_least(t)
        })
        .collect()
}

fn all_patterns(sigma: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &layer {
            for c in 0..sigma as u8 {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn sandwich_on(x: &WeightedSequence, eps: f64, zprimes: &[f64], label: &str) -> Check {
    let a = ApproxIndex::build(x, eps).map_err(|e| e.to_string())?;
    let mut ctx = a.query_context();
    let sigma = x.alphabet().size();
    for p in all_patterns(sigma, 3) {
        for &zp in zprimes {
            let got = a.report(&p, zp, &mut ctx).map_err(|e| e.to_string())?;
            let lower = exact_at_least(x, &p, 1.0 / zp);
            let upper = exact_at_least(x, &p, 1.0 / zp - eps);
            if !lower.iter().all(|i| got.contains(i)) {
                return err(format!(
                    "{label}: pattern {p:?} z'={zp} misses {lower:?}, got {got:?}"
                ));
            }
            if !got.iter().all(|i| upper.contains(i)) {
                return err(format!(
                    "{label}: pattern {p:?} z'={zp} overshoots {upper:?}, got {got:?}"
                ));
            }
        }
    }
    Ok(())
}

fn approx_sandwich() -> Check {
    sandwich_on(&table(), 0.25, &[1.0, 2.0, 4.0], "fixture")?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let epss = [0.5, 0.25, 0.1];
    for case in 0..50 {
        let n = rng.gen_range(1..=24usize);
        let sigma = rng.gen_range(1..=3usize);
        let alphabet = Alphabet::new(&b"ABC"[..sigma]).unwrap();
        let eps = epss[case % epss.len()];
        let x = random_weighted_sequence(&alphabet, n, &mut rng).map_err(|e| e.to_string())?;
        sandwich_on(&x, eps, &[1.0, 2.0, 4.0], &format!("case {case} (n={n} eps={eps})"))?;
    }
    Ok(())
}

fn complexity_scaling() -> Check {
    let alphabet = Alphabet::from_str("ABCD").unwrap();
    let z = Threshold::new(8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    let sizes = [1_000usize, 10_000, 100_000];
    let reps = [40usize, 8, 2];
    let mut per_build = [f64::INFINITY; 3];
    for idx in 0..sizes.len() {
        let n = sizes[idx];
        let x = random_weighted_sequence(&alphabet, n, &mut rng).map_err(|e| e.to_string())?;
        let (_, stats) = build_z_estimation_with_stats(&x, z);
        let churn = (stats.nodes_created + stats.nodes_deleted) as f64 / (n as f64 * 8.0);
        if churn > 8.0 {
            return err(format!("node churn {churn:.2} at n={n} exceeds 8"));
        }
        for _ in 0..3 {
            let start = Instant::now();
            for _ in 0..reps[idx] {
                std::hint::black_box(build_z_estimation(&x, z));
            }
            let t = start.elapsed().as_secs_f64() / reps[idx] as f64;
            per_build[idx] = per_build[idx].min(t);
        }
    }
    for w in 0..2 {
        let decade = per_build[w + 1] / per_build[w];
        let doubling = decade.powf(1.0 / 10f64.log2());
        println!(
            "  scaling n={} -> n={}: decade factor {decade:.2}, per doubling {doubling:.2}",
            sizes[w],
            sizes[w + 1]
        );
        if !(1.6..=3.0).contains(&doubling) {
            return err(format!(
                "growth per doubling {doubling:.2} between n={} and n={} (decade factor {decade:.2}) outside [1.6, 3.0]",
                sizes[w],
                sizes[w + 1]
            ));
        }
    }
    Ok(())
}

fn sampled_factor_set(fam: &ZEstimation) -> BTreeSet<(usize, Vec<u8>)> {
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

fn randomized_family() -> Check {
    let x = table();
    let z = Threshold::new(4.0).unwrap();
    let oracle: BTreeSet<(usize, Vec<u8>)> = solid_factors(&x, z).into_iter().collect();
    let mut sound = 0u32;
    let mut reproduced = 0u32;
    for seed in 1..=100u64 {
        let cfg = RandomizedConfig::new(seed, 2).map_err(|e| e.to_string())?;
        let sampled = sampled_factor_set(build_randomized_family(&x, z, cfg).family());
        if sampled.is_subset(&oracle) {
            sound += 1;
        }
        if sampled == oracle {
            reproduced += 1;
        }
    }
    if sound != 100 {
        return err(format!("soundness {sound}/100"));
    }
    if reproduced < 99 {
        return err(format!("reproduced the solid-factor set in {reproduced}/100 runs"));
    }
    Ok(())
}

fn special_sequence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let zs = [1.0, 2.0, 3.5, 4.0, 7.5, 8.0];
    for case in 0..50 {
        let n = rng.gen_range(1..=24usize);
        let sigma = rng.gen_range(1..=3usize);
        let alphabet = Alphabet::new(&b"ABC"[..sigma]).unwrap();
        let z = Threshold::new(zs[case % zs.len()]).unwrap();
        let x = random_weighted_sequence(&alphabet, n, &mut rng).map_err(|e| e.to_string())?;
        let fam = build_z_estimation(&x, z);
        let sp = SpecialWeightedSequence::new(&x, &fam).map_err(|e| e.to_string())?;

        let k = z.floor();
        if sp.len() != k * n + k - 1 {
            return err(format!(
                "case {case}: special length {} for n={n} k={k}",
                sp.len()
            ));
        }

        let mut sampled: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
        for p in 1..=sp.len() {
            let Some((_, i)) = sp.block_position(p) else {
                continue;
            };
            let mut s: Vec<u8> = Vec::new();
            let mut q = p;
            while q <= sp.len() {
                let Some(c) = sp.letter(q) else { break };
                s.push(c);
                let prob = sp.match_probability(&s, p).map_err(|e| e.to_string())?;
                if !prob.meets(z.z()) {
                    break;
                }
                sampled.insert((i, s.clone()));
                q += 1;
            }
        }
        let oracle: BTreeSet<(usize, Vec<u8>)> = solid_factors(&x, z).into_iter().collect();
        if sampled != oracle {
            let missing: Vec<_> = oracle.difference(&sampled).take(3).collect();
            let extra: Vec<_> = sampled.difference(&oracle).take(3).collect();
            return err(format!(
                "case {case}: n={n} z={} missing {missing:?} extra {extra:?}",
                z.z()
            ));
        }
    }
    Ok(())
}

fn round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    let zs = [1.0, 2.0, 3.5, 4.0, 8.0];
    let epss = [0.5, 0.25, 0.1];
    for case in 0..20 {
        let n = rng.gen_range(1..=16usize);
        let sigma = rng.gen_range(1..=3usize);
        let alphabet = Alphabet::new(&b"ABC"[..sigma]).unwrap();
        let x = random_weighted_sequence(&alphabet, n, &mut rng).map_err(|e| e.to_string())?;
        let approximate = case % 2 == 1;
        let (in_memory, bytes) = if approximate {
            let ai = ApproxIndex::build(&x, epss[case % epss.len()]).map_err(|e| e.to_string())?;
            let bytes = ai.to_bytes();
            (LoadedIndex::Approximate(ai), bytes)
        } else {
            let z = Threshold::new(zs[case % zs.len()]).unwrap();
            let wi = WeightedIndex::build(&x, z).map_err(|e| e.to_string())?;
            let bytes = wi.to_bytes();
            (LoadedIndex::Exact(wi), bytes)
        };

        let mut text = String::new();
        for q in 0..12 {
            let len = rng.gen_range(1..=4);
            let pattern: String = (0..len)
                .map(|_| {
                    if rng.gen_ratio(1, 8) {
                        'Z'
                    } else {
                        alphabet.letter(rng.gen_range(0..sigma as u8)) as char
                    }
                })
                .collect();
            if approximate {
                let _ = writeln!(text, "approx {pattern} {}", [1.0, 1.5, 2.0, 4.0][q % 4]);
            } else {
                let mode = ["decide", "count", "report"][q % 3];
                let _ = writeln!(text, "{mode} {pattern}");
            }
        }
        let lines = parse_batch(&text, &alphabet).map_err(|e| e.to_string())?;
        let before = run_batch(&in_memory, &lines).map_err(|e| e.to_string())?;
        let loaded = load_index(&bytes).map_err(|e| e.to_string())?;
        let after = run_batch(&loaded, &lines).map_err(|e| e.to_string())?;
        if before != after {
            return err(format!(
                "case {case}: loaded index answers differ\nbefore:\n{before}after:\n{after}"
            ));
        }
    }
    Ok(())
}
