//! Brute-force reference implementations.
//!
//! Everything here favors obviousness over speed and serves as ground truth
//! for the index structures, both in tests and behind the `verify` command.

use crate::error::Result;
use crate::property::PropertyArray;
use crate::seq::{factor_counts, match_probability, Threshold, WeightedSequence};

/// The factor multiset at position `i` (1-based, up to `n + 1`): every
/// string `P` appears with multiplicity `t(P) - Σ_c t(Pc)`, where
/// `t(P) = ⌊prob(P, i) · z⌋`. The result carries `⌊z⌋` members in total
/// and is sorted.
pub fn enumerate_multiset(
    x: &WeightedSequence,
    z: Threshold,
    i: usize,
) -> Result<Vec<Vec<u8>>> {
    let mut out: Vec<Vec<u8>> = Vec::with_capacity(z.floor());
    if i == x.len() + 1 {
        out.resize(z.floor(), Vec::new());
        return Ok(out);
    }
    // Depth-first over solid factors only; everything below t = 0 is dead.
    let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        let (t, m) = factor_counts(x, z, &prefix, i)?;
        if t == 0 {
            continue;
        }
        for _ in 0..m {
            out.push(prefix.clone());
        }
        if i + prefix.len() <= x.len() {
            for c in 0..x.alphabet().size() as u8 {
                let mut ext = prefix.clone();
                ext.push(c);
                stack.push(ext);
            }
        }
    }
    debug_assert_eq!(out.len(), z.floor());
    out.sort();
    Ok(out)
}

/// All 1-based positions where `pattern` occurs in `x` with probability at
/// least `1/z`, by direct scan.
pub fn naive_weighted_occurrences(
    x: &WeightedSequence,
    z: Threshold,
    pattern: &[u8],
) -> Vec<usize> {
    let n = x.len();
    let m = pattern.len();
    if m > n {
        return Vec::new();
    }
    (1..=n + 1 - m.max(1))
        .filter(|&i| {
            match_probability(x, pattern, i)
                .map(|p| p.meets(z.z()))
                .unwrap_or(false)
        })
        .collect()
}

/// All 1-based positions where `pattern` occurs in the plain string `s`
/// without extending past the property bound.
pub fn naive_property_occurrences(s: &[u8], pi: &PropertyArray, pattern: &[u8]) -> Vec<usize> {
    let n = s.len();
    let m = pattern.len();
    if m > n {
        return Vec::new();
    }
    (1..=n + 1 - m.max(1))
        .filter(|&i| i + m <= pi.end(i) + 1 && s[i - 1..i - 1 + m] == *pattern)
        .collect()
}

/// Number of family strings matching `pattern` at position `i` within their
/// property bounds.
pub fn family_count(
    strings: &[Vec<u8>],
    props: &[PropertyArray],
    pattern: &[u8],
    i: usize,
) -> usize {
    strings
        .iter()
        .zip(props)
        .filter(|(s, pi)| naive_property_occurrences(s, pi, pattern).contains(&i))
        .count()
}

/// All distinct solid factors of `x` under `z`, as `(position, pattern)`
/// pairs in scan order.
pub fn solid_factors(x: &WeightedSequence, z: Threshold) -> Vec<(usize, Vec<u8>)> {
    let mut out = Vec::new();
    for i in 1..=x.len() {
        let mut stack: Vec<Vec<u8>> = (0..x.alphabet().size() as u8).map(|c| vec![c]).collect();
        while let Some(p) = stack.pop() {
            let prob = match_probability(x, &p, i).unwrap();
            if !prob.meets(z.z()) {
                continue;
            }
            if i + p.len() <= x.len() {
                for c in 0..x.alphabet().size() as u8 {
                    let mut ext = p.clone();
                    ext.push(c);
                    stack.push(ext);
                }
            }
            out.push((i, p));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::{table1, table2_family};

    fn enc(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'A').collect()
    }

    fn multiset(x: &WeightedSequence, z: f64, i: usize) -> Vec<String> {
        enumerate_multiset(x, Threshold::new(z).unwrap(), i)
            .unwrap()
            .into_iter()
            .map(|p| p.iter().map(|&c| (c + b'A') as char).collect())
            .collect()
    }

    #[test]
    fn multisets_match_worked_example() {
        let x = table1();
        assert_eq!(multiset(&x, 4.0, 1), vec!["AA", "AAAA", "AB", "ABAA"]);
        assert_eq!(multiset(&x, 4.0, 2), vec!["A", "AAA", "B", "BAA"]);
        assert_eq!(multiset(&x, 4.0, 3), vec!["A", "AAA", "AAB", "B"]);
        assert_eq!(multiset(&x, 4.0, 4), vec!["", "A", "AAB", "ABB"]);
        assert_eq!(multiset(&x, 4.0, 5), vec!["A", "AB", "B", "BB"]);
        assert_eq!(multiset(&x, 4.0, 6), vec!["A", "B", "B", "B"]);
        assert_eq!(multiset(&x, 4.0, 7), vec!["", "", "", ""]);
    }

    #[test]
    fn multiset_sizes_equal_family_size() {
        let x = table1();
        for z in [1.0, 2.0, 3.5, 4.0, 8.0] {
            for i in 1..=7 {
                assert_eq!(multiset(&x, z, i).len(), Threshold::new(z).unwrap().floor());
            }
        }
    }

    #[test]
    fn weighted_occurrences_fixture_values() {
        let x = table1();
        let z = Threshold::new(4.0).unwrap();
        assert_eq!(naive_weighted_occurrences(&x, z, &enc("AA")), vec![1, 2, 3, 4]);
        assert_eq!(naive_weighted_occurrences(&x, z, &enc("BB")), vec![5]);
        assert_eq!(naive_weighted_occurrences(&x, z, &enc("AAB")), vec![3, 4]);
        assert_eq!(naive_weighted_occurrences(&x, z, &enc("BAB")), Vec::<usize>::new());
        assert_eq!(naive_weighted_occurrences(&x, z, &[]), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn property_occurrences_fixture_values() {
        let (strings, props) = table2_family();
        // Only position 1 of the all-A string keeps "AA" within its bound.
        assert_eq!(
            naive_property_occurrences(&strings[0], &props[0], &enc("AA")),
            vec![1]
        );
        assert_eq!(
            naive_property_occurrences(&strings[2], &props[2], &enc("BB")),
            vec![5]
        );
        assert_eq!(
            naive_property_occurrences(&strings[3], &props[3], &enc("BB")),
            Vec::<usize>::new()
        );
        // The empty pattern occurs everywhere, including empty windows.
        assert_eq!(
            naive_property_occurrences(&strings[3], &props[3], &[]),
            vec![1, 2, 3, 4, 5, 6]
        );
    }

    #[test]
    fn empty_windows_only() {
        let pi = PropertyArray::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(naive_property_occurrences(&enc("ABBA"), &pi, &enc("A")), Vec::<usize>::new());
        assert_eq!(naive_property_occurrences(&enc("ABBA"), &pi, &[]), vec![1, 2, 3, 4]);
    }

    #[test]
    fn family_counts_match_scaled_floors() {
        let x = table1();
        let z = Threshold::new(4.0).unwrap();
        let (strings, props) = table2_family();
        for (pat, want) in [("", 4), ("A", 3), ("AA", 2), ("AAA", 1), ("AAB", 1), ("B", 1)] {
            assert_eq!(family_count(&strings, &props, &enc(pat), 3), want, "{pat}");
            let (t, _) = factor_counts(&x, z, &enc(pat), 3).unwrap();
            assert_eq!(t as usize, want, "{pat}");
        }
    }
}
