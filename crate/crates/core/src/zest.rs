//! Construction of the estimation family.
//!
//! The builder sweeps the sequence right to left. At every step it holds the
//! trie of all factors that are solid at the current position, with `⌊z⌋`
//! tokens distributed over the nodes; token `j` resting on the node labelled
//! `P` means string `j` starts with `P` here, and its property bound covers
//! exactly `|P|` letters.
//!
//! One step rebuilds the trie for the position to the left: the old trie is
//! re-rooted under the most probable letter, the subtrees for the other
//! letters are grown against it, and every token walks rootward until it
//! finds a node that still needs tokens, hands itself to a request from a
//! sibling subtree, or reaches the root and restarts from the empty string.
//! Nodes drained of children and tokens are freed during the walks, which
//! keeps total node churn linear in `n · ⌊z⌋`.

use crate::error::{Error, Result};
use crate::oracle::{enumerate_multiset, family_count};
use crate::prob::scaled_floor_log2;
use crate::property::PropertyArray;
use crate::seq::{Threshold, WeightedSequence};

const NONE: u32 = u32::MAX;
const M_UNSET: u32 = u32::MAX;

/// A family of `⌊z⌋` strings with property arrays, equivalent to the
/// weighted sequence it was built from: for every pattern and position, the
/// number of family strings matching within their property bound equals
/// `⌊prob · z⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZEstimation {
    n: usize,
    strings: Vec<Vec<u8>>,
    props: Vec<PropertyArray>,
}

impl ZEstimation {
    pub fn new(strings: Vec<Vec<u8>>, props: Vec<PropertyArray>, n: usize) -> Result<ZEstimation> {
        if strings.len() != props.len() {
            return Err(Error::validation("string and property counts differ"));
        }
        for (s, p) in strings.iter().zip(&props) {
            if s.len() != n || p.len() != n {
                return Err(Error::validation("family member length mismatch"));
            }
        }
        Ok(ZEstimation { n, strings, props })
    }

    /// Number of strings, `⌊z⌋`.
    pub fn size(&self) -> usize {
        self.strings.len()
    }

    /// Length of every string.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn props(&self) -> &[PropertyArray] {
        &self.props
    }

    /// The factor of string `j` anchored at 1-based position `i`: the window
    /// from `i` to its property bound.
    pub fn window(&self, j: usize, i: usize) -> &[u8] {
        &self.strings[j][i - 1..self.props[j].end(i)]
    }
}

/// Instrumentation counters from one build.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildStats {
    pub nodes_created: u64,
    pub nodes_deleted: u64,
    /// Upward moves performed by token walks.
    pub token_steps: u64,
    pub requests_issued: u64,
    pub peak_live_nodes: usize,
}

struct Node {
    parent: u32,
    edge_letter: u8,
    /// Text position just after the label's last letter. Prepending heavy
    /// letters moves a label's start, never its end, so this is fixed at
    /// creation; the label length at position `i` is `end - i`.
    end: u32,
    child_count: u32,
    /// Tokens currently resting here, settled or not yet walked.
    tokens_here: u32,
    // Per-step scratch, valid only when `stamp` matches the current step.
    stamp: u32,
    placed: u32,
    m_cached: u32,
    request_head: u32,
}

struct Token {
    node: u32,
    log2p: f64,
    len: u32,
    first: u8,
}

struct Request {
    target: u32,
    count: u32,
    log2p: f64,
    first: u8,
    next: u32,
}

/// Step-by-step builder exposing the trie between positions, mainly for
/// inspection and tests. [`build_z_estimation`] drives it to completion.
pub struct EstimationBuilder<'a> {
    x: &'a WeightedSequence,
    z: f64,
    k: usize,
    /// The position whose trie is current; starts at `n + 1`, ends at 1.
    pos: usize,
    nodes: Vec<Node>,
    children: Vec<u32>,
    free: Vec<u32>,
    root: u32,
    live: usize,
    sigma: usize,
    tokens: Vec<Token>,
    requests: Vec<Request>,
    outstanding: u64,
    stamp: u32,
    strings: Vec<Vec<u8>>,
    props: Vec<Vec<usize>>,
    stats: BuildStats,
}

impl<'a> EstimationBuilder<'a> {
    pub fn new(x: &'a WeightedSequence, z: Threshold) -> EstimationBuilder<'a> {
        let n = x.len();
        let k = z.floor();
        let sigma = x.alphabet().size();
        let mut b = EstimationBuilder {
            x,
            z: z.z(),
            k,
            pos: n + 1,
            nodes: Vec::new(),
            children: Vec::new(),
            free: Vec::new(),
            root: 0,
            live: 0,
            sigma,
            tokens: Vec::new(),
            requests: Vec::new(),
            outstanding: 0,
            stamp: 0,
            strings: vec![vec![0u8; n]; k],
            props: vec![vec![0usize; n]; k],
            stats: BuildStats::default(),
        };
        let root = b.alloc(NONE, 0, (n + 1) as u32);
        b.root = root;
        b.nodes[root as usize].tokens_here = k as u32;
        for _ in 0..k {
            b.tokens.push(Token {
                node: root,
                log2p: 0.0,
                len: 0,
                first: 0,
            });
        }
        b
    }

    /// The index of the current trie; `advance` moves it down to 1.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    pub fn live_nodes(&self) -> usize {
        self.live
    }

    fn alloc(&mut self, parent: u32, edge_letter: u8, end: u32) -> u32 {
        self.stats.nodes_created += 1;
        self.live += 1;
        let id = match self.free.pop() {
            Some(id) => {
                let base = id as usize * self.sigma;
                self.children[base..base + self.sigma].fill(NONE);
                id
            }
            None => {
                self.nodes.push(Node {
                    parent: NONE,
                    edge_letter: 0,
                    end: 0,
                    child_count: 0,
                    tokens_here: 0,
                    stamp: 0,
                    placed: 0,
                    m_cached: M_UNSET,
                    request_head: NONE,
                });
                self.children.extend(std::iter::repeat(NONE).take(self.sigma));
                (self.nodes.len() - 1) as u32
            }
        };
        let node = &mut self.nodes[id as usize];
        node.parent = parent;
        node.edge_letter = edge_letter;
        node.end = end;
        node.child_count = 0;
        node.tokens_here = 0;
        node.stamp = 0;
        node.m_cached = M_UNSET;
        node.request_head = NONE;
        id
    }

    fn release(&mut self, id: u32) {
        self.stats.nodes_deleted += 1;
        self.live -= 1;
        self.free.push(id);
    }

    fn child(&self, v: u32, c: u8) -> u32 {
        self.children[v as usize * self.sigma + c as usize]
    }

    fn set_child(&mut self, v: u32, c: u8, u: u32) {
        let slot = v as usize * self.sigma + c as usize;
        debug_assert_eq!(self.children[slot], NONE);
        self.children[slot] = u;
        self.nodes[v as usize].child_count += 1;
    }

    fn unset_child(&mut self, v: u32, c: u8) {
        let slot = v as usize * self.sigma + c as usize;
        debug_assert_ne!(self.children[slot], NONE);
        self.children[slot] = NONE;
        self.nodes[v as usize].child_count -= 1;
    }

    /// Resets per-step scratch on first touch in the current step.
    fn touch(&mut self, v: u32) {
        let node = &mut self.nodes[v as usize];
        if node.stamp != self.stamp {
            node.stamp = self.stamp;
            node.placed = 0;
            node.m_cached = M_UNSET;
            node.request_head = NONE;
        }
    }

    fn floor_scaled(&self, log2p: f64) -> u64 {
        scaled_floor_log2(log2p, self.z)
    }

    /// Token capacity of node `v`: its own count minus the counts of its
    /// one-letter extensions. Cached for the step so that every walk sees
    /// the same value.
    fn capacity(&mut self, v: u32, log2p: f64) -> u32 {
        self.touch(v);
        if self.nodes[v as usize].m_cached != M_UNSET {
            return self.nodes[v as usize].m_cached;
        }
        let t = self.floor_scaled(log2p);
        let next = self.nodes[v as usize].end as usize;
        let mut ext = 0u64;
        if next <= self.x.len() {
            for c in 0..self.sigma as u8 {
                ext += self.floor_scaled(log2p + self.x.log2_prob(next, c));
            }
        }
        assert!(ext <= t, "extension counts exceed node count");
        let m = (t - ext) as u32;
        self.nodes[v as usize].m_cached = m;
        m
    }

    /// Transforms the trie for position `pos` into the trie for `pos - 1`
    /// and records every string's letter and property bound there.
    pub fn advance(&mut self) {
        assert!(self.pos > 1, "already at the leftmost position");
        let i = self.pos - 1;
        self.stamp += 1;
        self.requests.clear();
        debug_assert_eq!(self.outstanding, 0);

        let heavy = self.x.heavy_rank(i);
        let heavy_log2 = self.x.log2_prob(i, heavy);

        // Re-root: the old trie becomes the subtree under the heavy letter.
        // Labels gain a leading letter but keep their end positions.
        let old_root = self.root;
        debug_assert_eq!(self.nodes[old_root as usize].end as usize, i + 1);
        let new_root = self.alloc(NONE, 0, i as u32);
        self.set_child(new_root, heavy, old_root);
        self.nodes[old_root as usize].parent = new_root;
        self.nodes[old_root as usize].edge_letter = heavy;
        self.root = new_root;

        // Grow one subtree per remaining letter, mirroring the heavy one.
        // A node is created wherever the count stays positive, and the
        // difference against the extension counts becomes a token request
        // on the mirrored node.
        let mut build_stack: Vec<(u32, u32, f64)> = Vec::new();
        for c in 0..self.sigma as u8 {
            if c == heavy {
                continue;
            }
            let lp = self.x.log2_prob(i, c);
            if self.floor_scaled(lp) == 0 {
                continue;
            }
            let top = self.alloc(new_root, c, (i + 1) as u32);
            self.set_child(new_root, c, top);
            build_stack.push((top, old_root, lp));
            while let Some((u, twin, lp)) = build_stack.pop() {
                let next = self.nodes[u as usize].end as usize;
                let mut ext = 0u64;
                if next <= self.x.len() {
                    for c2 in 0..self.sigma as u8 {
                        let lp2 = lp + self.x.log2_prob(next, c2);
                        let t2 = self.floor_scaled(lp2);
                        ext += t2;
                        if t2 > 0 {
                            let twin2 = self.child(twin, c2);
                            assert_ne!(twin2, NONE, "mirrored node missing in heavy subtree");
                            let u2 = self.alloc(u, c2, (next + 1) as u32);
                            self.set_child(u, c2, u2);
                            build_stack.push((u2, twin2, lp2));
                        }
                    }
                }
                let t = self.floor_scaled(lp);
                assert!(ext <= t, "extension counts exceed node count");
                let need = (t - ext) as u32;
                if need > 0 {
                    self.touch(twin);
                    let head = self.nodes[twin as usize].request_head;
                    self.requests.push(Request {
                        target: u,
                        count: need,
                        log2p: lp,
                        first: c,
                        next: head,
                    });
                    self.nodes[twin as usize].request_head = (self.requests.len() - 1) as u32;
                    self.outstanding += need as u64;
                    self.stats.requests_issued += need as u64;
                }
            }
        }

        // Walk every token rootward to its slot for this position.
        for j in 0..self.k {
            let old_len = self.tokens[j].len;
            let start = self.tokens[j].node;
            self.nodes[start as usize].tokens_here -= 1;
            let mut lp = heavy_log2 + self.tokens[j].log2p;
            let mut v = start;
            let mut steps = 0u32;
            loop {
                if v == new_root {
                    self.tokens[j] = Token {
                        node: new_root,
                        log2p: 0.0,
                        len: 0,
                        first: heavy,
                    };
                    self.nodes[new_root as usize].tokens_here += 1;
                    break;
                }
                self.touch(v);
                let head = self.nodes[v as usize].request_head;
                if head != NONE {
                    let req = &mut self.requests[head as usize];
                    req.count -= 1;
                    let (target, log2p, first, next) = (req.target, req.log2p, req.first, req.next);
                    if req.count == 0 {
                        self.nodes[v as usize].request_head = next;
                    }
                    self.outstanding -= 1;
                    self.tokens[j] = Token {
                        node: target,
                        log2p,
                        len: self.nodes[target as usize].end - i as u32,
                        first,
                    };
                    self.nodes[target as usize].tokens_here += 1;
                    break;
                }
                let m = self.capacity(v, lp);
                if self.nodes[v as usize].placed < m {
                    self.nodes[v as usize].placed += 1;
                    self.tokens[j] = Token {
                        node: v,
                        log2p: lp,
                        len: self.nodes[v as usize].end - i as u32,
                        first: heavy,
                    };
                    self.nodes[v as usize].tokens_here += 1;
                    break;
                }
                let node = &self.nodes[v as usize];
                let parent = node.parent;
                let (edge_letter, end) = (node.edge_letter, node.end as usize);
                lp -= self.x.log2_prob(end - 1, edge_letter);
                steps += 1;
                self.stats.token_steps += 1;
                if node.child_count == 0 && node.tokens_here == 0 {
                    self.unset_child(parent, edge_letter);
                    self.release(v);
                }
                v = parent;
            }
            debug_assert!(steps as u64 <= 1 + old_len as u64 - self.tokens[j].len as u64);
        }
        assert_eq!(self.outstanding, 0, "token request left unserved");

        for j in 0..self.k {
            let tok = &self.tokens[j];
            self.strings[j][i - 1] = if tok.len == 0 { heavy } else { tok.first };
            self.props[j][i - 1] = i - 1 + tok.len as usize;
        }

        self.stats.peak_live_nodes = self.stats.peak_live_nodes.max(self.live);
        self.pos = i;
    }

    pub fn finish(self) -> (ZEstimation, BuildStats) {
        assert_eq!(self.pos, 1, "builder has positions left to process");
        let n = self.x.len();
        let props = self
            .props
            .into_iter()
            .map(|p| PropertyArray::new(p, n).expect("builder produced an invalid property array"))
            .collect();
        (
            ZEstimation {
                n,
                strings: self.strings,
                props,
            },
            self.stats,
        )
    }

    /// The label every token currently rests on; together they form the
    /// factor multiset of the current position.
    pub fn token_labels(&self) -> Vec<Vec<u8>> {
        self.tokens
            .iter()
            .map(|t| {
                let mut label = Vec::with_capacity(t.len as usize);
                let mut v = t.node;
                while v != self.root {
                    label.push(self.nodes[v as usize].edge_letter);
                    v = self.nodes[v as usize].parent;
                }
                label.reverse();
                label
            })
            .collect()
    }

    /// Snapshot of the live trie as `(label, resting tokens)` pairs sorted
    /// by label.
    pub fn trie_nodes(&self) -> Vec<(Vec<u8>, usize)> {
        let mut out = Vec::with_capacity(self.live);
        let mut stack: Vec<(u32, Vec<u8>)> = vec![(self.root, Vec::new())];
        while let Some((v, label)) = stack.pop() {
            for c in (0..self.sigma as u8).rev() {
                let u = self.child(v, c);
                if u != NONE {
                    let mut ext = label.clone();
                    ext.push(c);
                    stack.push((u, ext));
                }
            }
            out.push((label, self.nodes[v as usize].tokens_here as usize));
        }
        out.sort();
        out
    }

    /// Indented text dump of the current trie: edge letter, label
    /// probability, resting token ids, pending request count.
    pub fn dump_trie(&self) -> String {
        use std::fmt::Write;
        let mut by_node: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (id, t) in self.tokens.iter().enumerate() {
            by_node[t.node as usize].push(id + 1);
        }
        let mut out = format!("T_{}\n", self.pos);
        let mut stack: Vec<(u32, usize, f64)> = vec![(self.root, 0, 0.0)];
        while let Some((v, depth, lp)) = stack.pop() {
            let node = &self.nodes[v as usize];
            let letter = if v == self.root {
                '.'
            } else {
                self.x.alphabet().letter(node.edge_letter) as char
            };
            let _ = write!(out, "{:indent$}{letter} p={:.6}", "", lp.exp2(), indent = depth * 2);
            if !by_node[v as usize].is_empty() {
                let ids: Vec<String> = by_node[v as usize].iter().map(|j| j.to_string()).collect();
                let _ = write!(out, " tokens=[{}]", ids.join(","));
            }
            let mut pending = 0u32;
            if node.stamp == self.stamp {
                let mut r = node.request_head;
                while r != NONE {
                    pending += self.requests[r as usize].count;
                    r = self.requests[r as usize].next;
                }
            }
            if pending > 0 {
                let _ = write!(out, " requests={pending}");
            }
            out.push('\n');
            for c in (0..self.sigma as u8).rev() {
                let u = self.child(v, c);
                if u != NONE {
                    let end = self.nodes[u as usize].end as usize;
                    let lp2 = lp + self.x.log2_prob(end - 1, self.nodes[u as usize].edge_letter);
                    stack.push((u, depth + 1, lp2));
                }
            }
        }
        out
    }
}

/// Builds the estimation family for `x` under threshold `z`.
pub fn build_z_estimation(x: &WeightedSequence, z: Threshold) -> ZEstimation {
    build_z_estimation_with_stats(x, z).0
}

pub fn build_z_estimation_with_stats(x: &WeightedSequence, z: Threshold) -> (ZEstimation, BuildStats) {
    let mut b = EstimationBuilder::new(x, z);
    while b.position() > 1 {
        b.advance();
    }
    b.finish()
}

/// Checks a family against the defining count equality, using the
/// brute-force oracles: at every position the family's factor multiset must
/// equal the enumerated one, and for every prefix of a member plus every
/// one-letter extension the family match count must equal `⌊prob · z⌋`.
pub fn verify_z_estimation(x: &WeightedSequence, z: Threshold, fam: &ZEstimation) -> Result<bool> {
    let n = x.len();
    if fam.size() != z.floor() || fam.len() != n {
        return Ok(false);
    }
    for i in 1..=n {
        let mut expected = enumerate_multiset(x, z, i)?;
        let mut actual: Vec<Vec<u8>> = (0..fam.size()).map(|j| fam.window(j, i).to_vec()).collect();
        expected.sort();
        actual.sort();
        if expected != actual {
            return Ok(false);
        }

        let mut patterns: Vec<Vec<u8>> = Vec::new();
        for member in &expected {
            for l in 0..=member.len() {
                patterns.push(member[..l].to_vec());
                for c in 0..x.alphabet().size() as u8 {
                    let mut ext = member[..l].to_vec();
                    ext.push(c);
                    patterns.push(ext);
                }
            }
        }
        patterns.sort();
        patterns.dedup();
        for p in &patterns {
            let counted = family_count(fam.strings(), fam.props(), p, i);
            let t = if i + p.len() <= n + 1 {
                crate::seq::factor_counts(x, z, p, i)?.0 as usize
            } else {
                0
            };
            if counted != t {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
