//! Suffix tree over a rank-encoded text, built online in linear time.
//!
//! A unique sentinel rank (one past the alphabet) is appended so every
//! suffix ends at a leaf. Nodes live in an arena with flat child tables;
//! suffix links are kept for all internal nodes, and a post-build pass fills
//! in parents, string depths, and leaf suffix indices.

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

struct StNode {
    start: u32,
    end: u32,
    slink: u32,
    parent: u32,
    depth: u32,
    suffix: u32,
}

pub struct SuffixTree {
    sigma: usize,
    text: Vec<u8>,
    nodes: Vec<StNode>,
    children: Vec<u32>,
}

impl SuffixTree {
    /// Builds the tree for `text`, whose bytes must be ranks below `sigma`.
    /// The sentinel rank `sigma` is appended internally.
    pub fn build(text: &[u8], sigma: usize) -> Result<SuffixTree> {
        if sigma == 0 || sigma > 128 {
            return Err(Error::validation("alphabet size out of range"));
        }
        if let Some(&bad) = text.iter().find(|&&c| c as usize >= sigma) {
            return Err(Error::validation(format!(
                "text rank {bad} not below alphabet size {sigma}"
            )));
        }
        let mut full = Vec::with_capacity(text.len() + 1);
        full.extend_from_slice(text);
        full.push(sigma as u8);
        let mut tree = SuffixTree {
            sigma,
            text: full,
            nodes: Vec::new(),
            children: Vec::new(),
        };
        tree.new_node(0, 0);
        tree.construct();
        tree.annotate();
        Ok(tree)
    }

    fn width(&self) -> usize {
        self.sigma + 1
    }

    fn new_node(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(StNode {
            start: start as u32,
            end: end as u32,
            slink: 0,
            parent: NONE,
            depth: 0,
            suffix: NONE,
        });
        let w = self.width();
        self.children.extend(std::iter::repeat(NONE).take(w));
        id
    }

    fn construct(&mut self) {
        let n = self.text.len();
        let mut active_node = 0u32;
        let mut active_edge = 0usize;
        let mut active_len = 0usize;
        let mut remainder = 0usize;
        for pos in 0..n {
            let cur = self.text[pos];
            let mut need_slink = NONE;
            remainder += 1;
            while remainder > 0 {
                if active_len == 0 {
                    active_edge = pos;
                }
                let edge_first = self.text[active_edge];
                let next = self.child(active_node, edge_first);
                if next == NONE {
                    let leaf = self.new_node(pos, n);
                    self.set_child(active_node, edge_first, leaf);
                    if need_slink != NONE {
                        self.nodes[need_slink as usize].slink = active_node;
                    }
                    need_slink = active_node;
                } else {
                    let span = (self.nodes[next as usize].end as usize).min(pos + 1)
                        - self.nodes[next as usize].start as usize;
                    if active_len >= span {
                        active_edge += span;
                        active_len -= span;
                        active_node = next;
                        continue;
                    }
                    let probe = self.nodes[next as usize].start as usize + active_len;
                    if self.text[probe] == cur {
                        active_len += 1;
                        if need_slink != NONE {
                            self.nodes[need_slink as usize].slink = active_node;
                        }
                        break;
                    }
                    let split_start = self.nodes[next as usize].start as usize;
                    let split = self.new_node(split_start, split_start + active_len);
                    self.replace_child(active_node, edge_first, split);
                    let leaf = self.new_node(pos, n);
                    self.set_child(split, cur, leaf);
                    self.nodes[next as usize].start += active_len as u32;
                    let next_first = self.text[self.nodes[next as usize].start as usize];
                    self.set_child(split, next_first, next);
                    if need_slink != NONE {
                        self.nodes[need_slink as usize].slink = split;
                    }
                    need_slink = split;
                }
                remainder -= 1;
                if active_node == 0 && active_len > 0 {
                    active_len -= 1;
                    active_edge = pos - remainder + 1;
                } else if active_node != 0 {
                    active_node = self.nodes[active_node as usize].slink;
                }
            }
        }
        debug_assert_eq!(remainder, 0);
    }

    fn annotate(&mut self) {
        let n = self.text.len() as u32;
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            let depth = self.nodes[v as usize].depth;
            let mut leaf = true;
            for c in 0..self.width() as u8 {
                let u = self.child(v, c);
                if u != NONE {
                    leaf = false;
                    let node = &mut self.nodes[u as usize];
                    node.parent = v;
                    node.depth = depth + (node.end - node.start);
                    stack.push(u);
                }
            }
            if leaf && v != 0 {
                self.nodes[v as usize].suffix = n - depth;
            }
        }
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Full text including the sentinel rank.
    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn child(&self, v: u32, rank: u8) -> u32 {
        self.children[v as usize * self.width() + rank as usize]
    }

    fn set_child(&mut self, v: u32, rank: u8, u: u32) {
        let slot = v as usize * self.width() + rank as usize;
        debug_assert_eq!(self.children[slot], NONE);
        self.children[slot] = u;
    }

    fn replace_child(&mut self, v: u32, rank: u8, u: u32) {
        let slot = v as usize * self.width() + rank as usize;
        debug_assert_ne!(self.children[slot], NONE);
        self.children[slot] = u;
    }

    pub fn children(&self, v: u32) -> impl Iterator<Item = (u8, u32)> + '_ {
        let base = v as usize * self.width();
        self.children[base..base + self.width()]
            .iter()
            .enumerate()
            .filter(|(_, &u)| u != NONE)
            .map(|(c, &u)| (c as u8, u))
    }

    pub fn parent(&self, v: u32) -> u32 {
        self.nodes[v as usize].parent
    }

    pub fn suffix_link(&self, v: u32) -> u32 {
        self.nodes[v as usize].slink
    }

    /// 0-based half-open span of the edge entering `v`.
    pub fn edge_span(&self, v: u32) -> (usize, usize) {
        let node = &self.nodes[v as usize];
        (node.start as usize, node.end as usize)
    }

    /// Total label length from the root down to `v`.
    pub fn string_depth(&self, v: u32) -> usize {
        self.nodes[v as usize].depth as usize
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.nodes[v as usize].suffix != NONE
    }

    /// 0-based start of the suffix a leaf spells out.
    pub fn suffix_index(&self, v: u32) -> Option<usize> {
        let s = self.nodes[v as usize].suffix;
        (s != NONE).then_some(s as usize)
    }

    /// Walks `pattern` down from the root by comparing edge letters.
    /// Returns the node at or below the endpoint plus the number of pattern
    /// letters already covered by that node's ancestors.
    pub fn descend(&self, pattern: &[u8]) -> Option<(u32, usize)> {
        let mut v = self.root();
        let mut matched = 0usize;
        while matched < pattern.len() {
            let u = self.child(v, pattern[matched]);
            if u == NONE {
                return None;
            }
            let (start, end) = self.edge_span(u);
            let take = (end - start).min(pattern.len() - matched);
            if self.text[start..start + take] != pattern[matched..matched + take] {
                return None;
            }
            matched += take;
            v = u;
        }
        Some((v, matched))
    }

    /// 1-based starting positions of `pattern` in the text (sentinel
    /// excluded), sorted ascending.
    pub fn occurrences(&self, pattern: &[u8]) -> Vec<usize> {
        let Some((top, _)) = self.descend(pattern) else {
            return Vec::new();
        };
        let limit = self.text.len() - 1;
        let mut out = Vec::new();
        let mut stack = vec![top];
        while let Some(v) = stack.pop() {
            if let Some(s) = self.suffix_index(v) {
                if s + pattern.len().max(1) <= limit {
                    out.push(s + 1);
                }
            }
            for (_, u) in self.children(v) {
                stack.push(u);
            }
        }
        out.sort_unstable();
        out
    }
}
