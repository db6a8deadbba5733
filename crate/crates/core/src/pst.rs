//! Compacted trie of the property factors of a string.
//!
//! Given a string and a property array, the factors permitted at position
//! `i` are the prefixes of the window from `i` to its bound. The tree
//! contains exactly those factors: it is the suffix tree of the string with
//! every window end marked as a terminal, then trimmed so that nothing
//! deeper than a window survives and every remaining node is the root, a
//! terminal, or branching.
//!
//! The build runs in three passes over an ordinary suffix tree: locate every
//! window endpoint with an amortized suffix-link walk, split edges at the
//! collected endpoints, and rebuild bottom-up into a breadth-first arena
//! whose terminal lists are flattened in depth-first order, so every
//! subtree's occurrences form one contiguous range.

use crate::error::{Error, Result};
use crate::property::PropertyArray;
use crate::suffix_tree::SuffixTree;

const NONE: u32 = u32::MAX;

const MAGIC: &[u8; 4] = b"PST1";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy)]
struct PstNode {
    parent: u32,
    edge_start: u32,
    edge_len: u32,
    child_base: u32,
    child_count: u32,
    list_base: u32,
    list_len: u32,
    depth: u32,
    range_lo: u32,
    range_hi: u32,
}

/// Instrumentation from one build.
#[derive(Debug, Clone, Copy, Default)]
pub struct PstStats {
    /// Edges entered while locating window endpoints.
    pub edge_traversals: u64,
}

pub struct PropertySuffixTree {
    sigma: usize,
    text: Vec<u8>,
    nodes: Vec<PstNode>,
    entries: Vec<u32>,
}

struct Tmp {
    parent: u32,
    edge_start: u32,
    edge_len: u32,
    entries: Vec<u32>,
    children: Vec<u32>,
}

impl PropertySuffixTree {
    pub fn build(text: &[u8], pi: &PropertyArray, sigma: usize) -> Result<PropertySuffixTree> {
        Self::build_with_stats(text, pi, sigma).map(|(t, _)| t)
    }

    pub fn build_with_stats(
        text: &[u8],
        pi: &PropertyArray,
        sigma: usize,
    ) -> Result<(PropertySuffixTree, PstStats)> {
        if text.len() != pi.len() {
            return Err(Error::validation("property array length mismatch"));
        }
        let n = text.len();
        let st = SuffixTree::build(text, sigma)?;
        let mut stats = PstStats::default();

        // Pass 1: locate the endpoint of every window. The walk keeps the
        // deepest explicit node above the previous endpoint; one suffix
        // link plus skip/count descent reaches the next, since windows
        // shrink by at most one letter per step.
        let mut by_len: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); n + 1];
        let mut root_list: Vec<u32> = Vec::new();
        let mut anc = st.root();
        for i in 1..=n {
            let b = i - 1;
            let ell = pi.end(i) - b;
            if ell == 0 {
                root_list.push(i as u32);
                anc = st.root();
                continue;
            }
            debug_assert!(st.string_depth(anc) <= ell);
            loop {
                let d = st.string_depth(anc);
                if d == ell {
                    let (s0, e0) = st.edge_span(anc);
                    by_len[ell].push((anc, (e0 - s0) as u32, i as u32));
                    break;
                }
                let u = st.child(anc, text[b + d]);
                assert_ne!(u, NONE, "window endpoint not present in suffix tree");
                stats.edge_traversals += 1;
                let (s0, e0) = st.edge_span(u);
                let len = e0 - s0;
                if d + len < ell {
                    anc = u;
                    continue;
                }
                if d + len == ell {
                    by_len[ell].push((u, len as u32, i as u32));
                    anc = u;
                } else {
                    by_len[ell].push((u, (ell - d) as u32, i as u32));
                }
                break;
            }
            anc = st.suffix_link(anc);
        }
        // Distributing in window-length order sorts every edge's endpoint
        // bucket by depth without comparisons.
        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); st.node_count()];
        for group in &by_len {
            for &(node, off, pos) in group {
                buckets[node as usize].push((off, pos));
            }
        }

        // Terminal totals per subtree decide what survives the trim.
        let mut preorder = Vec::with_capacity(st.node_count());
        let mut stack = vec![st.root()];
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for (_, u) in st.children(v) {
                stack.push(u);
            }
        }
        let mut counts = vec![0u32; st.node_count()];
        for &v in &preorder {
            counts[v as usize] = buckets[v as usize].len() as u32;
        }
        for &v in preorder.iter().rev() {
            let p = st.parent(v);
            if p != NONE {
                counts[p as usize] += counts[v as usize];
            }
        }

        // Pass 2 + 3: rebuild top-down. Endpoint offsets split their edge
        // into a chain of terminal nodes; subtrees without terminals are
        // dropped, and a node that would keep a single child and no list is
        // dissolved into the child's edge.
        let mut tmp: Vec<Tmp> = Vec::new();
        tmp.push(Tmp {
            parent: NONE,
            edge_start: 0,
            edge_len: 0,
            entries: root_list,
            children: Vec::new(),
        });

        struct Frame {
            st_node: u32,
            new_parent: u32,
            prepend: u32,
        }
        let mut frames: Vec<Frame> = Vec::new();
        let mut surv_scratch: Vec<u32> = Vec::new();
        let root_surv: Vec<u32> = st
            .children(st.root())
            .filter(|&(_, u)| counts[u as usize] > 0)
            .map(|(_, u)| u)
            .collect();
        for &u in root_surv.iter().rev() {
            frames.push(Frame {
                st_node: u,
                new_parent: 0,
                prepend: 0,
            });
        }
        while let Some(frame) = frames.pop() {
            let u = frame.st_node;
            let (s0, e0) = st.edge_span(u);
            let own_len = (e0 - s0) as u32;
            let merged_len = frame.prepend + own_len;
            let merged_start = s0 as u32 - frame.prepend;

            let mut prev = frame.new_parent;
            let mut prev_off = 0u32;
            let bucket = &buckets[u as usize];
            let mut idx = 0usize;
            while idx < bucket.len() {
                let off = frame.prepend + bucket[idx].0;
                let mut list = Vec::new();
                while idx < bucket.len() && frame.prepend + bucket[idx].0 == off {
                    list.push(bucket[idx].1);
                    idx += 1;
                }
                let id = tmp.len() as u32;
                tmp.push(Tmp {
                    parent: prev,
                    edge_start: merged_start + prev_off,
                    edge_len: off - prev_off,
                    entries: list,
                    children: Vec::new(),
                });
                tmp[prev as usize].children.push(id);
                prev = id;
                prev_off = off;
            }

            surv_scratch.clear();
            for (_, c) in st.children(u) {
                if counts[c as usize] > 0 {
                    surv_scratch.push(c);
                }
            }
            if surv_scratch.is_empty() {
                debug_assert!(prev_off > 0, "kept subtree without terminals");
                continue;
            }
            let attach = if prev_off == merged_len {
                prev
            } else if surv_scratch.len() >= 2 {
                let id = tmp.len() as u32;
                tmp.push(Tmp {
                    parent: prev,
                    edge_start: merged_start + prev_off,
                    edge_len: merged_len - prev_off,
                    entries: Vec::new(),
                    children: Vec::new(),
                });
                tmp[prev as usize].children.push(id);
                id
            } else {
                let c = surv_scratch[0];
                frames.push(Frame {
                    st_node: c,
                    new_parent: prev,
                    prepend: merged_len - prev_off,
                });
                continue;
            };
            for &c in surv_scratch.iter().rev() {
                frames.push(Frame {
                    st_node: c,
                    new_parent: attach,
                    prepend: 0,
                });
            }
        }

        // Renumber breadth-first so sibling blocks are contiguous, then
        // flatten terminal lists depth-first for contiguous subtree ranges.
        let mut order: Vec<u32> = Vec::with_capacity(tmp.len());
        let mut head = 0usize;
        order.push(0);
        let mut new_id = vec![0u32; tmp.len()];
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &c in &tmp[v as usize].children {
                new_id[c as usize] = order.len() as u32;
                order.push(c);
            }
        }
        let mut nodes: Vec<PstNode> = Vec::with_capacity(tmp.len());
        for (id, &old) in order.iter().enumerate() {
            let t = &tmp[old as usize];
            let parent = if id == 0 { NONE } else { new_id[t.parent as usize] };
            let depth = if id == 0 {
                0
            } else {
                nodes[parent as usize].depth + t.edge_len
            };
            debug_assert!(id == 0 || (t.edge_start + t.edge_len) as usize <= n);
            nodes.push(PstNode {
                parent,
                edge_start: t.edge_start,
                edge_len: t.edge_len,
                child_base: 0,
                child_count: t.children.len() as u32,
                list_base: 0,
                list_len: t.entries.len() as u32,
                depth,
                range_lo: 0,
                range_hi: 0,
            });
        }
        for (id, &old) in order.iter().enumerate() {
            let t = &tmp[old as usize];
            if let Some(&first) = t.children.first() {
                nodes[id].child_base = new_id[first as usize];
            }
        }

        let mut entries: Vec<u32> = Vec::with_capacity(n);
        let mut subtree = vec![0u32; nodes.len()];
        for id in (0..nodes.len()).rev() {
            subtree[id] += nodes[id].list_len;
            let p = nodes[id].parent;
            if p != NONE {
                subtree[p as usize] += subtree[id];
            }
        }
        let mut dfs = vec![0u32];
        while let Some(v) = dfs.pop() {
            let node = &mut nodes[v as usize];
            node.range_lo = entries.len() as u32;
            node.range_hi = node.range_lo + subtree[v as usize];
            node.list_base = node.range_lo;
            let old = order[v as usize];
            entries.extend_from_slice(&tmp[old as usize].entries);
            let (base, count) = (node.child_base, node.child_count);
            for c in (base..base + count).rev() {
                dfs.push(c);
            }
        }
        debug_assert_eq!(entries.len(), n);
        debug_assert!(nodes.len() <= 2 * n + 1);

        let pst = PropertySuffixTree {
            sigma,
            text: text.to_vec(),
            nodes,
            entries,
        };
        Ok((pst, stats))
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// The indexed string, rank-encoded.
    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn parent(&self, v: u32) -> u32 {
        self.nodes[v as usize].parent
    }

    pub fn depth(&self, v: u32) -> usize {
        self.nodes[v as usize].depth as usize
    }

    pub fn children(&self, v: u32) -> std::ops::Range<u32> {
        let node = &self.nodes[v as usize];
        node.child_base..node.child_base + node.child_count
    }

    /// Label of the edge entering `v`.
    pub fn edge(&self, v: u32) -> &[u8] {
        let node = &self.nodes[v as usize];
        &self.text[node.edge_start as usize..(node.edge_start + node.edge_len) as usize]
    }

    /// Half-open index range of `v`'s subtree within [`entries`].
    ///
    /// [`entries`]: PropertySuffixTree::entries
    pub fn entry_range(&self, v: u32) -> (usize, usize) {
        let node = &self.nodes[v as usize];
        (node.range_lo as usize, node.range_hi as usize)
    }

    /// All positions, 1-based, whose windows pass through `v`, as one slice
    /// of the flattened terminal lists.
    pub fn subtree_entries(&self, v: u32) -> &[u32] {
        let node = &self.nodes[v as usize];
        &self.entries[node.range_lo as usize..node.range_hi as usize]
    }

    /// Positions whose windows end exactly at `v`.
    pub fn own_entries(&self, v: u32) -> &[u32] {
        let node = &self.nodes[v as usize];
        &self.entries[node.list_base as usize..(node.list_base + node.list_len) as usize]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Deepest node whose path label extends `pattern`, if the pattern is a
    /// permitted factor.
    pub fn locate(&self, pattern: &[u8]) -> Option<u32> {
        let mut v = 0u32;
        let mut m = 0usize;
        while m < pattern.len() {
            let mut next = NONE;
            for c in self.children(v) {
                if self.text[self.nodes[c as usize].edge_start as usize] == pattern[m] {
                    next = c;
                    break;
                }
            }
            if next == NONE {
                return None;
            }
            let node = &self.nodes[next as usize];
            let start = node.edge_start as usize;
            let take = (node.edge_len as usize).min(pattern.len() - m);
            if self.text[start..start + take] != pattern[m..m + take] {
                return None;
            }
            m += take;
            v = next;
        }
        Some(v)
    }

    /// Whether `pattern` occurs at any position within its property window.
    pub fn decide(&self, pattern: &[u8]) -> bool {
        self.locate(pattern).is_some()
    }

    /// Number of positions where `pattern` occurs within the property
    /// window.
    pub fn count(&self, pattern: &[u8]) -> usize {
        self.locate(pattern)
            .map_or(0, |v| self.subtree_entries(v).len())
    }

    /// Sorted positions where `pattern` occurs within the property window.
    pub fn report(&self, pattern: &[u8]) -> Vec<usize> {
        let Some(v) = self.locate(pattern) else {
            return Vec::new();
        };
        let mut out: Vec<usize> = self.subtree_entries(v).iter().map(|&p| p as usize).collect();
        out.sort_unstable();
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.sigma as u32).to_le_bytes());
        out.extend_from_slice(&(self.text.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.text);
        out.extend_from_slice(&(self.nodes.len() as u64).to_le_bytes());
        for node in &self.nodes {
            for field in [
                node.parent,
                node.edge_start,
                node.edge_len,
                node.child_base,
                node.child_count,
                node.list_base,
                node.list_len,
            ] {
                out.extend_from_slice(&field.to_le_bytes());
            }
        }
        out.extend_from_slice(&(self.entries.len() as u64).to_le_bytes());
        for &e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<PropertySuffixTree> {
        let mut cur = Cursor { bytes, at: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::format("bad magic"));
        }
        if cur.u32()? != VERSION {
            return Err(Error::format("unsupported version"));
        }
        let sigma = cur.u32()? as usize;
        if sigma == 0 || sigma > 128 {
            return Err(Error::format("alphabet size out of range"));
        }
        let text_len = cur.u64()? as usize;
        let text = cur.take(text_len)?.to_vec();
        if text.iter().any(|&c| c as usize >= sigma) {
            return Err(Error::format("text rank out of range"));
        }
        let node_count = cur.u64()? as usize;
        if node_count == 0 || node_count > 2 * text_len + 1 {
            return Err(Error::format("node count out of range"));
        }
        let mut nodes = Vec::with_capacity(node_count);
        for id in 0..node_count {
            let parent = cur.u32()?;
            let edge_start = cur.u32()?;
            let edge_len = cur.u32()?;
            let child_base = cur.u32()?;
            let child_count = cur.u32()?;
            let list_base = cur.u32()?;
            let list_len = cur.u32()?;
            if id == 0 {
                if parent != NONE || edge_len != 0 {
                    return Err(Error::format("malformed root"));
                }
            } else {
                if parent as usize >= id {
                    return Err(Error::format("parent does not precede child"));
                }
                if edge_len == 0 {
                    return Err(Error::format("empty edge"));
                }
                if edge_start as usize + edge_len as usize > text_len {
                    return Err(Error::format("edge span out of range"));
                }
            }
            if child_count > 0
                && (child_base as usize <= id
                    || child_base as usize + child_count as usize > node_count)
            {
                return Err(Error::format("child range out of range"));
            }
            nodes.push(PstNode {
                parent,
                edge_start,
                edge_len,
                child_base,
                child_count,
                list_base,
                list_len,
                depth: 0,
                range_lo: 0,
                range_hi: 0,
            });
        }
        let entry_count = cur.u64()? as usize;
        if entry_count != text_len {
            return Err(Error::format("terminal list size mismatch"));
        }
        let mut entries = Vec::with_capacity(entry_count);
        for _ in 0..entry_count {
            let e = cur.u32()?;
            if e == 0 || e as usize > text_len {
                return Err(Error::format("terminal position out of range"));
            }
            entries.push(e);
        }
        if cur.at != bytes.len() {
            return Err(Error::format("trailing bytes"));
        }

        for id in 1..node_count {
            let p = nodes[id].parent as usize;
            let (base, count) = (nodes[p].child_base as usize, nodes[p].child_count as usize);
            if id < base || id >= base + count {
                return Err(Error::format("child outside parent block"));
            }
            nodes[id].depth = nodes[p].depth + nodes[id].edge_len;
        }
        let mut subtree = vec![0u64; node_count];
        for id in (0..node_count).rev() {
            subtree[id] += nodes[id].list_len as u64;
            let p = nodes[id].parent;
            if p != NONE {
                subtree[p as usize] += subtree[id];
            }
        }
        let mut at = 0u64;
        let mut dfs = vec![0u32];
        while let Some(v) = dfs.pop() {
            let node = &mut nodes[v as usize];
            node.range_lo = at as u32;
            node.range_hi = (at + subtree[v as usize]) as u32;
            if node.list_base != node.range_lo {
                return Err(Error::format("terminal list out of order"));
            }
            if node.list_base as u64 + node.list_len as u64 > entry_count as u64 {
                return Err(Error::format("terminal list out of range"));
            }
            at += node.list_len as u64;
            let (base, count) = (node.child_base, node.child_count);
            for c in (base..base + count).rev() {
                dfs.push(c);
            }
        }
        if at != entry_count as u64 {
            return Err(Error::format("unreachable nodes"));
        }

        Ok(PropertySuffixTree {
            sigma,
            text,
            nodes,
            entries,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.at + len > self.bytes.len() {
            return Err(Error::format("truncated input"));
        }
        let out = &self.bytes[self.at..self.at + len];
        self.at += len;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
