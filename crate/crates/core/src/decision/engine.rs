//! Trace vertex selection and window counts.
//!
//! [`ReferenceSource`] recomputes everything with `pick_next` and the
//! component scan behind `window` at each step. [`BlockTreeSource`] keeps the block-cut tree,
//! prefix sums of odd vertices over its DFS order, and the Steiner tree of
//! the unresolved vertices, so each step costs `O(deg log n)`.
//!
//! An unresolved vertex has every component of `G - x` except at most one
//! resolved exactly when it is a leaf of that Steiner tree; those are also
//! the vertices maximising `max_C |C ∩ U|`, so both sources pick the same
//! vertex (smallest id among the leaves).

use std::collections::{BTreeMap, BTreeSet};

use super::{pick_next, window_counts, DecisionError, Partition, StepSource};
use crate::constraints::Parity;
use crate::graph::{BlockDecomposition, MultiGraph, VertexId};

pub(crate) struct ReferenceSource<'a> {
    g: &'a MultiGraph,
}

impl<'a> ReferenceSource<'a> {
    pub(crate) fn new(g: &'a MultiGraph) -> Self {
        Self { g }
    }
}

impl StepSource for ReferenceSource<'_> {
    fn next(&mut self, partition: &Partition) -> Result<Option<(VertexId, usize, usize)>, DecisionError> {
        let unresolved = partition.unresolved();
        if unresolved.is_empty() {
            return Ok(None);
        }
        let x = pick_next(self.g, &unresolved)?;
        let (lower, excluded, open) = window_counts(self.g, x, partition)?;
        if open > 1 {
            return Err(DecisionError::TooManyUnresolvedComponents { vertex: x, count: open });
        }
        Ok(Some((x, lower, excluded)))
    }

    fn commit(&mut self, _x: VertexId, _parity: Parity) {}
}

struct Fenwick(Vec<i64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    fn add(&mut self, at: usize, delta: i64) {
        let mut i = at + 1;
        while i < self.0.len() {
            self.0[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, end: usize) -> i64 {
        let mut i = end;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Sum over positions `lo..=hi`.
    fn range(&self, lo: usize, hi: usize) -> i64 {
        self.prefix(hi + 1) - self.prefix(lo)
    }
}

const NONE: usize = usize::MAX;

pub(crate) struct BlockTreeSource<'a> {
    g: &'a MultiGraph,
    block_count: usize,
    cut_node: Vec<usize>,
    cut_vertex: Vec<VertexId>,
    /// Per node: `(neighbour, edges of the block at the cut vertex)`.
    adj: Vec<Vec<(usize, usize)>>,
    parent: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Edges owned by blocks in each node's subtree.
    edges_below: Vec<usize>,
    odd: Fenwick,
    total_odd: usize,
    alive: Vec<bool>,
    live_degree: Vec<usize>,
    terminal: Vec<bool>,
    leaves: BTreeSet<VertexId>,
}

impl<'a> BlockTreeSource<'a> {
    pub(crate) fn new(g: &'a MultiGraph, blocks: &BlockDecomposition, partition: &Partition) -> Self {
        let n = g.vertex_count();
        let nb = blocks.block_count();
        let mut cut_node = vec![NONE; n];
        let mut cut_vertex = Vec::new();
        for (v, node) in cut_node.iter_mut().enumerate() {
            if blocks.is_cut(v) {
                *node = nb + cut_vertex.len();
                cut_vertex.push(v);
            }
        }
        let nodes = nb + cut_vertex.len();
        let mut adj = vec![Vec::new(); nodes];
        for (b, edges) in blocks.block_edges.iter().enumerate() {
            let mut at_cut: BTreeMap<VertexId, usize> = BTreeMap::new();
            for &e in edges {
                let (x, y) = g.endpoints(e);
                for v in [x, y] {
                    if cut_node[v] != NONE {
                        *at_cut.entry(v).or_default() += 1;
                    }
                }
            }
            for (v, count) in at_cut {
                adj[b].push((cut_node[v], count));
                adj[cut_node[v]].push((b, count));
            }
        }

        let mut parent = vec![NONE; nodes];
        let mut tin = vec![0; nodes];
        let mut order = Vec::with_capacity(nodes);
        if nodes > 0 {
            let mut seen = vec![false; nodes];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(node) = stack.pop() {
                tin[node] = order.len();
                order.push(node);
                for &(w, _) in adj[node].iter().rev() {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = node;
                        stack.push(w);
                    }
                }
            }
        }
        let mut size = vec![1usize; nodes];
        let mut edges_below: Vec<usize> = (0..nodes)
            .map(|node| if node < nb { blocks.block_edges[node].len() } else { 0 })
            .collect();
        for &node in order.iter().rev() {
            let p = parent[node];
            if p != NONE {
                size[p] += size[node];
                edges_below[p] += edges_below[node];
            }
        }
        let tout: Vec<usize> = (0..nodes).map(|node| tin[node] + size[node] - 1).collect();

        let owner = |v: VertexId| -> Option<usize> {
            if cut_node[v] != NONE {
                Some(cut_node[v])
            } else {
                blocks.vertex_blocks[v].first().copied()
            }
        };
        let mut odd = Fenwick::new(nodes);
        let mut total_odd = 0;
        for v in 0..n {
            if partition.get(v) == Some(Parity::Odd) {
                total_odd += 1;
                if let Some(node) = owner(v) {
                    odd.add(tin[node], 1);
                }
            }
        }

        let mut terminal = vec![false; nodes];
        for v in partition.unresolved() {
            if cut_node[v] != NONE {
                terminal[cut_node[v]] = true;
            }
        }
        let live_degree = adj.iter().map(Vec::len).collect();
        let mut source = Self {
            g,
            block_count: nb,
            cut_node,
            cut_vertex,
            adj,
            parent,
            tin,
            tout,
            edges_below,
            odd,
            total_odd,
            alive: vec![true; nodes],
            live_degree,
            terminal,
            leaves: BTreeSet::new(),
        };
        for node in 0..nodes {
            if source.alive[node] && !source.terminal[node] && source.live_degree[node] <= 1 {
                source.prune_from(node);
            }
        }
        for node in 0..nodes {
            if source.terminal[node] && source.live_degree[node] <= 1 {
                source.leaves.insert(source.cut_vertex[node - nb]);
            }
        }
        source
    }

    /// Removes `node` from the Steiner tree and keeps pruning non-terminal
    /// nodes left with at most one live neighbour.
    fn prune_from(&mut self, start: usize) {
        let mut node = start;
        loop {
            self.alive[node] = false;
            let next = self.adj[node].iter().map(|&(w, _)| w).find(|&w| self.alive[w]);
            let Some(w) = next else { break };
            self.live_degree[w] -= 1;
            if self.live_degree[w] > 1 {
                break;
            }
            if self.terminal[w] {
                self.leaves.insert(self.cut_vertex[w - self.block_count]);
                break;
            }
            node = w;
        }
    }

    fn odd_in_subtree(&self, node: usize) -> usize {
        self.odd.range(self.tin[node], self.tout[node]) as usize
    }
}

impl StepSource for BlockTreeSource<'_> {
    fn next(&mut self, partition: &Partition) -> Result<Option<(VertexId, usize, usize)>, DecisionError> {
        let Some(x) = self.leaves.pop_first() else {
            return match partition.unresolved().first() {
                None => Ok(None),
                Some(&v) => Err(DecisionError::InternalInvariantBroken(format!(
                    "no resolvable vertex left while {v} is unresolved"
                ))),
            };
        };
        let cx = self.cut_node[x];
        let m = self.g.edge_count();
        let mut lower = 0;
        let mut excluded = 0;
        let mut open = 0;
        for &(b, attachment) in &self.adj[cx] {
            if self.alive[b] {
                open += 1;
                continue;
            }
            let (odd, internal) = if self.parent[b] == cx {
                (self.odd_in_subtree(b), self.edges_below[b] - attachment)
            } else {
                debug_assert_eq!(self.parent[cx], b);
                (
                    self.total_odd - self.odd_in_subtree(cx),
                    m - self.edges_below[cx] - attachment,
                )
            };
            if (odd + internal) % 2 != attachment % 2 {
                lower += 1;
            }
            if odd % 2 != internal % 2 {
                excluded += 1;
            }
        }
        if open > 1 {
            return Err(DecisionError::InternalInvariantBroken(format!(
                "leaf {x} of the unresolved Steiner tree has {open} open directions"
            )));
        }
        Ok(Some((x, lower, excluded)))
    }

    fn commit(&mut self, x: VertexId, parity: Parity) {
        let cx = self.cut_node[x];
        if parity == Parity::Odd {
            self.odd.add(self.tin[cx], 1);
            self.total_odd += 1;
        }
        self.terminal[cx] = false;
        self.prune_from(cx);
    }
}
