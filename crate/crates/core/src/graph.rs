//! Loopless undirected multigraphs with the connectivity queries the solver
//! needs: components of `G - x`, cut vertices and the induced blocks at a
//! vertex.

use std::collections::VecDeque;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {index} is a loop")]
    LoopEdge { index: usize },
    #[error("edge {index} references vertex {vertex}, but the graph has {vertex_count} vertices")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("vertex {0} does not exist")]
    InvalidVertex(VertexId),
    #[error("graph is not connected")]
    NotConnected,
}

/// Undirected multigraph without loops.
///
/// Edge ids are assigned in input order and never change. Each adjacency list
/// is sorted by `(neighbour, edge id)` so every traversal below visits
/// neighbours in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(EdgeId, VertexId)>>,
}

/// One component `C` of `G - x` together with the counts the parity windows
/// are built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStats {
    /// Vertices of `C`, ascending.
    pub vertices: Vec<VertexId>,
    /// Edges with both ends in `C`.
    pub internal_edges: usize,
    /// Edges joining `x` to `C`.
    pub attachment: usize,
}

/// A subgraph of a parent graph, renumbered densely, with the maps back to
/// the parent's ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Induced {
    pub graph: MultiGraph,
    /// `vertices[local] = parent id`, ascending.
    pub vertices: Vec<VertexId>,
    /// `edges[local] = parent id`, ascending.
    pub edges: Vec<EdgeId>,
}

impl Induced {
    pub fn local_vertex(&self, parent: VertexId) -> Option<VertexId> {
        self.vertices.binary_search(&parent).ok()
    }
}

impl MultiGraph {
    pub fn build(vertex_count: usize, edge_list: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); vertex_count];
        for (index, &(u, v)) in edge_list.iter().enumerate() {
            for vertex in [u, v] {
                if vertex >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        index,
                        vertex,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(GraphError::LoopEdge { index });
            }
            adj[u].push((index, v));
            adj[v].push((index, u));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(e, w)| (w, e));
        }
        Ok(Self {
            edges: edge_list.to_vec(),
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    /// `(edge, neighbour)` pairs incident to `v`.
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adj[v]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex(v))
        }
    }

    /// Component label per vertex, skipping `removed` if given. Labels are
    /// assigned in order of each component's smallest vertex; the removed
    /// vertex gets `usize::MAX`.
    pub fn component_labels(&self, removed: Option<VertexId>) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if Some(s) == removed || label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &(_, w) in &self.adj[v] {
                    if Some(w) != removed && label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels(None).1 <= 1
    }

    /// Vertex sets of the connected components, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let (label, count) = self.component_labels(None);
        let mut out = vec![Vec::new(); count];
        for (v, &c) in label.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Vertices whose removal disconnects the graph, ascending.
    pub fn cut_vertices(&self) -> Result<Vec<VertexId>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::NotConnected);
        }
        let blocks = BlockDecomposition::new(self);
        Ok((0..self.vertex_count()).filter(|&v| blocks.is_cut(v)).collect())
    }

    /// The components of `G - x` with their internal edge counts and the
    /// number of edges joining `x` to each.
    pub fn components_minus(&self, x: VertexId) -> Result<Vec<ComponentStats>, GraphError> {
        self.check_vertex(x)?;
        let (label, count) = self.component_labels(Some(x));
        let mut out: Vec<ComponentStats> = (0..count)
            .map(|_| ComponentStats {
                vertices: Vec::new(),
                internal_edges: 0,
                attachment: 0,
            })
            .collect();
        for (v, &c) in label.iter().enumerate() {
            if v != x {
                out[c].vertices.push(v);
            }
        }
        for &(a, b) in &self.edges {
            if a == x {
                out[label[b]].attachment += 1;
            } else if b == x {
                out[label[a]].attachment += 1;
            } else {
                out[label[a]].internal_edges += 1;
            }
        }
        Ok(out)
    }

    /// The subgraphs `G[V(C) + x]` for every component `C` of `G - x`, in the
    /// order of `components_minus`.
    pub fn blocks_at(&self, x: VertexId) -> Result<Vec<Induced>, GraphError> {
        self.check_vertex(x)?;
        if !self.is_connected() {
            return Err(GraphError::NotConnected);
        }
        let comps = self.components_minus(x)?;
        if comps.is_empty() {
            return Ok(vec![self.induced(&[x])]);
        }
        Ok(comps
            .iter()
            .map(|c| {
                let mut vs = c.vertices.clone();
                vs.push(x);
                self.induced(&vs)
            })
            .collect())
    }

    /// Subgraph induced by `vertices` (any order, duplicates ignored).
    pub fn induced(&self, vertices: &[VertexId]) -> Induced {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vs.iter().enumerate() {
            local[v] = i;
        }
        let mut edge_ids = Vec::new();
        let mut list = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if local[a] != usize::MAX && local[b] != usize::MAX {
                edge_ids.push(e);
                list.push((local[a], local[b]));
            }
        }
        let graph = MultiGraph::build(vs.len(), &list).expect("induced subgraph of a valid graph");
        Induced {
            graph,
            vertices: vs,
            edges: edge_ids,
        }
    }

    /// Unweighted BFS from `source`, visiting neighbours in ascending id order.
    /// Returns the visit order and, per vertex, the tree edge to its parent.
    pub fn bfs_tree(&self, source: VertexId) -> (Vec<VertexId>, Vec<Option<EdgeId>>) {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut parent = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        seen[source] = true;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(e, w) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(e);
                    queue.push_back(w);
                }
            }
        }
        (order, parent)
    }
}

/// Biconnected blocks (edge partition) and cut vertices, computed with an
/// iterative lowpoint DFS so deep graphs do not exhaust the stack.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// Edge ids per block.
    pub block_edges: Vec<Vec<EdgeId>>,
    /// Vertex ids per block, ascending.
    pub block_vertices: Vec<Vec<VertexId>>,
    /// Blocks containing each vertex, ascending.
    pub vertex_blocks: Vec<Vec<usize>>,
    /// Block of each edge.
    pub edge_block: Vec<usize>,
}

impl BlockDecomposition {
    pub fn new(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let m = g.edge_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut edge_block = vec![usize::MAX; m];
        let mut edge_stack: Vec<EdgeId> = Vec::new();
        let mut block_edges: Vec<Vec<EdgeId>> = Vec::new();
        let mut timer = 0;
        // (vertex, edge used to enter it, next adjacency index)
        let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = Vec::new();

        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            stack.push((root, None, 0));
            while let Some(top) = stack.last_mut() {
                let (v, via, idx) = *top;
                if idx < g.adj[v].len() {
                    top.2 += 1;
                    let (e, w) = g.adj[v][idx];
                    if Some(e) == via {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        edge_stack.push(e);
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, Some(e), 0));
                    } else if disc[w] < disc[v] {
                        // back edge (or parallel edge to the parent)
                        edge_stack.push(e);
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] >= disc[parent] {
                            let entry = via.expect("non-root vertex has a tree edge");
                            let id = block_edges.len();
                            let mut edges = Vec::new();
                            while let Some(f) = edge_stack.pop() {
                                edge_block[f] = id;
                                edges.push(f);
                                if f == entry {
                                    break;
                                }
                            }
                            edges.sort_unstable();
                            block_edges.push(edges);
                        }
                    }
                }
            }
        }

        let mut vertex_blocks = vec![Vec::new(); n];
        let mut block_vertices = Vec::with_capacity(block_edges.len());
        for (b, edges) in block_edges.iter().enumerate() {
            let mut vs: Vec<VertexId> = edges
                .iter()
                .flat_map(|&e| {
                    let (a, c) = g.endpoints(e);
                    [a, c]
                })
                .collect();
            vs.sort_unstable();
            vs.dedup();
            for &v in &vs {
                vertex_blocks[v].push(b);
            }
            block_vertices.push(vs);
        }
        Self {
            block_edges,
            block_vertices,
            vertex_blocks,
            edge_block,
        }
    }

    pub fn is_cut(&self, v: VertexId) -> bool {
        self.vertex_blocks[v].len() >= 2
    }

    pub fn block_count(&self) -> usize {
        self.block_edges.len()
    }
}
