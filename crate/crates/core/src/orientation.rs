//! Edge orientations with incrementally maintained out-degrees, and trail
//! flips `O △ P`.

use thiserror::Error;

use crate::constraints::ConstraintMap;
use crate::graph::{EdgeId, MultiGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientationError {
    #[error("edge {edge} is not incident to vertex {vertex} while walking the trail")]
    NotATrail { edge: EdgeId, vertex: VertexId },
    #[error("edge {0} appears twice in the trail")]
    RepeatedEdge(EdgeId),
    #[error("edge {0} does not exist")]
    InvalidEdge(EdgeId),
    #[error("edge {edge} cannot have tail {tail}")]
    BadTail { edge: EdgeId, tail: VertexId },
    #[error("expected {expected} edge directions, got {actual}")]
    WrongLength { expected: usize, actual: usize },
}

/// A direction for every edge. Bit `e` set means edge `e = (a, b)` (as given
/// to [`MultiGraph::build`]) points `b -> a`; clear means `a -> b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    reversed: Vec<bool>,
    out_degree: Vec<usize>,
}

impl Orientation {
    /// Every edge from its lower to its higher endpoint.
    pub fn arbitrary(g: &MultiGraph) -> Self {
        let reversed: Vec<bool> = g.edges().iter().map(|&(a, b)| a > b).collect();
        Self::from_bits(g, reversed)
    }

    fn from_bits(g: &MultiGraph, reversed: Vec<bool>) -> Self {
        let mut out_degree = vec![0; g.vertex_count()];
        for (e, &r) in reversed.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            out_degree[if r { b } else { a }] += 1;
        }
        Self { reversed, out_degree }
    }

    /// From the tail of every edge, indexed by edge id.
    pub fn from_tails(g: &MultiGraph, tails: &[VertexId]) -> Result<Self, OrientationError> {
        if tails.len() != g.edge_count() {
            return Err(OrientationError::WrongLength {
                expected: g.edge_count(),
                actual: tails.len(),
            });
        }
        let mut reversed = Vec::with_capacity(tails.len());
        for (e, &t) in tails.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            if t == a {
                reversed.push(false);
            } else if t == b {
                reversed.push(true);
            } else {
                return Err(OrientationError::BadTail { edge: e, tail: t });
            }
        }
        Ok(Self::from_bits(g, reversed))
    }

    pub fn edge_count(&self) -> usize {
        self.reversed.len()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_degree[v]
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out_degree
    }

    pub fn tail(&self, g: &MultiGraph, e: EdgeId) -> VertexId {
        let (a, b) = g.endpoints(e);
        if self.reversed[e] {
            b
        } else {
            a
        }
    }

    pub fn head(&self, g: &MultiGraph, e: EdgeId) -> VertexId {
        let (a, b) = g.endpoints(e);
        if self.reversed[e] {
            a
        } else {
            b
        }
    }

    /// `(tail, head)` for every edge in id order.
    pub fn arcs<'a>(&'a self, g: &'a MultiGraph) -> impl Iterator<Item = (VertexId, VertexId)> + 'a {
        (0..self.edge_count()).map(move |e| (self.tail(g, e), self.head(g, e)))
    }

    /// Change in `d+(v)` if `e` were reversed; `v` must be an endpoint.
    pub fn flip_delta(&self, g: &MultiGraph, e: EdgeId, v: VertexId) -> i64 {
        if self.tail(g, e) == v {
            -1
        } else {
            1
        }
    }

    pub fn flip_edge(&mut self, g: &MultiGraph, e: EdgeId) {
        let tail = self.tail(g, e);
        let head = self.head(g, e);
        self.out_degree[tail] -= 1;
        self.out_degree[head] += 1;
        self.reversed[e] = !self.reversed[e];
    }

    pub fn flip_in_place(&mut self, g: &MultiGraph, trail: &Trail) {
        for &e in trail.edges() {
            self.flip_edge(g, e);
        }
    }

    /// `O △ P`: a copy with exactly the trail's edges reversed.
    pub fn flip(&self, g: &MultiGraph, trail: &Trail) -> Self {
        let mut o = self.clone();
        o.flip_in_place(g, trail);
        o
    }

    /// Recounts out-degrees from the edge directions and compares with the
    /// maintained counters.
    pub fn audit(&self, g: &MultiGraph) -> bool {
        Self::from_bits(g, self.reversed.clone()).out_degree == self.out_degree
    }
}

/// An edge-distinct walk, possibly closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    start: VertexId,
    end: VertexId,
    edges: Vec<EdgeId>,
}

impl Trail {
    pub fn new(g: &MultiGraph, start: VertexId, edges: Vec<EdgeId>) -> Result<Self, OrientationError> {
        g.check_vertex(start).map_err(|_| OrientationError::NotATrail {
            edge: usize::MAX,
            vertex: start,
        })?;
        let mut used = std::collections::HashSet::with_capacity(edges.len());
        let mut at = start;
        for &e in &edges {
            if e >= g.edge_count() {
                return Err(OrientationError::InvalidEdge(e));
            }
            if !used.insert(e) {
                return Err(OrientationError::RepeatedEdge(e));
            }
            let (a, b) = g.endpoints(e);
            at = if a == at {
                b
            } else if b == at {
                a
            } else {
                return Err(OrientationError::NotATrail { edge: e, vertex: at });
            };
        }
        Ok(Self { start, end: at, edges })
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }
}

/// Vertices whose out-degree is not allowed, ascending. Empty means `o` is an
/// H-orientation.
pub fn verify(g: &MultiGraph, h: &ConstraintMap, o: &Orientation) -> Vec<VertexId> {
    (0..g.vertex_count())
        .filter(|&v| !h.allows(v, o.out_degree(v)))
        .collect()
}
