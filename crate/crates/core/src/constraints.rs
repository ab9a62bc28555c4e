//! Per-vertex allowed out-degree sets `H(v)` and their forbidden complements
//! `F(v) = [0, d(v)] \ H(v)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MultiGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(value: usize) -> Self {
        if value % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityClass {
    Odd,
    Even,
    Mixed,
}

impl ParityClass {
    pub fn fixed(self) -> Option<Parity> {
        match self {
            ParityClass::Odd => Some(Parity::Odd),
            ParityClass::Even => Some(Parity::Even),
            ParityClass::Mixed => None,
        }
    }
}

/// Subset of `{0, ..., bound}` stored as a bitmask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DegreeSet {
    bound: usize,
    words: Vec<u64>,
}

impl DegreeSet {
    pub fn empty(bound: usize) -> Self {
        Self {
            bound,
            words: vec![0; bound / 64 + 1],
        }
    }

    pub fn full(bound: usize) -> Self {
        let mut s = Self::empty(bound);
        for i in 0..=bound {
            s.insert(i);
        }
        s
    }

    /// Values above `bound` are dropped.
    pub fn from_values(bound: usize, values: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(bound);
        for v in values {
            if v <= bound {
                s.insert(v);
            }
        }
        s
    }

    /// Every value in `[0, bound]` with the given parity.
    pub fn parity_class(bound: usize, parity: Parity) -> Self {
        Self::from_values(bound, (parity.bit()..=bound).step_by(2))
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn contains(&self, value: usize) -> bool {
        value <= self.bound && self.words[value / 64] >> (value % 64) & 1 == 1
    }

    /// Like `contains`, for signed out-degree candidates.
    pub fn contains_signed(&self, value: i64) -> bool {
        value >= 0 && self.contains(value as usize)
    }

    pub fn insert(&mut self, value: usize) {
        assert!(value <= self.bound, "{value} outside [0, {}]", self.bound);
        self.words[value / 64] |= 1 << (value % 64);
    }

    pub fn remove(&mut self, value: usize) {
        if value <= self.bound {
            self.words[value / 64] &= !(1 << (value % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.bound).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut s = Self::empty(self.bound);
        for i in 0..=self.bound {
            if !self.contains(i) {
                s.insert(i);
            }
        }
        s
    }

    /// Members inside `[lo, hi]`; empty when `lo > hi`.
    pub fn within(&self, lo: i64, hi: i64) -> Vec<usize> {
        let lo = lo.max(0);
        let hi = hi.min(self.bound as i64);
        if lo > hi {
            return Vec::new();
        }
        (lo as usize..=hi as usize).filter(|&i| self.contains(i)).collect()
    }

    /// `None` for the empty set.
    pub fn class(&self) -> Option<ParityClass> {
        let mut seen = [false; 2];
        for i in self.iter() {
            seen[i % 2] = true;
        }
        match seen {
            [false, false] => None,
            [true, false] => Some(ParityClass::Even),
            [false, true] => Some(ParityClass::Odd),
            [true, true] => Some(ParityClass::Mixed),
        }
    }

    /// First `i` with `i` and `i + 1` both absent, if any.
    pub fn first_consecutive_gap(&self) -> Option<usize> {
        (0..self.bound).find(|&i| !self.contains(i) && !self.contains(i + 1))
    }
}

impl fmt::Debug for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.to_vec(), self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("vertex {0} has an empty allowed set")]
    EmptyAllowedSet(VertexId),
    #[error("expected constraints for {expected} vertices, got {actual}")]
    WrongLength { expected: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityViolation {
    /// Both `value` and `value + 1` are forbidden at `vertex`.
    Consecutive {
        vertex: VertexId,
        value: usize,
    },
    /// The allowed set's universe does not match the vertex degree.
    DegreeMismatch {
        vertex: VertexId,
        degree: usize,
        bound: usize,
    },
    Disconnected,
}

impl fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityViolation::Consecutive { vertex, value } => {
                write!(f, "vertex {vertex} forbids both {value} and {}", value + 1)
            }
            DensityViolation::DegreeMismatch { vertex, degree, bound } => {
                write!(
                    f,
                    "vertex {vertex} has degree {degree} but its set is bounded by {bound}"
                )
            }
            DensityViolation::Disconnected => f.write_str("graph is not connected"),
        }
    }
}

/// Allowed out-degree set `H(v)` for every vertex of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintMap {
    allowed: Vec<DegreeSet>,
}

impl ConstraintMap {
    /// No constraint at all: `H(v) = [0, d(v)]`.
    pub fn unconstrained(g: &MultiGraph) -> Self {
        Self {
            allowed: (0..g.vertex_count()).map(|v| DegreeSet::full(g.degree(v))).collect(),
        }
    }

    /// `H(v) = [0, d(v)] \ F(v)`. Forbidden values above `d(v)` forbid nothing.
    pub fn from_forbidden(g: &MultiGraph, forbidden: &[Vec<usize>]) -> Result<Self, ConstraintError> {
        check_len(g, forbidden.len())?;
        let mut allowed = Vec::with_capacity(forbidden.len());
        for (v, f) in forbidden.iter().enumerate() {
            let h = DegreeSet::from_values(g.degree(v), f.iter().copied()).complement();
            if h.is_empty() {
                return Err(ConstraintError::EmptyAllowedSet(v));
            }
            allowed.push(h);
        }
        Ok(Self { allowed })
    }

    /// Allowed sets given directly; values above `d(v)` are dropped. An empty
    /// set is accepted here and reported by the decision procedure.
    pub fn from_allowed(g: &MultiGraph, allowed: &[Vec<usize>]) -> Result<Self, ConstraintError> {
        check_len(g, allowed.len())?;
        Ok(Self {
            allowed: allowed
                .iter()
                .enumerate()
                .map(|(v, h)| DegreeSet::from_values(g.degree(v), h.iter().copied()))
                .collect(),
        })
    }

    pub fn from_sets(allowed: Vec<DegreeSet>) -> Self {
        Self { allowed }
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn allowed(&self, v: VertexId) -> &DegreeSet {
        &self.allowed[v]
    }

    pub fn allowed_mut(&mut self, v: VertexId) -> &mut DegreeSet {
        &mut self.allowed[v]
    }

    pub fn allows(&self, v: VertexId, out_degree: usize) -> bool {
        self.allowed[v].contains(out_degree)
    }

    pub fn forbidden(&self, v: VertexId) -> DegreeSet {
        self.allowed[v].complement()
    }

    pub fn sets(&self) -> &[DegreeSet] {
        &self.allowed
    }

    /// Parity class of `H(v)`; an empty set reports `Mixed` (it has no fixed
    /// parity to contribute).
    pub fn parity_class(&self, v: VertexId) -> ParityClass {
        self.allowed[v].class().unwrap_or(ParityClass::Mixed)
    }

    /// Restriction to a subgraph, with each parent set re-bounded to the
    /// subgraph degree.
    pub fn restrict(&self, sub: &crate::graph::Induced) -> Self {
        Self {
            allowed: sub
                .vertices
                .iter()
                .enumerate()
                .map(|(local, &v)| DegreeSet::from_values(sub.graph.degree(local), self.allowed[v].iter()))
                .collect(),
        }
    }

    /// Empty iff `(g, self)` is a dense pair: `g` is connected and no `F(v)`
    /// contains two consecutive integers in `[0, d(v)]`.
    pub fn validate_dense(&self, g: &MultiGraph) -> Vec<DensityViolation> {
        let mut out = self.validate_sets(g);
        if !g.is_connected() {
            out.push(DensityViolation::Disconnected);
        }
        out
    }

    /// The per-vertex half of `validate_dense` (no connectivity check).
    pub fn validate_sets(&self, g: &MultiGraph) -> Vec<DensityViolation> {
        let mut out = Vec::new();
        for v in 0..g.vertex_count().min(self.allowed.len()) {
            let h = &self.allowed[v];
            if h.bound() != g.degree(v) {
                out.push(DensityViolation::DegreeMismatch {
                    vertex: v,
                    degree: g.degree(v),
                    bound: h.bound(),
                });
                continue;
            }
            if let Some(value) = h.first_consecutive_gap() {
                out.push(DensityViolation::Consecutive { vertex: v, value });
                continue;
            }
            debug_assert!(symmetric_neighbours(h));
            debug_assert!(h.bound() + 1 - h.len() <= (h.bound() + 2) / 2);
        }
        out
    }
}

fn check_len(g: &MultiGraph, actual: usize) -> Result<(), ConstraintError> {
    if actual == g.vertex_count() {
        Ok(())
    } else {
        Err(ConstraintError::WrongLength {
            expected: g.vertex_count(),
            actual,
        })
    }
}

/// Every forbidden value has its in-range neighbours allowed.
fn symmetric_neighbours(h: &DegreeSet) -> bool {
    (0..=h.bound())
        .filter(|&i| !h.contains(i))
        .all(|i| (i == 0 || h.contains(i - 1)) && (i == h.bound() || h.contains(i + 1)))
}
