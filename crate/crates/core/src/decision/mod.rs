//! Existence decision for dense pairs via parity traces.
//!
//! The cut vertices whose allowed set has mixed parity are resolved one at a
//! time, always picking a vertex for which every component of `G - x` but at
//! most one is already resolved. Each step computes the window
//! `[l, u] ∩ H(x)` of out-degrees compatible with the parities fixed so far:
//!
//! * a window with both parities proves an orientation exists;
//! * an empty window proves none exists;
//! * otherwise `x` inherits the window's parity.
//!
//! A completed trace decides existence by comparing `|V1|` with `e(G)` mod 2.
//! Negative answers carry a [`Certificate`] that [`verify_certificate`]
//! re-checks from scratch.

mod engine;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{ConstraintMap, DensityViolation, Parity, ParityClass};
use crate::digest;
use crate::graph::{BlockDecomposition, GraphError, MultiGraph, VertexId};

pub use verify::{verify_certificate, CertificateRejection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("the graph has no vertices")]
    EmptyGraph,
    #[error("instance is not a dense pair: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    NotDense(Vec<DensityViolation>),
    #[error("graph is not 2-connected (cut vertex {0})")]
    Not2Connected(VertexId),
    #[error("{count} components of G - {vertex} contain unresolved vertices")]
    TooManyUnresolvedComponents { vertex: VertexId, count: usize },
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parity assigned to each vertex so far (`V1` = odd, `V2` = even).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class: Vec<Option<Parity>>,
}

impl Partition {
    pub fn new(n: usize) -> Self {
        Self { class: vec![None; n] }
    }

    /// `V1_0`, `V2_0` from the fixed-parity vertices of `h`.
    pub fn initial(h: &ConstraintMap) -> Self {
        Self {
            class: (0..h.len()).map(|v| h.parity_class(v).fixed()).collect(),
        }
    }

    pub fn get(&self, v: VertexId) -> Option<Parity> {
        self.class[v]
    }

    pub fn set(&mut self, v: VertexId, p: Parity) {
        self.class[v] = Some(p);
    }

    pub fn is_resolved(&self, v: VertexId) -> bool {
        self.class[v].is_some()
    }

    fn with(&self, p: Parity) -> Vec<VertexId> {
        (0..self.class.len()).filter(|&v| self.class[v] == Some(p)).collect()
    }

    pub fn odd(&self) -> Vec<VertexId> {
        self.with(Parity::Odd)
    }

    pub fn even(&self) -> Vec<VertexId> {
        self.with(Parity::Even)
    }

    pub fn unresolved(&self) -> Vec<VertexId> {
        (0..self.class.len()).filter(|&v| self.class[v].is_none()).collect()
    }

    pub fn odd_count(&self) -> usize {
        self.class.iter().filter(|c| **c == Some(Parity::Odd)).count()
    }

    pub fn digest(&self) -> String {
        digest::partition_digest(&self.odd(), &self.even())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialPartition {
    pub odd: Vec<VertexId>,
    pub even: Vec<VertexId>,
    pub unresolved: Vec<VertexId>,
}

/// `(V1_0, V2_0, U)`: odd-fixed, even-fixed and mixed-parity vertices.
pub fn initial_partition(h: &ConstraintMap) -> InitialPartition {
    let p = Partition::initial(h);
    InitialPartition {
        odd: p.odd(),
        even: p.even(),
        unresolved: p.unresolved(),
    }
}

/// `l`, `t` and `u = d(x) - t` at one vertex, with `[l, u] ∩ H(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub lower: usize,
    pub upper: usize,
    pub excluded: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowShape {
    Empty,
    Single(Parity),
    Mixed,
}

impl Window {
    pub fn from_counts(h: &ConstraintMap, x: VertexId, degree: usize, lower: usize, excluded: usize) -> Self {
        let upper = degree - excluded;
        Self {
            lower,
            upper,
            excluded,
            members: h.allowed(x).within(lower as i64, upper as i64),
        }
    }

    pub fn shape(&self) -> WindowShape {
        let mut seen = [false; 2];
        for &i in &self.members {
            seen[i % 2] = true;
        }
        match seen {
            [false, false] => WindowShape::Empty,
            [true, false] => WindowShape::Single(Parity::Even),
            [false, true] => WindowShape::Single(Parity::Odd),
            [true, true] => WindowShape::Mixed,
        }
    }
}

/// `(l, t, number of components of G - x not yet fully resolved)`.
pub(crate) fn window_counts(
    g: &MultiGraph,
    x: VertexId,
    partition: &Partition,
) -> Result<(usize, usize, usize), GraphError> {
    let mut lower = 0;
    let mut excluded = 0;
    let mut open = 0;
    for c in g.components_minus(x)? {
        if c.vertices.iter().any(|&v| !partition.is_resolved(v)) {
            open += 1;
            continue;
        }
        let odd = c
            .vertices
            .iter()
            .filter(|&&v| partition.get(v) == Some(Parity::Odd))
            .count();
        if (odd + c.internal_edges) % 2 != c.attachment % 2 {
            lower += 1;
        }
        if odd % 2 != c.internal_edges % 2 {
            excluded += 1;
        }
    }
    Ok((lower, excluded, open))
}

/// The window at `x` given the current partition. All components of `G - x`
/// except at most one must be fully resolved.
pub fn window(g: &MultiGraph, h: &ConstraintMap, x: VertexId, partition: &Partition) -> Result<Window, DecisionError> {
    let (lower, excluded, open) = window_counts(g, x, partition)?;
    if open > 1 {
        return Err(DecisionError::TooManyUnresolvedComponents { vertex: x, count: open });
    }
    Ok(Window::from_counts(h, x, g.degree(x), lower, excluded))
}

/// Next trace vertex: the unresolved vertex maximising the largest number of
/// unresolved vertices in one component of `G - x`, smallest id on ties.
pub fn pick_next(g: &MultiGraph, unresolved: &[VertexId]) -> Result<VertexId, DecisionError> {
    let mut member = vec![false; g.vertex_count()];
    for &v in unresolved {
        g.check_vertex(v)?;
        member[v] = true;
    }
    let mut best: Option<(usize, VertexId, usize)> = None;
    for &x in unresolved {
        let comps = g.components_minus(x)?;
        let counts: Vec<usize> = comps
            .iter()
            .map(|c| c.vertices.iter().filter(|&&v| member[v]).count())
            .collect();
        let score = counts.iter().copied().max().unwrap_or(0);
        let touching = counts.iter().filter(|&&c| c > 0).count();
        let better = match best {
            None => true,
            Some((s, id, _)) => score > s || (score == s && x < id),
        };
        if better {
            best = Some((score, x, touching));
        }
    }
    let (_, x, touching) = best
        .ok_or_else(|| DecisionError::InternalInvariantBroken("pick_next called with no unresolved vertex".into()))?;
    if touching > 1 {
        return Err(DecisionError::InternalInvariantBroken(format!(
            "vertex {x} leaves {touching} components with unresolved vertices"
        )));
    }
    Ok(x)
}

/// One trace step: the window at `vertex` and, once committed, the parity it
/// assigns. Uncommitted steps (empty or mixed window) have no parity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub vertex: VertexId,
    pub lower: usize,
    pub upper: usize,
    pub excluded: usize,
    pub window: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
    /// Digest of `(V1_{i-1}, V2_{i-1})`, chained from the initial partition.
    pub resolved_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityTrace {
    pub steps: Vec<TraceStep>,
    /// `V1`, ascending.
    pub odd: Vec<VertexId>,
    /// `V2`, ascending.
    pub even: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CertificateKind {
    /// A complete trace with `|V1| != e(G) (mod 2)`.
    TraceMismatch { trace: ParityTrace },
    /// A valid trace prefix followed by a vertex whose window is empty.
    EmptyWindow { prefix: Vec<TraceStep>, step: TraceStep },
    /// A vertex with nothing allowed.
    PerVertexVoid { vertex: VertexId },
}

/// Replayable proof that no H-orientation exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub kind: CertificateKind,
    pub instance_digest: String,
}

impl Certificate {
    /// The same certificate with every vertex id passed through `f`, which
    /// must be increasing so recorded vertex lists stay sorted.
    pub fn map_vertices(&self, f: impl Fn(VertexId) -> VertexId) -> Certificate {
        let step = |s: &TraceStep| TraceStep {
            vertex: f(s.vertex),
            ..s.clone()
        };
        let kind = match &self.kind {
            CertificateKind::TraceMismatch { trace } => CertificateKind::TraceMismatch {
                trace: ParityTrace {
                    steps: trace.steps.iter().map(step).collect(),
                    odd: trace.odd.iter().map(|&v| f(v)).collect(),
                    even: trace.even.iter().map(|&v| f(v)).collect(),
                },
            },
            CertificateKind::EmptyWindow { prefix, step: last } => CertificateKind::EmptyWindow {
                prefix: prefix.iter().map(step).collect(),
                step: step(last),
            },
            CertificateKind::PerVertexVoid { vertex } => CertificateKind::PerVertexVoid { vertex: f(*vertex) },
        };
        Certificate {
            kind,
            instance_digest: self.instance_digest.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason")]
pub enum ExistsReason {
    /// The witness is not a cut vertex and its allowed set has both parities.
    MixedParityVertex,
    /// The witness's window has both parities.
    MixedWindow { step: TraceStep },
    /// The trace completed with `|V1| = e(G) (mod 2)`.
    TraceCompletedMatching { trace: ParityTrace },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Exists { witness: VertexId, reason: ExistsReason },
    NotExists(Certificate),
}

impl Verdict {
    pub fn exists(&self) -> bool {
        matches!(self, Verdict::Exists { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::NotExists(c) => Some(c),
            Verdict::Exists { .. } => None,
        }
    }
}

/// A verdict with every trace step that was examined, including a final
/// uncommitted one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
}

/// Deliberate faults for exercising the differential harness.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Reverses the final `|V1|` vs `e(G)` parity comparison.
    InvertTraceParity,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecideOptions {
    #[doc(hidden)]
    pub mutation: Option<Mutation>,
    /// Build the trace with `pick_next`/`window` recomputation instead of the
    /// block-cut-tree engine. Quadratic; for cross-checking.
    pub reference: bool,
}

pub fn decide(g: &MultiGraph, h: &ConstraintMap) -> Result<Decision, DecisionError> {
    decide_with(g, h, &DecideOptions::default())
}

pub fn decide_with(g: &MultiGraph, h: &ConstraintMap, options: &DecideOptions) -> Result<Decision, DecisionError> {
    precheck(g, h)?;
    let instance_digest = digest::instance_digest(g, h);
    if let Some(v) = (0..g.vertex_count()).find(|&v| h.allowed(v).is_empty()) {
        return Ok(Decision {
            verdict: Verdict::NotExists(Certificate {
                kind: CertificateKind::PerVertexVoid { vertex: v },
                instance_digest,
            }),
            trace: Vec::new(),
        });
    }
    let blocks = BlockDecomposition::new(g);
    if let Some(v) = (0..g.vertex_count()).find(|&v| !blocks.is_cut(v) && h.parity_class(v) == ParityClass::Mixed) {
        return Ok(Decision {
            verdict: Verdict::Exists {
                witness: v,
                reason: ExistsReason::MixedParityVertex,
            },
            trace: Vec::new(),
        });
    }
    let partition = Partition::initial(h);
    if options.reference {
        let source = engine::ReferenceSource::new(g);
        run_trace(g, h, partition, source, instance_digest, options)
    } else {
        let source = engine::BlockTreeSource::new(g, &blocks, &partition);
        run_trace(g, h, partition, source, instance_digest, options)
    }
}

fn precheck(g: &MultiGraph, h: &ConstraintMap) -> Result<(), DecisionError> {
    if g.vertex_count() == 0 {
        return Err(DecisionError::EmptyGraph);
    }
    if h.len() != g.vertex_count() {
        return Err(DecisionError::NotDense(vec![DensityViolation::DegreeMismatch {
            vertex: h.len().min(g.vertex_count()),
            degree: 0,
            bound: 0,
        }]));
    }
    let violations = h.validate_dense(g);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(DecisionError::NotDense(violations))
    }
}

/// Supplies trace vertices and the `(l, t)` counts at each.
pub(crate) trait StepSource {
    /// Next vertex to resolve with its `(l, t)`, or `None` when every vertex
    /// is resolved.
    fn next(&mut self, partition: &Partition) -> Result<Option<(VertexId, usize, usize)>, DecisionError>;
    fn commit(&mut self, x: VertexId, parity: Parity);
}

fn run_trace<S: StepSource>(
    g: &MultiGraph,
    h: &ConstraintMap,
    mut partition: Partition,
    mut source: S,
    instance_digest: String,
    options: &DecideOptions,
) -> Result<Decision, DecisionError> {
    let mut chain = partition.digest();
    let mut steps: Vec<TraceStep> = Vec::new();
    while let Some((x, lower, excluded)) = source.next(&partition)? {
        let w = Window::from_counts(h, x, g.degree(x), lower, excluded);
        let shape = w.shape();
        let mut step = TraceStep {
            vertex: x,
            lower: w.lower,
            upper: w.upper,
            excluded: w.excluded,
            window: w.members,
            parity: None,
            resolved_digest: chain.clone(),
        };
        match shape {
            WindowShape::Empty => {
                let mut trace = steps.clone();
                trace.push(step.clone());
                return Ok(Decision {
                    verdict: Verdict::NotExists(Certificate {
                        kind: CertificateKind::EmptyWindow { prefix: steps, step },
                        instance_digest,
                    }),
                    trace,
                });
            }
            WindowShape::Mixed => {
                steps.push(step.clone());
                return Ok(Decision {
                    verdict: Verdict::Exists {
                        witness: x,
                        reason: ExistsReason::MixedWindow { step },
                    },
                    trace: steps,
                });
            }
            WindowShape::Single(p) => {
                step.parity = Some(p);
                partition.set(x, p);
                source.commit(x, p);
                chain = digest::extend_digest(&chain, x, p);
                steps.push(step);
            }
        }
    }
    if let Some(v) = partition.unresolved().first() {
        return Err(DecisionError::InternalInvariantBroken(format!(
            "trace finished with vertex {v} unresolved"
        )));
    }
    let mut matching = partition.odd_count() % 2 == g.edge_count() % 2;
    if options.mutation == Some(Mutation::InvertTraceParity) {
        matching = !matching;
    }
    let trace = ParityTrace {
        steps: steps.clone(),
        odd: partition.odd(),
        even: partition.even(),
    };
    let verdict = if matching {
        Verdict::Exists {
            witness: steps.last().map_or(0, |s| s.vertex),
            reason: ExistsReason::TraceCompletedMatching { trace },
        }
    } else {
        Verdict::NotExists(Certificate {
            kind: CertificateKind::TraceMismatch { trace },
            instance_digest,
        })
    };
    Ok(Decision { verdict, trace: steps })
}

/// Closed-form decision when `g` has no cut vertex: no H-orientation exists
/// iff every vertex has fixed parity and the odd ones disagree with `e(G)`
/// mod 2.
pub fn decide_2connected(g: &MultiGraph, h: &ConstraintMap) -> Result<Verdict, DecisionError> {
    precheck(g, h)?;
    if let Some(&x) = g.cut_vertices()?.first() {
        return Err(DecisionError::Not2Connected(x));
    }
    let instance_digest = digest::instance_digest(g, h);
    if let Some(v) = (0..g.vertex_count()).find(|&v| h.allowed(v).is_empty()) {
        return Ok(Verdict::NotExists(Certificate {
            kind: CertificateKind::PerVertexVoid { vertex: v },
            instance_digest,
        }));
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| h.parity_class(v) == ParityClass::Mixed) {
        return Ok(Verdict::Exists {
            witness: v,
            reason: ExistsReason::MixedParityVertex,
        });
    }
    let p = Partition::initial(h);
    let trace = ParityTrace {
        steps: Vec::new(),
        odd: p.odd(),
        even: p.even(),
    };
    if trace.odd.len() % 2 == g.edge_count() % 2 {
        Ok(Verdict::Exists {
            witness: 0,
            reason: ExistsReason::TraceCompletedMatching { trace },
        })
    } else {
        Ok(Verdict::NotExists(Certificate {
            kind: CertificateKind::TraceMismatch { trace },
            instance_digest,
        }))
    }
}

#[cfg(test)]
mod tests;
