//! Independent replay of non-existence certificates.

use thiserror::Error;

use super::{window_counts, Certificate, CertificateKind, Partition, TraceStep, Window, WindowShape};
use crate::constraints::{ConstraintMap, DensityViolation};
use crate::digest;
use crate::graph::{MultiGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateRejection {
    #[error("certificate was issued for a different instance")]
    DigestMismatch,
    #[error("instance is not a dense pair ({} violations)", .0.len())]
    NotDense(Vec<DensityViolation>),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("vertex {0} has a nonempty allowed set")]
    AllowedSetNotEmpty(VertexId),
    #[error("step {step}: vertex {vertex} is already resolved")]
    AlreadyResolved { step: usize, vertex: VertexId },
    #[error("step {step}: resolved-partition digest does not match the replay")]
    SnapshotMismatch { step: usize },
    #[error("step {step}: {count} components of G - x are unresolved")]
    TooManyUnresolved { step: usize, count: usize },
    #[error("step {step}: recorded window does not match the recomputed one")]
    WindowMismatch { step: usize },
    #[error("step {step}: assigned parity disagrees with the window")]
    ParityIncoherent { step: usize },
    #[error("step {step}: no parity assigned")]
    MissingParity { step: usize },
    #[error("vertex {0} is never resolved")]
    Incomplete(VertexId),
    #[error("recorded V1/V2 differ from the replayed partition")]
    PartitionMismatch,
    #[error("|V1| and e(G) have the same parity")]
    ParityMatches,
    #[error("final window is not empty")]
    WindowNotEmpty,
    #[error("final step of an empty-window certificate assigns a parity")]
    UnexpectedParity,
}

struct Replay<'a> {
    g: &'a MultiGraph,
    h: &'a ConstraintMap,
    partition: Partition,
    chain: String,
    index: usize,
}

impl<'a> Replay<'a> {
    fn new(g: &'a MultiGraph, h: &'a ConstraintMap) -> Self {
        let partition = Partition::initial(h);
        let chain = partition.digest();
        Self {
            g,
            h,
            partition,
            chain,
            index: 0,
        }
    }

    /// Recomputes the window at `step.vertex` and compares every recorded field.
    fn check_window(&self, step: &TraceStep) -> Result<Window, CertificateRejection> {
        let i = self.index;
        let x = step.vertex;
        if x >= self.g.vertex_count() {
            return Err(CertificateRejection::VertexOutOfRange(x));
        }
        if self.partition.is_resolved(x) {
            return Err(CertificateRejection::AlreadyResolved { step: i, vertex: x });
        }
        if step.resolved_digest != self.chain {
            return Err(CertificateRejection::SnapshotMismatch { step: i });
        }
        let (lower, excluded, open) =
            window_counts(self.g, x, &self.partition).map_err(|_| CertificateRejection::VertexOutOfRange(x))?;
        if open > 1 {
            return Err(CertificateRejection::TooManyUnresolved { step: i, count: open });
        }
        let w = Window::from_counts(self.h, x, self.g.degree(x), lower, excluded);
        if (w.lower, w.upper, w.excluded) != (step.lower, step.upper, step.excluded) || w.members != step.window {
            return Err(CertificateRejection::WindowMismatch { step: i });
        }
        Ok(w)
    }

    fn commit(&mut self, step: &TraceStep) -> Result<(), CertificateRejection> {
        let w = self.check_window(step)?;
        let i = self.index;
        let p = step.parity.ok_or(CertificateRejection::MissingParity { step: i })?;
        match w.shape() {
            WindowShape::Mixed => return Err(CertificateRejection::ParityIncoherent { step: i }),
            WindowShape::Single(q) if q != p => return Err(CertificateRejection::ParityIncoherent { step: i }),
            _ => {}
        }
        self.partition.set(step.vertex, p);
        self.chain = digest::extend_digest(&self.chain, step.vertex, p);
        self.index += 1;
        Ok(())
    }
}

/// Checks `c` against `(g, h)` without consulting the decision procedure.
pub fn verify_certificate(g: &MultiGraph, h: &ConstraintMap, c: &Certificate) -> Result<(), CertificateRejection> {
    if h.len() != g.vertex_count() || digest::instance_digest(g, h) != c.instance_digest {
        return Err(CertificateRejection::DigestMismatch);
    }
    let violations = h.validate_dense(g);
    if !violations.is_empty() {
        return Err(CertificateRejection::NotDense(violations));
    }
    match &c.kind {
        CertificateKind::PerVertexVoid { vertex } => {
            if *vertex >= g.vertex_count() {
                return Err(CertificateRejection::VertexOutOfRange(*vertex));
            }
            if !h.allowed(*vertex).is_empty() {
                return Err(CertificateRejection::AllowedSetNotEmpty(*vertex));
            }
            Ok(())
        }
        CertificateKind::EmptyWindow { prefix, step } => {
            let mut replay = Replay::new(g, h);
            for s in prefix {
                replay.commit(s)?;
            }
            if step.parity.is_some() {
                return Err(CertificateRejection::UnexpectedParity);
            }
            let w = replay.check_window(step)?;
            if !w.members.is_empty() {
                return Err(CertificateRejection::WindowNotEmpty);
            }
            Ok(())
        }
        CertificateKind::TraceMismatch { trace } => {
            let mut replay = Replay::new(g, h);
            for s in &trace.steps {
                replay.commit(s)?;
            }
            if let Some(&v) = replay.partition.unresolved().first() {
                return Err(CertificateRejection::Incomplete(v));
            }
            if replay.partition.odd() != trace.odd || replay.partition.even() != trace.even {
                return Err(CertificateRejection::PartitionMismatch);
            }
            if trace.odd.len() % 2 == g.edge_count() % 2 {
                return Err(CertificateRejection::ParityMatches);
            }
            Ok(())
        }
    }
}
