//! SHA-256 digests that bind certificates to an instance and to the resolved
//! partition at each trace step.

use sha2::{Digest, Sha256};

use crate::constraints::{ConstraintMap, Parity};
use crate::graph::{MultiGraph, VertexId};

fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Hex SHA-256 of arbitrary bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Digest of the canonical text form: vertex count, edges by id, allowed sets
/// by vertex.
pub fn instance_digest(g: &MultiGraph, h: &ConstraintMap) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("orient-avoid/1;n={};m={};", g.vertex_count(), g.edge_count()));
    for &(a, b) in g.edges() {
        hasher.update(format!("{a}-{b},"));
    }
    for v in 0..h.len() {
        hasher.update(format!(";{v}:"));
        for i in h.allowed(v).iter() {
            hasher.update(format!("{i},"));
        }
    }
    hex(&hasher.finalize())
}

/// Digest of the initial partition `(V1_0, V2_0)`.
pub fn partition_digest(odd: &[VertexId], even: &[VertexId]) -> String {
    let mut hasher = Sha256::new();
    hasher.update("partition;odd:");
    for v in odd {
        hasher.update(format!("{v},"));
    }
    hasher.update(";even:");
    for v in even {
        hasher.update(format!("{v},"));
    }
    hex(&hasher.finalize())
}

/// Chains one resolved vertex onto the previous partition digest.
pub fn extend_digest(previous: &str, vertex: VertexId, parity: Parity) -> String {
    let mut hasher = Sha256::new();
    hasher.update(previous);
    hasher.update(format!(";{vertex}:{parity}"));
    hex(&hasher.finalize())
}
