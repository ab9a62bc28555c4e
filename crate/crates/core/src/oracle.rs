//! Exhaustive ground truth for small instances.
//!
//! All `2^m` orientations are visited in Gray-code order, so each step
//! reverses one edge. Nothing here depends on the decision or construction
//! code.

use serde::Serialize;
use thiserror::Error;

use crate::constraints::{ConstraintMap, DegreeSet, Parity};
use crate::graph::{GraphError, MultiGraph, VertexId};

pub const DEFAULT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{edges} edges exceed the enumeration cap of {cap}")]
    TooManyEdges { edges: usize, cap: usize },
    #[error("vertex {0} is not a cut vertex")]
    NotACutVertex(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Result of one full enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Number of H-orientations.
    pub count: u64,
    /// Per vertex `v`, the out-degrees `v` takes over orientations where every
    /// other vertex is feasible.
    pub spectra: Vec<Vec<usize>>,
    /// Tail of every edge in the first H-orientation met, if any.
    pub first_feasible: Option<Vec<VertexId>>,
}

impl Enumeration {
    pub fn exists(&self) -> bool {
        self.count > 0
    }
}

pub fn enumerate(g: &MultiGraph, h: &ConstraintMap, cap: usize) -> Result<Enumeration, OracleError> {
    let m = g.edge_count();
    if m > cap || m >= 63 {
        return Err(OracleError::TooManyEdges { edges: m, cap });
    }
    let n = g.vertex_count();
    let edges = g.edges();
    // Start with every edge pointing from its first to its second endpoint.
    let mut reversed = vec![false; m];
    let mut out = vec![0usize; n];
    for &(a, _) in edges {
        out[a] += 1;
    }
    let ok = |v: usize, d: usize| h.allowed(v).contains(d);
    let mut bad_count = 0usize;
    let mut bad_xor = 0usize;
    for (v, &d) in out.iter().enumerate() {
        if !ok(v, d) {
            bad_count += 1;
            bad_xor ^= v;
        }
    }
    let mut spectra = vec![0u64; n];
    let mut count = 0u64;
    let mut first_feasible = None;

    let total: u64 = 1 << m;
    for k in 0..total {
        if k > 0 {
            let e = k.trailing_zeros() as usize;
            let (a, b) = edges[e];
            let (from, to) = if reversed[e] { (b, a) } else { (a, b) };
            reversed[e] = !reversed[e];
            for (v, new) in [(from, out[from] - 1), (to, out[to] + 1)] {
                let was = ok(v, out[v]);
                let now = ok(v, new);
                out[v] = new;
                if was != now {
                    bad_xor ^= v;
                    if now {
                        bad_count -= 1;
                    } else {
                        bad_count += 1;
                    }
                }
            }
        }
        match bad_count {
            0 => {
                count += 1;
                for v in 0..n {
                    spectra[v] |= 1 << out[v];
                }
                if first_feasible.is_none() {
                    first_feasible = Some(
                        (0..m)
                            .map(|e| if reversed[e] { edges[e].1 } else { edges[e].0 })
                            .collect(),
                    );
                }
            }
            1 => spectra[bad_xor] |= 1 << out[bad_xor],
            _ => {}
        }
    }
    let spectra = spectra
        .into_iter()
        .map(|bits| (0..64).filter(|i| bits >> i & 1 == 1).collect())
        .collect();
    Ok(Enumeration {
        count,
        spectra,
        first_feasible,
    })
}

/// `(exists, number of H-orientations)`.
pub fn enumerate_existence(g: &MultiGraph, h: &ConstraintMap) -> Result<(bool, u64), OracleError> {
    let e = enumerate(g, h, DEFAULT_CAP)?;
    Ok((e.exists(), e.count))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumClass {
    ContainsConsecutive,
    /// Every value of this parity in `[0, d(u)]` and nothing else.
    FullParity(Parity),
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub vertex: VertexId,
    pub degree: usize,
    pub values: Vec<usize>,
    pub class: SpectrumClass,
}

pub fn classify(values: &[usize], degree: usize) -> SpectrumClass {
    if values.windows(2).any(|w| w[1] == w[0] + 1) {
        return SpectrumClass::ContainsConsecutive;
    }
    for p in [Parity::Even, Parity::Odd] {
        let class: Vec<usize> = (p.bit()..=degree).step_by(2).collect();
        if !class.is_empty() && values == class.as_slice() {
            return SpectrumClass::FullParity(p);
        }
    }
    SpectrumClass::Other
}

pub fn spectrum(g: &MultiGraph, h: &ConstraintMap, u: VertexId) -> Result<SpectrumReport, OracleError> {
    spectrum_with_cap(g, h, u, DEFAULT_CAP)
}

pub fn spectrum_with_cap(
    g: &MultiGraph,
    h: &ConstraintMap,
    u: VertexId,
    cap: usize,
) -> Result<SpectrumReport, OracleError> {
    g.check_vertex(u)?;
    let e = enumerate(g, h, cap)?;
    Ok(report(g, u, e.spectra[u].clone()))
}

fn report(g: &MultiGraph, u: VertexId, values: Vec<usize>) -> SpectrumReport {
    SpectrumReport {
        vertex: u,
        degree: g.degree(u),
        class: classify(&values, g.degree(u)),
        values,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinkowskiReport {
    pub global: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub sum: Vec<usize>,
}

impl MinkowskiReport {
    pub fn holds(&self) -> bool {
        self.global == self.sum
    }
}

/// Compares the spectrum at cut vertex `x` with the sum of the spectra of
/// `G[C + x]` over the components `C` of `G - x`, each with `x` unconstrained.
pub fn minkowski_check(
    g: &MultiGraph,
    h: &ConstraintMap,
    x: VertexId,
    cap: usize,
) -> Result<MinkowskiReport, OracleError> {
    g.check_vertex(x)?;
    let subgraphs = g.blocks_at(x)?;
    if subgraphs.len() < 2 {
        return Err(OracleError::NotACutVertex(x));
    }
    let global = enumerate(g, h, cap)?.spectra[x].clone();
    let mut blocks = Vec::with_capacity(subgraphs.len());
    let mut sum = vec![0usize];
    for sub in &subgraphs {
        let mut hb = h.restrict(sub);
        let lx = sub.local_vertex(x).expect("x belongs to every block at x");
        *hb.allowed_mut(lx) = DegreeSet::full(sub.graph.degree(lx));
        let spec = enumerate(&sub.graph, &hb, cap)?.spectra[lx].clone();
        let mut next: Vec<usize> = sum.iter().flat_map(|&a| spec.iter().map(move |&b| a + b)).collect();
        next.sort_unstable();
        next.dedup();
        sum = next;
        blocks.push(spec);
    }
    Ok(MinkowskiReport { global, blocks, sum })
}
