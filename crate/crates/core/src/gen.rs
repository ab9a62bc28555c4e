//! Seeded instance generators and the differential fuzz driver.

use std::sync::OnceLock;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::constraints::{ConstraintMap, DegreeSet, Parity};
use crate::construct::{self, Outcome};
use crate::decision::{self, DecideOptions};
use crate::graph::{MultiGraph, VertexId};
use crate::io::{self, Instance};
use crate::oracle;
use crate::orientation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
}

fn infeasible(msg: impl Into<String>) -> GenError {
    GenError::InfeasibleParameters(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// A uniformly chosen member of [`catalogue`]`(max_vertices)`.
    AllSmallGraphs {
        max_vertices: usize,
    },
    RandomTree {
        n: usize,
    },
    /// A random tree plus `m - n + 1` random extra edges; parallel edges allowed.
    RandomConnected {
        n: usize,
        m: usize,
    },
    /// A Hamiltonian cycle plus random chords (a digon or `K2` when `n = 2`).
    RandomBiconnected {
        n: usize,
        m: usize,
    },
    /// Cycles of length in `[min_len, max_len]`, each glued at one existing
    /// vertex.
    Cactus {
        blocks: usize,
        min_len: usize,
        max_len: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum Policy {
    /// `H(v)` a full parity class; with `matching`, `|odd| = e (mod 2)`.
    FullParity { matching: bool },
    /// Each value forbidden with a per-instance probability unless its
    /// predecessor already is.
    RandomDense,
    /// `|F(v)| <= floor((d - 1) / 2)` everywhere.
    StrictBudget,
    /// `|F(v)| <= ceil((d + 1) / 2)` everywhere except one non-cut vertex
    /// held to `floor((d - 1) / 2)`.
    RelaxedBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenSpec {
    pub seed: u64,
    pub family: Family,
    pub policy: Policy,
}

/// Deterministic 64-bit mixer for deriving independent stream seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every connected simple graph with `1..=max_vertices` vertices, one per
/// isomorphism class, ordered by vertex count then edge count.
pub fn catalogue(max_vertices: usize) -> Vec<MultiGraph> {
    assert!(max_vertices <= 6, "catalogue is brute force; keep max_vertices <= 6");
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let perms = permutations(n);
        let mut seen = std::collections::BTreeSet::new();
        // (edge count, canonical mask, edges) so sorting orders by size.
        let mut graphs = Vec::new();
        for mask in 0u64..(1 << pairs.len()) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let g = MultiGraph::build(n, &edges).expect("catalogue edges are valid");
            if !g.is_connected() {
                continue;
            }
            let canon = perms
                .iter()
                .map(|p| {
                    edges.iter().fold(0u64, |acc, &(a, b)| {
                        let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                        acc | 1 << pairs.iter().position(|&q| q == (x, y)).unwrap()
                    })
                })
                .min()
                .unwrap();
            if seen.insert(canon) {
                graphs.push((edges.len(), canon, edges));
            }
        }
        graphs.sort();
        out.extend(graphs.into_iter().map(|(_, _, e)| MultiGraph::build(n, &e).unwrap()));
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn relabel(n: usize, edges: &[(usize, usize)], rng: &mut impl Rng) -> MultiGraph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut e: Vec<_> = edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    e.shuffle(rng);
    MultiGraph::build(n, &e).expect("generated edges are valid")
}

fn random_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    (1..n).map(|v| (rng.random_range(0..v), v)).collect()
}

fn random_pair(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

pub fn gen_graph(family: &Family, rng: &mut impl Rng) -> Result<MultiGraph, GenError> {
    match *family {
        Family::AllSmallGraphs { max_vertices } => {
            if max_vertices == 0 {
                return Err(infeasible("catalogue needs at least one vertex"));
            }
            let owned;
            let all: &[MultiGraph] = if max_vertices <= 5 {
                static SMALL: OnceLock<Vec<MultiGraph>> = OnceLock::new();
                let small = SMALL.get_or_init(|| catalogue(5));
                let end = small.partition_point(|g| g.vertex_count() <= max_vertices);
                &small[..end]
            } else {
                owned = catalogue(max_vertices);
                &owned
            };
            Ok(all.choose(rng).expect("catalogue is non-empty").clone())
        }
        Family::RandomTree { n } => {
            if n == 0 {
                return Err(infeasible("a tree needs at least one vertex"));
            }
            Ok(relabel(n, &random_tree(n, rng), rng))
        }
        Family::RandomConnected { n, m } => {
            if n == 0 || m + 1 < n || (n == 1 && m > 0) {
                return Err(infeasible(format!("no connected loopless graph with n={n}, m={m}")));
            }
            let mut edges = random_tree(n, rng);
            while edges.len() < m {
                edges.push(random_pair(n, rng));
            }
            Ok(relabel(n, &edges, rng))
        }
        Family::RandomBiconnected { n, m } => {
            let mut edges = match n {
                2 if m >= 1 => vec![(0, 1)],
                _ if n >= 3 && m >= n => (0..n).map(|v| (v, (v + 1) % n)).collect(),
                _ => return Err(infeasible(format!("no 2-connected graph with n={n}, m={m}"))),
            };
            while edges.len() < m {
                edges.push(random_pair(n, rng));
            }
            Ok(relabel(n, &edges, rng))
        }
        Family::Cactus {
            blocks,
            min_len,
            max_len,
        } => {
            if min_len < 2 || max_len < min_len {
                return Err(infeasible(format!("cycle lengths [{min_len}, {max_len}]")));
            }
            let mut n = 1;
            let mut edges = Vec::new();
            for _ in 0..blocks {
                let len = rng.random_range(min_len..=max_len);
                let root = rng.random_range(0..n);
                let mut prev = root;
                for _ in 1..len {
                    edges.push((prev, n));
                    prev = n;
                    n += 1;
                }
                edges.push((prev, root));
            }
            Ok(relabel(n, &edges, rng))
        }
    }
}

/// Up to `budget` values of `[0, d]`, no two consecutive, placed at random.
fn sparse_forbidden(d: usize, budget: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut candidates: Vec<usize> = (0..=d).collect();
    candidates.shuffle(rng);
    for c in candidates {
        if chosen.len() >= budget {
            break;
        }
        if chosen.iter().all(|&x| x.abs_diff(c) >= 2) {
            chosen.push(c);
        }
    }
    chosen.sort_unstable();
    chosen
}

fn from_forbidden_lists(g: &MultiGraph, f: Vec<Vec<usize>>) -> ConstraintMap {
    ConstraintMap::from_forbidden(g, &f).expect("sparse forbidden sets leave something allowed")
}

pub fn gen_constraints(g: &MultiGraph, policy: &Policy, rng: &mut impl Rng) -> ConstraintMap {
    let n = g.vertex_count();
    match *policy {
        Policy::FullParity { matching } => {
            let mut parity: Vec<Parity> = (0..n)
                .map(|v| {
                    if g.degree(v) == 0 || rng.random_bool(0.5) {
                        Parity::Even
                    } else {
                        Parity::Odd
                    }
                })
                .collect();
            let odd = parity.iter().filter(|&&p| p == Parity::Odd).count();
            if matching && odd % 2 != g.edge_count() % 2 {
                let candidates: Vec<VertexId> = (0..n).filter(|&v| g.degree(v) > 0).collect();
                let &v = candidates.choose(rng).expect("odd mismatch implies an edge");
                parity[v] = parity[v].flipped();
            }
            ConstraintMap::from_sets(
                (0..n)
                    .map(|v| DegreeSet::parity_class(g.degree(v), parity[v]))
                    .collect(),
            )
        }
        Policy::RandomDense => {
            let p = rng.random_range(0.2..0.8);
            let f = (0..n)
                .map(|v| {
                    let mut out: Vec<usize> = Vec::new();
                    if g.degree(v) > 0 {
                        for i in 0..=g.degree(v) {
                            if out.last() != Some(&(i.wrapping_sub(1))) && rng.random_bool(p) {
                                out.push(i);
                            }
                        }
                    }
                    out
                })
                .collect();
            from_forbidden_lists(g, f)
        }
        Policy::StrictBudget => {
            let f = (0..n)
                .map(|v| {
                    let d = g.degree(v);
                    sparse_forbidden(d, d.saturating_sub(1) / 2, rng)
                })
                .collect();
            from_forbidden_lists(g, f)
        }
        Policy::RelaxedBudget => {
            let cuts = g.cut_vertices().unwrap_or_default();
            let non_cut: Vec<VertexId> = (0..n).filter(|v| cuts.binary_search(v).is_err()).collect();
            let special = non_cut.choose(rng).copied();
            let f = (0..n)
                .map(|v| {
                    let d = g.degree(v);
                    if Some(v) == special {
                        sparse_forbidden(d, d.saturating_sub(1) / 2, rng)
                    } else if d == 0 {
                        Vec::new()
                    } else {
                        sparse_forbidden(d, (d + 2) / 2, rng)
                    }
                })
                .collect();
            from_forbidden_lists(g, f)
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    let mut rng = rng_for(spec.seed);
    let graph = gen_graph(&spec.family, &mut rng)?;
    let constraints = gen_constraints(&graph, &spec.policy, &mut rng);
    Ok(Instance { graph, constraints })
}

/// A family with small random parameters and at most `max_edges` edges.
pub fn small_family(rng: &mut impl Rng, max_edges: usize) -> Family {
    let max_edges = max_edges.max(1);
    match rng.random_range(0..5) {
        0 => Family::AllSmallGraphs {
            max_vertices: (1..=5).filter(|n| n * (n - 1) / 2 <= max_edges).max().unwrap_or(1),
        },
        1 => Family::RandomTree {
            n: rng.random_range(1..=max_edges + 1),
        },
        2 => {
            let m = rng.random_range(1..=max_edges);
            Family::RandomConnected {
                n: rng.random_range(2..=m + 1),
                m,
            }
        }
        3 => {
            let m = rng.random_range(1..=max_edges);
            let n = if m < 3 { 2 } else { rng.random_range(2..=m) };
            Family::RandomBiconnected { n, m }
        }
        _ => {
            let max_len = rng.random_range(2..=max_edges.clamp(2, 5));
            let blocks = rng.random_range(1..=(max_edges / max_len).max(1));
            Family::Cactus {
                blocks,
                min_len: 2,
                max_len,
            }
        }
    }
}

/// What the harness compares against the oracle.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    VerdictMismatch { decided: bool, oracle: bool },
    InvalidOrientation { vertices: Vec<VertexId> },
    CertificateRejected { message: String },
    Error { message: String },
}

/// `None` if decide, orient and the certificate verifier all agree with the
/// oracle on `inst`.
pub fn check_instance(inst: &Instance, options: &DecideOptions, cap: usize) -> Option<Failure> {
    let (g, h) = (&inst.graph, &inst.constraints);
    let truth = match oracle::enumerate(g, h, cap) {
        Ok(e) => e.exists(),
        Err(e) => return Some(Failure::Error { message: e.to_string() }),
    };
    let built = match construct::orient_with(g, h, options) {
        Ok(c) => c,
        Err(e) => {
            return Some(Failure::Error { message: e.to_string() });
        }
    };
    let decided = built.decision.verdict.exists();
    if decided != truth {
        return Some(Failure::VerdictMismatch { decided, oracle: truth });
    }
    match &built.outcome {
        Outcome::Oriented(o) => {
            let bad = orientation::verify(g, h, o);
            (!bad.is_empty()).then_some(Failure::InvalidOrientation { vertices: bad })
        }
        Outcome::Refuted(c) => decision::verify_certificate(g, h, c)
            .err()
            .map(|e| Failure::CertificateRejected { message: e.to_string() }),
    }
}

fn clip(h: &DegreeSet, d: usize) -> Option<DegreeSet> {
    let s = DegreeSet::from_values(d, h.iter());
    (!s.is_empty()).then_some(s)
}

fn without_edge(inst: &Instance, e: usize) -> Option<Instance> {
    let g = &inst.graph;
    let edges: Vec<_> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, &p)| p)
        .collect();
    let graph = MultiGraph::build(g.vertex_count(), &edges).ok()?;
    if !graph.is_connected() {
        return None;
    }
    let sets = (0..graph.vertex_count())
        .map(|v| clip(inst.constraints.allowed(v), graph.degree(v)))
        .collect::<Option<Vec<_>>>()?;
    dense(graph, sets)
}

fn without_leaf(inst: &Instance, leaf: VertexId) -> Option<Instance> {
    let g = &inst.graph;
    if g.degree(leaf) != 1 || g.vertex_count() < 2 {
        return None;
    }
    let keep: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| v != leaf).collect();
    let sub = g.induced(&keep);
    let sets = sub
        .vertices
        .iter()
        .enumerate()
        .map(|(l, &v)| clip(inst.constraints.allowed(v), sub.graph.degree(l)))
        .collect::<Option<Vec<_>>>()?;
    dense(sub.graph, sets)
}

fn dense(graph: MultiGraph, sets: Vec<DegreeSet>) -> Option<Instance> {
    let constraints = ConstraintMap::from_sets(sets);
    constraints
        .validate_dense(&graph)
        .is_empty()
        .then_some(Instance { graph, constraints })
}

/// Every one-step simplification of `inst` that is still a dense pair.
fn shrink_candidates(inst: &Instance) -> Vec<Instance> {
    let g = &inst.graph;
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        out.extend(without_leaf(inst, v));
    }
    for e in 0..g.edge_count() {
        out.extend(without_edge(inst, e));
    }
    for v in 0..g.vertex_count() {
        for value in inst.constraints.forbidden(v).iter() {
            let mut constraints = inst.constraints.clone();
            constraints.allowed_mut(v).insert(value);
            if constraints.validate_dense(g).is_empty() {
                out.push(Instance {
                    graph: g.clone(),
                    constraints,
                });
            }
        }
    }
    out
}

/// Greedily applies the first simplification that still fails until none
/// does. Returns the minimal instance and the number of steps taken.
pub fn shrink(inst: &Instance, fails: impl Fn(&Instance) -> bool) -> (Instance, usize) {
    let mut current = inst.clone();
    let mut steps = 0;
    'outer: loop {
        for candidate in shrink_candidates(&current) {
            if fails(&candidate) {
                current = candidate;
                steps += 1;
                continue 'outer;
            }
        }
        return (current, steps);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    /// Largest edge count generated, and the oracle cap.
    pub cap: usize,
    /// `None` mixes `RandomDense` with the other policies.
    pub policy: Option<Policy>,
    pub options: DecideOptions,
    /// Failures beyond this many are counted but not shrunk or kept.
    pub keep_failures: usize,
}

impl FuzzConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            cap: 10,
            policy: None,
            options: DecideOptions::default(),
            keep_failures: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzFailure {
    pub index: usize,
    pub spec: GenSpec,
    pub failure: Failure,
    pub original: Instance,
    pub shrunk: Instance,
    pub shrink_steps: usize,
}

impl FuzzFailure {
    /// Case file: the shrunk instance with the failure attached.
    pub fn case_json(&self) -> Value {
        let mut v = io::instance_to_json(&self.shrunk);
        v["failure"] = json!(self.failure);
        v["spec"] = json!(self.spec);
        v
    }
}

#[derive(Debug, Clone, Default)]
pub struct FuzzReport {
    pub checked: usize,
    pub exists: usize,
    pub not_exists: usize,
    pub failure_count: usize,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn to_json(&self) -> Value {
        json!({
            "checked": self.checked,
            "exists": self.exists,
            "not_exists": self.not_exists,
            "failure_count": self.failure_count,
            "failures": self.failures.iter().map(|f| json!({
                "index": f.index,
                "spec": f.spec,
                "failure": f.failure,
                "original_edges": f.original.graph.edge_count(),
                "shrink_steps": f.shrink_steps,
                "case": f.case_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Spec of instance `index` in a fuzz run.
pub fn fuzz_spec(config: &FuzzConfig, index: usize) -> GenSpec {
    let seed = mix_seed(config.seed, index as u64);
    let mut rng = rng_for(seed ^ 0x5EED);
    let family = small_family(&mut rng, config.cap);
    let policy = config.policy.unwrap_or_else(|| match rng.random_range(0..8) {
        0 => Policy::FullParity { matching: false },
        1 => Policy::FullParity { matching: true },
        2 => Policy::StrictBudget,
        3 => Policy::RelaxedBudget,
        _ => Policy::RandomDense,
    });
    GenSpec { seed, family, policy }
}

pub fn fuzz(config: &FuzzConfig) -> FuzzReport {
    let results: Vec<(GenSpec, Instance, Option<Failure>, bool)> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let spec = fuzz_spec(config, i);
            let inst = generate(&spec).expect("small families are always feasible");
            let failure = check_instance(&inst, &config.options, config.cap);
            let exists = oracle::enumerate(&inst.graph, &inst.constraints, config.cap).is_ok_and(|e| e.exists());
            (spec, inst, failure, exists)
        })
        .collect();
    let mut report = FuzzReport {
        checked: results.len(),
        ..FuzzReport::default()
    };
    for (index, (spec, inst, failure, exists)) in results.into_iter().enumerate() {
        if exists {
            report.exists += 1;
        } else {
            report.not_exists += 1;
        }
        let Some(failure) = failure else { continue };
        report.failure_count += 1;
        if report.failures.len() >= config.keep_failures {
            continue;
        }
        let (shrunk, shrink_steps) = shrink(&inst, |c| check_instance(c, &config.options, config.cap).is_some());
        let failure = check_instance(&shrunk, &config.options, config.cap).unwrap_or(failure);
        report.failures.push(FuzzFailure {
            index,
            spec,
            failure,
            original: inst,
            shrunk,
            shrink_steps,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::Mutation;

    #[test]
    fn catalogue_counts() {
        // Connected graphs up to isomorphism on 1..=5 vertices: 1, 1, 2, 6, 21.
        let counts: Vec<usize> = (1..=5).map(|n| catalogue(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 10, 31]);
    }

    #[test]
    fn generators_are_deterministic_and_dense() {
        let families = [
            Family::AllSmallGraphs { max_vertices: 4 },
            Family::RandomTree { n: 5 },
            Family::RandomConnected { n: 6, m: 9 },
            Family::RandomBiconnected { n: 5, m: 8 },
            Family::Cactus {
                blocks: 3,
                min_len: 3,
                max_len: 3,
            },
        ];
        let policies = [
            Policy::FullParity { matching: true },
            Policy::RandomDense,
            Policy::StrictBudget,
            Policy::RelaxedBudget,
        ];
        for family in families {
            for policy in policies {
                for seed in 0..20 {
                    let spec = GenSpec { seed, family, policy };
                    let a = generate(&spec).unwrap();
                    let b = generate(&spec).unwrap();
                    assert_eq!(
                        io::to_pretty(&io::instance_to_json(&a)),
                        io::to_pretty(&io::instance_to_json(&b))
                    );
                    assert!(a.constraints.validate_dense(&a.graph).is_empty(), "{spec:?}");
                }
            }
        }
        let tree = generate(&GenSpec {
            seed: 1,
            family: Family::RandomTree { n: 5 },
            policy: Policy::RandomDense,
        })
        .unwrap();
        assert_eq!(tree.graph.edge_count(), 4);
        let cactus = generate(&GenSpec {
            seed: 1,
            family: Family::Cactus {
                blocks: 3,
                min_len: 3,
                max_len: 3,
            },
            policy: Policy::RandomDense,
        })
        .unwrap();
        assert_eq!((cactus.graph.vertex_count(), cactus.graph.edge_count()), (7, 9));
        assert!(!cactus.graph.cut_vertices().unwrap().is_empty());
    }

    #[test]
    fn policy_shapes() {
        let t = MultiGraph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        for seed in 0..10 {
            let h = gen_constraints(&t, &Policy::FullParity { matching: true }, &mut rng_for(seed));
            let odd = (0..3).filter(|&v| h.allowed(v).contains(1)).count();
            assert_eq!(odd % 2, 1);
        }
        let k = MultiGraph::build(2, &[(0, 1); 4]).unwrap();
        for seed in 0..20 {
            let h = gen_constraints(&k, &Policy::StrictBudget, &mut rng_for(seed));
            assert!((0..2).all(|v| h.forbidden(v).len() <= 1));
        }
        assert!(matches!(
            gen_graph(&Family::RandomConnected { n: 5, m: 3 }, &mut rng_for(0)),
            Err(GenError::InfeasibleParameters(_))
        ));
    }

    #[test]
    fn shrink_keeps_density() {
        let inst = generate(&GenSpec {
            seed: 3,
            family: Family::RandomConnected { n: 5, m: 8 },
            policy: Policy::RandomDense,
        })
        .unwrap();
        for c in shrink_candidates(&inst) {
            assert!(c.constraints.validate_dense(&c.graph).is_empty());
        }
        let (small, _) = shrink(&inst, |_| true);
        assert_eq!(small.graph.edge_count(), 0);
    }

    #[test]
    fn clean_run_and_mutant() {
        let report = fuzz(&FuzzConfig::new(7, 300));
        assert_eq!(report.failure_count, 0, "{}", report.to_json());
        assert!(report.exists > 0 && report.not_exists > 0);

        let mut config = FuzzConfig::new(7, 300);
        config.options.mutation = Some(Mutation::InvertTraceParity);
        let report = fuzz(&config);
        assert!(report.failure_count > 0);
        let f = &report.failures[0];
        assert!(f.shrunk.graph.edge_count() <= f.original.graph.edge_count());
        assert!(check_instance(&f.shrunk, &config.options, 10).is_some());
    }
}
