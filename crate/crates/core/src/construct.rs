//! Building an H-orientation once existence is known.
//!
//! [`repair`] makes every vertex except an anchor `u` feasible by flipping
//! tree paths towards `u`; [`finalize`] then moves `d+(u)` with cycle flips
//! through `u` until it is allowed. [`orient`] chains both after
//! [`decide`](crate::decision::decide), anchored at the decision's witness.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::constraints::ConstraintMap;
use crate::decision::{self, Certificate, Decision, DecisionError, Verdict};
use crate::graph::{EdgeId, GraphError, MultiGraph, VertexId};
use crate::orientation::{self, Orientation, Trail};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error("vertex {0} is infeasible but is not the anchor")]
    NotFeasibleOffAnchor(VertexId),
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
}

impl From<GraphError> for ConstructError {
    fn from(e: GraphError) -> Self {
        ConstructError::Decision(DecisionError::Graph(e))
    }
}

fn broken(msg: String) -> ConstructError {
    ConstructError::InternalInvariantBroken(msg)
}

/// Instrumentation of one [`repair`] run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RepairStats {
    pub iterations: usize,
    /// Number of infeasible non-anchor vertices before the first iteration
    /// and after each one.
    pub potential: Vec<usize>,
    /// Committed flips in order, each starting at the repaired vertex.
    #[serde(skip)]
    pub flips: Vec<Trail>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinalizeMove {
    pub direction: Direction,
    /// Whether the cycle was cut short at a vertex the full flip would break.
    pub partial: bool,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FinalizeStats {
    pub moves: Vec<FinalizeMove>,
}

fn infeasible_off(g: &MultiGraph, h: &ConstraintMap, o: &Orientation, u: VertexId) -> usize {
    (0..g.vertex_count())
        .filter(|&v| v != u && !h.allows(v, o.out_degree(v)))
        .count()
}

fn require_dense(g: &MultiGraph, h: &ConstraintMap, u: VertexId) -> Result<(), ConstructError> {
    g.check_vertex(u)?;
    let violations = h.validate_dense(g);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(DecisionError::NotDense(violations).into())
    }
}

/// Out-degree of `v` after `d` changes by `delta`.
fn shifted(d: usize, delta: i64) -> i64 {
    d as i64 + delta
}

/// Makes every vertex other than `u` feasible.
///
/// Vertices are visited in BFS order from `u`. An infeasible `v` is fixed by
/// flipping the tree path from `v` up to the first vertex `x` that the full
/// path flip would break (or up to `u`), so `v`, `x` and everything between
/// end up feasible and nothing else changes.
pub fn repair(
    g: &MultiGraph,
    h: &ConstraintMap,
    u: VertexId,
    mut o: Orientation,
) -> Result<(Orientation, RepairStats), ConstructError> {
    require_dense(g, h, u)?;
    let (order, parent) = g.bfs_tree(u);
    if order.len() != g.vertex_count() {
        return Err(GraphError::NotConnected.into());
    }
    let mut stats = RepairStats::default();
    let mut phi = infeasible_off(g, h, &o, u);
    stats.potential.push(phi);

    for &v in &order[1..] {
        if h.allows(v, o.out_degree(v)) {
            continue;
        }
        if stats.iterations >= g.vertex_count() {
            return Err(broken(format!("repair exceeded {} iterations", g.vertex_count())));
        }
        let mut edges = Vec::new();
        let mut below = parent[v].expect("non-root vertex has a tree edge");
        edges.push(below);
        let mut w = g.opposite(below, v);
        while w != u {
            let above = parent[w].expect("non-root vertex has a tree edge");
            let delta = o.flip_delta(g, below, w) + o.flip_delta(g, above, w);
            if !h.allowed(w).contains_signed(shifted(o.out_degree(w), delta)) {
                break;
            }
            edges.push(above);
            below = above;
            w = g.opposite(above, w);
        }
        let trail = Trail::new(g, v, edges).map_err(|e| broken(format!("repair path: {e}")))?;
        let mut on_path = vec![v];
        let mut at = v;
        for &e in trail.edges() {
            at = g.opposite(e, at);
            if at != u {
                on_path.push(at);
            }
        }
        let count = |o: &Orientation| on_path.iter().filter(|&&x| !h.allows(x, o.out_degree(x))).count();
        let before = count(&o);
        o.flip_in_place(g, &trail);
        if let Some(&bad) = on_path.iter().find(|&&x| !h.allows(x, o.out_degree(x))) {
            return Err(broken(format!("repairing {v} left {bad} infeasible")));
        }
        let next = phi + count(&o) - before;
        if next >= phi {
            return Err(broken(format!("potential did not decrease at {v}")));
        }
        phi = next;
        stats.iterations += 1;
        stats.potential.push(phi);
        stats.flips.push(trail);
    }
    let recount = infeasible_off(g, h, &o, u);
    if recount != 0 || phi != 0 {
        return Err(broken(format!("repair finished with {recount} infeasible vertices")));
    }
    Ok((o, stats))
}

/// One cycle move at `u` inside the component of `G - u` with the most
/// in-edges (up) or out-edges (down) at `u`. `None` if no component has two.
fn cycle_move(
    g: &MultiGraph,
    h: &ConstraintMap,
    u: VertexId,
    label: &[usize],
    components: usize,
    o: &mut Orientation,
    direction: Direction,
) -> Result<Option<FinalizeMove>, ConstructError> {
    // Edges at u that the move reverses: in-edges to go up, out-edges to go down.
    let wanted = |e: EdgeId| match direction {
        Direction::Up => o.head(g, e) == u,
        Direction::Down => o.tail(g, e) == u,
    };
    let mut by_component: Vec<Vec<EdgeId>> = vec![Vec::new(); components];
    for &(e, w) in g.incident(u) {
        if wanted(e) {
            by_component[label[w]].push(e);
        }
    }
    let mut best: Option<usize> = None;
    for c in 0..components {
        let k = by_component[c].len();
        if k >= 2 && best.map_or(true, |b| k > by_component[b].len()) {
            best = Some(c);
        }
    }
    let Some(c) = best else { return Ok(None) };
    let mut chosen = by_component[c].clone();
    chosen.sort_unstable();
    let (e1, e2) = (chosen[0], chosen[1]);
    let a = g.opposite(e1, u);
    let b = g.opposite(e2, u);
    let path = path_avoiding(g, u, a, b).ok_or_else(|| broken(format!("no path from {a} to {b} avoiding {u}")))?;

    let mut cycle = Vec::with_capacity(path.len() + 2);
    cycle.push(e1);
    cycle.extend(path);
    cycle.push(e2);

    // Walk u -> a -> ... -> b -> u and stop at the first vertex the full flip breaks.
    let mut cut = cycle.len();
    let mut at = a;
    for i in 0..cycle.len() - 1 {
        let delta = o.flip_delta(g, cycle[i], at) + o.flip_delta(g, cycle[i + 1], at);
        if !h.allowed(at).contains_signed(shifted(o.out_degree(at), delta)) {
            cut = i + 1;
            break;
        }
        at = g.opposite(cycle[i + 1], at);
    }
    let before = o.out_degree(u);
    let trail = Trail::new(g, u, cycle[..cut].to_vec()).map_err(|e| broken(format!("cycle move: {e}")))?;
    o.flip_in_place(g, &trail);
    let after = o.out_degree(u);

    let mut at = u;
    for &e in trail.edges() {
        at = g.opposite(e, at);
        if at != u && !h.allows(at, o.out_degree(at)) {
            return Err(broken(format!("cycle move at {u} broke {at}")));
        }
    }
    let step = after as i64 - before as i64;
    let expected = match (direction, cut < cycle.len()) {
        (Direction::Up, true) => 1,
        (Direction::Up, false) => 2,
        (Direction::Down, true) => -1,
        (Direction::Down, false) => -2,
    };
    if step != expected {
        return Err(broken(format!("cycle move at {u} changed d+ by {step}")));
    }
    Ok(Some(FinalizeMove {
        direction,
        partial: cut < cycle.len(),
        before,
        after,
    }))
}

/// Shortest `a`-`b` path in `G - u`, neighbours in ascending id order.
fn path_avoiding(g: &MultiGraph, u: VertexId, a: VertexId, b: VertexId) -> Option<Vec<EdgeId>> {
    if a == b {
        return Some(Vec::new());
    }
    let n = g.vertex_count();
    let mut parent: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a] = true;
    seen[u] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &(e, w) in g.incident(v) {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            parent[w] = Some(e);
            if w == b {
                let mut path = Vec::new();
                let mut at = b;
                while at != a {
                    let e = parent[at].expect("BFS parent");
                    path.push(e);
                    at = g.opposite(e, at);
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

/// Moves `d+(u)` into `H(u)`, keeping every other vertex feasible.
///
/// Sweeps upwards with cycle moves while some component of `G - u` has two
/// in-edges at `u`, then downwards. A partial move always lands in `H(u)`;
/// otherwise the sweep visits every out-degree of the current parity that
/// cycle moves can reach, which covers `H(u)` whenever an orientation exists.
pub fn finalize(
    g: &MultiGraph,
    h: &ConstraintMap,
    u: VertexId,
    mut o: Orientation,
) -> Result<(Orientation, FinalizeStats), ConstructError> {
    require_dense(g, h, u)?;
    if let Some(v) = (0..g.vertex_count()).find(|&v| v != u && !h.allows(v, o.out_degree(v))) {
        return Err(ConstructError::NotFeasibleOffAnchor(v));
    }
    let mut stats = FinalizeStats::default();
    if h.allows(u, o.out_degree(u)) {
        return Ok((o, stats));
    }
    let (label, components) = g.component_labels(Some(u));
    let cap = g.degree(u) + 2;
    for direction in [Direction::Up, Direction::Down] {
        while !h.allows(u, o.out_degree(u)) {
            if stats.moves.len() >= cap {
                return Err(broken(format!("finalize at {u} exceeded {cap} moves")));
            }
            match cycle_move(g, h, u, &label, components, &mut o, direction)? {
                Some(m) => stats.moves.push(m),
                None => break,
            }
        }
    }
    if !h.allows(u, o.out_degree(u)) {
        return Err(broken(format!(
            "no allowed out-degree reachable at {u} (stuck at {})",
            o.out_degree(u)
        )));
    }
    Ok((o, stats))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Oriented(Orientation),
    Refuted(Certificate),
}

/// Everything [`orient_detailed`] computed along the way.
#[derive(Debug, Clone)]
pub struct Construction {
    pub decision: Decision,
    pub outcome: Outcome,
    pub anchor: Option<VertexId>,
    pub repair: RepairStats,
    pub finalize: FinalizeStats,
}

pub fn orient(g: &MultiGraph, h: &ConstraintMap) -> Result<Outcome, ConstructError> {
    Ok(orient_detailed(g, h)?.outcome)
}

pub fn orient_detailed(g: &MultiGraph, h: &ConstraintMap) -> Result<Construction, ConstructError> {
    orient_with(g, h, &decision::DecideOptions::default())
}

pub fn orient_with(
    g: &MultiGraph,
    h: &ConstraintMap,
    options: &decision::DecideOptions,
) -> Result<Construction, ConstructError> {
    let decision = decision::decide_with(g, h, options)?;
    let witness = match &decision.verdict {
        Verdict::NotExists(c) => {
            return Ok(Construction {
                outcome: Outcome::Refuted(c.clone()),
                decision,
                anchor: None,
                repair: RepairStats::default(),
                finalize: FinalizeStats::default(),
            })
        }
        Verdict::Exists { witness, .. } => *witness,
    };
    let (o, repair_stats) = repair(g, h, witness, Orientation::arbitrary(g))?;
    let (o, finalize_stats) = finalize(g, h, witness, o)?;
    let bad = orientation::verify(g, h, &o);
    if !bad.is_empty() {
        return Err(broken(format!("constructed orientation fails at {bad:?}")));
    }
    Ok(Construction {
        decision,
        outcome: Outcome::Oriented(o),
        anchor: Some(witness),
        repair: repair_stats,
        finalize: finalize_stats,
    })
}
