//! Instance and result files, the edge-list text format, DOT export, and
//! solving inputs that may be disconnected.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constraints::{ConstraintError, ConstraintMap, DegreeSet, DensityViolation};
use crate::construct::{self, ConstructError, Outcome};
use crate::decision::{self, Certificate, CertificateRejection, DecideOptions, Decision, Verdict};
use crate::digest;
use crate::graph::{GraphError, Induced, MultiGraph, VertexId};
use crate::orientation::{self, Orientation};

pub const FORMAT_VERSION: u64 = 1;

/// A multigraph with an allowed set per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: MultiGraph,
    pub constraints: ConstraintMap,
}

impl Instance {
    pub fn new(graph: MultiGraph, constraints: ConstraintMap) -> Self {
        Self { graph, constraints }
    }

    pub fn digest(&self) -> String {
        digest::instance_digest(&self.graph, &self.constraints)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u64),
    #[error("{0}")]
    Shape(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("vertex {0} has both allow and forbid entries")]
    ConflictingConstraint(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("density violated: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    DensityViolation(Vec<DensityViolation>),
}

impl InstanceError {
    /// Machine-readable diagnostic.
    pub fn to_json(&self) -> Value {
        let kind = match self {
            InstanceError::MalformedJson(_) => "malformed_json",
            InstanceError::UnsupportedVersion(_) => "unsupported_version",
            InstanceError::Shape(_) => "malformed_instance",
            InstanceError::Syntax { .. } => "syntax",
            InstanceError::ConflictingConstraint(_) => "conflicting_constraint",
            InstanceError::Graph(GraphError::LoopEdge { .. }) => "loop_edge",
            InstanceError::Graph(_) => "invalid_graph",
            InstanceError::Constraint(ConstraintError::EmptyAllowedSet(_)) => "empty_allowed_set",
            InstanceError::Constraint(_) => "invalid_constraints",
            InstanceError::DensityViolation(_) => "density_violation",
        };
        let mut out = json!({ "error": kind, "message": self.to_string() });
        match self {
            InstanceError::DensityViolation(v) => out["violations"] = json!(v),
            InstanceError::Syntax { line, .. } => out["line"] = json!(line),
            InstanceError::ConflictingConstraint(v)
            | InstanceError::Constraint(ConstraintError::EmptyAllowedSet(v)) => out["vertex"] = json!(v),
            InstanceError::Graph(GraphError::LoopEdge { index }) => out["edge"] = json!(index),
            _ => {}
        }
        out
    }
}

/// Raw per-vertex constraint before it is resolved against degrees.
#[derive(Debug, Clone, Default)]
struct RawConstraints {
    allow_all: Option<Vec<usize>>,
    forbid_all: Option<Vec<usize>>,
    allow: Vec<(VertexId, Vec<usize>)>,
    forbid: Vec<(VertexId, Vec<usize>)>,
}

impl RawConstraints {
    fn resolve(self, g: &MultiGraph) -> Result<ConstraintMap, InstanceError> {
        let n = g.vertex_count();
        if self.allow_all.is_some() && self.forbid_all.is_some() {
            return Err(InstanceError::Shape(
                "\"all\" appears under both allow and forbid".into(),
            ));
        }
        let mut allow: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut forbid: Vec<Option<Vec<usize>>> = vec![None; n];
        for (v, values) in self.allow {
            g.check_vertex(v)?;
            if allow[v].replace(values).is_some() {
                return Err(InstanceError::Shape(format!("vertex {v} listed twice under allow")));
            }
        }
        for (v, values) in self.forbid {
            g.check_vertex(v)?;
            if allow[v].is_some() {
                return Err(InstanceError::ConflictingConstraint(v));
            }
            if forbid[v].replace(values).is_some() {
                return Err(InstanceError::Shape(format!("vertex {v} listed twice under forbid")));
            }
        }
        let mut sets = Vec::with_capacity(n);
        for v in 0..n {
            let d = g.degree(v);
            let set = match (&allow[v], &forbid[v]) {
                (Some(a), _) => DegreeSet::from_values(d, a.iter().copied()),
                (None, Some(f)) => forbidden_set(d, f, v)?,
                (None, None) => match (&self.allow_all, &self.forbid_all) {
                    (Some(a), _) => DegreeSet::from_values(d, a.iter().copied()),
                    (None, Some(f)) => forbidden_set(d, f, v)?,
                    (None, None) => DegreeSet::full(d),
                },
            };
            sets.push(set);
        }
        let h = ConstraintMap::from_sets(sets);
        let violations = h.validate_sets(g);
        if violations.is_empty() {
            Ok(h)
        } else {
            Err(InstanceError::DensityViolation(violations))
        }
    }
}

fn forbidden_set(d: usize, f: &[usize], v: VertexId) -> Result<DegreeSet, InstanceError> {
    let h = DegreeSet::from_values(d, f.iter().copied()).complement();
    if h.is_empty() {
        Err(ConstraintError::EmptyAllowedSet(v).into())
    } else {
        Ok(h)
    }
}

fn shape(msg: impl Into<String>) -> InstanceError {
    InstanceError::Shape(msg.into())
}

fn as_usize(v: &Value, what: &str) -> Result<usize, InstanceError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| shape(format!("{what} must be a non-negative integer")))
}

fn int_list(v: &Value, what: &str) -> Result<Vec<usize>, InstanceError> {
    v.as_array()
        .ok_or_else(|| shape(format!("{what} must be an array")))?
        .iter()
        .map(|x| as_usize(x, what))
        .collect()
}

/// `(all-default, per-vertex entries)` from an `allow` or `forbid` object.
type ConstraintSection = (Option<Vec<usize>>, Vec<(VertexId, Vec<usize>)>);

fn constraint_section(v: Option<&Value>, name: &str) -> Result<ConstraintSection, InstanceError> {
    let Some(v) = v else { return Ok((None, Vec::new())) };
    let obj = v
        .as_object()
        .ok_or_else(|| shape(format!("\"{name}\" must be an object")))?;
    let mut all = None;
    let mut entries = Vec::new();
    for (key, values) in obj {
        let list = int_list(values, &format!("{name}[{key}]"))?;
        if key == "all" {
            all = Some(list);
        } else {
            let vertex = key
                .parse::<usize>()
                .map_err(|_| shape(format!("\"{name}\" key {key:?} is neither a vertex id nor \"all\"")))?;
            entries.push((vertex, list));
        }
    }
    Ok((all, entries))
}

pub fn parse_instance_json(text: &str) -> Result<Instance, InstanceError> {
    let root: Value = serde_json::from_str(text).map_err(|e| InstanceError::MalformedJson(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| shape("instance must be a JSON object"))?;
    if let Some(v) = obj.get("version") {
        let v = as_usize(v, "version")? as u64;
        if v != FORMAT_VERSION {
            return Err(InstanceError::UnsupportedVersion(v));
        }
    }
    let edges_value = obj.get("edges").ok_or_else(|| shape("missing \"edges\""))?;
    let mut edges = Vec::new();
    for (i, e) in edges_value
        .as_array()
        .ok_or_else(|| shape("\"edges\" must be an array"))?
        .iter()
        .enumerate()
    {
        let pair = int_list(e, &format!("edges[{i}]"))?;
        if pair.len() != 2 {
            return Err(shape(format!("edges[{i}] must have two endpoints")));
        }
        edges.push((pair[0], pair[1]));
    }
    let n = match obj.get("vertices") {
        Some(v) => as_usize(v, "vertices")?,
        None => edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0),
    };
    let graph = MultiGraph::build(n, &edges)?;
    let (allow_all, allow) = constraint_section(obj.get("allow"), "allow")?;
    let (forbid_all, forbid) = constraint_section(obj.get("forbid"), "forbid")?;
    let raw = RawConstraints {
        allow_all,
        forbid_all,
        allow,
        forbid,
    };
    let constraints = raw.resolve(&graph)?;
    Ok(Instance { graph, constraints })
}

/// Line format: `u v` per edge, `#` comments, and the directives
/// `vertices N`, `forbid V|all values...`, `allow V|all values...`.
pub fn parse_edge_list(text: &str) -> Result<Instance, InstanceError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut raw = RawConstraints::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let syntax = |message: String| InstanceError::Syntax { line: line_no, message };
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| syntax(format!("expected an integer, found {t:?}")))
        };
        match tokens[0] {
            "vertices" => {
                if tokens.len() != 2 {
                    return Err(syntax("usage: vertices N".into()));
                }
                n = Some(num(tokens[1])?);
            }
            "allow" | "forbid" => {
                if tokens.len() < 2 {
                    return Err(syntax(format!("usage: {} V|all values...", tokens[0])));
                }
                let values = tokens[2..].iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
                let allow = tokens[0] == "allow";
                if tokens[1] == "all" {
                    let slot = if allow { &mut raw.allow_all } else { &mut raw.forbid_all };
                    if slot.replace(values).is_some() {
                        return Err(syntax(format!("{} all given twice", tokens[0])));
                    }
                } else {
                    let v = num(tokens[1])?;
                    if allow {
                        raw.allow.push((v, values));
                    } else {
                        raw.forbid.push((v, values));
                    }
                }
            }
            _ => {
                if tokens.len() != 2 {
                    return Err(syntax(format!("expected an edge \"u v\", found {content:?}")));
                }
                edges.push((num(tokens[0])?, num(tokens[1])?));
            }
        }
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
    let graph = MultiGraph::build(n, &edges)?;
    let constraints = raw.resolve(&graph)?;
    Ok(Instance { graph, constraints })
}

/// JSON if the text starts with `{`, the edge-list format otherwise.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    if text.trim_start().starts_with('{') {
        parse_instance_json(text)
    } else {
        parse_edge_list(text)
    }
}

/// Canonical JSON: constraints as `forbid` lists, vertices ascending, with
/// `allow` used only for empty allowed sets (which `forbid` cannot express).
pub fn instance_to_json(inst: &Instance) -> Value {
    let g = &inst.graph;
    let mut allow = Map::new();
    let mut forbid = Map::new();
    for v in 0..g.vertex_count() {
        let h = inst.constraints.allowed(v);
        if h.is_empty() {
            allow.insert(v.to_string(), json!([]));
            continue;
        }
        let f = h.complement().to_vec();
        if !f.is_empty() {
            forbid.insert(v.to_string(), json!(f));
        }
    }
    let mut out = json!({
        "version": FORMAT_VERSION,
        "vertices": g.vertex_count(),
        "edges": g.edges().iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    });
    if !allow.is_empty() {
        out["allow"] = Value::Object(allow);
    }
    out["forbid"] = Value::Object(forbid);
    out
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the instance has no vertices")]
    Empty,
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// One connected component, solved on its own.
#[derive(Debug, Clone)]
pub struct ComponentSolution {
    /// Global ids of the component's vertices, ascending; local id `i` is
    /// `vertices[i]`.
    pub vertices: Vec<VertexId>,
    pub sub: Induced,
    pub constraints: ConstraintMap,
    pub decision: Decision,
    /// Present when the orientation was constructed.
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub components: Vec<ComponentSolution>,
}

impl Solution {
    pub fn exists(&self) -> bool {
        self.components.iter().all(|c| c.decision.verdict.exists())
    }

    /// First component without an H-orientation.
    pub fn refuted(&self) -> Option<&ComponentSolution> {
        self.components.iter().find(|c| !c.decision.verdict.exists())
    }
}

fn split(inst: &Instance) -> Vec<(Induced, ConstraintMap)> {
    inst.graph
        .connected_components()
        .into_iter()
        .map(|vs| {
            let sub = inst.graph.induced(&vs);
            let h = inst.constraints.restrict(&sub);
            (sub, h)
        })
        .collect()
}

/// Decides every component; with `construct`, also builds orientations.
pub fn solve(inst: &Instance, options: &DecideOptions, construct: bool) -> Result<Solution, SolveError> {
    if inst.graph.vertex_count() == 0 {
        return Err(SolveError::Empty);
    }
    let mut components = Vec::new();
    for (sub, h) in split(inst) {
        let (decision, outcome) = if construct {
            let c = construct::orient_with(&sub.graph, &h, options)?;
            (c.decision, Some(c.outcome))
        } else {
            let d = decision::decide_with(&sub.graph, &h, options).map_err(ConstructError::from)?;
            (d, None)
        };
        components.push(ComponentSolution {
            vertices: sub.vertices.clone(),
            sub,
            constraints: h,
            decision,
            outcome,
        });
    }
    Ok(Solution { components })
}

fn verdict_word(exists: bool) -> &'static str {
    if exists {
        "exists"
    } else {
        "not_exists"
    }
}

fn global_certificate(c: &ComponentSolution, cert: &Certificate) -> Value {
    json!(cert.map_vertices(|v| c.vertices[v]))
}

/// Output of `decide`: the overall verdict and one entry per component.
pub fn decision_json(inst: &Instance, sol: &Solution) -> Value {
    let comps: Vec<Value> = sol
        .components
        .iter()
        .map(|c| {
            let mut entry = json!({
                "vertices": c.vertices,
                "verdict": verdict_word(c.decision.verdict.exists()),
            });
            match &c.decision.verdict {
                Verdict::Exists { witness, reason } => {
                    entry["witness"] = json!(c.vertices[*witness]);
                    let mut r = json!(reason);
                    if let Some(obj) = r.as_object_mut() {
                        // Trace details stay in local ids; the reason name is enough here.
                        obj.retain(|k, _| k == "reason");
                    }
                    entry["reason"] = r["reason"].clone();
                }
                Verdict::NotExists(cert) => entry["certificate"] = global_certificate(c, cert),
            }
            entry["trace_length"] = json!(c.decision.trace.len());
            entry
        })
        .collect();
    json!({
        "version": FORMAT_VERSION,
        "verdict": verdict_word(sol.exists()),
        "instance_digest": inst.digest(),
        "components": comps,
    })
}

/// Orientation of the whole instance assembled from component orientations.
pub fn merged_orientation(inst: &Instance, sol: &Solution) -> Option<Orientation> {
    let mut tails = vec![usize::MAX; inst.graph.edge_count()];
    for c in &sol.components {
        let Some(Outcome::Oriented(o)) = &c.outcome else {
            return None;
        };
        for (local_e, &global_e) in c.sub.edges.iter().enumerate() {
            tails[global_e] = c.vertices[o.tail(&c.sub.graph, local_e)];
        }
    }
    Orientation::from_tails(&inst.graph, &tails).ok()
}

/// Output of `orient`: the orientation, or the first failing component's
/// certificate.
pub fn result_json(inst: &Instance, sol: &Solution) -> Value {
    let mut out = json!({
        "version": FORMAT_VERSION,
        "verdict": verdict_word(sol.exists()),
        "instance_digest": inst.digest(),
    });
    if let Some(c) = sol.refuted() {
        if sol.components.len() > 1 {
            out["component"] = json!(c.vertices);
        }
        let cert = c
            .decision
            .verdict
            .certificate()
            .expect("refuted component has a certificate");
        out["certificate"] = global_certificate(c, cert);
    } else if let Some(o) = merged_orientation(inst, sol) {
        out["orientation"] = orientation_json(&inst.graph, &o);
    }
    out
}

pub fn orientation_json(g: &MultiGraph, o: &Orientation) -> Value {
    Value::Array(
        (0..g.edge_count())
            .map(|e| json!({ "edge": e, "tail": o.tail(g, e), "head": o.head(g, e) }))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResultError {
    #[error("malformed result: {0}")]
    Malformed(String),
    #[error("result was produced for a different instance")]
    DigestMismatch,
    #[error("orientation leaves vertices {0:?} infeasible")]
    Infeasible(Vec<VertexId>),
    #[error("component list is not a connected component of the instance")]
    BadComponent,
    #[error("certificate rejected: {0}")]
    Certificate(#[from] CertificateRejection),
}

fn malformed(msg: impl Into<String>) -> ResultError {
    ResultError::Malformed(msg.into())
}

/// Re-checks a result file against its instance.
pub fn verify_result(inst: &Instance, result: &Value) -> Result<(), ResultError> {
    let g = &inst.graph;
    if let Some(d) = result.get("instance_digest") {
        if d.as_str() != Some(inst.digest().as_str()) {
            return Err(ResultError::DigestMismatch);
        }
    }
    match result.get("verdict").and_then(Value::as_str) {
        Some("exists") => {
            let records = result
                .get("orientation")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed("missing orientation"))?;
            if records.len() != g.edge_count() {
                return Err(malformed(format!(
                    "{} orientation records for {} edges",
                    records.len(),
                    g.edge_count()
                )));
            }
            let mut tails = Vec::with_capacity(records.len());
            for (e, r) in records.iter().enumerate() {
                let field = |k: &str| r.get(k).and_then(Value::as_u64).map(|x| x as usize);
                let (Some(edge), Some(tail), Some(head)) = (field("edge"), field("tail"), field("head")) else {
                    return Err(malformed(format!("orientation record {e} is incomplete")));
                };
                let (a, b) = g.endpoints(e);
                if edge != e || !((tail, head) == (a, b) || (tail, head) == (b, a)) {
                    return Err(malformed(format!("orientation record {e} does not match edge {e}")));
                }
                tails.push(tail);
            }
            let o = Orientation::from_tails(g, &tails).map_err(|e| malformed(e.to_string()))?;
            let bad = orientation::verify(g, &inst.constraints, &o);
            if bad.is_empty() {
                Ok(())
            } else {
                Err(ResultError::Infeasible(bad))
            }
        }
        Some("not_exists") => {
            let cert: Certificate = serde_json::from_value(
                result
                    .get("certificate")
                    .cloned()
                    .ok_or_else(|| malformed("missing certificate"))?,
            )
            .map_err(|e| malformed(format!("certificate: {e}")))?;
            let components = g.connected_components();
            let vertices: Vec<VertexId> = match result.get("component") {
                Some(c) => serde_json::from_value(c.clone()).map_err(|e| malformed(format!("component: {e}")))?,
                None if components.len() == 1 => components[0].clone(),
                None => return Err(ResultError::BadComponent),
            };
            if !components.contains(&vertices) {
                return Err(ResultError::BadComponent);
            }
            let sub = g.induced(&vertices);
            let h = inst.constraints.restrict(&sub);
            let out_of_range = std::cell::Cell::new(false);
            let local = cert.map_vertices(|v| {
                sub.local_vertex(v).unwrap_or_else(|| {
                    out_of_range.set(true);
                    usize::MAX
                })
            });
            if out_of_range.get() {
                return Err(CertificateRejection::VertexOutOfRange(usize::MAX).into());
            }
            decision::verify_certificate(&sub.graph, &h, &local)?;
            Ok(())
        }
        _ => Err(malformed("verdict must be \"exists\" or \"not_exists\"")),
    }
}

/// Directed graph in DOT, one `tail -> head` line per edge.
pub fn to_dot(g: &MultiGraph, o: &Orientation) -> String {
    let mut s = String::from("digraph orientation {\n");
    for v in 0..g.vertex_count() {
        s.push_str(&format!("  {v};\n"));
    }
    for e in 0..g.edge_count() {
        s.push_str(&format!("  {} -> {} [label=\"e{e}\"];\n", o.tail(g, e), o.head(g, e)));
    }
    s.push_str("}\n");
    s
}

/// Orientation stored in a result file.
pub fn orientation_from_result(inst: &Instance, result: &Value) -> Result<Orientation, ResultError> {
    let records = result
        .get("orientation")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("result has no orientation"))?;
    let tails = records
        .iter()
        .map(|r| r.get("tail").and_then(Value::as_u64).map(|t| t as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| malformed("orientation record without tail"))?;
    Orientation::from_tails(&inst.graph, &tails).map_err(|e| malformed(e.to_string()))
}
