//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line even when all of them pass.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;

use orient_avoid::constraints::{ConstraintMap, DegreeSet, Parity, ParityClass};
use orient_avoid::construct::{self, Construction, Outcome};
use orient_avoid::decision::{self, CertificateKind, DecideOptions, Mutation, Partition};
use orient_avoid::gen::{self, Family, FuzzConfig, GenSpec, Policy};
use orient_avoid::graph::BlockDecomposition;
use orient_avoid::oracle::{self, Enumeration, SpectrumClass};
use orient_avoid::orientation::{self, Orientation};
use orient_avoid::Instance;

const RANDOM_SMALL: usize = 10_000;
const STRICT_COUNT: usize = 10_000;
const RELAXED_COUNT: usize = 2_000;
const MATCHING_COUNT: usize = 10_000;
const BICONNECTED_COUNT: usize = 1_000;
const MUTANT_BUDGET: usize = 1_000;
const SEED: u64 = 20_240_601;

type Outcome_ = Result<String, String>;

/// Everything computed once per small instance and shared by several criteria.
struct Record {
    label: String,
    family: &'static str,
    inst: Instance,
    truth: Enumeration,
    built: Result<Construction, String>,
}

fn family_name(f: &Family) -> &'static str {
    match f {
        Family::AllSmallGraphs { .. } => "all_small_graphs",
        Family::RandomTree { .. } => "random_tree",
        Family::RandomConnected { .. } => "random_connected",
        Family::RandomBiconnected { .. } => "random_biconnected",
        Family::Cactus { .. } => "cactus",
    }
}

fn record(label: String, family: &'static str, inst: Instance) -> Record {
    let truth = oracle::enumerate(&inst.graph, &inst.constraints, oracle::DEFAULT_CAP).expect("small instance");
    let built = construct::orient_detailed(&inst.graph, &inst.constraints).map_err(|e| e.to_string());
    Record {
        label,
        family,
        inst,
        truth,
        built,
    }
}

/// Every connected simple graph on at most five vertices with every
/// assignment of a full parity class to its vertices.
fn catalogue_corpus() -> Vec<Record> {
    let graphs = gen::catalogue(5);
    let mut jobs = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let n = g.vertex_count();
        for mask in 0u32..(1 << n) {
            jobs.push((gi, g.clone(), mask));
        }
    }
    jobs.into_par_iter()
        .map(|(gi, g, mask)| {
            let sets = (0..g.vertex_count())
                .map(|v| {
                    let p = if mask >> v & 1 == 1 { Parity::Odd } else { Parity::Even };
                    DegreeSet::parity_class(g.degree(v), p)
                })
                .collect();
            let inst = Instance::new(g, ConstraintMap::from_sets(sets));
            record(format!("catalogue graph {gi} mask {mask:b}"), "all_small_graphs", inst)
        })
        .collect()
}

fn random_corpus() -> Vec<Record> {
    let mut config = FuzzConfig::new(SEED, RANDOM_SMALL);
    config.policy = Some(Policy::RandomDense);
    (0..RANDOM_SMALL)
        .into_par_iter()
        .map(|i| {
            let spec = gen::fuzz_spec(&config, i);
            let inst = gen::generate(&spec).expect("small families are feasible");
            record(format!("random #{i} {spec:?}"), family_name(&spec.family), inst)
        })
        .collect()
}

fn first<T: std::fmt::Display>(errors: &[T]) -> String {
    let shown: Vec<String> = errors.iter().take(3).map(ToString::to_string).collect();
    format!("{} failures, e.g. {}", errors.len(), shown.join(" | "))
}

fn verdict_of(r: &Record) -> Option<bool> {
    r.built.as_ref().ok().map(|c| c.decision.verdict.exists())
}

fn criterion_1(catalogue: &[Record], random: &[Record], elapsed: Duration) -> Outcome_ {
    let mut errors = Vec::new();
    for r in catalogue.iter().chain(random) {
        match verdict_of(r) {
            Some(v) if v == r.truth.exists() => {}
            Some(v) => errors.push(format!("{}: decide={v} oracle={}", r.label, r.truth.exists())),
            None => errors.push(format!("{}: {}", r.label, r.built.as_ref().err().unwrap())),
        }
    }
    let mut families: BTreeMap<&str, usize> = BTreeMap::new();
    for r in random {
        *families.entry(r.family).or_default() += 1;
        if r.inst.graph.edge_count() > 10 {
            errors.push(format!("{}: {} edges", r.label, r.inst.graph.edge_count()));
        }
    }
    if families.len() < 5 {
        errors.push(format!("only families {families:?} generated"));
    }
    if elapsed > Duration::from_secs(300) {
        errors.push(format!("took {elapsed:?}"));
    }
    if errors.is_empty() {
        Ok(format!(
            "{} catalogue + {} random instances agree with the oracle ({families:?}) in {elapsed:.1?}",
            catalogue.len(),
            random.len()
        ))
    } else {
        Err(first(&errors))
    }
}

fn criterion_2(corpus: &[&Record]) -> Outcome_ {
    let mut errors = Vec::new();
    let mut checked = 0;
    for r in corpus.iter().filter(|r| r.truth.exists()) {
        checked += 1;
        match &r.built {
            Ok(Construction {
                outcome: Outcome::Oriented(o),
                ..
            }) => {
                let bad = orientation::verify(&r.inst.graph, &r.inst.constraints, o);
                if !bad.is_empty() {
                    errors.push(format!("{}: infeasible at {bad:?}", r.label));
                }
            }
            Ok(_) => errors.push(format!("{}: refuted", r.label)),
            Err(e) => errors.push(format!("{}: {e}", r.label)),
        }
    }
    if errors.is_empty() {
        Ok(format!("{checked} EXISTS instances oriented and verified"))
    } else {
        Err(first(&errors))
    }
}

fn criterion_3(corpus: &[&Record]) -> Outcome_ {
    let mut errors = Vec::new();
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    for r in corpus.iter().filter(|r| !r.truth.exists()) {
        let (g, h) = (&r.inst.graph, &r.inst.constraints);
        let cert = match &r.built {
            Ok(Construction {
                outcome: Outcome::Refuted(c),
                ..
            }) => c,
            Ok(_) => {
                errors.push(format!("{}: oriented an impossible instance", r.label));
                continue;
            }
            Err(e) => {
                errors.push(format!("{}: {e}", r.label));
                continue;
            }
        };
        if let Err(e) = decision::verify_certificate(g, h, cert) {
            errors.push(format!("{}: rejected: {e}", r.label));
        }
        match &cert.kind {
            CertificateKind::TraceMismatch { trace } => {
                *kinds.entry("trace_mismatch").or_default() += 1;
                // Recompute V1 from H and the committed steps alone.
                let mut odd: Vec<usize> = (0..g.vertex_count())
                    .filter(|&v| h.allowed(v).class() == Some(ParityClass::Odd))
                    .collect();
                odd.extend(
                    trace
                        .steps
                        .iter()
                        .filter(|s| s.parity == Some(Parity::Odd))
                        .map(|s| s.vertex),
                );
                odd.sort_unstable();
                if odd != trace.odd {
                    errors.push(format!(
                        "{}: recorded V1 {:?} != recomputed {odd:?}",
                        r.label, trace.odd
                    ));
                }
                if odd.len() % 2 == g.edge_count() % 2 {
                    errors.push(format!("{}: |V1| = e(G) mod 2", r.label));
                }
            }
            CertificateKind::EmptyWindow { .. } => *kinds.entry("empty_window").or_default() += 1,
            CertificateKind::PerVertexVoid { .. } => *kinds.entry("per_vertex_void").or_default() += 1,
        }
    }
    if errors.is_empty() {
        Ok(format!("certificates verified: {kinds:?}"))
    } else {
        Err(first(&errors))
    }
}

/// A connected family with between 1 and `max_n` vertices.
fn medium_family(rng: &mut impl Rng, max_n: usize) -> Family {
    let n = rng.random_range(1..=max_n);
    match rng.random_range(0..4) {
        0 => Family::RandomTree { n },
        1 if n >= 2 => Family::RandomConnected {
            n,
            m: rng.random_range(n - 1..=2 * n),
        },
        2 if n >= 3 => Family::RandomBiconnected {
            n,
            m: rng.random_range(n..=2 * n),
        },
        _ => {
            let max_len = rng.random_range(2..=6);
            Family::Cactus {
                blocks: rng.random_range(0..=(max_n - 1) / max_len),
                min_len: 2,
                max_len,
            }
        }
    }
}

fn medium_corpus(seed: u64, count: usize, policy: Policy) -> Vec<(GenSpec, Instance, Result<Construction, String>)> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let s = gen::mix_seed(seed, i as u64);
            let family = medium_family(&mut gen::rng_for(s ^ 0xFA), 200);
            let spec = GenSpec {
                seed: s,
                family,
                policy,
            };
            let inst = gen::generate(&spec).expect("medium families are feasible");
            let built = construct::orient_detailed(&inst.graph, &inst.constraints).map_err(|e| e.to_string());
            (spec, inst, built)
        })
        .collect()
}

fn must_exist(corpus: &[(GenSpec, Instance, Result<Construction, String>)]) -> Vec<String> {
    let mut errors = Vec::new();
    for (spec, inst, built) in corpus {
        match built {
            Ok(Construction {
                outcome: Outcome::Oriented(o),
                ..
            }) => {
                let bad = orientation::verify(&inst.graph, &inst.constraints, o);
                if !bad.is_empty() {
                    errors.push(format!("{spec:?}: infeasible at {bad:?}"));
                }
            }
            Ok(_) => errors.push(format!("{spec:?}: NOT_EXISTS")),
            Err(e) => errors.push(format!("{spec:?}: {e}")),
        }
    }
    errors
}

fn criterion_4(
    strict: &[(GenSpec, Instance, Result<Construction, String>)],
    relaxed: &[(GenSpec, Instance, Result<Construction, String>)],
    elapsed: Duration,
) -> Outcome_ {
    let mut errors = must_exist(strict);
    errors.extend(must_exist(relaxed));
    let max_n = strict.iter().map(|(_, i, _)| i.graph.vertex_count()).max().unwrap_or(0);
    for (spec, inst, _) in strict {
        for v in 0..inst.graph.vertex_count() {
            let d = inst.graph.degree(v);
            if inst.constraints.forbidden(v).len() > d.saturating_sub(1) / 2 {
                errors.push(format!("{spec:?}: vertex {v} over budget"));
            }
        }
    }
    if elapsed > Duration::from_secs(120) {
        errors.push(format!("took {elapsed:?}"));
    }
    if errors.is_empty() {
        Ok(format!(
            "{} budget instances (n <= {max_n}) and {} relaxed-budget instances all EXISTS and verified in {elapsed:.1?}",
            strict.len(),
            relaxed.len()
        ))
    } else {
        Err(first(&errors))
    }
}

fn criterion_5(corpus: &[(GenSpec, Instance, Result<Construction, String>)]) -> Outcome_ {
    let mut errors = must_exist(corpus);
    for (spec, inst, _) in corpus {
        let g = &inst.graph;
        let odd = (0..g.vertex_count())
            .filter(|&v| inst.constraints.allowed(v).class() == Some(ParityClass::Odd))
            .count();
        if odd % 2 != g.edge_count() % 2 {
            errors.push(format!("{spec:?}: generator broke the parity condition"));
        }
    }
    if errors.is_empty() {
        Ok(format!(
            "{} matching full-parity instances EXISTS and verified",
            corpus.len()
        ))
    } else {
        Err(first(&errors))
    }
}

fn criterion_6() -> Outcome_ {
    let results: Vec<Result<bool, String>> = (0..BICONNECTED_COUNT)
        .into_par_iter()
        .map(|i| {
            let s = gen::mix_seed(SEED ^ 0xB1, i as u64);
            let mut rng = gen::rng_for(s);
            let m = rng.random_range(1..=10);
            let n = if m < 3 { 2 } else { rng.random_range(2..=m) };
            let policy = match i % 3 {
                0 => Policy::RandomDense,
                1 => Policy::FullParity { matching: false },
                _ => Policy::FullParity { matching: true },
            };
            let spec = GenSpec {
                seed: s,
                family: Family::RandomBiconnected { n, m },
                policy,
            };
            let inst = gen::generate(&spec).map_err(|e| e.to_string())?;
            let (g, h) = (&inst.graph, &inst.constraints);
            let closed = decision::decide_2connected(g, h).map_err(|e| format!("{spec:?}: {e}"))?;
            let full = decision::decide(g, h).map_err(|e| format!("{spec:?}: {e}"))?;
            let truth = oracle::enumerate_existence(g, h).map_err(|e| e.to_string())?.0;
            if closed.exists() == truth && full.verdict.exists() == truth {
                Ok(truth)
            } else {
                Err(format!(
                    "{spec:?}: closed form {} decide {} oracle {truth}",
                    closed.exists(),
                    full.verdict.exists()
                ))
            }
        })
        .collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let exists = results.iter().filter(|r| matches!(r, Ok(true))).count();
    if errors.is_empty() {
        Ok(format!(
            "{BICONNECTED_COUNT} 2-connected instances agree ({exists} EXISTS, {} NOT_EXISTS)",
            BICONNECTED_COUNT - exists
        ))
    } else {
        Err(first(&errors))
    }
}

/// Parity that any H-orientation must give each committed trace vertex, and
/// the window its out-degree must fall in.
fn necessity_violation(r: &Record) -> Option<String> {
    let tails = r.truth.first_feasible.as_ref()?;
    let Ok(c) = &r.built else { return None };
    let g = &r.inst.graph;
    let o = Orientation::from_tails(g, tails).ok()?;
    for v in Partition::initial(&r.inst.constraints).odd() {
        if o.out_degree(v) % 2 != 1 {
            return Some(format!("initially odd {v} has even out-degree"));
        }
    }
    for s in &c.decision.trace {
        let d = o.out_degree(s.vertex);
        if d < s.lower || d > s.upper || !s.window.contains(&d) {
            return Some(format!(
                "step at {} has window {:?} but out-degree {d}",
                s.vertex, s.window
            ));
        }
        if let Some(p) = s.parity {
            if Parity::of(d) != p {
                return Some(format!("step at {} committed {p} but out-degree {d}", s.vertex));
            }
        }
    }
    None
}

fn criterion_7(corpus: &[&Record]) -> Outcome_ {
    let audits: Vec<(Vec<String>, usize, usize)> = corpus
        .par_iter()
        .map(|r| {
            let (g, h) = (&r.inst.graph, &r.inst.constraints);
            let mut errors = Vec::new();
            let exists = r.truth.exists();
            let blocks = BlockDecomposition::new(g);
            let mut minkowski = 0;
            let mut spectra = 0;
            for u in 0..g.vertex_count() {
                let spec = &r.truth.spectra[u];
                spectra += 1;
                if spec.is_empty() {
                    errors.push(format!("{}: empty spectrum at {u}", r.label));
                }
                let class = oracle::classify(spec, g.degree(u));
                if !blocks.is_cut(u) && class == SpectrumClass::Other {
                    errors.push(format!("{}: non-cut {u} spectrum {spec:?} is Other", r.label));
                }
                let hits = spec.iter().any(|&i| h.allows(u, i));
                if hits != exists {
                    errors.push(format!(
                        "{}: spectrum/H intersection at {u} is {hits}, oracle {exists}",
                        r.label
                    ));
                }
                if class == SpectrumClass::ContainsConsecutive && !exists {
                    errors.push(format!("{}: consecutive spectrum at {u} without orientation", r.label));
                }
                if !exists && !blocks.is_cut(u) && h.allowed(u).class() == Some(ParityClass::Mixed) {
                    errors.push(format!(
                        "{}: non-cut {u} has mixed parity on a NOT_EXISTS instance",
                        r.label
                    ));
                }
                if blocks.is_cut(u) {
                    minkowski += 1;
                    match oracle::minkowski_check(g, h, u, oracle::DEFAULT_CAP) {
                        Ok(m) if m.holds() => {}
                        Ok(m) => errors.push(format!("{}: Minkowski fails at {u}: {m:?}", r.label)),
                        Err(e) => errors.push(format!("{}: {e}", r.label)),
                    }
                }
            }
            if let Some(v) = necessity_violation(r) {
                errors.push(format!("{}: {v}", r.label));
            }
            (errors, minkowski, spectra)
        })
        .collect();
    let errors: Vec<String> = audits.iter().flat_map(|a| a.0.clone()).collect();
    let minkowski: usize = audits.iter().map(|a| a.1).sum();
    let spectra: usize = audits.iter().map(|a| a.2).sum();
    if errors.is_empty() {
        Ok(format!(
            "{spectra} spectra classified, {minkowski} cut-vertex sum checks, trace necessity on {} instances",
            corpus.len()
        ))
    } else {
        Err(first(&errors))
    }
}

fn criterion_8<'a>(constructions: impl Iterator<Item = (&'a Instance, &'a Construction)>) -> Outcome_ {
    let mut errors = Vec::new();
    let (mut runs, mut iterations, mut longest) = (0usize, 0usize, 0usize);
    for (inst, c) in constructions {
        if !matches!(c.outcome, Outcome::Oriented(_)) {
            continue;
        }
        runs += 1;
        let stats = &c.repair;
        iterations += stats.iterations;
        longest = longest.max(stats.iterations);
        if stats.potential.len() != stats.iterations + 1 {
            errors.push(format!(
                "{} potentials for {} iterations",
                stats.potential.len(),
                stats.iterations
            ));
        }
        if !stats.potential.windows(2).all(|w| w[1] < w[0]) {
            errors.push(format!("potential not strictly decreasing: {:?}", stats.potential));
        }
        if stats.iterations > inst.graph.vertex_count() {
            errors.push(format!(
                "{} iterations on {} vertices",
                stats.iterations,
                inst.graph.vertex_count()
            ));
        }
    }
    if errors.is_empty() {
        Ok(format!(
            "{runs} repair runs, {iterations} iterations, longest {longest}"
        ))
    } else {
        Err(first(&errors))
    }
}

fn bench_once() -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_orient-avoid"))
        .args([
            "bench",
            "--family",
            "cactus",
            "--n",
            "10001",
            "--policy",
            "random-dense",
            "--seed",
            "7",
        ])
        .env_remove("ORIENT_AVOID_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    let wall = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "bench exited {:?}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let v = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((v, wall))
}

fn criterion_9() -> Outcome_ {
    let (a, wall_a) = bench_once()?;
    let (b, wall_b) = bench_once()?;
    let mut errors = Vec::new();
    let secs =
        |v: &Value| v["decide_seconds"].as_f64().unwrap_or(f64::MAX) + v["orient_seconds"].as_f64().unwrap_or(f64::MAX);
    let rss = a["peak_rss_kib"]
        .as_u64()
        .unwrap_or(u64::MAX)
        .max(b["peak_rss_kib"].as_u64().unwrap_or(u64::MAX));
    if a["vertices"] != 10_001 || a["edges"] != 15_000 {
        errors.push(format!("unexpected size {} / {}", a["vertices"], a["edges"]));
    }
    if a["verified"] != true {
        errors.push("result did not verify".into());
    }
    let wall = wall_a.max(wall_b);
    if wall > Duration::from_secs(5) || secs(&a).max(secs(&b)) > 5.0 {
        errors.push(format!("too slow: wall {wall:?}"));
    }
    if rss > 200 * 1024 {
        errors.push(format!("peak RSS {rss} KiB"));
    }
    if a["result_sha256"] != b["result_sha256"] {
        errors.push("results differ between runs".into());
    }
    if errors.is_empty() {
        Ok(format!(
            "cactus {}v/{}e: {} in {:.3}s solve, {wall:.2?} wall, peak {} KiB, deterministic",
            a["vertices"],
            a["edges"],
            a["verdict"],
            secs(&a),
            rss
        ))
    } else {
        Err(errors.join("; "))
    }
}

fn criterion_10() -> Outcome_ {
    let mut config = FuzzConfig::new(SEED ^ 0x10, MUTANT_BUDGET);
    config.keep_failures = 1;
    let clean = gen::fuzz(&config);
    if clean.failure_count != 0 {
        return Err(format!("baseline run already fails: {}", clean.to_json()));
    }
    config.options.mutation = Some(Mutation::InvertTraceParity);
    let report = gen::fuzz(&config);
    let Some(f) = report.failures.first() else {
        return Err(format!("mutant survived {MUTANT_BUDGET} instances"));
    };
    let still_fails = gen::check_instance(&f.shrunk, &config.options, config.cap).is_some();
    let passes_unmutated = gen::check_instance(&f.shrunk, &DecideOptions::default(), config.cap).is_none();
    if !still_fails || !passes_unmutated || f.shrunk.graph.edge_count() > f.original.graph.edge_count() {
        return Err(format!(
            "shrink did not produce a valid counterexample: {}",
            f.case_json()
        ));
    }
    Ok(format!(
        "mutant caught at instance {} ({} of {MUTANT_BUDGET} failing); shrunk {}v/{}e -> {}v/{}e in {} steps",
        f.index,
        report.failure_count,
        f.original.graph.vertex_count(),
        f.original.graph.edge_count(),
        f.shrunk.graph.vertex_count(),
        f.shrunk.graph.edge_count(),
        f.shrink_steps
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let catalogue = catalogue_corpus();
    let random = random_corpus();
    let small_elapsed = start.elapsed();
    let small: Vec<&Record> = catalogue.iter().chain(&random).collect();

    let start = Instant::now();
    let strict = medium_corpus(SEED ^ 0x13, STRICT_COUNT, Policy::StrictBudget);
    let relaxed = medium_corpus(SEED ^ 0x4E, RELAXED_COUNT, Policy::RelaxedBudget);
    let strict_elapsed = start.elapsed();
    let matching = medium_corpus(SEED ^ 0x14, MATCHING_COUNT, Policy::FullParity { matching: true });

    let constructions = small
        .iter()
        .filter_map(|r| r.built.as_ref().ok().map(|c| (&r.inst, c)))
        .chain(
            strict
                .iter()
                .chain(&relaxed)
                .chain(&matching)
                .filter_map(|(_, i, c)| c.as_ref().ok().map(|c| (i, c))),
        );

    let results: Vec<(&str, Outcome_)> = vec![
        ("1 oracle equivalence", criterion_1(&catalogue, &random, small_elapsed)),
        ("2 construction soundness", criterion_2(&small)),
        ("3 certificate soundness", criterion_3(&small)),
        (
            "4 forbidden-budget suite",
            criterion_4(&strict, &relaxed, strict_elapsed),
        ),
        ("5 matching full-parity suite", criterion_5(&matching)),
        ("6 2-connected closed form", criterion_6()),
        ("7 structural audits", criterion_7(&small)),
        ("8 repair potential", criterion_8(constructions)),
        ("9 cactus performance", criterion_9()),
        ("10 mutation sanity", criterion_10()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
