use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orient_avoid::decision::{DecideOptions, Mutation};
use orient_avoid::digest;
use orient_avoid::gen::{self, Family, FuzzConfig, GenSpec, Policy};
use orient_avoid::io::{self, Instance};
use orient_avoid::oracle;

const EXIT_EXISTS: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NOT_EXISTS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "orient-avoid",
    version,
    about = "Orient multigraphs so out-degrees avoid forbidden values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence; prints the verdict with a certificate if none exists.
    Decide {
        instance: PathBuf,
        /// Use the quadratic reference trace instead of the block-cut-tree engine.
        #[arg(long)]
        reference: bool,
    },
    /// Build an orientation or a certificate that none exists.
    Orient {
        instance: PathBuf,
        /// Write the result here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a result file against its instance.
    Verify { instance: PathBuf, result: PathBuf },
    /// Out-degrees a vertex takes while every other vertex is feasible.
    Spectrum {
        instance: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        cap: usize,
    },
    /// Count H-orientations exhaustively.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        cap: usize,
    },
    /// Differential run of decide and orient against the oracle.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Maximum edge count of generated instances.
        #[arg(long, default_value_t = 10)]
        cap: usize,
        #[arg(long)]
        policy: Option<PolicyArg>,
        /// Directory for shrunk case files.
        #[arg(long)]
        cases: Option<PathBuf>,
        #[arg(long, hide = true)]
        mutant: bool,
    },
    /// Time decide and orient on one generated instance.
    Bench {
        #[arg(long, value_enum, default_value_t = FamilyArg::Cactus)]
        family: FamilyArg,
        /// Approximate vertex count.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = PolicyArg::RandomDense)]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Orientation from a result file as a DOT digraph.
    ExportDot { instance: PathBuf, result: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    FullParity,
    FullParityMatching,
    RandomDense,
    StrictBudget,
    RelaxedBudget,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::FullParity => Policy::FullParity { matching: false },
            PolicyArg::FullParityMatching => Policy::FullParity { matching: true },
            PolicyArg::RandomDense => Policy::RandomDense,
            PolicyArg::StrictBudget => Policy::StrictBudget,
            PolicyArg::RelaxedBudget => Policy::RelaxedBudget,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Cactus,
    Tree,
    Connected,
    Biconnected,
}

impl FamilyArg {
    fn family(self, n: usize) -> Family {
        let n = n.max(3);
        match self {
            FamilyArg::Cactus => Family::Cactus {
                blocks: (n - 1) / 2,
                min_len: 3,
                max_len: 3,
            },
            FamilyArg::Tree => Family::RandomTree { n },
            FamilyArg::Connected => Family::RandomConnected { n, m: n * 3 / 2 },
            FamilyArg::Biconnected => Family::RandomBiconnected { n, m: n * 3 / 2 },
        }
    }
}

/// Failure that ends a command with a diagnostic on stderr.
struct Fail {
    code: u8,
    diagnostic: Value,
}

fn invalid(kind: &str, message: impl ToString) -> Fail {
    Fail {
        code: EXIT_INVALID,
        diagnostic: json!({ "error": kind, "message": message.to_string() }),
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| invalid("io", e))
    } else {
        std::fs::read_to_string(path).map_err(|e| invalid("io", format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<Instance, Fail> {
    io::parse_instance(&read(path)?).map_err(|e| Fail {
        code: EXIT_INVALID,
        diagnostic: e.to_json(),
    })
}

fn load_result(path: &Path) -> Result<Value, Fail> {
    serde_json::from_str(&read(path)?).map_err(|e| invalid("malformed_json", e))
}

fn verdict_code(exists: bool) -> u8 {
    if exists {
        EXIT_EXISTS
    } else {
        EXIT_NOT_EXISTS
    }
}

fn print(v: &Value) {
    print!("{}", io::to_pretty(v));
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn seed_override(seed: u64) -> Result<u64, Fail> {
    match std::env::var("ORIENT_AVOID_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            invalid(
                "invalid_seed",
                format!("ORIENT_AVOID_SEED={s:?} is not an unsigned integer"),
            )
        }),
        Err(_) => Ok(seed),
    }
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.command {
        Command::Decide { instance, reference } => {
            let inst = load(&instance)?;
            let options = DecideOptions {
                reference,
                ..DecideOptions::default()
            };
            let sol = io::solve(&inst, &options, false).map_err(|e| invalid("invalid_input", e))?;
            print(&io::decision_json(&inst, &sol));
            Ok(verdict_code(sol.exists()))
        }
        Command::Orient { instance, output } => {
            let inst = load(&instance)?;
            let sol = io::solve(&inst, &DecideOptions::default(), true).map_err(|e| invalid("invalid_input", e))?;
            let text = io::to_pretty(&io::result_json(&inst, &sol));
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| invalid("io", e))?,
                None => print!("{text}"),
            }
            Ok(verdict_code(sol.exists()))
        }
        Command::Verify { instance, result } => {
            let inst = load(&instance)?;
            let result = load_result(&result)?;
            match io::verify_result(&inst, &result) {
                Ok(()) => {
                    print(&json!({ "valid": true }));
                    Ok(0)
                }
                Err(e) => {
                    print(&json!({ "valid": false, "reason": e.to_string() }));
                    Ok(EXIT_FAILED)
                }
            }
        }
        Command::Spectrum { instance, vertex, cap } => {
            let inst = load(&instance)?;
            let report = oracle::spectrum_with_cap(&inst.graph, &inst.constraints, vertex, cap)
                .map_err(|e| invalid("oracle", e))?;
            print(&json!(report));
            Ok(0)
        }
        Command::Oracle { instance, cap } => {
            let inst = load(&instance)?;
            let e = oracle::enumerate(&inst.graph, &inst.constraints, cap).map_err(|e| invalid("oracle", e))?;
            print(&json!({
                "exists": e.exists(),
                "count": e.count,
                "spectra": e.spectra,
            }));
            Ok(verdict_code(e.exists()))
        }
        Command::Fuzz {
            seed,
            count,
            cap,
            policy,
            cases,
            mutant,
        } => {
            let mut config = FuzzConfig::new(seed_override(seed)?, count);
            config.cap = cap;
            config.policy = policy.map(Policy::from);
            if mutant {
                config.options.mutation = Some(Mutation::InvertTraceParity);
            }
            let report = gen::fuzz(&config);
            if let Some(dir) = cases {
                std::fs::create_dir_all(&dir).map_err(|e| invalid("io", e))?;
                for f in &report.failures {
                    let path = dir.join(format!("case-{}-{}.json", config.seed, f.index));
                    std::fs::write(&path, io::to_pretty(&f.case_json())).map_err(|e| invalid("io", e))?;
                }
            }
            let mut out = report.to_json();
            out["seed"] = json!(config.seed);
            print(&out);
            Ok(if report.failure_count == 0 { 0 } else { EXIT_FAILED })
        }
        Command::Bench {
            family,
            n,
            policy,
            seed,
        } => {
            let spec = GenSpec {
                seed: seed_override(seed)?,
                family: family.family(n),
                policy: policy.into(),
            };
            let inst = gen::generate(&spec).map_err(|e| invalid("generator", e))?;
            let start = Instant::now();
            let decided =
                io::solve(&inst, &DecideOptions::default(), false).map_err(|e| invalid("invalid_input", e))?;
            let decide_time = start.elapsed();
            let start = Instant::now();
            let sol = io::solve(&inst, &DecideOptions::default(), true).map_err(|e| invalid("invalid_input", e))?;
            let orient_time = start.elapsed();
            let result = io::to_pretty(&io::result_json(&inst, &sol));
            let verified = io::verify_result(&inst, &serde_json::from_str(&result).expect("own output parses")).is_ok();
            print(&json!({
                "spec": spec,
                "vertices": inst.graph.vertex_count(),
                "edges": inst.graph.edge_count(),
                "verdict": if decided.exists() { "exists" } else { "not_exists" },
                "verified": verified,
                "decide_seconds": decide_time.as_secs_f64(),
                "orient_seconds": orient_time.as_secs_f64(),
                "peak_rss_kib": peak_rss_kib(),
                "result_sha256": digest::sha256_hex(result.as_bytes()),
            }));
            Ok(if verified { 0 } else { EXIT_FAILED })
        }
        Command::ExportDot { instance, result } => {
            let inst = load(&instance)?;
            let result = load_result(&result)?;
            let o = io::orientation_from_result(&inst, &result).map_err(|e| invalid("malformed_result", e))?;
            print!("{}", io::to_dot(&inst.graph, &o));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.diagnostic);
            ExitCode::from(f.code)
        }
    }
}
