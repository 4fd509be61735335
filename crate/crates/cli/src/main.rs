//! `posadisc` command-line front end.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use posadisc_core::clique::{classify_clique, square_equation_holds};
use posadisc_core::constructions::{build_lower_bound, build_turan_square, LowerBoundSpec};
use posadisc_core::graph::{min_degree, ColoredGraph, VertexSet};
use posadisc_core::pipeline::{run_pipeline, PipelineParams, PipelineReport};
use posadisc_core::search::{
    enumerate_clique_tilings, enumerate_hamilton_powers_capped, max_abs_discrepancy_power,
    max_abs_discrepancy_tiling, perfect_clique_tiling, SearchBudget, DEFAULT_ORACLE_CAP,
};
use posadisc_core::template::{tiling_discrepancy, validate_tiling, verify_claim_formulas, Tiling};
use posadisc_core::{clique::census_tiling, Error};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "posadisc", version, about = "Discrepancy of powers of Hamilton cycles in 2-edge-coloured graphs")]
struct Cli {
    /// Print a machine-readable run report on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate extremal colourings.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Classify a clique as one of the four clique types.
    Classify {
        #[arg(long)]
        graph: PathBuf,
        /// Comma separated vertex list.
        #[arg(long, value_delimiter = ',', required = true)]
        vertices: Vec<usize>,
    },
    /// Recompute the template identities for every realizable configuration.
    VerifyClaims {
        #[arg(long)]
        r: usize,
    },
    /// Exact maximum |discrepancy| by branch and bound.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Validate and score a tiling, or find a perfect clique tiling.
    Tile {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        r: usize,
        /// Tiling file; without it a perfect K_{r+1}-tiling is searched for.
        #[arg(long)]
        tiling: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000_000)]
        node_limit: u64,
    },
    /// Cluster-level embedding pipeline.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Brute-force enumeration, for small graphs.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum GenCmd {
    /// Balanced (r+1)-partite colouring plus an arbitrary part V_0.
    LowerBound {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Balanced complete 4-partite graph with one part negative.
    Turan2 {
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 100_000_000)]
    node_limit: u64,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Over r-th powers of Hamilton cycles.
    Power(SearchArgs),
    /// Over perfect K_{r+1}-tilings.
    Tiling(SearchArgs),
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    reduced: PathBuf,
    #[arg(long)]
    tiling: PathBuf,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 0.5)]
    d: f64,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    exceptional: usize,
    #[arg(long)]
    path_node_limit: Option<u64>,
    #[arg(long)]
    fill_node_limit: Option<u64>,
    #[arg(long)]
    fill_restarts: Option<usize>,
}

impl PipelineArgs {
    fn params(&self, seed: u64) -> PipelineParams {
        let base = PipelineParams::new(self.r, self.eta, self.m, seed);
        PipelineParams {
            d: self.d,
            eps: self.eps,
            alpha: self.alpha,
            exceptional: self.exceptional,
            path_node_limit: self.path_node_limit.unwrap_or(base.path_node_limit),
            fill_node_limit: self.fill_node_limit.unwrap_or(base.fill_node_limit),
            fill_restarts: self.fill_restarts.unwrap_or(base.fill_restarts),
            ..base
        }
    }
}

#[derive(Subcommand)]
enum PipelineCmd {
    /// One seeded run.
    Run {
        #[command(flatten)]
        args: PipelineArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the full vertex ordering in the report.
        #[arg(long)]
        ordering: bool,
    },
    /// Independent runs over consecutive seeds.
    Sweep {
        #[command(flatten)]
        args: PipelineArgs,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// One CSV row per seed instead of the summary.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: usize,
}

#[derive(Subcommand)]
enum OracleCmd {
    Power(OracleArgs),
    Tiling(OracleArgs),
}

#[derive(Serialize)]
struct RunReport {
    subcommand: String,
    inputs_digest: String,
    seed: Option<u64>,
    wall_time_ms: u64,
    outputs: Value,
}

struct CliError {
    kind: String,
    message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { kind: e.kind().into(), message: e.to_string() }
    }
}

fn domain(kind: &str, message: impl Into<String>) -> CliError {
    CliError { kind: kind.into(), message: message.into() }
}

/// What a subcommand produced: report payload plus the human rendering.
struct Output {
    name: &'static str,
    seed: Option<u64>,
    value: Value,
    text: String,
    /// Printed verbatim instead of `text` when not in JSON mode.
    raw: Option<String>,
}

impl Output {
    fn new(name: &'static str, value: Value, text: String) -> Self {
        Output { name, seed: None, value, text, raw: None }
    }
}

struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        let mut hasher = Sha256::new();
        for a in std::env::args().skip(1).filter(|a| a != "--json") {
            hasher.update(a.as_bytes());
            hasher.update([0]);
        }
        Inputs { hasher }
    }

    /// Reads a file, or stdin for `-`, and folds its bytes into the digest.
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let mut text = String::new();
        if path == Path::new("-") {
            std::io::stdin().read_to_string(&mut text).map_err(Error::from)?;
        } else {
            text = std::fs::read_to_string(path).map_err(|e| domain("io", format!("{}: {e}", path.display())))?;
        }
        self.hasher.update(text.as_bytes());
        self.hasher.update([0]);
        Ok(text)
    }

    fn graph(&mut self, path: &Path) -> Result<ColoredGraph, CliError> {
        Ok(ColoredGraph::from_json(&self.read(path)?)?)
    }

    fn tiling(&mut self, r: usize, path: &Path) -> Result<Tiling, CliError> {
        Ok(Tiling::from_json(r, &self.read(path)?)?)
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

fn budget(a: &SearchArgs) -> SearchBudget {
    SearchBudget { node_limit: a.node_limit, time_limit: a.time_limit_ms.map(Duration::from_millis), workers: a.workers }
}

fn emit_graph(name: &'static str, g: &ColoredGraph, output: &Option<PathBuf>, seed: Option<u64>) -> Result<Output, CliError> {
    let mut value = json!({ "n": g.n(), "edges": g.edge_count(), "min_degree": min_degree(g) });
    let mut raw = None;
    match output {
        Some(p) => {
            std::fs::write(p, g.to_json()).map_err(|e| domain("io", format!("{}: {e}", p.display())))?;
            value["path"] = json!(p.display().to_string());
        }
        None => {
            value["graph"] = serde_json::from_str(&g.to_json()).expect("valid json");
            raw = Some(g.to_json());
        }
    }
    let text = format!("n={} edges={} min_degree={}", g.n(), g.edge_count(), min_degree(g));
    Ok(Output { name, seed, value, text, raw })
}

fn pipeline_summary(rep: &PipelineReport, ordering: bool) -> Value {
    let mut v = json!({
        "n": rep.n,
        "discrepancy": rep.discrepancy,
        "prediction": rep.prediction,
        "deviation": rep.deviation,
        "alpha_n": rep.alpha_n,
        "within_alpha": rep.within_alpha,
        "valid_power": rep.valid_power,
        "ordering_digest": rep.ordering_digest,
        "clique_tiles": rep.clique_tiles,
        "exceptional_assigned": rep.exceptional_assigned,
        "survival_violations": rep.survival_violations,
        "min_survival_slack": if rep.min_survival_slack.is_finite() { json!(rep.min_survival_slack) } else { Value::Null },
        "relaxed_steps": rep.relaxed_steps,
        "stages": rep.stages,
        "warnings": rep.warnings,
    });
    if ordering {
        v["ordering"] = json!(rep.ordering);
    }
    v
}

fn run(cmd: Cmd, inputs: &mut Inputs) -> Result<Output, CliError> {
    match cmd {
        Cmd::Gen(GenCmd::LowerBound { r, t, m, seed, output }) => {
            let g = build_lower_bound(&LowerBoundSpec { r, t, m, seed })?;
            emit_graph("gen lower-bound", &g, &output, Some(seed))
        }
        Cmd::Gen(GenCmd::Turan2 { k, output }) => emit_graph("gen turan2", &build_turan_square(k)?, &output, None),
        Cmd::Classify { graph, vertices } => {
            let g = inputs.graph(&graph)?;
            let s: VertexSet = vertices.iter().copied().collect();
            if s.len() != vertices.len() {
                return Err(domain("invalid_parameter", "vertex list has repeats"));
            }
            let ty = classify_clique(&g, &s)?;
            let square = if s.len() >= 4 { Some(square_equation_holds(&g, &s)?) } else { None };
            let text = ty.map_or("none".to_string(), |t| t.to_string());
            Ok(Output::new("classify", json!({ "vertices": s, "type": ty, "square_equation": square }), text))
        }
        Cmd::VerifyClaims { r } => {
            let rep = verify_claim_formulas(r)?;
            let checks: usize = rep.configs.iter().map(|c| c.checks.len()).sum();
            let failed: Vec<String> = rep
                .configs
                .iter()
                .flat_map(|c| c.checks.iter().filter(|k| !k.pass).map(move |k| format!("{}{:?} {}", c.claim.label(), c.case, k.name)))
                .collect();
            if !failed.is_empty() {
                return Err(domain("identity_mismatch", failed.join("; ")));
            }
            let text = format!("r={r}: {} configurations, {checks} identities, all pass", rep.configs.len());
            Ok(Output::new("verify-claims", serde_json::to_value(&rep).expect("serializable"), text))
        }
        Cmd::Search(sc) => {
            let (name, a, tiling) = match sc {
                SearchCmd::Power(a) => ("search power", a, false),
                SearchCmd::Tiling(a) => ("search tiling", a, true),
            };
            let g = inputs.graph(&a.graph)?;
            let res = if tiling {
                max_abs_discrepancy_tiling(&g, a.r, &budget(&a))?
            } else {
                max_abs_discrepancy_power(&g, a.r, &budget(&a))?
            };
            let text = format!("status={:?} value={} nodes={} optimal={}", res.status, res.value, res.nodes, res.optimal);
            Ok(Output::new(name, serde_json::to_value(&res).expect("serializable"), text))
        }
        Cmd::Tile { graph, r, tiling, node_limit } => {
            let g = inputs.graph(&graph)?;
            match tiling {
                Some(p) => {
                    let t = inputs.tiling(r, &p)?;
                    validate_tiling(&g, &t)?;
                    let f = tiling_discrepancy(&g, &t)?;
                    let census = if t.cycles.iter().all(|c| c.len() == r + 1) { Some(census_tiling(&g, &t)?) } else { None };
                    let text = format!("valid tiling, {} cycles, discrepancy {f}", t.cycles.len());
                    Ok(Output::new("tile", json!({ "valid": true, "cycles": t.cycles.len(), "discrepancy": f, "census": census }), text))
                }
                None => {
                    let found = perfect_clique_tiling(&g, r, &SearchBudget::nodes(node_limit))?;
                    let lists: Option<Vec<Vec<usize>>> = found.as_ref().map(|t| t.cycles.iter().map(|c| c.seq().to_vec()).collect());
                    let text = match &lists {
                        Some(l) => format!("tiling {l:?}"),
                        None => "no perfect tiling".into(),
                    };
                    Ok(Output::new("tile", json!({ "found": lists.is_some(), "tiling": lists }), text))
                }
            }
        }
        Cmd::Pipeline(PipelineCmd::Run { args, seed, ordering }) => {
            let reduced = inputs.graph(&args.reduced)?;
            let t = inputs.tiling(args.r, &args.tiling)?;
            let rep = run_pipeline(&reduced, &t, &args.params(seed))?;
            let text = format!(
                "n={} discrepancy={} prediction={} deviation={} (alpha*n={:.1}) valid={} digest={}",
                rep.n, rep.discrepancy, rep.prediction, rep.deviation, rep.alpha_n, rep.valid_power, rep.ordering_digest
            );
            Ok(Output { name: "pipeline run", seed: Some(seed), value: pipeline_summary(&rep, ordering), text, raw: None })
        }
        Cmd::Pipeline(PipelineCmd::Sweep { args, start, seeds, csv }) => {
            let reduced = inputs.graph(&args.reduced)?;
            let t = inputs.tiling(args.r, &args.tiling)?;
            let rows: Vec<Value> = (start..start + seeds)
                .into_par_iter()
                .map(|seed| match run_pipeline(&reduced, &t, &args.params(seed)) {
                    Ok(rep) => json!({
                        "seed": seed, "ok": true, "n": rep.n, "valid_power": rep.valid_power,
                        "discrepancy": rep.discrepancy, "prediction": rep.prediction,
                        "deviation": rep.deviation, "within_alpha": rep.within_alpha, "error": null,
                    }),
                    Err(e) => json!({ "seed": seed, "ok": false, "error": e.to_string() }),
                })
                .collect();
            let good = rows.iter().filter(|r| r["ok"] == true && r["valid_power"] == true && r["within_alpha"] == true).count();
            let raw = csv.then(|| sweep_csv(&rows));
            let text = format!("{good}/{seeds} seeds valid and within alpha*n");
            Ok(Output {
                name: "pipeline sweep",
                seed: Some(start),
                value: json!({ "runs": rows, "within_alpha": good, "seeds": seeds }),
                text,
                raw,
            })
        }
        Cmd::Oracle(oc) => {
            let (name, a, tiling) = match oc {
                OracleCmd::Power(a) => ("oracle power", a, false),
                OracleCmd::Tiling(a) => ("oracle tiling", a, true),
            };
            let g = inputs.graph(&a.graph)?;
            let values: Vec<(Vec<Vec<usize>>, i64)> = if tiling {
                enumerate_clique_tilings(&g, a.r, a.cap)?
            } else {
                enumerate_hamilton_powers_capped(&g, a.r, a.cap)?.map(|(o, d)| (vec![o], d)).collect()
            };
            let best = values.iter().fold(None::<&(Vec<Vec<usize>>, i64)>, |b, x| match b {
                Some(b) if b.1.abs() > x.1.abs() || (b.1.abs() == x.1.abs() && (b.1 > 0 || x.1 < 0)) => Some(b),
                _ => Some(x),
            });
            let witness = best.map(|(w, _)| if tiling { json!(w) } else { json!(w[0]) });
            let (lo, hi) = (values.iter().map(|x| x.1).min(), values.iter().map(|x| x.1).max());
            let text = format!("{} contained, max |f| = {}", values.len(), best.map_or("none".into(), |b| b.1.abs().to_string()));
            Ok(Output::new(
                name,
                json!({ "count": values.len(), "max_value": best.map(|b| b.1), "min": lo, "max": hi, "witness": witness }),
                text,
            ))
        }
    }
}

fn sweep_csv(rows: &[Value]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    let cols = ["seed", "ok", "n", "valid_power", "discrepancy", "prediction", "deviation", "within_alpha", "error"];
    w.write_record(cols).expect("in-memory write");
    for row in rows {
        let cells = cols.iter().map(|c| match &row[*c] {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            v => v.to_string(),
        });
        w.write_record(cells).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut inputs = Inputs::new();
    let out = run(cli.cmd, &mut inputs);
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    match out {
        Ok(o) => {
            let res = if cli.json {
                let report = RunReport {
                    subcommand: o.name.into(),
                    inputs_digest: inputs.digest(),
                    seed: o.seed,
                    wall_time_ms: start.elapsed().as_millis() as u64,
                    outputs: o.value,
                };
                writeln!(stdout, "{}", serde_json::to_string(&report).expect("serializable"))
            } else if let Some(raw) = o.raw {
                write!(stdout, "{raw}").and_then(|_| if raw.ends_with('\n') { Ok(()) } else { writeln!(stdout) })
            } else {
                writeln!(stdout, "{}", o.text)
            };
            if res.is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = json!({ "error": { "kind": e.kind, "message": e.message } });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
