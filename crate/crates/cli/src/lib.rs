//! Command-line front end: read a graph, run fission, audits, orbit search
//! or oracle verification, and print JSON (or DOT) reports.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use gfk_core::analysis::{
    audit_fission, cut_rank, minimize_resources, Bipartition, FissionAudit, OrbitConfig,
};
use gfk_core::dot::{export_dot, roles_after, roles_before, Role, RoleMap};
use gfk_core::fission::{
    execute_fission, iterate_fission, partition_measurement_count, plan_fission, FissionOutcome,
    StepJson, Transcript,
};
use gfk_core::oracle::{verify_transcript, DEFAULT_MAX_QUBITS};
use gfk_core::{GraphState, VertexId};

/// Name recorded in reports whenever outcomes are sampled.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.9/seed_from_u64";

pub const MAX_QUBITS_ENV: &str = "GFK_MAX_QUBITS";

const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input or flags; exit status 2.
    #[error("{0}")]
    Invalid(String),
    /// The oracle rejected a transcript; exit status 3.
    #[error("{0}")]
    OracleFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::OracleFailure(_) => 3,
        }
    }
}

impl From<gfk_core::Error> for CliError {
    fn from(e: gfk_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "gfk", version, about = "Graph-state fission toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a qubit, printing the final graph and the transcript.
    Fission(FissionArgs),
    /// Run a fission and print only its entanglement audit.
    Audit(FissionArgs),
    /// Search the local-complementation orbit for a cheaper fission.
    Minimize(MinimizeArgs),
    /// Replay a transcript through the statevector oracle.
    Verify(VerifyArgs),
    /// Local complementation at one vertex.
    Lc(VertexArgs),
    /// Pauli-Z measurement of one vertex.
    Measure(MeasureArgs),
    /// GF(2) cut rank (ebits) across a bipartition.
    Cutrank(CutrankArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Both,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph file: JSON `{"n", "edges", "labels"}` or a whitespace edge list.
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutcomeArgs {
    /// Seed for sampling measurement outcomes.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explicit outcome bits, e.g. `0,1,1`.
    #[arg(long, value_delimiter = ',')]
    pub outcomes: Option<Vec<u8>>,
}

#[derive(Debug, Args)]
pub struct FissionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Vertex to split (label if the graph is labeled, else index).
    #[arg(long)]
    pub target: String,
    /// Neighbors that move to the new qubit, comma separated.
    #[arg(long, conflicts_with = "partition")]
    pub kept: Option<String>,
    /// Blocks separated by `|`, e.g. `1|3,4|5`; the last block stays on the target.
    #[arg(long)]
    pub partition: Option<String>,
    #[command(flatten)]
    pub outcomes: OutcomeArgs,
    /// Replay the transcript through the statevector oracle.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write `<prefix>.json`, `<prefix>.before.dot` and `<prefix>.after.dot`
    /// instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Vertex that will be split.
    #[arg(long)]
    pub target: String,
    /// Neighbors the split-off qubit should carry, comma separated.
    #[arg(long)]
    pub kept: String,
    /// Maximum number of search states to expand.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Allow complementation at the target too.
    #[arg(long)]
    pub include_target: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Transcript JSON produced by `gfk fission`.
    #[arg(long)]
    pub transcript: PathBuf,
}

#[derive(Debug, Args)]
pub struct VertexArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub vertex: String,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub vertex: String,
    /// Outcome bit; sampled from `--seed` when absent.
    #[arg(long, conflicts_with = "seed")]
    pub outcome: Option<u8>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CutrankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// One side of the bipartition, comma separated.
    #[arg(long, default_value = "")]
    pub side: String,
}

/// Settings read from the environment.
#[derive(Clone, Copy, Debug)]
pub struct Env {
    pub max_qubits: usize,
}

impl Env {
    pub fn from_process() -> CliResult<Self> {
        let max_qubits = match std::env::var(MAX_QUBITS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                CliError::Invalid(format!(
                    "{MAX_QUBITS_ENV}: expected a non-negative integer, got {v:?}"
                ))
            })?,
            Err(_) => DEFAULT_MAX_QUBITS,
        };
        Ok(Env { max_qubits })
    }
}

impl Default for Env {
    fn default() -> Self {
        Env {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Files and text produced by one invocation.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    fn text(stdout: String) -> Self {
        Output {
            stdout,
            files: Vec::new(),
        }
    }
}

pub fn load_graph(path: &Path) -> CliResult<GraphState> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("input: cannot read {}: {e}", path.display())))?;
    Ok(GraphState::parse(&text)?)
}

/// Resolves a vertex token: a label for labeled graphs, an index otherwise.
pub fn resolve_vertex(g: &GraphState, token: &str, field: &str) -> CliResult<VertexId> {
    let token = token.trim();
    if g.labels().is_some() {
        return g
            .find_label(token)
            .ok_or_else(|| CliError::Invalid(format!("{field}: no vertex labeled {token:?}")));
    }
    let index: usize = token.parse().map_err(|_| {
        CliError::Invalid(format!("{field}: expected a vertex index, got {token:?}"))
    })?;
    let v = VertexId(index);
    g.check(v)
        .map_err(|e| CliError::Invalid(format!("{field}: {e}")))?;
    Ok(v)
}

pub fn resolve_set(g: &GraphState, list: &str, field: &str) -> CliResult<BTreeSet<VertexId>> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| resolve_vertex(g, t, field))
        .collect()
}

fn sample_outcomes(seed: u64, count: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0..2u8)).collect()
}

fn choose_outcomes(args: &OutcomeArgs, count: usize) -> CliResult<(Vec<u8>, Option<RngInfo>)> {
    match (&args.outcomes, args.seed) {
        (Some(bits), _) => {
            if let Some(bad) = bits.iter().find(|&&b| b > 1) {
                return Err(CliError::Invalid(format!(
                    "outcomes: expected bits, got {bad}"
                )));
            }
            if bits.len() != count {
                return Err(CliError::Invalid(format!(
                    "outcomes: expected {count} bits, got {}",
                    bits.len()
                )));
            }
            Ok((bits.clone(), None))
        }
        (None, Some(seed)) => Ok((
            sample_outcomes(seed, count),
            Some(RngInfo {
                name: RNG_NAME,
                seed,
            }),
        )),
        (None, None) if count == 0 => Ok((Vec::new(), None)),
        (None, None) => Err(CliError::Invalid(
            "seed: --seed is required when outcomes are sampled (or pass --outcomes)".into(),
        )),
    }
}

#[derive(Debug, Serialize)]
struct RngInfo {
    name: &'static str,
    seed: u64,
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
enum OracleReport {
    Pass { overlap: f64, qubits: usize },
    Fail { overlap: f64, qubits: usize },
    Skipped { reason: String },
}

#[derive(Debug, Serialize)]
struct FissionReport<'a> {
    target: usize,
    kept: Vec<usize>,
    rounds: usize,
    ancilla_qubits: usize,
    ancilla_ebits: usize,
    degenerate: bool,
    split_vertices: Vec<usize>,
    outcomes: &'a [u8],
    rng: Option<RngInfo>,
    audit: FissionAudit,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
    graph: &'a GraphState,
    transcript: Vec<StepJson>,
}

fn round_overlap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn ids(set: &BTreeSet<VertexId>) -> Vec<usize> {
    set.iter().map(|v| v.0).collect()
}

struct FissionRun {
    graph: GraphState,
    target: VertexId,
    kept: BTreeSet<VertexId>,
    complement: BTreeSet<VertexId>,
    outcome: FissionOutcome,
    outcomes: Vec<u8>,
    rng: Option<RngInfo>,
}

fn run_fission_core(args: &FissionArgs) -> CliResult<FissionRun> {
    let graph = load_graph(&args.input.input)?;
    let target = resolve_vertex(&graph, &args.target, "target")?;
    let nbhd = graph.neighborhood(target)?;
    let (kept, outcome, outcomes, rng) = match (&args.kept, &args.partition) {
        (Some(list), None) => {
            let kept = resolve_set(&graph, list, "kept")?;
            let spec = plan_fission(&graph, target, &kept)?;
            let (bits, rng) = choose_outcomes(&args.outcomes, spec.measurement_count())?;
            let out = execute_fission(&graph, &spec, &bits)?;
            (kept, out, bits, rng)
        }
        (None, Some(blocks)) => {
            let partition = blocks
                .split('|')
                .map(|b| resolve_set(&graph, b, "partition"))
                .collect::<CliResult<Vec<_>>>()?;
            let (bits, rng) =
                choose_outcomes(&args.outcomes, partition_measurement_count(&partition))?;
            let out = iterate_fission(&graph, target, &partition, &bits)?;
            let moved: BTreeSet<VertexId> = partition[..partition.len() - 1]
                .iter()
                .flatten()
                .copied()
                .collect();
            (moved, out, bits, rng)
        }
        _ => {
            return Err(CliError::Invalid(
                "kept: pass exactly one of --kept or --partition".into(),
            ))
        }
    };
    let complement = nbhd.difference(&kept).copied().collect();
    Ok(FissionRun {
        graph,
        target,
        kept,
        complement,
        outcome,
        outcomes,
        rng,
    })
}

fn oracle_report(start: &GraphState, run: &FissionOutcome, env: Env) -> CliResult<OracleReport> {
    let qubits = run.graph.vertex_count();
    if qubits > env.max_qubits {
        return Ok(OracleReport::Skipped {
            reason: format!(
                "oracle skipped: {qubits} qubits exceeds the cap of {}",
                env.max_qubits
            ),
        });
    }
    let check = verify_transcript(start, &run.transcript, env.max_qubits, ORACLE_TOLERANCE)
        .map_err(|e| CliError::OracleFailure(format!("oracle: {e}")))?;
    let overlap = round_overlap(check.overlap);
    Ok(if check.passed && check.final_graph == run.graph {
        OracleReport::Pass { overlap, qubits }
    } else {
        OracleReport::Fail { overlap, qubits }
    })
}

fn fission(args: &FissionArgs, env: Env) -> CliResult<Output> {
    let run = run_fission_core(args)?;
    let audit = audit_fission(&run.graph, &run.outcome, run.target)?;
    let oracle = if args.verify {
        Some(oracle_report(&run.graph, &run.outcome, env)?)
    } else {
        None
    };
    let failed = matches!(oracle, Some(OracleReport::Fail { .. }));
    let report = FissionReport {
        target: run.target.0,
        kept: ids(&run.kept),
        rounds: run.outcome.rounds,
        ancilla_qubits: run.outcome.ancilla_qubits_used,
        ancilla_ebits: run.outcome.ancilla_ebits_used,
        degenerate: run.outcome.degenerate,
        split_vertices: run
            .outcome
            .transcript
            .split_vertices
            .iter()
            .map(|v| v.0)
            .collect(),
        outcomes: &run.outcomes,
        rng: run.rng,
        audit,
        oracle,
        graph: &run.outcome.graph,
        transcript: run.outcome.transcript.wire(),
    };
    let json = to_pretty(&report);
    let before = export_dot(
        &run.graph,
        &roles_before(run.target, &run.kept, &run.complement),
    );
    let after = export_dot(
        &run.outcome.graph,
        &roles_after(run.target, &run.kept, &run.complement, &run.outcome),
    );
    let output = match &args.out {
        Some(prefix) => {
            let mut files = Vec::new();
            if args.format != Format::Dot {
                files.push((with_suffix(prefix, ".json"), json));
            }
            if args.format != Format::Json {
                files.push((with_suffix(prefix, ".before.dot"), before));
                files.push((with_suffix(prefix, ".after.dot"), after));
            }
            Output {
                stdout: String::new(),
                files,
            }
        }
        None => Output::text(render(args.format, json, after)),
    };
    if failed {
        // Artifacts are still useful for debugging, but the run failed.
        write_files(&output)?;
        return Err(CliError::OracleFailure(format!(
            "oracle: transcript does not reproduce the final graph state\n{}",
            output.stdout
        )));
    }
    Ok(output)
}

fn audit(args: &FissionArgs) -> CliResult<Output> {
    let run = run_fission_core(args)?;
    let audit = audit_fission(&run.graph, &run.outcome, run.target)?;
    Ok(Output::text(format!("{}\n", audit.to_json())))
}

fn minimize(args: &MinimizeArgs) -> CliResult<Output> {
    let graph = load_graph(&args.input.input)?;
    let target = resolve_vertex(&graph, &args.target, "target")?;
    let kept = resolve_set(&graph, &args.kept, "kept")?;
    if args.budget == 0 {
        return Err(CliError::Invalid("budget: must be at least 1".into()));
    }
    let config = OrbitConfig {
        budget: args.budget,
        include_target: args.include_target,
    };
    let result = minimize_resources(&graph, target, &kept, config)?;
    let mut roles = RoleMap::new();
    let rest: BTreeSet<VertexId> = result
        .representative
        .neighborhood(target)?
        .difference(&result.kept)
        .copied()
        .collect();
    roles.extend(result.kept.iter().map(|&v| (v, Role::Kept)));
    roles.extend(rest.iter().map(|&v| (v, Role::Complement)));
    roles.insert(target, Role::Target);
    let dot = export_dot(&result.representative, &roles);
    Ok(Output::text(render(args.format, to_pretty(&result), dot)))
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    oracle: OracleReport,
    steps: usize,
    graph: GraphState,
}

/// Accepts a bare step array or a fission report carrying one.
fn parse_transcript(text: &str) -> CliResult<Transcript> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Invalid(format!("transcript: invalid JSON: {e}")))?;
    let steps = match value {
        serde_json::Value::Object(mut report) => report.remove("transcript").ok_or_else(|| {
            CliError::Invalid("transcript: object has no \"transcript\" field".into())
        })?,
        other => other,
    };
    let raw: Vec<StepJson> =
        serde_json::from_value(steps).map_err(|e| CliError::Invalid(format!("transcript: {e}")))?;
    Ok(Transcript::from_wire(raw)?)
}

fn verify(args: &VerifyArgs, env: Env) -> CliResult<Output> {
    let graph = load_graph(&args.input.input)?;
    let text = fs::read_to_string(&args.transcript).map_err(|e| {
        CliError::Invalid(format!(
            "transcript: cannot read {}: {e}",
            args.transcript.display()
        ))
    })?;
    let transcript = parse_transcript(&text)?;
    let final_graph = transcript
        .replay(&graph)
        .map_err(|e| CliError::OracleFailure(format!("verify: {e}")))?;
    let qubits = final_graph.vertex_count();
    let oracle = if qubits > env.max_qubits {
        OracleReport::Skipped {
            reason: format!(
                "oracle skipped: {qubits} qubits exceeds the cap of {}",
                env.max_qubits
            ),
        }
    } else {
        let check = verify_transcript(&graph, &transcript, env.max_qubits, ORACLE_TOLERANCE)
            .map_err(|e| CliError::OracleFailure(format!("verify: {e}")))?;
        let overlap = round_overlap(check.overlap);
        if check.passed {
            OracleReport::Pass { overlap, qubits }
        } else {
            OracleReport::Fail { overlap, qubits }
        }
    };
    let failed = matches!(oracle, OracleReport::Fail { .. });
    let report = to_pretty(&VerifyReport {
        oracle,
        steps: transcript.steps.len(),
        graph: final_graph,
    });
    if failed {
        return Err(CliError::OracleFailure(report.trim_end().to_string()));
    }
    Ok(Output::text(report))
}

fn lc(args: &VertexArgs) -> CliResult<Output> {
    let graph = load_graph(&args.input.input)?;
    let v = resolve_vertex(&graph, &args.vertex, "vertex")?;
    let out = graph.local_complement(v)?;
    let mut roles = RoleMap::new();
    roles.insert(v, Role::Target);
    let dot = export_dot(&out, &roles);
    Ok(Output::text(render(
        args.format,
        format!("{}\n", out.to_json()),
        dot,
    )))
}

#[derive(Serialize)]
struct MeasureReport {
    vertex: usize,
    outcome: u8,
    corrections: Vec<usize>,
    rng: Option<RngInfo>,
    graph: GraphState,
}

fn measure(args: &MeasureArgs) -> CliResult<Output> {
    let graph = load_graph(&args.input.input)?;
    let v = resolve_vertex(&graph, &args.vertex, "vertex")?;
    let (outcome, rng) = match (args.outcome, args.seed) {
        (Some(b), _) if b > 1 => {
            return Err(CliError::Invalid(format!(
                "outcome: expected 0 or 1, got {b}"
            )))
        }
        (Some(b), _) => (b, None),
        (None, Some(seed)) => (
            sample_outcomes(seed, 1)[0],
            Some(RngInfo {
                name: RNG_NAME,
                seed,
            }),
        ),
        (None, None) => {
            return Err(CliError::Invalid(
                "seed: --seed is required when the outcome is sampled (or pass --outcome)".into(),
            ))
        }
    };
    let (out, corrections) = graph.measure_z(v, outcome)?;
    Ok(Output::text(to_pretty(&MeasureReport {
        vertex: v.0,
        outcome,
        corrections: corrections.iter().map(|c| c.0).collect(),
        rng,
        graph: out,
    })))
}

fn cutrank(args: &CutrankArgs) -> CliResult<Output> {
    let graph = load_graph(&args.input.input)?;
    let side = resolve_set(&graph, &args.side, "side")?;
    let rank = cut_rank(
        &graph,
        &Bipartition {
            side_a: side.clone(),
        },
    )?;
    Ok(Output::text(format!(
        "{{\"side\":{},\"cut_rank\":{rank}}}\n",
        serde_json::to_string(&ids(&side)).expect("ids serialize")
    )))
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn render(format: Format, json: String, dot: String) -> String {
    match format {
        Format::Json => json,
        Format::Dot => dot,
        Format::Both => format!("{json}\n{dot}"),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_files(output: &Output) -> CliResult<()> {
    for (path, text) in &output.files {
        fs::write(path, text)
            .map_err(|e| CliError::Invalid(format!("out: cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Dispatches one command. Nothing is written to disk; see [`write_files`].
pub fn run(cli: &Cli, env: Env) -> CliResult<Output> {
    match &cli.command {
        Command::Fission(args) => fission(args, env),
        Command::Audit(args) => audit(args),
        Command::Minimize(args) => minimize(args),
        Command::Verify(args) => verify(args, env),
        Command::Lc(args) => lc(args),
        Command::Measure(args) => measure(args),
        Command::Cutrank(args) => cutrank(args),
    }
}
