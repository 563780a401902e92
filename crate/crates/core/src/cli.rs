//! Command-line front end: argument parsing, config files, dispatch and
//! JSON reports. Rationals are reported as exact strings with a decimal
//! annotation under `<key>_decimal`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cutlp::family::{read_family, write_family};
use crate::cutlp::{check_feasible, solve_lp, verify_vertex, Feasibility, LpMode};
use crate::decomposition::{
    bound_alpha, bound_alpha_limit, bound_beta, bound_beta_limit, chain_trace, explicit_gap_distribution,
    feasibility_at_beta, format_distribution, min_alpha, min_beta, parse_distribution, verify_distribution,
    witness_costs_from_dual, BetaFeasibility, Decomposition, ForestDistribution,
};
use crate::error::{Error, Result};
use crate::exact::{gap, solve_ip_with, IpOptions, DEFAULT_EDGE_CAP};
use crate::instances::io::{read_instance, read_solution, read_text, write_instance, write_solution, write_text};
use crate::instances::{
    build_layered, canonical_point, gadget_tight_family, layered_instance, make_base, pcst_gadget_instance,
    random_feasible_point, random_instance, BaseKind, CostScheme, FracSolution, LayeredConstruction, PcsfInstance,
    PointMode, RandomSpec, DEFAULT_NODE_CAP,
};
use crate::rational::{fmt_rational, parse_rational, to_f64, Rational};
use crate::rounding::{best_threshold_round, gw_steiner_forest, threshold_bound, threshold_round, two_value_round, IntegralSolution};

pub const EDGE_CAP_ENV: &str = "PCSF_EDGE_CAP";
pub const NODE_CAP_ENV: &str = "PCSF_NODE_CAP";

#[derive(Parser, Debug)]
#[command(name = "pcsf", version, about = "Prize-collecting Steiner forest LP experiments in exact arithmetic")]
pub struct Cli {
    /// TOML file with defaults; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for the parallel parts. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate instances and canonical points.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Cut LP: solve, check feasibility, certify extreme points.
    #[command(subcommand)]
    Lp(LpCommand),
    /// Exact integral optimum.
    #[command(subcommand)]
    Ip(IpCommand),
    /// Round a fractional point.
    Round(RoundArgs),
    /// Forest distributions dominated by a fractional point.
    #[command(subcommand)]
    Decompose(DecomposeCommand),
    /// Closed-form lower bounds of the layered construction.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Aggregate reports.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Layered construction over a base graph, with its canonical point.
    Layered(GenLayeredArgs),
    /// The gadget instance with its point and tight family.
    Gadget(GenGadgetArgs),
    /// A base graph, checked for regularity and connectivity.
    Base(GenBaseArgs),
    /// A random instance, optionally with a random feasible point.
    Random(GenRandomArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LayeredSpec {
    /// Base graph: k4, prism, k<q>, or file:<path>.
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Construction metadata written by `gen layered`, used for missing fields.
    #[arg(long, default_value = "layered.meta.json")]
    pub meta: PathBuf,
    #[arg(long, env = NODE_CAP_ENV, default_value_t = DEFAULT_NODE_CAP)]
    pub node_cap: usize,
}

#[derive(Args, Debug)]
pub struct GenLayeredArgs {
    #[arg(long, default_value = "k4")]
    pub base: String,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    #[arg(long, default_value_t = 0)]
    pub k: u64,
    /// Canonical point: gap (needs a 3-regular base) or lmp. Defaults to gap when possible.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, env = NODE_CAP_ENV, default_value_t = DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    #[arg(long, default_value = "layered.pcsf")]
    pub out: PathBuf,
    #[arg(long, default_value = "layered.sol")]
    pub point: PathBuf,
    #[arg(long, default_value = "layered.meta.json")]
    pub meta: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenGadgetArgs {
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value = "gadget.pcsf")]
    pub out: PathBuf,
    #[arg(long, default_value = "gadget.sol")]
    pub point: PathBuf,
    #[arg(long, default_value = "gadget.family")]
    pub family: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenBaseArgs {
    #[arg(long, default_value = "k4")]
    pub base: String,
    /// Edge list output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenRandomArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 12)]
    pub max_edges: usize,
    #[arg(long, default_value_t = 3)]
    pub pairs: usize,
    #[arg(long, default_value = "random.pcsf")]
    pub out: PathBuf,
    /// Also write a random feasible point here.
    #[arg(long)]
    pub point: Option<PathBuf>,
    /// Restrict the point's z to {0, gamma}.
    #[arg(long, value_parser = rational_arg)]
    pub gamma: Option<Rational>,
}

#[derive(Subcommand, Debug)]
pub enum LpCommand {
    /// Optimal value and point of the cut LP.
    Solve(LpSolveArgs),
    /// Exact feasibility of a point.
    Check(PointArgs),
    /// Extreme-point certificate from a tight family.
    VerifyVertex(VerifyVertexArgs),
}

#[derive(Args, Debug)]
pub struct LpSolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Floating-point tolerance; exact arithmetic when absent.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the optimal point here.
    #[arg(long)]
    pub point_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub point: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyVertexArgs {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub point: Option<PathBuf>,
    /// A family file, or `gadget` for the gadget family (files default to `gen gadget` outputs).
    #[arg(long)]
    pub family: String,
}

#[derive(Subcommand, Debug)]
pub enum IpCommand {
    /// Exact optimum by dynamic programming or branch and bound.
    Solve(IpSolveArgs),
}

#[derive(Args, Debug)]
pub struct IpSolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, env = EDGE_CAP_ENV, default_value_t = DEFAULT_EDGE_CAP)]
    pub edge_cap: usize,
    /// Branch without LP bounds.
    #[arg(long)]
    pub no_lp_bound: bool,
    /// Skip the frontier dynamic program.
    #[arg(long)]
    pub no_frontier: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoundMethod {
    Threshold,
    Best,
    TwoValue,
    Gw,
}

#[derive(Args, Debug)]
pub struct RoundArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub point: PathBuf,
    #[arg(long, value_enum, default_value_t = RoundMethod::Threshold)]
    pub method: RoundMethod,
    #[arg(long, value_parser = rational_arg, default_value = "1/3")]
    pub theta: Rational,
    #[arg(long, value_parser = rational_arg, default_value = "3/4")]
    pub p: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Gap,
    Lmp,
}

impl From<ModeArg> for PointMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Gap => PointMode::Gap,
            ModeArg::Lmp => PointMode::Lmp,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum DecomposeCommand {
    /// Smallest alpha with a distribution dominated by alpha (x, z).
    MinAlpha(ColgenArgs),
    /// Smallest beta with a distribution under beta x and z.
    MinBeta(MinBetaArgs),
    /// The explicit distribution on a layered construction.
    Explicit(ExplicitArgs),
    /// Exact marginals and pair probabilities of a distribution file.
    Verify(VerifyArgs),
    /// Witness-node chain from the root copy down.
    Trace(TraceArgs),
}

#[derive(Args, Debug)]
pub struct ColgenArgs {
    #[arg(long, default_value = "layered.pcsf")]
    pub instance: PathBuf,
    #[arg(long, default_value = "layered.sol")]
    pub point: PathBuf,
    /// Write the optimal distribution here.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Write the instance priced by the optimal dual here.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MinBetaArgs {
    #[command(flatten)]
    pub common: ColgenArgs,
    /// Only decide feasibility at this beta.
    #[arg(long, value_parser = rational_arg)]
    pub at: Option<Rational>,
}

#[derive(Args, Debug)]
pub struct ExplicitArgs {
    #[command(flatten)]
    pub spec: LayeredSpec,
    #[arg(long, value_parser = rational_arg, default_value = "9/4")]
    pub alpha: Rational,
    #[arg(long, default_value = "layered.dist")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "layered.pcsf")]
    pub instance: PathBuf,
    #[arg(long, default_value = "layered.sol")]
    pub point: PathBuf,
    #[arg(long, default_value = "layered.dist")]
    pub dist: PathBuf,
    /// Defaults to the mode recorded by `gen layered`, else gap.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Defaults to the factor recorded in the distribution file.
    #[arg(long, value_parser = rational_arg)]
    pub factor: Option<Rational>,
    #[arg(long, default_value = "layered.meta.json")]
    pub meta: PathBuf,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub spec: LayeredSpec,
    #[arg(long, default_value = "layered.dist")]
    pub dist: PathBuf,
    /// Defaults to the factor recorded in the distribution file.
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
}

#[derive(Subcommand, Debug)]
pub enum BoundsCommand {
    /// Finite-size bound on alpha for 3-regular bases.
    Alpha(BoundArgs),
    /// Finite-size bound on beta for degree-l bases.
    Beta(BoundArgs),
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 3)]
    pub l: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Sweep k from `--k` to this value.
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Write the rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ReportCommand {
    /// LP value, integral optimum and their ratio.
    Gap(GapArgs),
}

#[derive(Args, Debug)]
pub struct GapArgs {
    /// A single instance; otherwise random instances over `--seeds`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Seed range `a..b` for random instances.
    #[arg(long, default_value = "0..10")]
    pub seeds: String,
    #[arg(long, default_value_t = 6)]
    pub nodes: usize,
    #[arg(long, default_value_t = 12)]
    pub max_edges: usize,
    #[arg(long, default_value_t = 3)]
    pub pairs: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Metadata `gen layered` leaves next to the instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredMeta {
    pub base: String,
    pub m: u64,
    pub k: u64,
    pub mode: ModeArg,
}

/// One CSV row for external plotting; absent fields are left empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PlotRow {
    pub n: Option<u64>,
    pub k: Option<u32>,
    pub l: Option<u64>,
    pub bound: Option<String>,
    pub alpha_star: Option<String>,
    pub beta_star: Option<String>,
    pub ratio: Option<String>,
}

const PLOT_HEADER: [&str; 7] = ["n", "k", "l", "bound", "alpha_star", "beta_star", "ratio"];

pub fn export_plot_data(rows: &[PlotRow], path: &Path) -> Result<()> {
    let io = |e: csv::Error| Error::Io { path: path.display().to_string(), source: std::io::Error::other(e) };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(io)?;
    w.write_record(PLOT_HEADER).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Sets `key` to the exact string and `key_decimal` to its approximation.
fn put(map: &mut Map<String, Value>, key: &str, r: &Rational) {
    map.insert(key.to_string(), Value::String(fmt_rational(r)));
    map.insert(format!("{key}_decimal"), json!(to_f64(r)));
}

fn exact_list(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|r| Value::String(fmt_rational(r))).collect())
}

fn solution_json(sol: &IntegralSolution) -> Map<String, Value> {
    let mut map = Map::new();
    put(&mut map, "objective", &sol.objective());
    put(&mut map, "cost", &sol.cost);
    put(&mut map, "penalty", &sol.penalty);
    map.insert("forest".into(), json!(sol.forest.as_slice()));
    map.insert("disconnected".into(), json!(sol.disconnected));
    map
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn read_meta(path: &Path) -> Result<Option<LayeredMeta>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = read_text(path)?;
    serde_json::from_str(&text).map(Some).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn build_from_spec(spec: &LayeredSpec) -> Result<LayeredConstruction> {
    let meta = read_meta(&spec.meta)?;
    let base = spec.base.clone().or_else(|| meta.as_ref().map(|m| m.base.clone()));
    let m = spec.m.or(meta.as_ref().map(|m| m.m));
    let k = spec.k.or(meta.as_ref().map(|m| m.k));
    let (Some(base), Some(m), Some(k)) = (base, m, k) else {
        return Err(Error::invalid(format!(
            "layered construction needs --base, --m and --k (or a metadata file at {})",
            spec.meta.display()
        )));
    };
    build_layered(&make_base(&base.parse::<BaseKind>()?)?, m as usize, k as usize, spec.node_cap)
}

/// Factor recorded as `# factor <r>` at the top of a distribution file.
fn recorded_factor(text: &str) -> Option<Rational> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix("factor").map(|r| r.trim().to_string()))
        .and_then(|r| parse_rational(&r).ok())
}

fn write_dist(dist: &ForestDistribution, factor: &Rational, path: &Path) -> Result<()> {
    write_text(path, &format!("# factor {}\n{}", fmt_rational(factor), format_distribution(dist)))
}

fn load(instance: &Path, point: &Path) -> Result<(PcsfInstance, FracSolution)> {
    let inst = read_instance(instance)?;
    let pt = read_solution(point, &inst)?;
    Ok((inst, pt))
}

fn parse_range(s: &str) -> Result<std::ops::Range<u64>> {
    let (a, b) = s.split_once("..").ok_or_else(|| Error::Parse(format!("expected a..b, got {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")));
    Ok(parse(a)?..parse(b)?)
}

/// Runs one parsed command and returns its JSON report.
pub fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Gen(cmd) => run_gen(cmd),
        Command::Lp(cmd) => run_lp(cmd),
        Command::Ip(IpCommand::Solve(a)) => {
            let inst = read_instance(&a.instance)?;
            let opts = IpOptions { edge_cap: a.edge_cap, lp_bound: !a.no_lp_bound, frontier: !a.no_frontier };
            let (sol, stats) = solve_ip_with(&inst, &opts)?;
            let mut map = solution_json(&sol);
            map.insert("stats".into(), serde_json::to_value(stats).expect("stats serialize"));
            Ok(Value::Object(map))
        }
        Command::Round(a) => run_round(a),
        Command::Decompose(cmd) => run_decompose(cmd),
        Command::Bounds(cmd) => run_bounds(cmd),
        Command::Report(ReportCommand::Gap(a)) => run_gap(a),
    }
}

fn run_gen(cmd: &GenCommand) -> Result<Value> {
    let mut map = Map::new();
    match cmd {
        GenCommand::Layered(a) => {
            let lc = build_layered(&make_base(&a.base.parse::<BaseKind>()?)?, a.m as usize, a.k as usize, a.node_cap)?;
            let mode = a.mode.unwrap_or(if lc.l() == 3 { ModeArg::Gap } else { ModeArg::Lmp });
            let inst = layered_instance(&lc, &CostScheme::Unit)?;
            let point = canonical_point(&lc, mode.into())?;
            write_instance(&inst, &a.out)?;
            write_solution(&point, &a.point)?;
            let meta = LayeredMeta { base: a.base.clone(), m: a.m, k: a.k, mode };
            write_text(&a.meta, &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"))?;
            map.insert("nodes".into(), json!(inst.graph.node_count()));
            map.insert("edges".into(), json!(inst.edge_count()));
            map.insert("pairs".into(), json!(inst.pair_count()));
            map.insert("copies".into(), json!(lc.copies.len()));
            map.insert("l".into(), json!(lc.l()));
            map.insert("mode".into(), json!(mode));
            map.insert("instance".into(), json!(path_str(&a.out)));
            map.insert("point".into(), json!(path_str(&a.point)));
        }
        GenCommand::Gadget(a) => {
            let (inst, point, layout) = pcst_gadget_instance(a.k)?;
            let family = gadget_tight_family(&inst, a.k)?;
            write_instance(&inst, &a.out)?;
            write_solution(&point, &a.point)?;
            write_family(&family, &inst, &a.family)?;
            map.insert("nodes".into(), json!(inst.graph.node_count()));
            map.insert("edges".into(), json!(inst.edge_count()));
            map.insert("pairs".into(), json!(inst.pair_count()));
            map.insert("family_size".into(), json!(family.len()));
            map.insert("wiring".into(), json!(layout.wiring));
            map.insert("instance".into(), json!(path_str(&a.out)));
        }
        GenCommand::Base(a) => {
            let base = make_base(&a.base.parse::<BaseKind>()?)?;
            if let Some(out) = &a.out {
                let text: String = base.graph.edges().iter().map(|(u, v)| format!("{u} {v}\n")).collect();
                write_text(out, &text)?;
            }
            map.insert("nodes".into(), json!(base.n()));
            map.insert("edges".into(), json!(base.graph.edges()));
            map.insert("l".into(), json!(base.l));
        }
        GenCommand::Random(a) => {
            let spec = RandomSpec { nodes: a.nodes, edge_prob: a.edge_prob, max_edges: a.max_edges, pairs: a.pairs, ..RandomSpec::default() };
            let inst = random_instance(&spec, a.seed)?;
            write_instance(&inst, &a.out)?;
            if let Some(path) = &a.point {
                write_solution(&random_feasible_point(&inst, a.seed, a.gamma.as_ref())?, path)?;
            }
            map.insert("edges".into(), json!(inst.edge_count()));
            map.insert("pairs".into(), json!(inst.pair_count()));
            map.insert("instance".into(), json!(path_str(&a.out)));
        }
    }
    Ok(Value::Object(map))
}

fn run_lp(cmd: &LpCommand) -> Result<Value> {
    let mut map = Map::new();
    match cmd {
        LpCommand::Solve(a) => {
            let inst = read_instance(&a.instance)?;
            let mode = a.tol.map_or(LpMode::Exact, LpMode::Tol);
            let res = solve_lp(&inst, mode)?;
            if let Some(path) = &a.point_out {
                write_solution(&res.solution, path)?;
            }
            put(&mut map, "value", &res.value);
            map.insert("x".into(), exact_list(&res.solution.x));
            map.insert("z".into(), exact_list(&res.solution.z));
            map.insert("active_cuts".into(), json!(res.active_cuts.iter().map(|c| c.describe(&inst)).collect::<Vec<_>>()));
            map.insert("iterations".into(), json!(res.iterations));
            map.insert("exact".into(), json!(mode == LpMode::Exact));
        }
        LpCommand::Check(a) => {
            let (inst, point) = load(&a.instance, &a.point)?;
            let outcome = check_feasible(&inst, &point)?;
            map.insert("feasible".into(), json!(outcome.is_feasible()));
            if let Feasibility::Violated(cut) = &outcome {
                map.insert("violated".into(), json!(cut.describe(&inst)));
                put(&mut map, "lhs", &cut.lhs(&inst, &point));
            }
            put(&mut map, "objective", &inst.lp_objective(&point));
        }
        LpCommand::VerifyVertex(a) => {
            let gadget = a.family == "gadget";
            let default = |p: &Option<PathBuf>, name: &str| match p {
                Some(p) => Ok(p.clone()),
                None if gadget => Ok(PathBuf::from(name)),
                None => Err(Error::invalid(format!("--{} is required unless --family gadget", name.split('.').next_back().unwrap_or(name)))),
            };
            let (inst, point) = load(&default(&a.instance, "gadget.pcsf")?, &default(&a.point, "gadget.sol")?)?;
            let family = if gadget {
                gadget_tight_family(&inst, inst.graph.node_count().saturating_sub(2) / 10)?
            } else {
                read_family(Path::new(&a.family), &inst)?
            };
            let report = verify_vertex(&inst, &point, &family)?;
            map.insert("feasible".into(), json!(report.is_feasible));
            map.insert("all_tight".into(), json!(report.all_tight));
            map.insert("unique".into(), json!(report.unique));
            map.insert("rank".into(), json!(report.rank));
            map.insert("dimension".into(), json!(report.dimension));
            map.insert("loose".into(), json!(report.loose));
            map.insert("max_coord".into(), json!(report.max_coordinate));
            map.insert("all_x_positive".into(), json!(point.x.iter().all(|v| v > &Rational::from_integer(0.into()))));
        }
    }
    Ok(Value::Object(map))
}

fn run_round(a: &RoundArgs) -> Result<Value> {
    let (inst, point) = load(&a.instance, &a.point)?;
    let lp = inst.lp_objective(&point);
    let mut extra = Map::new();
    let (sol, bound) = match a.method {
        RoundMethod::Threshold => (threshold_round(&inst, &point, &a.theta)?, Some(threshold_bound(&a.theta))),
        RoundMethod::Best => {
            let (sol, cand) = best_threshold_round(&inst, &point)?;
            extra.insert("candidate".into(), serde_json::to_value(cand).expect("candidate serializes"));
            (sol, Some(Rational::from_integer(3.into())))
        }
        RoundMethod::TwoValue => {
            let out = two_value_round(&inst, &point, &a.p)?;
            extra.insert("choice".into(), serde_json::to_value(out.choice).expect("choice serializes"));
            put(&mut extra, "gamma", &out.gamma);
            (out.solution, Some(out.bound))
        }
        RoundMethod::Gw => {
            let all: Vec<usize> = (0..inst.pair_count()).collect();
            (IntegralSolution::from_forest(&inst, gw_steiner_forest(&inst, &all)?)?, None)
        }
    };
    let mut map = solution_json(&sol);
    map.extend(extra);
    put(&mut map, "lp_objective", &lp);
    if let Some(b) = &bound {
        put(&mut map, "ratio_bound", b);
        map.insert("within_bound".into(), json!(sol.objective() <= b * &lp));
    }
    if lp > Rational::from_integer(0.into()) {
        put(&mut map, "observed_ratio", &(sol.objective() / &lp));
    }
    Ok(Value::Object(map))
}

fn decomposition_json(dec: &Decomposition, key: &str, a: &ColgenArgs, inst: &PcsfInstance, mode: PointMode) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    put(&mut map, key, &dec.value);
    map.insert("forests".into(), json!(dec.distribution.len()));
    map.insert("columns".into(), json!(dec.columns));
    map.insert("rounds".into(), json!(dec.rounds));
    map.insert("witness".into(), serde_json::to_value(&dec.witness).expect("witness serializes"));
    if let Some(path) = &a.dist {
        write_dist(&dec.distribution, &dec.value, path)?;
    }
    let written = match &a.witness {
        Some(path) => {
            write_instance(&witness_costs_from_dual(inst, &dec.witness, mode, &dec.value)?, path)?;
            true
        }
        None => false,
    };
    map.insert("witness_written".into(), json!(written));
    Ok(map)
}

fn run_decompose(cmd: &DecomposeCommand) -> Result<Value> {
    match cmd {
        DecomposeCommand::MinAlpha(a) => {
            let (inst, point) = load(&a.instance, &a.point)?;
            let dec = min_alpha(&inst, &point)?;
            Ok(Value::Object(decomposition_json(&dec, "alpha_star", a, &inst, PointMode::Gap)?))
        }
        DecomposeCommand::MinBeta(b) => {
            let a = &b.common;
            let (inst, point) = load(&a.instance, &a.point)?;
            if let Some(beta) = &b.at {
                let mut map = Map::new();
                let outcome = feasibility_at_beta(&inst, &point, beta)?;
                put(&mut map, "beta", beta);
                put(&mut map, "value", &outcome.value());
                map.insert("feasible".into(), json!(outcome.is_feasible()));
                match &outcome {
                    BetaFeasibility::Feasible { distribution, .. } => {
                        map.insert("forests".into(), json!(distribution.len()));
                        if let Some(path) = &a.dist {
                            write_dist(distribution, beta, path)?;
                        }
                    }
                    BetaFeasibility::Infeasible { certificate, .. } => {
                        map.insert("certificate".into(), serde_json::to_value(certificate).expect("certificate serializes"));
                    }
                }
                return Ok(Value::Object(map));
            }
            let dec = min_beta(&inst, &point)?;
            Ok(Value::Object(decomposition_json(&dec, "beta_star", a, &inst, PointMode::Lmp)?))
        }
        DecomposeCommand::Explicit(a) => {
            let lc = build_from_spec(&a.spec)?;
            let dist = explicit_gap_distribution(&lc, &a.alpha)?;
            write_dist(&dist, &a.alpha, &a.out)?;
            let mut map = Map::new();
            put(&mut map, "alpha", &a.alpha);
            map.insert("forests".into(), json!(dist.len()));
            map.insert("dist".into(), json!(path_str(&a.out)));
            Ok(Value::Object(map))
        }
        DecomposeCommand::Verify(a) => {
            let (inst, point) = load(&a.instance, &a.point)?;
            let text = read_text(&a.dist)?;
            let dist = parse_distribution(&text, &inst.graph)?;
            let factor = a
                .factor
                .clone()
                .or_else(|| recorded_factor(&text))
                .ok_or_else(|| Error::invalid("--factor is required when the distribution file does not record one"))?;
            let mode = match a.mode {
                Some(m) => m,
                None => read_meta(&a.meta)?.map_or(ModeArg::Gap, |m| m.mode),
            };
            let report = verify_distribution(&inst, &point, &dist, mode.into(), &factor)?;
            let mut value = serde_json::to_value(&report).expect("report serializes");
            if let Value::Object(map) = &mut value {
                put(map, "alpha_or_beta", &factor);
                map.insert("forests".into(), json!(dist.len()));
            }
            Ok(value)
        }
        DecomposeCommand::Trace(a) => {
            let lc = build_from_spec(&a.spec)?;
            let text = read_text(&a.dist)?;
            let dist = parse_distribution(&text, &lc.graph)?;
            let alpha = a
                .alpha
                .clone()
                .or_else(|| recorded_factor(&text))
                .ok_or_else(|| Error::invalid("--alpha is required when the distribution file does not record one"))?;
            let trace = chain_trace(&lc, &dist, &alpha)?;
            Ok(serde_json::to_value(&trace).expect("trace serializes"))
        }
    }
}

fn run_bounds(cmd: &BoundsCommand) -> Result<Value> {
    let (a, is_alpha) = match cmd {
        BoundsCommand::Alpha(a) => (a, true),
        BoundsCommand::Beta(a) => (a, false),
    };
    let ks: Vec<u32> = (a.k..=a.k_max.unwrap_or(a.k).max(a.k)).collect();
    let values: Vec<Rational> = ks
        .par_iter()
        .map(|&k| if is_alpha { bound_alpha(a.n, k) } else { bound_beta(a.l, a.n, k) })
        .collect::<Result<_>>()?;
    let limit = if is_alpha { bound_alpha_limit() } else { bound_beta_limit(a.l)? };
    let l = if is_alpha { 3 } else { a.l };
    let rows: Vec<PlotRow> = ks
        .iter()
        .zip(&values)
        .map(|(&k, v)| PlotRow { n: Some(a.n), k: Some(k), l: Some(l), bound: Some(fmt_rational(v)), ..PlotRow::default() })
        .collect();
    if let Some(path) = &a.csv {
        export_plot_data(&rows, path)?;
    }
    let mut map = Map::new();
    let last = values.last().expect("at least one k");
    put(&mut map, "bound", last);
    put(&mut map, "limit", &limit);
    put(&mut map, "distance_to_limit", &(&limit - last));
    map.insert("n".into(), json!(a.n));
    map.insert("k".into(), json!(ks.last()));
    map.insert("l".into(), json!(l));
    if ks.len() > 1 {
        let curve: Vec<Value> = ks.iter().zip(&values).map(|(k, v)| json!({"k": k, "bound": fmt_rational(v)})).collect();
        map.insert("curve".into(), Value::Array(curve));
        map.insert("monotone".into(), json!(values.windows(2).all(|w| w[0] <= w[1])));
    }
    Ok(Value::Object(map))
}

fn run_gap(a: &GapArgs) -> Result<Value> {
    let gap_json = |r: &crate::exact::GapReport| {
        let mut m = Map::new();
        put(&mut m, "lp", &r.lp);
        put(&mut m, "ip", &r.ip);
        put(&mut m, "ratio", &r.ratio);
        m
    };
    if let Some(path) = &a.instance {
        let report = gap(&read_instance(path)?)?;
        if let Some(csv) = &a.csv {
            export_plot_data(&[PlotRow { ratio: Some(fmt_rational(&report.ratio)), ..PlotRow::default() }], csv)?;
        }
        return Ok(Value::Object(gap_json(&report)));
    }
    let spec = RandomSpec { nodes: a.nodes, max_edges: a.max_edges, pairs: a.pairs, ..RandomSpec::default() };
    let seeds: Vec<u64> = parse_range(&a.seeds)?.collect();
    let reports: Vec<_> = seeds.par_iter().map(|&s| gap(&random_instance(&spec, s)?)).collect::<Result<_>>()?;
    if let Some(csv) = &a.csv {
        let rows: Vec<PlotRow> =
            reports.iter().map(|r| PlotRow { ratio: Some(fmt_rational(&r.ratio)), ..PlotRow::default() }).collect();
        export_plot_data(&rows, csv)?;
    }
    let rows: Vec<Value> = seeds
        .iter()
        .zip(&reports)
        .map(|(s, r)| {
            let mut m = gap_json(r);
            m.insert("seed".into(), json!(s));
            Value::Object(m)
        })
        .collect();
    let worst = reports.iter().map(|r| r.ratio.clone()).max();
    let mut map = Map::new();
    map.insert("runs".into(), Value::Array(rows));
    if let Some(w) = worst {
        put(&mut map, "max_ratio", &w);
    }
    Ok(Value::Object(map))
}

/// Appends config-file values for flags missing from `args`. Top-level keys
/// apply to every command; `[gen.layered]`-style tables to that command.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let config = strings.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=").map(str::to_string).or_else(|| (a == "--config").then(|| strings.get(i + 1).cloned()).flatten())
    });
    let Some(config) = config else { return Ok(args) };
    let text = read_text(Path::new(&config))?;
    let table: toml::Table = text.parse().map_err(|e| Error::Parse(format!("{config}: {e}")))?;

    let mut command = Cli::command();
    let mut path = Vec::new();
    for token in strings.iter().skip(1) {
        if let Some(sub) = command.find_subcommand(token) {
            path.push(token.clone());
            command = sub.clone();
        }
    }
    let mut entries: Vec<(String, toml::Value)> =
        table.iter().filter(|(_, v)| !v.is_table()).map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut section = Some(&table);
    for p in &path {
        section = section.and_then(|t| t.get(p)).and_then(toml::Value::as_table);
    }
    if let Some(t) = section.filter(|_| !path.is_empty()) {
        entries.extend(t.iter().filter(|(_, v)| !v.is_table()).map(|(k, v)| (k.clone(), v.clone())));
    }
    let mut out = args;
    for (key, value) in entries {
        let flag = format!("--{}", key.replace('_', "-"));
        if strings.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        let values = match value {
            toml::Value::Array(items) => items,
            other => vec![other],
        };
        for v in values {
            match v {
                toml::Value::Boolean(true) => out.push(flag.clone().into()),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => out.extend([flag.clone().into(), s.into()]),
                toml::Value::Integer(i) => out.extend([flag.clone().into(), i.to_string().into()]),
                toml::Value::Float(f) => out.extend([flag.clone().into(), f.to_string().into()]),
                other => return Err(Error::Parse(format!("{config}: unsupported value for {key}: {other}"))),
            }
        }
    }
    Ok(out)
}

fn error_json(kind: &str, message: &str, code: i32) -> String {
    let value = json!({"error": {"kind": kind, "message": message, "exit_code": code}});
    serde_json::to_string_pretty(&value).expect("error serializes")
}

/// Parses `args`, runs the command and prints its report. Returns the exit
/// code: 0 success, 2 invalid input, 3 scale cap, 4 infeasible.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> std::io::Result<i32> {
    let args = match expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string(), e.exit_code()));
            return Ok(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => {
            eprintln!("{}", error_json("usage", e.to_string().trim(), 2));
            return Ok(2);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(Error::invalid(format!("thread pool: {e}"))),
    };
    match result {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
            match &cli.report {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string(), e.exit_code()));
            Ok(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests;
