//! `anticoloc`: configuration enumeration, model building and export, exact
//! solving, the randomized baseline, validation and experiment batches.
//!
//! Exit codes: 0 on success (an infeasible instance is a successful solve
//! with status `infeasible`), 1 on domain errors and invalid placements,
//! 2 on usage errors.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use anticoloc::configs::{count_table, ConfigCache, ConfigSet, EnumerateOptions, DEFAULT_CAP};
use anticoloc::heuristic::{place_randomized, run_batch, HeuristicParams};
use anticoloc::mip::{build, choose_partition, estimate_size, write_mps_to, BuildOptions, Formulation, LinearModel, Partition, VarMap};
use anticoloc::model::{load_instance, preset_instance, Catalog, Experiment, Instance, PmId, Policy};
use anticoloc::solution::{cost, decode, import_values, utilization, validate, Placement};
use anticoloc::solver::{read_mps_from, solve_mip, MipParams, MipResult, MipStatus};
use anticoloc::Error;

use output::{float, opt_float, Format, Table};

#[derive(Parser)]
#[command(name = "anticoloc", version, about = "VM placement with disk anti-colocation")]
struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for parallel work [default: one per core].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for cached configuration sets.
    #[arg(long, global = true, env = "ANTICOLOC_CACHE", hide_env_values = true, default_value = ".anticoloc-cache")]
    cache_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the feasible configurations of PM types.
    Enumerate(EnumerateArgs),
    /// Build a formulation and write it as MPS.
    Build(BuildArgs),
    /// Print the exact size of a formulation without building it.
    Estimate(EstimateArgs),
    /// Solve an instance or an MPS model with the built-in solver.
    Solve(SolveArgs),
    /// Run the randomized first-fit baseline.
    Heuristic(HeuristicArgs),
    /// Check a placement against every constraint.
    Validate(ValidateArgs),
    /// Per-PM resource utilization of a valid placement.
    Report(ReportArgs),
    /// Batch driver over the experiment presets.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyChoice {
    /// Every VM type may run on every PM type.
    None,
    /// Large PM types only host large VM types.
    Reservation,
}

impl PolicyChoice {
    fn policy(self) -> Policy {
        match self {
            PolicyChoice::None => Policy::allow_all(),
            PolicyChoice::Reservation => Policy::large_pm_reservation(),
        }
    }
}

#[derive(Args)]
struct EnumerateArgs {
    /// PM type to enumerate.
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pm_type: Option<String>,
    /// Enumerate every PM type of the catalog in parallel.
    #[arg(long)]
    all: bool,
    /// Placement policy restricting VM types per PM type.
    #[arg(long, value_enum, default_value_t = PolicyChoice::None)]
    policy: PolicyChoice,
    /// Stop and report `cap-exceeded` beyond this many configurations.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// List every configuration instead of counts.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InstanceSource {
    /// Instance JSON file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Built-in experiment preset, I to VII.
    #[arg(long)]
    preset: Option<Experiment>,
}

impl InstanceSource {
    fn load(&self) -> Result<Instance> {
        load_source(self.instance.as_deref(), self.preset)
    }
}

fn load_source(file: Option<&Path>, preset: Option<Experiment>) -> Result<Instance> {
    match (file, preset) {
        (Some(path), _) => Ok(load_instance(&read(path)?)?),
        (None, Some(exp)) => Ok(preset_instance(exp)),
        (None, None) => bail!("an instance is required"),
    }
}

#[derive(Args, Clone)]
struct ModelOptions {
    /// PM types assigned directly under COMB, comma separated.
    #[arg(long, value_delimiter = ',')]
    direct_types: Vec<String>,
    /// Under COMB without --direct-types, PM types with more configurations
    /// than this are assigned directly.
    #[arg(long, default_value_t = 1000)]
    threshold: usize,
    /// Only enumerate configurations within the instance's demand.
    #[arg(long)]
    instance_cap: bool,
    /// Use 1 as the big-M of configuration-side PM usage rows.
    #[arg(long)]
    big_m_one: bool,
    /// Enumeration cap per PM type.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// f1, f2 or comb.
    #[arg(long)]
    formulation: Formulation,
    #[command(flatten)]
    model: ModelOptions,
    /// MPS output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the variable map, needed to decode external solutions.
    #[arg(long)]
    varmap: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// f1, f2 or comb.
    #[arg(long)]
    formulation: Formulation,
    #[command(flatten)]
    model: ModelOptions,
    /// List variable and constraint families instead of totals.
    #[arg(long)]
    families: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Solve this MPS model instead of an instance.
    #[arg(long, required_unless_present_any = ["instance", "preset"], conflicts_with_all = ["instance", "preset"])]
    model: Option<PathBuf>,
    /// Instance JSON file.
    #[arg(long, conflicts_with = "preset")]
    instance: Option<PathBuf>,
    /// Built-in experiment preset, I to VII.
    #[arg(long)]
    preset: Option<Experiment>,
    /// f1, f2 or comb.
    #[arg(long, default_value = "f2")]
    formulation: Formulation,
    #[command(flatten)]
    options: ModelOptions,
    #[command(flatten)]
    limits: SolveLimits,
    /// Write the decoded placement as JSON.
    #[arg(long)]
    placement_out: Option<PathBuf>,
    /// Write nonzero variable values as a `{name: value}` JSON object.
    #[arg(long)]
    values_out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SolveLimits {
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Branch-and-bound node limit.
    #[arg(long)]
    node_limit: Option<usize>,
    /// Relative gap at which to stop.
    #[arg(long, default_value_t = 0.0)]
    gap: f64,
}

impl SolveLimits {
    fn params(&self) -> Result<MipParams> {
        let time_limit = match self.time_limit {
            Some(s) if !(s.is_finite() && s > 0.0) => bail!("--time-limit must be positive"),
            s => s.map(Duration::from_secs_f64),
        };
        Ok(MipParams { time_limit, gap_tolerance: self.gap, node_limit: self.node_limit, record_trace: false })
    }
}

#[derive(Args)]
struct HeuristicArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long)]
    seed: u64,
    /// Number of independent runs.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Write the cheapest feasible run's placement as JSON.
    #[arg(long)]
    placement_out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Placement JSON file.
    #[arg(long, required_unless_present = "values", conflicts_with = "values")]
    placement: Option<PathBuf>,
    /// Externally solved `{name: value}` JSON for the model given by --model and --varmap.
    #[arg(long, requires_all = ["model", "varmap"])]
    values: Option<PathBuf>,
    /// MPS model the values belong to.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Variable map written by `build --varmap`.
    #[arg(long)]
    varmap: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Placement JSON file.
    #[arg(long)]
    placement: PathBuf,
    /// Aggregate per PM type instead of per PM.
    #[arg(long)]
    by_type: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// `sizes` for every preset's model sizes, or a preset I to VII.
    #[arg(long)]
    id: String,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Heuristic runs per preset.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Heuristic seed of the first run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also solve this formulation in-process, with demand-capped configurations.
    #[arg(long)]
    solve: Option<Formulation>,
    /// Wall-clock limit in seconds for --solve.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Enumeration cap per PM type.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

struct Ctx {
    format: Format,
    cache: ConfigCache,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let ctx = Ctx { format: cli.format, cache: ConfigCache::new(cli.cache_dir) };
    match cli.command {
        Command::Enumerate(a) => cmd_enumerate(&ctx, a),
        Command::Build(a) => cmd_build(&ctx, a),
        Command::Estimate(a) => cmd_estimate(&ctx, a),
        Command::Solve(a) => cmd_solve(&ctx, a),
        Command::Heuristic(a) => cmd_heuristic(&ctx, a),
        Command::Validate(a) => cmd_validate(&ctx, a),
        Command::Report(a) => cmd_report(&ctx, a),
        Command::Experiment(a) => cmd_experiment(&ctx, a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_model(path: &Path) -> Result<LinearModel> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    read_mps_from(io::BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(ctx: &Ctx, table: &Table) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    table.write(ctx.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn label(catalog: &Catalog, pm: PmId) -> String {
    format!("{}#{}", catalog.pm_types()[pm.ty].name, pm.ord)
}

fn cmd_enumerate(ctx: &Ctx, a: EnumerateArgs) -> Result<()> {
    let catalog = Catalog::builtin();
    let policy = a.policy.policy();
    let types: Vec<usize> = match &a.pm_type {
        Some(name) => vec![catalog.pm_index(name)?],
        None => (0..catalog.pm_types().len()).collect(),
    };
    let opts = EnumerateOptions { cap: a.cap, instance_cap: None };
    let results: Vec<Result<ConfigSet, Error>> = types
        .par_iter()
        .map(|&v| ctx.cache.enumerate_with(&catalog.pm_types()[v], &catalog, &policy, opts))
        .collect();
    let mut table = if a.list { Table::new(&["pm_type", "config", "vector"]) } else { Table::new(&["pm_type", "count"]) };
    for (&v, result) in types.iter().zip(results) {
        let name = &catalog.pm_types()[v].name;
        match (result, a.list) {
            (Ok(set), false) => table.push(vec![json!(name), json!(set.len())]),
            (Ok(set), true) => {
                for t in 0..set.len() {
                    let parts: Vec<String> = set
                        .vector(t)
                        .iter()
                        .zip(catalog.vm_types())
                        .filter(|(&w, _)| w > 0)
                        .map(|(w, vm)| format!("{}x{w}", vm.name))
                        .collect();
                    table.push(vec![json!(name), json!(t), json!(parts.join(" "))]);
                }
            }
            (Err(Error::CapExceeded { .. }), false) => table.push(vec![json!(name), json!("cap-exceeded")]),
            (Err(e), _) => return Err(e.into()),
        }
    }
    emit(ctx, &table)
}

fn partition_for(inst: &Instance, form: Formulation, opts: &ModelOptions) -> Result<Option<Partition>> {
    if form != Formulation::Comb {
        return Ok(None);
    }
    if opts.direct_types.is_empty() {
        let counts = count_table(&inst.catalog, &inst.policy, opts.threshold);
        return Ok(Some(choose_partition(inst, &counts, opts.threshold)));
    }
    let direct = opts
        .direct_types
        .iter()
        .map(|n| inst.catalog.pm_index(n.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(Partition::by_types(inst, &direct)))
}

/// Configuration sets of every PM type that has configuration-side PMs.
fn sets_for(
    ctx: &Ctx,
    inst: &Instance,
    form: Formulation,
    partition: Option<&Partition>,
    opts: &ModelOptions,
) -> Result<Vec<ConfigSet>> {
    let mut types: Vec<usize> = match (form, partition) {
        (Formulation::F1, _) => Vec::new(),
        (Formulation::Comb, Some(p)) => p.p2.iter().map(|pm| pm.ty).collect(),
        _ => inst.pms().iter().map(|pm| pm.ty).collect(),
    };
    types.dedup();
    let cap = EnumerateOptions { cap: opts.cap, instance_cap: opts.instance_cap.then_some(&inst.vm_demand[..]) };
    let sets: Result<Vec<ConfigSet>, Error> = types
        .par_iter()
        .map(|&v| ctx.cache.enumerate_with(&inst.catalog.pm_types()[v], &inst.catalog, &inst.policy, cap))
        .collect();
    Ok(sets?)
}

fn counts_of(inst: &Instance, sets: &[ConfigSet]) -> Vec<Option<usize>> {
    inst.catalog
        .pm_types()
        .iter()
        .map(|pm| sets.iter().find(|s| s.pm_type == pm.name).map(ConfigSet::len))
        .collect()
}

fn cmd_build(ctx: &Ctx, a: BuildArgs) -> Result<()> {
    let inst = a.source.load()?;
    let partition = partition_for(&inst, a.formulation, &a.model)?;
    let sets = sets_for(ctx, &inst, a.formulation, partition.as_ref(), &a.model)?;
    let opts = BuildOptions { config_big_m_one: a.model.big_m_one };
    let (model, map) = build(&inst, a.formulation, partition.as_ref(), &sets, opts)?;
    match &a.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = io::BufWriter::new(file);
            write_mps_to(&model, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            write_mps_to(&model, &mut w)?;
            w.flush()?;
        }
    }
    if let Some(path) = &a.varmap {
        write_file(path, &serde_json::to_string(&map)?)?;
    }
    eprintln!("{}: {} variables, {} constraints", a.formulation, model.num_vars(), model.num_constraints());
    Ok(())
}

fn cmd_estimate(ctx: &Ctx, a: EstimateArgs) -> Result<()> {
    let inst = a.source.load()?;
    let partition = partition_for(&inst, a.formulation, &a.model)?;
    let sets = sets_for(ctx, &inst, a.formulation, partition.as_ref(), &a.model)?;
    let report = estimate_size(&inst, a.formulation, partition.as_ref(), &counts_of(&inst, &sets))?;
    let table = if a.families {
        let mut t = Table::new(&["kind", "family", "count"]);
        for (name, n) in &report.variable_families {
            t.push(vec![json!("variables"), json!(name), json!(n)]);
        }
        for (name, n) in &report.constraint_families {
            t.push(vec![json!("constraints"), json!(name), json!(n)]);
        }
        t
    } else {
        let mut t = Table::new(&["formulation", "variables", "constraints"]);
        t.push(vec![json!(a.formulation.to_string()), json!(report.variables), json!(report.constraints)]);
        t
    };
    emit(ctx, &table)
}

fn status_name(s: MipStatus) -> &'static str {
    match s {
        MipStatus::Optimal => "optimal",
        MipStatus::Infeasible => "infeasible",
        MipStatus::TimeLimitWithIncumbent => "limit-with-incumbent",
        MipStatus::TimeLimitNoIncumbent => "limit-no-incumbent",
    }
}

fn solve_row(r: &MipResult) -> Vec<Value> {
    vec![
        json!(status_name(r.status)),
        opt_float(r.objective),
        if r.best_bound.is_finite() { float(r.best_bound) } else { Value::Null },
        opt_float(r.gap),
        json!(r.nodes),
        float(r.seconds),
        opt_float(r.root_lp),
    ]
}

const SOLVE_HEADERS: [&str; 7] = ["status", "objective", "best_bound", "gap", "nodes", "seconds", "root_lp"];

fn cmd_solve(ctx: &Ctx, a: SolveArgs) -> Result<()> {
    let params = a.limits.params()?;
    if let Some(path) = &a.model {
        let model = read_model(path)?;
        let r = solve_mip(&model, &params)?;
        if let (Some(out), Some(values)) = (&a.values_out, &r.values) {
            write_values(out, &model.variables.iter().map(|v| v.name.as_str()).collect::<Vec<_>>(), values)?;
        }
        let mut table = Table::new(&SOLVE_HEADERS);
        table.push(solve_row(&r));
        return emit(ctx, &table);
    }
    let inst = load_source(a.instance.as_deref(), a.preset)?;
    let partition = partition_for(&inst, a.formulation, &a.options)?;
    let sets = sets_for(ctx, &inst, a.formulation, partition.as_ref(), &a.options)?;
    let opts = BuildOptions { config_big_m_one: a.options.big_m_one };
    let (model, map) = build(&inst, a.formulation, partition.as_ref(), &sets, opts)?;
    let r = solve_mip(&model, &params)?;
    let placement = r.values.as_deref().map(|v| decode(&map, &inst, v)).transpose()?;
    if let Some(p) = &placement {
        let violations = validate(p, &inst);
        if let Some(v) = violations.first() {
            bail!("decoded placement is invalid: {v}");
        }
        if let Some(out) = &a.placement_out {
            write_file(out, &p.to_json(&inst.catalog)?)?;
        }
    }
    if let (Some(out), Some(values)) = (&a.values_out, &r.values) {
        write_values(out, &model.variables.iter().map(|v| v.name.as_str()).collect::<Vec<_>>(), values)?;
    }
    let mut headers = SOLVE_HEADERS.to_vec();
    headers.extend(["cost", "used_pms"]);
    let mut table = Table::new(&headers);
    let mut row = solve_row(&r);
    row.push(placement.as_ref().map_or(Value::Null, |p| json!(cost(p, &inst))));
    row.push(placement.as_ref().map_or(Value::Null, |p| json!(p.used_pms().len())));
    table.push(row);
    emit(ctx, &table)
}

fn write_values(path: &Path, names: &[&str], values: &[f64]) -> Result<()> {
    let map: serde_json::Map<String, Value> = names
        .iter()
        .zip(values)
        .filter(|(_, &v)| v != 0.0)
        .map(|(n, &v)| (n.to_string(), float(v)))
        .collect();
    write_file(path, &serde_json::to_string_pretty(&map)?)
}

fn cmd_heuristic(ctx: &Ctx, a: HeuristicArgs) -> Result<()> {
    let inst = a.source.load()?;
    let stats = run_batch(&inst, HeuristicParams { seed: a.seed, runs: a.runs })?;
    if let Some(path) = &a.placement_out {
        let best = stats.runs.iter().filter(|r| r.cost.is_some()).min_by_key(|r| (r.cost, r.run));
        match best.and_then(|r| place_randomized(&inst, r.seed)) {
            Some(p) => write_file(path, &p.to_json(&inst.catalog)?)?,
            None => eprintln!("no feasible run; {} not written", path.display()),
        }
    }
    if ctx.format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
        return Ok(());
    }
    let mut table = Table::new(&["run", "seed", "status", "cost", "used_pms"]);
    for r in &stats.runs {
        let status = if r.cost.is_some() { "feasible" } else { "infeasible" };
        table.push(vec![json!(r.run), json!(r.seed), json!(status), json!(r.cost), json!(r.used_pms)]);
    }
    emit(ctx, &table)?;
    if ctx.format == Format::Table {
        println!(
            "\nmean {}  min {}  max {}  std {}  infeasible {}",
            fmt_opt(stats.mean.map(|m| format!("{m:.2}"))),
            fmt_opt(stats.min),
            fmt_opt(stats.max),
            fmt_opt(stats.std_dev.map(|s| format!("{s:.2}"))),
            stats.infeasible
        );
    }
    Ok(())
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn load_placement(inst: &Instance, a: &ValidateArgs) -> Result<Placement> {
    if let Some(path) = &a.placement {
        return Ok(Placement::from_json(&read(path)?, &inst.catalog)?);
    }
    let (Some(values), Some(model), Some(varmap)) = (&a.values, &a.model, &a.varmap) else {
        bail!("either --placement or --values with --model and --varmap is required");
    };
    let model = read_model(model)?;
    let map: VarMap = serde_json::from_str(&read(varmap)?).context("parsing the variable map")?;
    if map.roles.len() != model.num_vars() {
        bail!("variable map has {} roles but the model has {} variables", map.roles.len(), model.num_vars());
    }
    let values = import_values(&model, &read(values)?)?;
    Ok(decode(&map, inst, &values)?)
}

fn cmd_validate(ctx: &Ctx, a: ValidateArgs) -> Result<()> {
    let inst = a.source.load()?;
    let placement = load_placement(&inst, &a)?;
    let violations = validate(&placement, &inst);
    let mut table = Table::new(&["status", "detail"]);
    if violations.is_empty() {
        let detail = format!("cost {}, {} used PMs", cost(&placement, &inst), placement.used_pms().len());
        table.push(vec![json!("valid"), json!(detail)]);
    }
    for v in &violations {
        table.push(vec![json!("violation"), json!(v.to_string())]);
    }
    emit(ctx, &table)?;
    if !violations.is_empty() {
        return Err(anyhow!("placement has {} violations", violations.len()));
    }
    Ok(())
}

fn cmd_report(ctx: &Ctx, a: ReportArgs) -> Result<()> {
    let inst = a.source.load()?;
    let placement = Placement::from_json(&read(&a.placement)?, &inst.catalog)?;
    if let Some(v) = validate(&placement, &inst).first() {
        bail!("placement is invalid: {v}");
    }
    let report = utilization(&placement, &inst);
    let ratio_cells = |r: &anticoloc::solution::Ratios| {
        vec![float(r.vcpu), float(r.memory), float(r.disk_count), float(r.disk_capacity)]
    };
    let table = if a.by_type {
        let mut t = Table::new(&["pm_type", "used_pms", "vcpu", "memory", "disk_count", "disk_capacity"]);
        for row in &report.by_type {
            let mut cells = vec![json!(row.pm_type), json!(row.used_pms)];
            cells.extend(ratio_cells(&row.ratios));
            t.push(cells);
        }
        t
    } else {
        let mut t = Table::new(&["pm", "pm_type", "vms", "vcpu", "memory", "disk_count", "disk_capacity"]);
        for row in &report.pms {
            let mut cells = vec![json!(label(&inst.catalog, row.pm)), json!(row.pm_type), json!(row.vms)];
            cells.extend(ratio_cells(&row.ratios));
            t.push(cells);
        }
        t
    };
    emit(ctx, &table)
}

/// Formulations reported per preset; COMB assigns l-type PMs directly.
fn preset_models(inst: &Instance) -> Vec<(Formulation, Option<Partition>)> {
    let direct: Vec<usize> =
        (0..inst.catalog.pm_types().len()).filter(|&v| inst.catalog.pm_types()[v].name.starts_with('l')).collect();
    vec![
        (Formulation::F1, None),
        (Formulation::F2, None),
        (Formulation::Comb, Some(Partition::by_types(inst, &direct))),
    ]
}

/// Size of one preset model, or `None` when a needed enumeration passes the cap.
fn preset_size(
    ctx: &Ctx,
    inst: &Instance,
    form: Formulation,
    partition: Option<&Partition>,
    cap: usize,
) -> Result<Option<(usize, usize)>> {
    let opts = ModelOptions { direct_types: Vec::new(), threshold: 0, instance_cap: false, big_m_one: false, cap };
    let sets = match sets_for(ctx, inst, form, partition, &opts) {
        Ok(s) => s,
        Err(e) if matches!(e.downcast_ref::<Error>(), Some(Error::CapExceeded { .. })) => return Ok(None),
        Err(e) => return Err(e),
    };
    let r = estimate_size(inst, form, partition, &counts_of(inst, &sets))?;
    Ok(Some((r.variables, r.constraints)))
}

fn cmd_experiment(ctx: &Ctx, a: ExperimentArgs) -> Result<()> {
    let table = if a.id.eq_ignore_ascii_case("sizes") {
        let mut t = Table::new(&["experiment", "formulation", "variables", "constraints"]);
        for exp in Experiment::ALL {
            let inst = preset_instance(exp);
            for (form, partition) in preset_models(&inst) {
                if let Some((vars, rows)) = preset_size(ctx, &inst, form, partition.as_ref(), a.cap)? {
                    t.push(vec![json!(exp.to_string()), json!(form.to_string()), json!(vars), json!(rows)]);
                }
            }
        }
        t
    } else {
        experiment_report(ctx, &a)?
    };
    match &a.out {
        Some(path) => {
            let mut buf = Vec::new();
            table.write(ctx.format, &mut buf)?;
            fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
        None => emit(ctx, &table),
    }
}

fn experiment_report(ctx: &Ctx, a: &ExperimentArgs) -> Result<Table> {
    let exp: Experiment = a.id.parse()?;
    let inst = preset_instance(exp);
    let stats = run_batch(&inst, HeuristicParams { seed: a.seed, runs: a.runs })?;
    let mut t = Table::new(&[
        "experiment",
        "formulation",
        "variables",
        "constraints",
        "status",
        "objective",
        "best_bound",
        "seconds",
        "heuristic_mean",
        "heuristic_min",
        "heuristic_max",
        "heuristic_std",
        "heuristic_infeasible",
    ]);
    for (form, partition) in preset_models(&inst) {
        let Some((vars, rows)) = preset_size(ctx, &inst, form, partition.as_ref(), a.cap)? else {
            continue;
        };
        let mut row = vec![json!(exp.to_string()), json!(form.to_string()), json!(vars), json!(rows)];
        if a.solve == Some(form) {
            let opts =
                ModelOptions { direct_types: Vec::new(), threshold: 0, instance_cap: true, big_m_one: false, cap: a.cap };
            let sets = sets_for(ctx, &inst, form, partition.as_ref(), &opts)?;
            let (model, _) = build(&inst, form, partition.as_ref(), &sets, BuildOptions::default())?;
            let limits = SolveLimits { time_limit: Some(a.time_limit), node_limit: None, gap: 0.0 };
            match solve_mip(&model, &limits.params()?) {
                Ok(r) => row.extend([
                    json!(status_name(r.status)),
                    opt_float(r.objective),
                    if r.best_bound.is_finite() { float(r.best_bound) } else { Value::Null },
                    float(r.seconds),
                ]),
                Err(Error::ModelTooLarge { .. }) => row.extend([json!("too-large"), Value::Null, Value::Null, Value::Null]),
                Err(e) => return Err(e.into()),
            }
        } else {
            row.extend([Value::Null, Value::Null, Value::Null, Value::Null]);
        }
        row.extend([
            opt_float(stats.mean),
            json!(stats.min),
            json!(stats.max),
            opt_float(stats.std_dev),
            json!(stats.infeasible),
        ]);
        t.push(row);
    }
    Ok(t)
}
