use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use chrono::Utc;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dsnsched::balance::{initial_weights, BalancerConfig};
use dsnsched::evaluate::{compute_metrics, validate_schedule, ValidationReport};
use dsnsched::ingest::{
    desk_network, desk_profiles, generate_synthetic, parse_instance, parse_profiles_csv,
    serialize_instance, summarize, w44_2016_network, w44_2016_profiles, NetworkSpec,
};
use dsnsched::instance::ProblemInstance;
use dsnsched::manifest::{instance_hash, RunManifest, SolutionDoc};
use dsnsched::milp::{build_model, Ablation, ModelOptions};
use dsnsched::pipeline::{run_schedule, validate_options, RunOptions, SolverChoice};
use dsnsched::report;
use dsnsched::solve::{export_mps, SOLVER_ENV};
use dsnsched::splitter::{expand_splits, SplitRounding};
use dsnsched::Error;

#[derive(Parser)]
#[command(name = "dsnsched", version, about = "Weekly antenna scheduling as a 0/1 program")]
struct Cli {
    /// Increase log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with iterative reweighting and write the results.
    Schedule(ScheduleArgs),
    /// Check a solution against the scheduling rules.
    Validate(PairArgs),
    /// Print satisfaction metrics for a solution.
    Metrics(MetricsArgs),
    /// Write the program in MPS format.
    ExportMps(ExportArgs),
    /// Generate a synthetic week.
    Generate(GenerateArgs),
    /// Emit plot data for a solution as CSV.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Require setup and teardown to fall inside the view period too.
    #[arg(long)]
    strict_containment: bool,
    /// At most one track per view period.
    #[arg(long)]
    single_interval: bool,
    /// Experimental: drop constraint families, e.g. `2j,2k-2m`.
    #[arg(long, value_name = "LIST")]
    ablate: Option<String>,
    #[arg(long, value_enum, default_value_t = RoundingArg::Exact)]
    split_rounding: RoundingArg,
    /// Prioritized missions, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "MISSIONS")]
    prioritize: Vec<String>,
    /// Completion weight of prioritized missions.
    #[arg(long, default_value_t = 5.0)]
    priority_weight: f64,
}

impl ModelArgs {
    fn options(&self) -> anyhow::Result<ModelOptions> {
        let ablate = match &self.ablate {
            Some(list) => Ablation::parse(list)?,
            None => Ablation::default(),
        };
        if !ablate.is_none() {
            log::warn!("ablation is experimental: schedules may break the dropped rules");
        }
        Ok(ModelOptions {
            strict_containment: self.strict_containment,
            single_interval: self.single_interval,
            ablate,
            ..ModelOptions::default()
        })
    }

    fn prioritized(&self) -> BTreeSet<String> {
        self.prioritize
            .iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum RoundingArg {
    Exact,
    Conservative,
}

impl From<RoundingArg> for SplitRounding {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Exact => SplitRounding::Exact,
            RoundingArg::Conservative => SplitRounding::Conservative,
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    instance: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Initial time limit per solve, seconds.
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    /// Rounds without progress before stopping.
    #[arg(long, default_value_t = 10)]
    iterations: u32,
    #[arg(long, default_value_t = 0.15)]
    threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    threshold_increment: f64,
    /// Hard cap on the number of solves.
    #[arg(long, default_value_t = 50)]
    max_solves: usize,
    /// `oracle` or a command template with {mps}, {sol} and {time_limit_s}.
    #[arg(long, env = SOLVER_ENV)]
    solver: Option<String>,
    /// Recorded in the manifest.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_delimiter = ',', value_name = "MISSIONS")]
    prioritize: Vec<String>,
}

#[derive(Args)]
struct ExportArgs {
    instance: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Create every variable and fix the unreachable ones with rows.
    #[arg(long)]
    dense: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// `w44-2016`, `desk` or a CSV file of mission profiles.
    #[arg(long, default_value = "w44-2016")]
    profiles: String,
    /// `w44-2016`, `desk` or a JSON network file.
    #[arg(long)]
    network: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Gantt,
    Heatmap,
    Usage,
}

#[derive(Args)]
struct ReportArgs {
    solution: PathBuf,
    #[arg(long, value_enum)]
    kind: ReportKind,
    /// Instance the solution was produced for.
    #[arg(long)]
    instance: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Exit status for each failure class.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Backend { .. } | Error::OracleLimit(_) | Error::Decode { .. } | Error::Balance(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(Error::Backend { diagnostics, .. }) =
                e.chain().find_map(|c| c.downcast_ref::<Error>())
            {
                if !diagnostics.is_empty() {
                    eprintln!("{diagnostics}");
                }
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Schedule(a) => cmd_schedule(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::ExportMps(a) => cmd_export(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Report(a) => cmd_report(a),
    }
}

struct Loaded {
    instance: ProblemInstance,
    hash: String,
}

fn load_instance(path: &Path) -> anyhow::Result<Loaded> {
    let bytes = fs::read(path).with_context(|| format!("ingest: cannot read {}", path.display()))?;
    let instance =
        parse_instance(&bytes).with_context(|| format!("ingest: {}", path.display()))?;
    let hash = instance_hash(&instance);
    Ok(Loaded { instance, hash })
}

fn load_solution(path: &Path, instance_hash: &str) -> anyhow::Result<SolutionDoc> {
    let bytes = fs::read(path).with_context(|| format!("ingest: cannot read {}", path.display()))?;
    let doc = SolutionDoc::parse(&bytes).with_context(|| format!("ingest: {}", path.display()))?;
    doc.check_instance(instance_hash)
        .context("ingest: stale solution")?;
    Ok(doc)
}

fn write_out(path: Option<&Path>, text: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(std::io::stdout().write_all(text)?),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("output types serialize");
    v.push(b'\n');
    v
}

#[derive(Serialize)]
struct ScheduleConfigEcho<'a> {
    time_limit_s: f64,
    iterations: u32,
    threshold: f64,
    threshold_increment: f64,
    max_solves: usize,
    prioritize: &'a BTreeSet<String>,
    priority_weight: f64,
    strict_containment: bool,
    single_interval: bool,
    ablate: Ablation,
    split_rounding: RoundingArg,
}

#[derive(Serialize)]
struct MetricsDoc<'a, M: Serialize> {
    manifest_hash: &'a str,
    chosen_index: usize,
    cap_fired: bool,
    metrics: &'a M,
    validation: &'a ValidationReport,
}

#[derive(Serialize)]
struct LogLine<'a, R: Serialize> {
    manifest_hash: &'a str,
    #[serde(flatten)]
    record: &'a R,
}

fn cmd_schedule(a: ScheduleArgs) -> anyhow::Result<u8> {
    let started_at = Utc::now();
    let loaded = load_instance(&a.instance)?;
    let options = a.model.options().context("config")?;
    if !(a.time_limit > 0.0 && a.time_limit.is_finite()) {
        bail!(Error::Config("time limit must be a positive number of seconds".into()));
    }
    let Some(solver) = a.solver.as_deref() else {
        bail!(Error::Config(format!(
            "no solver configured: pass --solver oracle, a command template, or set {SOLVER_ENV}"
        )));
    };
    let prioritized = a.model.prioritized();
    let balancer = BalancerConfig {
        eta0: a.threshold,
        incr_threshold: a.threshold_increment,
        k_max: a.iterations,
        k_time: Duration::from_secs_f64(a.time_limit),
        priority_multiplier: a.model.priority_weight,
        prioritized: prioritized.clone(),
        max_solves: a.max_solves,
    };
    let run_opts = RunOptions {
        model: options,
        split_rounding: a.model.split_rounding.into(),
        balancer,
        solver: SolverChoice::parse(solver),
    };
    let outcome = run_schedule(&loaded.instance, &run_opts, &mut |r| {
        eprintln!(
            "solve {:>2}  threshold {:.2}  U_AVG {:>5.1}%  U_MAX {:>5.1}%  d {:.4}",
            r.solve,
            r.threshold,
            100.0 * r.u_avg,
            100.0 * r.u_max,
            r.d
        );
    })
    .context("solve")?;

    let echo = ScheduleConfigEcho {
        time_limit_s: a.time_limit,
        iterations: a.iterations,
        threshold: a.threshold,
        threshold_increment: a.threshold_increment,
        max_solves: a.max_solves,
        prioritize: &prioritized,
        priority_weight: a.model.priority_weight,
        strict_containment: options.strict_containment,
        single_interval: options.single_interval,
        ablate: options.ablate,
        split_rounding: a.model.split_rounding,
    };
    let manifest = RunManifest::new(
        &loaded.instance,
        serde_json::to_value(&echo)?,
        outcome.backend_id.clone(),
        a.seed,
        started_at,
    );
    let chosen = outcome.balance.chosen();
    let doc = SolutionDoc::new(
        manifest,
        run_opts.split_rounding,
        options,
        chosen.objective,
        chosen.schedule.clone(),
    );

    fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("report: cannot create {}", a.out_dir.display()))?;
    let out = |name: &str| a.out_dir.join(name);
    fs::write(out("solution.json"), to_json(&doc)).context("report: solution.json")?;
    let metrics_doc = MetricsDoc {
        manifest_hash: &doc.manifest_hash,
        chosen_index: outcome.balance.chosen_index,
        cap_fired: outcome.balance.cap_fired,
        metrics: &chosen.metrics,
        validation: &outcome.validation,
    };
    fs::write(out("metrics.json"), to_json(&metrics_doc)).context("report: metrics.json")?;
    let mut log = Vec::new();
    for r in &outcome.balance.log {
        serde_json::to_writer(
            &mut log,
            &LogLine {
                manifest_hash: &doc.manifest_hash,
                record: r,
            },
        )?;
        log.push(b'\n');
    }
    fs::write(out("iterations.jsonl"), log).context("report: iterations.jsonl")?;

    print!("{}", chosen.metrics.table(Some(outcome.validation.valid_fraction)));
    println!("{:<40}{:>10}", "Solves", outcome.balance.log.len());
    if outcome.balance.cap_fired {
        println!("solve cap reached before the balancer converged");
    }
    Ok(if outcome.validation.is_valid() { 0 } else { 1 })
}

fn print_validation(report: &ValidationReport) {
    println!(
        "{:.1}% valid ({} of {} tracks)",
        report.valid_fraction, report.n_valid, report.n_tracks
    );
    for t in report.tracks.iter().filter(|t| !t.violations.is_empty()) {
        let tags: Vec<String> = t
            .violations
            .iter()
            .map(|r| serde_json::to_value(r).unwrap().as_str().unwrap_or_default().to_string())
            .collect();
        println!("  {} on {}: {}", t.activity_id, t.view_period_id, tags.join(", "));
    }
    for g in &report.global {
        println!("  {g}");
    }
}

fn cmd_validate(a: PairArgs) -> anyhow::Result<u8> {
    let loaded = load_instance(&a.instance)?;
    let doc = load_solution(&a.solution, &loaded.hash)?;
    let (expanded, registry) =
        expand_splits(&loaded.instance, doc.split_rounding).context("split")?;
    let report = validate_schedule(&expanded, &registry, &doc.schedule, &validate_options(&doc.options))
        .context("evaluate")?;
    if a.json {
        write_out(None, &to_json(&report))?;
    } else {
        print_validation(&report);
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn cmd_metrics(a: MetricsArgs) -> anyhow::Result<u8> {
    let loaded = load_instance(&a.pair.instance)?;
    let doc = load_solution(&a.pair.solution, &loaded.hash)?;
    let (expanded, registry) =
        expand_splits(&loaded.instance, doc.split_rounding).context("split")?;
    let prioritized: BTreeSet<String> = a.prioritize.into_iter().collect();
    let metrics = compute_metrics(&expanded, &registry, &doc.schedule, &prioritized)
        .context("evaluate")?;
    if a.pair.json {
        write_out(None, &to_json(&metrics))?;
    } else {
        print!("{}", metrics.table(None));
    }
    Ok(0)
}

fn cmd_export(a: ExportArgs) -> anyhow::Result<u8> {
    let loaded = load_instance(&a.instance)?;
    let mut options = a.model.options().context("config")?;
    options.prune = !a.dense;
    let (expanded, registry) =
        expand_splits(&loaded.instance, a.model.split_rounding.into()).context("split")?;
    let config = BalancerConfig {
        priority_multiplier: a.model.priority_weight,
        prioritized: a.model.prioritized(),
        ..BalancerConfig::default()
    };
    let weights = initial_weights(&expanded, &config).context("config")?;
    let model = build_model(&expanded, &registry, &weights, &options).context("model")?;
    for w in &model.warnings {
        log::warn!("{w}");
    }
    write_out(a.out.as_deref(), &export_mps(&model))?;
    Ok(0)
}

fn cmd_generate(a: GenerateArgs) -> anyhow::Result<u8> {
    let (profiles, default_net) = match a.profiles.as_str() {
        "w44-2016" => (w44_2016_profiles(), "w44-2016"),
        "desk" => (desk_profiles(), "desk"),
        path => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("ingest: cannot read {path}"))?;
            (parse_profiles_csv(&text).with_context(|| format!("ingest: {path}"))?, "w44-2016")
        }
    };
    let network: NetworkSpec = match a.network.as_deref().unwrap_or(default_net) {
        "w44-2016" => w44_2016_network(),
        "desk" => desk_network(),
        path => {
            let text =
                fs::read(path).with_context(|| format!("ingest: cannot read {path}"))?;
            serde_json::from_slice(&text)
                .map_err(|e| Error::Parse {
                    path: path.to_string(),
                    message: e.to_string(),
                })
                .context("ingest")?
        }
    };
    let instance = generate_synthetic(&profiles, &network, a.seed).context("generate")?;
    let s = summarize(&instance);
    let (resources, activities, hours, missions) = s.table_row();
    eprintln!("{resources} resources, {activities} activities, {hours} h requested, {missions} missions");
    write_out(a.out.as_deref(), &serialize_instance(&instance))?;
    Ok(0)
}

fn cmd_report(a: ReportArgs) -> anyhow::Result<u8> {
    let loaded = load_instance(&a.instance)?;
    let doc = load_solution(&a.solution, &loaded.hash)?;
    let text = match a.kind {
        ReportKind::Gantt => report::gantt_csv(&doc.schedule),
        ReportKind::Heatmap => report::heatmap_csv(&loaded.instance, &doc.schedule).context("report")?,
        ReportKind::Usage => {
            report::usage_csv(&report::usage(&loaded.instance, &doc.schedule).context("report")?)
        }
    };
    write_out(a.out.as_deref(), text.as_bytes())?;
    Ok(0)
}
