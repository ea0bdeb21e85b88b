//! `adsched`: command-line surface over the scheduling toolkit.
//!
//! Exit codes: 0 ok/feasible, 1 infeasible or violated rows, 2 usage,
//! 3 I/O or malformed input, 4 internal limit hit (node budget, no
//! solution within the time limit).

use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Args, Parser, Subcommand};

use adsched::exact::{exact_solve, ExactParams};
use adsched::metrics::{run_report, AnytimeLog};
use adsched::mip::{check_assignment, emit_ooe, encode_solution, to_lp, VarAssignment};
use adsched::model::{load_instance, subsample, Axis, Instance, RelaxFlags, Schedule};
use adsched::solve::{lns_solve, SolveParams};
use adsched::validate::{balance_profile, makespan, occupancy_profile, validate};

const EXIT_INFEASIBLE: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_LIMIT: i32 = 4;

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

#[derive(Parser)]
#[command(name = "adsched", version, about = "Aircraft disassembly scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Comma-separated constraint relaxations: any of `requirements`/`r`,
/// `capacity`/`c`, `balance`/`b`, or `all`.
fn parse_relax(text: &str) -> Result<RelaxFlags, String> {
    let mut flags = RelaxFlags::NONE;
    for token in text.split(',').filter(|t| !t.is_empty()) {
        match token.trim() {
            "requirements" | "r" => flags.drop_requirements = true,
            "capacity" | "c" => flags.drop_capacity = true,
            "balance" | "b" => flags.drop_balance = true,
            "all" => flags = RelaxFlags::ALL,
            other => {
                return Err(format!(
                    "unknown relaxation '{other}' (expected requirements/r, capacity/c, balance/b or all)"
                ))
            }
        }
    }
    Ok(flags)
}

#[derive(Args, Clone)]
struct RelaxArg {
    /// Constraints to drop, e.g. `--relax r,c` or `--relax balance`.
    #[arg(long, value_parser = parse_relax, default_value = "")]
    relax: RelaxFlags,
}

#[derive(Subcommand)]
enum Command {
    /// Check a schedule against an instance and print a violation report.
    Validate {
        instance: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        relax: RelaxArg,
    },
    /// Run the anytime heuristic solver and write the best schedule plus
    /// an `elapsed_seconds,makespan` incumbent log.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Stop after this many neighborhood iterations (for reproducible runs).
        #[arg(long)]
        max_iterations: Option<u64>,
        #[command(flatten)]
        relax: RelaxArg,
        /// Schedule output path (default: `<instance>.sol.json`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Incumbent log output path (default: `<instance>.anytime.csv`).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Prove the optimal makespan by branch and bound (desk-scale instances).
    Exact {
        instance: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        node_limit: u64,
        #[command(flatten)]
        relax: RelaxArg,
        /// Write the optimal schedule here when one exists.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the on/off event-based MIP formulation as an LP file.
    EmitMip {
        instance: PathBuf,
        #[command(flatten)]
        relax: RelaxArg,
        /// Output path (default: `<instance>.lp`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a schedule into the MIP's variables and evaluate every row.
    CheckLp {
        instance: PathBuf,
        /// Schedule to encode; omit when checking a raw `--vars` file.
        #[arg(required_unless_present = "vars")]
        solution: Option<PathBuf>,
        /// Check an external `name value` variable assignment instead.
        #[arg(long)]
        vars: Option<PathBuf>,
        /// Dump the checked assignment as a `name value` file.
        #[arg(long)]
        write_vars: Option<PathBuf>,
        #[command(flatten)]
        relax: RelaxArg,
    },
    /// Write a random task-induced sub-instance.
    Subsample {
        instance: PathBuf,
        /// Number of tasks to keep.
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (default: `<instance>.sub<N>.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score an incumbent log with the primal gap / primal integral.
    Metrics {
        log: PathBuf,
        /// Best known makespan for the instance.
        #[arg(long)]
        best: i64,
        /// Integration horizon in seconds.
        #[arg(short = 'T', long, default_value_t = 3600.0)]
        until: f64,
    },
    /// Export per-technician Gantt rows and occupancy/balance traces as CSV.
    ExportGantt {
        instance: PathBuf,
        solution: PathBuf,
        /// Directory for the three CSV files (default: alongside the solution).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the benchmark matrix from a JSON config: every instance under
    /// the full constraint set and each relaxation variant.
    Bench {
        config: PathBuf,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        max_iterations: Option<u64>,
    },
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::io(format!("create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::io(format!("write {}: {e}", path.display())))
}

fn load_instance_file(path: &Path) -> Result<Instance, Failure> {
    load_instance(&read_text(path)?)
        .map_err(|e| Failure::io(format!("load {}: {e}", path.display())))
}

fn load_schedule_file(path: &Path) -> Result<Schedule, Failure> {
    Schedule::from_json(&read_text(path)?)
        .map_err(|e| Failure::io(format!("load {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_validate(instance: &Path, solution: &Path, relax: RelaxFlags) -> CmdResult {
    let inst = load_instance_file(instance)?;
    let sol = load_schedule_file(solution)?;
    let report = validate(&inst, &sol, relax);
    if report.feasible() {
        let ms = makespan(&sol, &inst)
            .map_err(|e| Failure::io(format!("makespan: {e}")))?;
        println!("feasible, makespan {ms}");
        Ok(0)
    } else {
        println!("{}", report.summary());
        print!("{}", report.to_json_lines());
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_solve(
    instance: &Path,
    params: &SolveParams,
    out: Option<PathBuf>,
    log: Option<PathBuf>,
) -> CmdResult {
    let inst = load_instance_file(instance)?;
    let out = out.unwrap_or_else(|| with_suffix(instance, ".sol.json"));
    let log_path = log.unwrap_or_else(|| with_suffix(instance, ".anytime.csv"));
    match lns_solve(&inst, params) {
        Ok((schedule, anytime)) => {
            let ms = makespan(&schedule, &inst)
                .map_err(|e| Failure::io(format!("makespan: {e}")))?;
            write_text(&out, &schedule.to_json())?;
            write_text(&log_path, &anytime.to_csv())?;
            println!(
                "makespan {ms}; solution -> {}; log -> {}",
                out.display(),
                log_path.display()
            );
            Ok(0)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn cmd_exact(
    instance: &Path,
    node_limit: u64,
    relax: RelaxFlags,
    out: Option<PathBuf>,
) -> CmdResult {
    let inst = load_instance_file(instance)?;
    let res = exact_solve(
        &inst,
        &ExactParams {
            relax,
            node_limit,
            ..ExactParams::default()
        },
    );
    println!(
        "{}",
        serde_json::json!({
            "optimum": res.optimum,
            "proven": res.proven,
            "nodes": res.nodes,
        })
    );
    if let (Some(path), Some(best)) = (out, &res.best) {
        write_text(&path, &best.to_json())?;
    }
    if !res.proven {
        return Ok(EXIT_LIMIT);
    }
    Ok(if res.optimum.is_some() { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_emit_mip(instance: &Path, relax: RelaxFlags, out: Option<PathBuf>) -> CmdResult {
    let inst = load_instance_file(instance)?;
    if inst.tasks.len() > 400 {
        eprintln!(
            "warning: {} tasks — the event-based model grows quadratically and will be very large",
            inst.tasks.len()
        );
    }
    let model = emit_ooe(&inst, relax);
    let out = out.unwrap_or_else(|| instance.with_extension("lp"));
    write_text(&out, &to_lp(&model))?;
    println!(
        "{} variables, {} rows -> {}",
        model.variables.len(),
        model.rows.len(),
        out.display()
    );
    Ok(0)
}

fn cmd_check_lp(
    instance: &Path,
    solution: Option<&Path>,
    vars: Option<&Path>,
    write_vars: Option<&Path>,
    relax: RelaxFlags,
) -> CmdResult {
    let inst = load_instance_file(instance)?;
    let model = emit_ooe(&inst, relax);
    let assignment = if let Some(vars) = vars {
        VarAssignment::from_var_file(&read_text(vars)?)
            .map_err(|e| Failure::io(format!("load {}: {e}", vars.display())))?
    } else {
        let solution = solution.ok_or_else(|| Failure::usage("a solution or --vars is required"))?;
        let sol = load_schedule_file(solution)?;
        encode_solution(&inst, &sol)
            .map_err(|e| Failure::io(format!("encode: {e}")))?
    };
    if let Some(path) = write_vars {
        write_text(path, &assignment.to_var_file())?;
    }
    let violated = check_assignment(&model, &assignment)
        .map_err(|e| Failure::io(format!("check: {e}")))?;
    println!("{} violated rows", violated.len());
    for name in violated.iter().take(20) {
        println!("  {name}");
    }
    Ok(if violated.is_empty() { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_subsample(instance: &Path, n: usize, seed: u64, out: Option<PathBuf>) -> CmdResult {
    let inst = load_instance_file(instance)?;
    let sub = subsample(&inst, n, seed)
        .map_err(|e| Failure::usage(format!("subsample: {e}")))?;
    let out = out.unwrap_or_else(|| with_suffix(instance, &format!(".sub{n}.json")));
    write_text(&out, &sub.to_json())?;
    println!("{} tasks -> {}", sub.tasks.len(), out.display());
    Ok(0)
}

fn cmd_metrics(log: &Path, best: i64, until: f64) -> CmdResult {
    let log = AnytimeLog::from_csv(&read_text(log)?)
        .map_err(|e| Failure::io(format!("parse log: {e}")))?;
    let report = run_report(&log, best, until);
    println!("P={:.3}", report.primal_integral);
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(0)
}

fn profile_csv(header: &str, rows: impl Iterator<Item = (String, i64, i64)>) -> String {
    let mut out = format!("{header}\n");
    for (label, time, value) in rows {
        out.push_str(&format!("{label},{time},{value}\n"));
    }
    out
}

fn cmd_export_gantt(instance: &Path, solution: &Path, out_dir: Option<PathBuf>) -> CmdResult {
    let inst = load_instance_file(instance)?;
    let sol = load_schedule_file(solution)?;
    let dir = out_dir.unwrap_or_else(|| {
        solution
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    let stem = solution
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "schedule".into());

    // per-technician rows, sorted for stable diffs
    let mut rows: Vec<(String, String, i64, i64)> = Vec::new();
    for (task_id, entry) in &sol.entries {
        let Some(task) = inst.task(task_id) else { continue };
        for tech in &entry.techs {
            rows.push((
                tech.clone(),
                task_id.clone(),
                entry.start,
                entry.start + task.duration,
            ));
        }
    }
    rows.sort();
    let mut gantt = String::from("tech,task,start,end\n");
    for (tech, task, start, end) in rows {
        gantt.push_str(&format!("{tech},{task},{start},{end}\n"));
    }
    let gantt_path = dir.join(format!("{stem}-gantt.csv"));
    write_text(&gantt_path, &gantt)?;

    let occupancy = profile_csv(
        "location,time,occupancy",
        inst.locations
            .iter()
            .filter(|l| l.capacity.is_some())
            .flat_map(|l| {
                let profile = occupancy_profile(&inst, &sol, &l.id).expect("location exists");
                let mut level = 0;
                profile
                    .deltas()
                    .iter()
                    .map(|&(t, d)| {
                        level += d;
                        (l.id.clone(), t, level)
                    })
                    .collect::<Vec<_>>()
            }),
    );
    let occupancy_path = dir.join(format!("{stem}-occupancy.csv"));
    write_text(&occupancy_path, &occupancy)?;

    let balance = profile_csv(
        "axis,time,balance",
        [(Axis::AftFwd, "aft-fwd"), (Axis::LeftRight, "left-right")]
            .into_iter()
            .flat_map(|(axis, label)| {
                let profile = balance_profile(&inst, &sol, axis);
                let mut level = 0;
                profile
                    .deltas()
                    .iter()
                    .map(|&(t, d)| {
                        level += d;
                        (label.to_string(), t, level)
                    })
                    .collect::<Vec<_>>()
            }),
    );
    let balance_path = dir.join(format!("{stem}-balance.csv"));
    write_text(&balance_path, &balance)?;

    println!(
        "wrote {}, {}, {}",
        gantt_path.display(),
        occupancy_path.display(),
        balance_path.display()
    );
    Ok(0)
}

#[derive(serde::Deserialize)]
#[serde(rename_all = "camelCase")]
struct BenchConfig {
    instances: Vec<PathBuf>,
    #[serde(default = "default_time_limit")]
    time_limit_seconds: f64,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    /// Relaxation variants to run next to the full constraint set.
    #[serde(default = "default_variants")]
    variants: Vec<String>,
    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
    #[serde(default)]
    max_iterations: Option<u64>,
}

fn default_time_limit() -> f64 {
    3600.0
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_variants() -> Vec<String> {
    ["none", "requirements", "capacity", "balance", "all"]
        .map(String::from)
        .to_vec()
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("bench-out")
}

fn cmd_bench(
    config: &Path,
    time_limit: Option<f64>,
    out_dir: Option<PathBuf>,
    max_iterations: Option<u64>,
) -> CmdResult {
    let mut cfg: BenchConfig = serde_json::from_str(&read_text(config)?)
        .map_err(|e| Failure::io(format!("parse {}: {e}", config.display())))?;
    if let Some(t) = time_limit {
        cfg.time_limit_seconds = t;
    }
    if let Some(d) = out_dir {
        cfg.out_dir = d;
    }
    if max_iterations.is_some() {
        cfg.max_iterations = max_iterations;
    }
    if cfg.instances.is_empty() {
        return Err(Failure::usage("bench config lists no instances"));
    }
    if cfg.time_limit_seconds <= 0.0 {
        return Err(Failure::usage("time limit must be positive"));
    }

    let mut results = String::from("instance,variant,seed,makespan\n");
    println!(
        "{:<24} {:<14} {:>6} {:>9}",
        "instance", "variant", "seed", "makespan"
    );
    for path in &cfg.instances {
        let inst = load_instance_file(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        for variant in &cfg.variants {
            let relax = match variant.as_str() {
                "none" => RelaxFlags::NONE,
                other => parse_relax(other).map_err(Failure::usage)?,
            };
            for &seed in &cfg.seeds {
                let params = SolveParams {
                    time_limit_seconds: cfg.time_limit_seconds,
                    seed,
                    relax,
                    max_iterations: cfg.max_iterations,
                    ..SolveParams::default()
                };
                let cell = match lns_solve(&inst, &params) {
                    Ok((schedule, log)) => {
                        let ms = makespan(&schedule, &inst)
                            .map_err(|e| Failure::io(format!("makespan: {e}")))?;
                        let run_stem = format!("{label}-{variant}-s{seed}");
                        write_text(
                            &cfg.out_dir.join(format!("{run_stem}.sol.json")),
                            &schedule.to_json(),
                        )?;
                        write_text(
                            &cfg.out_dir.join(format!("{run_stem}.anytime.csv")),
                            &log.to_csv(),
                        )?;
                        ms.to_string()
                    }
                    Err(_) => "-".to_string(),
                };
                println!("{label:<24} {variant:<14} {seed:>6} {cell:>9}");
                results.push_str(&format!("{label},{variant},{seed},{cell}\n"));
            }
        }
    }
    write_text(&cfg.out_dir.join("results.csv"), &results)?;
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate {
            instance,
            solution,
            relax,
        } => cmd_validate(&instance, &solution, relax.relax),
        Command::Solve {
            instance,
            time_limit,
            seed,
            workers,
            max_iterations,
            relax,
            out,
            log,
        } => cmd_solve(
            &instance,
            &SolveParams {
                time_limit_seconds: time_limit,
                seed,
                workers,
                max_iterations,
                relax: relax.relax,
                ..SolveParams::default()
            },
            out,
            log,
        ),
        Command::Exact {
            instance,
            node_limit,
            relax,
            out,
        } => cmd_exact(&instance, node_limit, relax.relax, out),
        Command::EmitMip {
            instance,
            relax,
            out,
        } => cmd_emit_mip(&instance, relax.relax, out),
        Command::CheckLp {
            instance,
            solution,
            vars,
            write_vars,
            relax,
        } => cmd_check_lp(
            &instance,
            solution.as_deref(),
            vars.as_deref(),
            write_vars.as_deref(),
            relax.relax,
        ),
        Command::Subsample {
            instance,
            n,
            seed,
            out,
        } => cmd_subsample(&instance, n, seed, out),
        Command::Metrics { log, best, until } => cmd_metrics(&log, best, until),
        Command::ExportGantt {
            instance,
            solution,
            out_dir,
        } => cmd_export_gantt(&instance, &solution, out_dir),
        Command::Bench {
            config,
            time_limit,
            out_dir,
            max_iterations,
        } => cmd_bench(&config, time_limit, out_dir, max_iterations),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            exit(failure.code);
        }
    }
}
