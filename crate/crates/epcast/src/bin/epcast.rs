//! Command-line front end: run experiments, tune infectivities, and inspect
//! co-location traces. The library's examples/ directory shows the same
//! capabilities as code.

use clap::{Args, Parser, Subcommand};
use epcast::harness::{self, ExperimentConfig, RunMode};
use epcast::models::{self, EpidemicParams, ModelKind};
use epcast::traces;
use epcast::tuner::{self, TuneRequest};
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "epcast",
    about = "Controlled gossip dissemination: tuned spread over mobile contact graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicated experiment and write results under --out-dir.
    Run(RunArgs),
    /// Compute the per-copy probability for a reach target and deadline.
    Tune(TuneArgs),
    /// Summarise a co-location trace as a slotted contact graph.
    TraceStats(TraceStatsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config JSON (mutually exclusive with --preset).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario, e.g. rwp-512-psi100 (see `epcast run --help` output).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for results.csv, aggregate.json, events-rep0.jsonl.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Run replications across all cores.
    #[arg(long)]
    parallel: bool,
    /// Override the config's injection mode.
    #[arg(long, value_enum)]
    mode: Option<CliMode>,
    /// Per-copy probability when the mode is fixed-beta.
    #[arg(long)]
    fixed_beta: Option<f64>,
    /// Override the config's replication count.
    #[arg(long)]
    replications: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CliMode {
    Epcast,
    EpcastHet,
    FixedBeta,
}

impl From<CliMode> for RunMode {
    fn from(m: CliMode) -> RunMode {
        match m {
            CliMode::Epcast => RunMode::Epcast,
            CliMode::EpcastHet => RunMode::EpcastHet,
            CliMode::FixedBeta => RunMode::FixedBeta,
        }
    }
}

#[derive(Args)]
struct TuneArgs {
    /// Population size.
    #[arg(long)]
    population: u32,
    /// Average contacts per host per round.
    #[arg(long)]
    mean_degree: f64,
    /// Removal rate per round.
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// Deadline, in rounds.
    #[arg(long)]
    deadline_rounds: f64,
    /// Reach target in (0, 1].
    #[arg(long)]
    psi: f64,
    /// Acceptable reach error at the deadline.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Tune for the worst-connected hosts at this minimum degree.
    #[arg(long)]
    k_min: Option<f64>,
    /// Write the tuned model trajectory (t,s,i,r rows) here.
    #[arg(long, value_name = "FILE")]
    trajectory_csv: Option<PathBuf>,
    /// Re-run the forward model at the tuned probability and report reach.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct TraceStatsArgs {
    /// Co-location CSV: node_id,location_id,start_s,end_s with a header.
    #[arg(long, value_name = "FILE")]
    trace: PathBuf,
    /// Slot width in seconds.
    #[arg(long, default_value_t = 60.0)]
    slot: f64,
    /// Drop sessions shorter than this many seconds (after clipping).
    #[arg(long)]
    min_duration: Option<f64>,
    /// Clip sessions to [window-start, window-end) before filtering.
    #[arg(long, requires = "window_end")]
    window_start: Option<f64>,
    #[arg(long, requires = "window_start")]
    window_end: Option<f64>,
    /// Write every slot's edge list (slot,node_a,node_b) here.
    #[arg(long, value_name = "FILE")]
    edges_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Tune(args) => cmd_tune(args),
        Command::TraceStats(args) => cmd_trace_stats(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), String> {
    let mut config: ExperimentConfig = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            ExperimentConfig::from_json(&text).map_err(|e| e.to_string())?
        }
        (None, Some(name)) => ExperimentConfig::preset(name).ok_or_else(|| {
            format!(
                "unknown preset {name:?}; available: {}",
                ExperimentConfig::preset_names().join(", ")
            )
        })?,
        _ => return Err("pass exactly one of --config or --preset".into()),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(mode) = args.mode {
        config.mode = mode.into();
    }
    if let Some(beta) = args.fixed_beta {
        config.fixed_beta = Some(beta);
    }
    if let Some(reps) = args.replications {
        config.replications = reps;
        config.max_replications = config.max_replications.max(reps);
    }

    let out = harness::run_experiment(&config, args.parallel).map_err(|e| e.to_string())?;
    harness::write_outputs(&out, &args.out_dir).map_err(|e| e.to_string())?;

    println!(
        "scenario {} ({} nodes, seed {}): {} replications",
        out.aggregate.scenario,
        out.aggregate.node_count,
        config.master_seed,
        out.aggregate.replications
    );
    for t in &out.aggregate.targets {
        let flag = if t.delivered.high_variance {
            "  [high variance]"
        } else {
            ""
        };
        let timing = match t.mean_time_to_target {
            Some(rounds) => format!("{rounds:.1} rounds"),
            None => "not reached".to_string(),
        };
        println!(
            "  target {:.2}: delivered {:.3} +/- {:.3}, replicas/host {:.2}, \
             reached {:.0}% in {} (mean){flag}",
            t.target,
            t.delivered.mean,
            t.delivered.stderr,
            t.replicas_per_host.mean,
            t.reached_share * 100.0,
            timing
        );
    }
    println!("results in {}", args.out_dir.display());
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<(), String> {
    let mut req = TuneRequest::new(
        args.population,
        args.mean_degree,
        args.gamma,
        args.deadline_rounds,
        args.psi,
    );
    if let Some(tol) = args.tolerance {
        req.tolerance = tol;
    }
    let result = match args.k_min {
        Some(k_min) => tuner::tune_lambda_heterogeneous(&req, k_min),
        None => tuner::tune_lambda(&req),
    }
    .map_err(|e| e.to_string())?;

    println!("lambda_star {:.8}", result.lambda_star);
    println!("achieved_fraction {:.6}", result.achieved_fraction);
    println!("iterations {}", result.iterations);
    println!("feasible {}", result.feasible);
    if !result.feasible {
        println!(
            "note: target {} is out of reach within {} rounds; best effort shown",
            args.psi, args.deadline_rounds
        );
    }

    if args.check || args.trajectory_csv.is_some() {
        let degree = args.k_min.unwrap_or(args.mean_degree);
        let params = EpidemicParams::degree_adjusted(
            args.population,
            result.lambda_star,
            args.gamma,
            degree,
            ModelKind::Sir,
        );
        let step = models::DEFAULT_STEP.min(0.5 / (result.lambda_star * degree + args.gamma).max(1e-9));
        let traj = models::solve(&params, args.deadline_rounds, step).map_err(|e| e.to_string())?;
        if args.check {
            let reach = traj
                .reached_fraction(args.deadline_rounds)
                .map_err(|e| e.to_string())?;
            println!("forward_check reach {reach:.6} (target {})", args.psi);
        }
        if let Some(path) = args.trajectory_csv {
            let mut w = BufWriter::new(
                File::create(&path).map_err(|e| format!("creating {}: {e}", path.display()))?,
            );
            models::write_trajectory_csv(&traj, &mut w).map_err(|e| e.to_string())?;
            println!("trajectory written to {}", path.display());
        }
    }
    Ok(())
}

fn cmd_trace_stats(args: TraceStatsArgs) -> Result<(), String> {
    let file = File::open(&args.trace)
        .map_err(|e| format!("opening {}: {e}", args.trace.display()))?;
    let mut records = traces::parse_colocation(file).map_err(|e| e.to_string())?;
    if args.min_duration.is_some() || args.window_start.is_some() {
        let window = match (args.window_start, args.window_end) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        };
        records =
            traces::filter_short_contacts(&records, args.min_duration.unwrap_or(0.0), window);
    }
    let tvg = traces::build_graph(&records, args.slot).map_err(|e| e.to_string())?;

    let series = tvg.degree_series();
    let span_s = tvg.slot_count() as f64 * tvg.slot_s();
    println!("nodes {}", tvg.node_count());
    println!("sessions {}", records.len());
    println!(
        "slots {} x {}s ({}h span)",
        tvg.slot_count(),
        tvg.slot_s(),
        span_s / 3600.0
    );
    let active_slots = series.iter().filter(|s| s.active_count > 0).count();
    println!("slots_with_contacts {active_slots}");
    let mean_over_slots = if active_slots > 0 {
        series.iter().map(|s| s.mean_degree).sum::<f64>() / active_slots as f64
    } else {
        0.0
    };
    let min_degree = series
        .iter()
        .filter(|s| s.active_count > 0)
        .map(|s| s.min_degree)
        .min()
        .unwrap_or(0);
    println!("mean_degree_over_active_slots {mean_over_slots:.3}");
    println!("min_active_degree {min_degree}");
    let peak = series
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.mean_degree.total_cmp(&b.1.mean_degree));
    if let Some((idx, s)) = peak {
        println!(
            "busiest_slot {} (t={}s): mean degree {:.2}, {} active nodes",
            idx,
            tvg.slot_start_s(idx),
            s.mean_degree,
            s.active_count
        );
    }

    if let Some(path) = args.edges_csv {
        let mut w = BufWriter::new(
            File::create(&path).map_err(|e| format!("creating {}: {e}", path.display()))?,
        );
        tvg.write_slot_edges_csv(&mut w).map_err(|e| e.to_string())?;
        println!("edges written to {}", path.display());
    }
    Ok(())
}
