use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use auv_planner::cost_model::{CostBreakdown, TimeMode};
use auv_planner::de_engine::{DonorMode, SelectionMode};
use auv_planner::geo_env::{write_pgm, SyntheticTerrain};
use auv_planner::planner::{plan_observed, write_outputs, Summary};
use auv_planner::scenario::load_scenario;
use clap::{Parser, Subcommand, ValueEnum};

/// Time-optimal AUV path planning with Differential Evolution over B-splines.
#[derive(Parser)]
#[command(name = "auv-plan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a path for a scenario file and write the result files.
    Plan(PlanArgs),
    /// Write a synthetic terrain as a binary PGM.
    Terrain(TerrainArgs),
}

#[derive(clap::Args)]
struct PlanArgs {
    scenario: PathBuf,
    /// Optimizer seed; overrides `de.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generation budget; overrides `de.iter_max`.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, value_enum)]
    time_mode: Option<TimeArg>,
    #[arg(long, value_enum)]
    donor: Option<DonorArg>,
    #[arg(long, value_enum)]
    selection: Option<SelectionArg>,
    /// Also write scene.svg.
    #[arg(long)]
    render: bool,
    /// Write every candidate's cost breakdown per generation to this CSV.
    #[arg(long)]
    candidate_log: Option<PathBuf>,
    /// Suppress the one-line report on stdout.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(clap::Args)]
struct TerrainArgs {
    out: PathBuf,
    #[arg(long, default_value_t = 250)]
    width: usize,
    #[arg(long, default_value_t = 250)]
    height: usize,
    #[arg(long, default_value_t = 8)]
    blobs: usize,
    #[arg(long, default_value_t = 0)]
    coast: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TimeArg {
    Literal,
    Current,
}

#[derive(Clone, Copy, ValueEnum)]
enum DonorArg {
    Weighted,
    Rand1,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Trial,
    ThreeWay,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(args) => run_plan(args),
        Command::Terrain(args) => run_terrain(args).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether the best path is collision-free.
fn run_plan(args: PlanArgs) -> Result<bool> {
    let mut scenario = load_scenario(&args.scenario).with_context(|| format!("loading {}", args.scenario.display()))?;
    if let Some(seed) = args.seed {
        scenario.de.seed = seed;
    }
    if let Some(iters) = args.iters {
        scenario.de.iter_max = iters;
    }
    if let Some(t) = args.time_mode {
        scenario.time_mode = match t {
            TimeArg::Literal => TimeMode::Literal,
            TimeArg::Current => TimeMode::CurrentAware,
        };
    }
    if let Some(d) = args.donor {
        scenario.de.donor_mode = match d {
            DonorArg::Weighted => DonorMode::WeightedTriplet,
            DonorArg::Rand1 => DonorMode::PlainRand1,
        };
    }
    if let Some(s) = args.selection {
        scenario.de.selection = match s {
            SelectionArg::Trial => SelectionMode::TrialOnly,
            SelectionArg::ThreeWay => SelectionMode::ThreeWay,
        };
    }
    let out_dir = args.out.unwrap_or_else(|| scenario.output_dir.clone());
    let env = scenario.build_environment().context("building the environment")?;

    let mut log = match &args.candidate_log {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            writeln!(w, "{}", CostBreakdown::CSV_HEADER)?;
            Some(w)
        }
        None => None,
    };
    let mut log_err = None;
    let outcome = plan_observed(&scenario, &env, |pop, objective| {
        let Some(w) = log.as_mut() else { return };
        if log_err.is_some() {
            return;
        }
        for (i, member) in pop.members.iter().enumerate() {
            if let Err(e) = objective.breakdown(member).write_csv_row(&mut *w, pop.generation, i) {
                log_err = Some(e);
                return;
            }
        }
    })?;
    if let Some(e) = log_err {
        return Err(e).context("writing the candidate log");
    }
    if let Some(mut w) = log {
        w.flush()?;
    }

    write_outputs(&out_dir, &scenario, &env, &outcome, args.render)
        .with_context(|| format!("writing to {}", out_dir.display()))?;
    let summary = Summary::new(&scenario, &outcome);
    if !args.quiet {
        println!(
            "{} seed={} cost={:.3} time={:.1}s length={:.1}m generations={} wall={:.2}s -> {}",
            if summary.feasible { "feasible" } else { "INFEASIBLE" },
            summary.seed,
            summary.best_cost,
            summary.time,
            summary.path_length,
            summary.generations,
            summary.wall_time,
            out_dir.display()
        );
    }
    Ok(summary.feasible)
}

fn run_terrain(args: TerrainArgs) -> Result<()> {
    let terrain = SyntheticTerrain {
        width: args.width,
        height: args.height,
        blobs: args.blobs,
        blob_radius: [6.0, 18.0],
        coast: args.coast,
        seed: args.seed,
    };
    let raster = terrain.raster(&[])?;
    std::fs::write(&args.out, write_pgm(&raster)).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}
