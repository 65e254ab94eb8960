//! `qroute`: compile, solve and compare congestion-aware route selection
//! problems from a scenario file.
//!
//! Exit codes: 0 on success, 1 on any input error, 2 when the sampler
//! produced no valid route assignment.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qroute::analysis::{
    compare_models, density_report, energy_cost_curve, select_solution, ComparisonReport, CONGESTION_THRESHOLD,
};
use qroute::export::{comparison_csv, density_csv, energy_cost_csv, qubo_text, var_map_json};
use qroute::network::{load_scenario, CostMode, Penalty, Scenario};
use qroute::qubo::{compile, QuboProblem};
use qroute::routes::{generate_routes, RoutePlan};
use qroute::samplers::{AnnealParams, SamplerKind};
use qroute::{format_g9, Error, Execution};

#[derive(Parser, Debug)]
#[command(name = "qroute", version, about = "Congestion-aware route selection via QUBO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile the scenario and write the QUBO file plus variable map.
    Build(RunArgs),
    /// Sample the QUBO and write samples, the chosen assignment and CSVs.
    Solve(RunArgs),
    /// Compare random choice, density-mode and weighted-mode solutions.
    Compare(RunArgs),
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Cost mode override (weighted|density).
    #[arg(long)]
    mode: Option<CostMode>,
    /// Penalty override: auto or a positive number.
    #[arg(long)]
    penalty: Option<Penalty>,
    #[arg(long, default_value = "anneal")]
    sampler: SamplerKind,
    #[arg(long, default_value_t = 50)]
    num_reads: usize,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if absent.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Annealing seeds used by `compare`; spaced so reads never overlap.
const COMPARE_RUNS: u64 = 5;

enum Failure {
    Input(String),
    NoValidSolution(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoValidSolution => Failure::NoValidSolution(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NoValidSolution(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Compiled {
    scenario: Scenario,
    plan: RoutePlan,
    problem: QuboProblem,
}

fn load(args: &RunArgs) -> Result<Scenario, Failure> {
    let mut scenario = load_scenario(&args.scenario).map_err(|e| match e {
        Error::Io { .. } => Failure::Input(e.to_string()),
        other => Failure::Input(format!("{}: {other}", args.scenario.display())),
    })?;
    if let Some(mode) = args.mode {
        scenario.cost_mode = mode;
    }
    if let Some(penalty) = args.penalty {
        scenario.penalty = penalty;
    }
    Ok(scenario)
}

fn compile_scenario(args: &RunArgs) -> Result<Compiled, Failure> {
    let scenario = load(args)?;
    let plan = generate_routes(&scenario)?;
    let penalty = match scenario.penalty {
        Penalty::Auto => None,
        Penalty::Fixed(k) => Some(k),
    };
    let problem = compile(&plan, scenario.cost_mode, penalty)?;
    Ok(Compiled { scenario, plan, problem })
}

fn anneal_params(args: &RunArgs) -> AnnealParams {
    AnnealParams {
        num_reads: args.num_reads,
        sweeps: args.sweeps,
        seed: args.seed,
        ..Default::default()
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_build(args: &RunArgs) -> Result<(), Failure> {
    let Compiled { problem, .. } = compile_scenario(args)?;
    write(&args.out, "qubo.txt", &qubo_text(&problem))?;
    write(&args.out, "varmap.json", &var_map_json(&problem))?;
    println!("variables  N = {}", problem.n_vars());
    println!("nonzeros   E = {}", problem.coefficients().len());
    println!("penalty    K = {}", format_g9(problem.penalty()));
    println!("offset       = {}", format_g9(problem.offset()));
    println!("wrote {}", args.out.join("qubo.txt").display());
    Ok(())
}

fn cmd_solve(args: &RunArgs) -> Result<(), Failure> {
    let Compiled { scenario, plan, problem } = compile_scenario(args)?;
    let samples = args
        .sampler
        .run(&problem, &plan, &anneal_params(args), Execution::default())?;
    write(&args.out, "samples.json", &(samples.to_json_string() + "\n"))?;

    let chosen = select_solution(&samples, &plan, &problem)?;
    let curve = energy_cost_curve(&samples, &plan, &problem);
    let density = density_report(&chosen, &scenario.network, CONGESTION_THRESHOLD)?;
    write(&args.out, "assignment.json", &(chosen.to_json_string() + "\n"))?;
    write(&args.out, "energy_cost.csv", &energy_cost_csv(&curve))?;
    write(&args.out, "density.csv", &density_csv(&density))?;

    let valid_reads: usize = samples
        .records
        .iter()
        .filter(|r| qroute::analysis::decode(r, &plan, &problem).valid)
        .map(|r| r.occurrences)
        .sum();
    println!(
        "sampler {} ({} records, {valid_reads}/{} valid reads)",
        samples.sampler,
        samples.records.len(),
        samples.total_occurrences()
    );
    println!("energy {}  cost {}", format_g9(chosen.energy), format_g9(chosen.total_cost().unwrap_or(f64::NAN)));
    for (vehicle, option) in &chosen.choices {
        let route = plan.route(*vehicle, *option);
        println!("  vehicle {vehicle}: option {option} segments {:?} (w = {})", route.segments, format_g9(route.weight));
    }
    let flagged: Vec<usize> = density.iter().filter(|r| r.flag).map(|r| r.segment).collect();
    if !flagged.is_empty() {
        println!("congested segments (>= {CONGESTION_THRESHOLD} vehicles): {flagged:?}");
    }
    Ok(())
}

fn cmd_compare(args: &RunArgs) -> Result<(), Failure> {
    let scenario = load(args)?;
    let step = args.num_reads.max(1) as u64;
    let seeds: Vec<u64> = (0..COMPARE_RUNS).map(|t| args.seed.wrapping_add(t * step)).collect();
    let report = compare_models(&scenario, &[args.sampler], &anneal_params(args), &seeds)?;
    write(&args.out, "comparison.csv", &comparison_csv(&report))?;
    print_report(&report);
    Ok(())
}

fn print_report(report: &ComparisonReport) {
    println!("{:<10} {:>12} {:>14} {:>12} {:>13}", "model", "cost", "improvement %", "max density", "mean density");
    for r in &report.rows {
        println!(
            "{:<10} {:>12} {:>14} {:>12} {:>13}",
            r.model,
            format_g9(r.cost),
            format!("{:.2}", r.improvement_pct),
            format_g9(r.max_density),
            format!("{:.3}", r.mean_density)
        );
    }
    if let (Some(d), Some(w)) = (report.row("density"), report.row("weighted")) {
        if d.mean_density > 0.0 {
            println!("mean density ratio weighted/density: {:.3}", w.mean_density / d.mean_density);
        }
    }
    println!("all costs evaluated under the weighted cost function");
}
