use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rrl_harness::compare::ComparisonRow;
use rrl_harness::oracle_tables::oracle_tables;
use rrl_harness::plot::{emit_plot_data, write_csv, write_frontier};
use rrl_harness::record::write_records;
use rrl_harness::run::check_gate;
use rrl_harness::sweep::frontier_rows;
use rrl_harness::{
    compare_baselines, frontier_sweep, run_experiment, summarize_cells, CellSummary,
    ExperimentConfig, HarnessError,
};

#[derive(Parser)]
#[command(
    name = "rrl",
    version,
    about = "Constrained engagement-learning experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a config without running anything.
    Validate(Common),
    /// Train and evaluate the configured agent on every seed and cell.
    Run(Common),
    /// Run the sweep grid and write frontier points with their Pareto index.
    Sweep(Common),
    /// Run all four agents on the same seeds and write a comparison table.
    Compare(Common),
    /// Exact policy table, frontier and constrained optima for a tabular env.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment TOML file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(short, long, default_value_t = 1)]
    workers: usize,
    /// Replace the configured seed list with this single seed.
    #[arg(short, long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf), HarnessError> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seeds = vec![seed];
        }
        config.validate()?;
        let out = self
            .out
            .clone()
            .unwrap_or_else(|| config.output_dir.clone());
        Ok((config, out))
    }
}

fn prepare(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn gate(config: &ExperimentConfig, summaries: &[CellSummary]) -> Result<(), HarnessError> {
    match &config.gate {
        Some(g) => check_gate(g, summaries),
        None => Ok(()),
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Validate(args) => {
            let (config, _) = args.load()?;
            println!(
                "ok: {} run(s) on the {} environment",
                config.unit_count()?,
                config.environment.name()
            );
            Ok(())
        }
        Command::Run(args) => {
            let (config, out) = args.load()?;
            let records = run_experiment(&config, args.workers)?;
            prepare(&out)?;
            write_records(&out.join("runs.jsonl"), &records)?;
            emit_plot_data(&records, &out)?;
            let summaries = summarize_cells(&config, &records)?;
            println!("wrote {} record(s) to {}", records.len(), out.display());
            gate(&config, &summaries)
        }
        Command::Sweep(args) => {
            let (config, out) = args.load()?;
            let (records, rows) = frontier_sweep(&config, args.workers)?;
            prepare(&out)?;
            write_records(&out.join("runs.jsonl"), &records)?;
            emit_plot_data(&records, &out)?;
            write_frontier(&out.join("frontier.csv"), &rows)?;
            println!(
                "wrote {} frontier point(s) to {}",
                rows.len(),
                out.display()
            );
            gate(&config, &summarize_cells(&config, &records)?)
        }
        Command::Compare(args) => {
            let (config, out) = args.load()?;
            let (records, summaries) = compare_baselines(&config, args.workers)?;
            prepare(&out)?;
            write_records(&out.join("runs.jsonl"), &records)?;
            emit_plot_data(&records, &out)?;
            let rows: Vec<ComparisonRow> = summaries.iter().map(ComparisonRow::from).collect();
            write_csv(&out.join("compare.csv"), &rows)?;
            write_frontier(&out.join("frontier.csv"), &frontier_rows(&summaries)?)?;
            for r in &rows {
                println!(
                    "{:<16} cell {:>2}  engagement {:.3}  alignment {:.3}  cost {:.3}  violations {:.3}",
                    r.agent,
                    r.cell,
                    r.engagement_rate,
                    r.emotional_alignment,
                    r.safety_cost,
                    r.violation_probability
                );
            }
            gate(&config, &summaries)
        }
        Command::Oracle(args) => {
            let (config, out) = args.load()?;
            let tables = oracle_tables(&config)?;
            prepare(&out)?;
            write_csv(&out.join("oracle_policies.csv"), &tables.policies)?;
            write_frontier(&out.join("oracle_frontier.csv"), &tables.frontier)?;
            write_csv(&out.join("oracle_constrained.csv"), &tables.constrained)?;
            for row in &tables.constrained {
                match row.optimal_value {
                    Some(v) => println!(
                        "d={}: optimum {v:.6} (lambda* {:.6})",
                        row.threshold_d,
                        row.lambda_star.unwrap_or(0.0)
                    ),
                    None => println!("d={}: infeasible", row.threshold_d),
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage mistakes count as config errors, not runtime failures.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
