use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use vbm_core::sdp::SolverOptions;
use vbm_harness::commands::{self, RoundMethod};
use vbm_harness::config::{preset, ExperimentConfig};
use vbm_harness::store;

#[derive(Parser)]
#[command(name = "vbm", version, about = "Planted vertex-cut experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment config (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: exact-recovery, lambda-zero, p-zero, lr14, hn-separation.
    #[arg(long)]
    preset: Option<String>,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => anyhow::bail!("pass --config or --preset"),
        };
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write one instance file per (cell, trial).
    Generate(ConfigArgs),
    /// Solve the SDP for one instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Add violated triangle inequalities in rounds.
        #[arg(long)]
        triangles: bool,
    },
    /// Build and check the dual certificate for one instance.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Round a stored solution and print the cut as JSON.
    Round {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: RoundMethod,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Vertex expansion of a set, or the brute-force balanced optimum.
    Expand {
        /// Instance JSON or edge list.
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated vertex set; omitted means brute force.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    /// Run the full pipeline and write CSV outputs.
    Pipeline {
        #[command(flatten)]
        config: ConfigArgs,
        /// Worker threads (default: logical cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a certificate or solution file; exit 0 iff every check passes.
    Verify { instance: PathBuf, artifact: PathBuf },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = args.load()?;
            let out = cfg.resolved_out_dir();
            let paths = commands::cmd_generate(&cfg, &out)?;
            println!("wrote {} instances under {}", paths.len(), out.display());
        }
        Command::Solve { instance, out, tol, triangles } => {
            let inst = commands::load_instance(&instance)?;
            let mut options = SolverOptions { tol_feas: tol, ..SolverOptions::default() };
            options.triangle.enabled = triangles;
            let sol = commands::cmd_solve(&inst, options)?;
            store::write_json(&out, &sol.to_file())?;
            println!(
                "objective {:.6} after {} iterations (converged: {})",
                sol.objective, sol.iterations, sol.converged
            );
        }
        Command::Certify { instance, out } => {
            let inst = commands::load_instance(&instance)?;
            let (cert, report) = commands::cmd_certify(&inst)?;
            store::write_json(&out, &cert)?;
            println!(
                "dual objective {} (integral value {}), certified: {}, failed checks: {:?}",
                report.dual_objective, report.integral_value, report.integrality_certified, report.failed_checks
            );
        }
        Command::Round { instance, solution, method, alpha } => {
            let inst = commands::load_instance(&instance)?;
            let file: vbm_core::sdp::SolutionFile = commands::read_json(&solution)?;
            let sol = file.into_solution()?;
            let value = commands::cmd_round(&inst, &sol, method, alpha)?;
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Command::Expand { graph, set } => {
            let g = commands::load_graph(&graph)?;
            let report = commands::cmd_expand(&g, set.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Pipeline { config, threads } => {
            let cfg = config.load()?;
            let out = cfg.resolved_out_dir();
            let run = commands::cmd_pipeline(&cfg, &out, threads)?;
            for s in &run.summaries {
                println!(
                    "cell {}: {} trials, success {:.2}, recovery {:.2}, errors {}",
                    s.cell.index, s.trials, s.success_rate, s.recovery_rate, s.errors
                );
            }
            println!("{} trials resumed; results in {}", run.resumed, out.display());
        }
        Command::Verify { instance, artifact } => {
            let report = commands::cmd_verify(&instance, &artifact)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            if !report.passed() {
                println!("failed: {}", report.failed().join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("vbm") {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
