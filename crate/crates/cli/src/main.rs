use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bicr_core::harness::{compare_histories, run_experiment, write_csv_file, ExperimentConfig, MatrixSource, RhsPolicy};
use bicr_core::solvers::Status;
use bicr_core::{Method, SolverOutcome};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Run Bi-CG / Bi-CR family solvers and write convergence histories.
#[derive(Parser)]
#[command(name = "bicr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver.
    Solve {
        #[command(flatten)]
        problem: Problem,
        /// cg, cr, bicg, bicr, bicg-at, bicg-smooth or ext-cg-mrs
        #[arg(long)]
        solver: Method,
    },
    /// Run several solvers on the same system and report where their
    /// histories part.
    Compare {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_delimiter = ',', default_value = "bicr,bicg-at,bicg-smooth")]
        solvers: Vec<Method>,
        /// Largest tolerated |log10 relres_a - log10 relres_b|.
        #[arg(long, default_value_t = 0.5)]
        gap_threshold: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Toeplitz,
    Mm,
}

#[derive(Args)]
struct Problem {
    #[arg(long, value_enum, default_value = "toeplitz")]
    matrix: MatrixKind,
    /// Order of the Toeplitz matrix.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Entry on the second subdiagonal of the Toeplitz matrix.
    #[arg(long, default_value_t = 1.2)]
    gamma: f64,
    /// Matrix Market file (with `--matrix mm`).
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Defaults to 10 n.
    #[arg(long)]
    max_iter: Option<usize>,
    /// `ones` for b = A * (1, ..., 1), otherwise a file of whitespace
    /// separated values.
    #[arg(long, default_value = "ones")]
    rhs: String,
    /// Where to write the relres CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Problem {
    fn config(&self, solvers: Vec<Method>) -> Result<ExperimentConfig> {
        let matrix_source = match self.matrix {
            MatrixKind::Toeplitz => MatrixSource::Toeplitz {
                n: self.n,
                gamma: self.gamma,
            },
            MatrixKind::Mm => match &self.path {
                Some(p) => MatrixSource::MatrixMarket(p.clone()),
                None => bail!("--matrix mm needs --path"),
            },
        };
        let rhs_policy = match self.rhs.as_str() {
            "ones" => RhsPolicy::AOnes,
            path => RhsPolicy::FromFile(path.into()),
        };
        Ok(ExperimentConfig {
            matrix_source,
            solvers,
            rhs_policy,
            tolerance: self.tol,
            max_iterations: self.max_iter,
            seed: 0,
            output_path: self.out.clone(),
        })
    }
}

fn summary(method: Method, outcome: &SolverOutcome) -> String {
    format!(
        "{method}: {} after {} iterations, relres {:.3e}",
        outcome.record.status,
        outcome.record.iterations,
        outcome.record.final_relres()
    )
}

/// 2 if any solver broke down, else 3 if any hit the iteration cap, else 0.
fn exit_code<'a>(outcomes: impl IntoIterator<Item = &'a SolverOutcome>) -> u8 {
    let mut code = 0;
    for o in outcomes {
        match o.record.status {
            Status::Breakdown { .. } => return 2,
            Status::MaxIterationsReached => code = 3,
            Status::Converged => {}
        }
    }
    code
}

fn run(cli: Cli) -> Result<u8> {
    let (problem, solvers, threshold) = match cli.command {
        Command::Solve { problem, solver } => (problem, vec![solver], None),
        Command::Compare {
            problem,
            solvers,
            gap_threshold,
        } => {
            if gap_threshold.is_nan() || gap_threshold < 0.0 {
                bail!("--gap-threshold must be non-negative");
            }
            (problem, solvers, Some(gap_threshold))
        }
    };
    let cfg = problem.config(solvers)?;
    let outcomes = run_experiment(&cfg)?;
    for (m, o) in &outcomes {
        println!("{}", summary(*m, o));
    }
    if let Some(threshold) = threshold {
        let methods: Vec<Method> = outcomes.keys().copied().collect();
        for (i, a) in methods.iter().enumerate() {
            for b in &methods[i + 1..] {
                let report = compare_histories(&outcomes[a].record, &outcomes[b].record, threshold);
                match report.first_divergent_iteration {
                    Some(k) => println!(
                        "{a} vs {b}: diverge at iteration {k} (max gap before {:.3e} decades)",
                        report.max_relative_gap_before
                    ),
                    None => println!(
                        "{a} vs {b}: no divergence (max gap {:.3e} decades)",
                        report.max_relative_gap_before
                    ),
                }
            }
        }
    }
    if let Some(path) = &cfg.output_path {
        write_csv_file(&outcomes, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(exit_code(outcomes.values()))
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for breakdowns
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
