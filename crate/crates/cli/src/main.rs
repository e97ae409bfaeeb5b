//! Runs named experiments and writes their certificate reports.
//!
//! Exit status: 0 when every report passes, 1 when some report fails,
//! 2 on invalid input or an experiment error.

mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use experiments::{Settings, CATALOG};

#[derive(Parser)]
#[command(version, about = "Certified experiments on Hölder functions", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiments from the catalog
    Run {
        /// Experiment names, see `list`
        #[arg(required = true)]
        names: Vec<String>,
        /// Hölder exponent in (0, 1)
        #[arg(long)]
        alpha: Option<f64>,
        /// Construction depth, level count or size, depending on the experiment
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Directory for `<name>.json` and CSV series; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized families
        #[arg(long)]
        seed: Option<u64>,
        /// Experiments run concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the experiment catalog
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for e in &CATALOG {
                println!("{:<22} {}", e.name, e.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { names, alpha, depth, eps, delta, out, seed, jobs } => {
            let settings = Settings { alpha, depth, eps, delta, seed };
            run(&names, &settings, out, jobs)
        }
    }
}

fn run(names: &[String], settings: &Settings, out: Option<PathBuf>, jobs: usize) -> ExitCode {
    let mut selected = Vec::with_capacity(names.len());
    for name in names {
        match experiments::find(name) {
            Some(e) => selected.push(e),
            None => {
                eprintln!("error: unknown experiment `{name}` (see `holder list`)");
                return ExitCode::from(2);
            }
        }
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // collected in request order whatever the scheduling
    let outcomes: Vec<_> = pool.install(|| selected.par_iter().map(|e| (e.name, e.run(settings))).collect());

    let mut status = 0u8;
    for (name, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                let written = match &out {
                    Some(dir) => output::write(dir, &o),
                    None => output::print(&o),
                };
                if let Err(e) = written {
                    eprintln!("error: writing `{name}`: {e}");
                    status = 2;
                } else if !o.report.pass {
                    eprintln!("FAIL {name}");
                    status = status.max(1);
                }
            }
            Err(e) => {
                eprintln!("error: `{name}`: {e}");
                status = 2;
            }
        }
    }
    ExitCode::from(status)
}
