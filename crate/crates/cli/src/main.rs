use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

/// Contact Hamiltonians whose Reeb flows carry invariant torus sets.
#[derive(Parser, Debug)]
#[command(name = "reebflow", version, about)]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolve b, the G ramp and the support box and write the model file.
    Build {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification suite and write the report.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Base sample count.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Integrate one orbit of the Reeb flow and write it as CSV.
    Integrate(IntegrateArgs),
    /// Shooting search for an orbit that stays bounded in forward time.
    SearchTrapped(SearchArgs),
    /// Write plot-ready tables for the quadratic form, ρ and G.
    Diagnostics {
        #[arg(long)]
        scenario: PathBuf,
        /// Output prefix; files are PREFIX_<table>.csv.
        #[arg(long)]
        out: String,
    },
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Cartesian start point x1,y1,…,xn,yn,z.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "on_torus"
    )]
    x0: Option<Vec<f64>>,
    /// Start at (r = 1, θ, z = 0) for the given angles.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    on_torus: Option<Vec<f64>>,
    /// Final time; negative integrates backward.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    /// Sample spacing for dense output; every accepted step when omitted.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    zmin: f64,
    #[arg(long, default_value_t = -0.05, allow_negative_numbers = true)]
    zmax: f64,
    #[arg(long, default_value_t = 1000.0)]
    tfwd: f64,
    #[arg(long, default_value_t = 100.0)]
    tbwd: f64,
    /// Common radius r_j of the family.
    #[arg(long)]
    radius: Option<f64>,
    /// Angles θ of the family (defaults to zeros).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    /// Output prefix for PREFIX_forward.csv, PREFIX_backward.csv, PREFIX_summary.json.
    #[arg(long)]
    out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(commands::EXIT_CONFIG);
        }
    }
    let result = match cli.command {
        Command::Build { scenario, out } => commands::build(&scenario, &out),
        Command::Verify {
            scenario,
            report,
            samples,
            seed,
        } => commands::verify(&scenario, &report, samples, seed),
        Command::Integrate(args) => commands::integrate(&args),
        Command::SearchTrapped(args) => commands::search_trapped(&args),
        Command::Diagnostics { scenario, out } => commands::diagnostics(&scenario, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.error);
            ExitCode::from(e.code)
        }
    }
}
