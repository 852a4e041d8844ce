//! Command-line front end: graph ingestion, built-in examples, and every
//! computation emitted as JSON or CSV suitable for plotting.
//!
//! Exit codes: 0 success, 2 input validation, 3 cap exceedance, 4 numeric
//! failure.

mod commands;

use clap::{Parser, Subcommand};

use commands::{
    BandsArgs, BipartiteArgs, DetArgs, ExampleArgs, HeatArgs, ResolventArgs, TracesArgs, ZetaArgs,
};

#[derive(Parser)]
#[command(
    name = "periodic-spectra",
    version,
    about = "Trace series, band structures, heat/resolvent expansions and determinant products for operators on periodic discrete graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier coefficients of Tr M^n(k) and the regularized trace
    Traces(TracesArgs),
    /// Eigenvalue branches over the Brillouin zone, band intervals, flat
    /// bands and the total bandwidth
    Bands(BandsArgs),
    /// Heat-kernel trace expansion with certified truncation bound
    Heat(HeatArgs),
    /// Resolvent trace expansion with certified truncation bound
    Resolvent(ResolventArgs),
    /// Prime-cycle determinant product and renormalized log-determinant
    Det(DetArgs),
    /// Ihara zeta truncation (and optionally the L-function at a
    /// quasimomentum)
    Zeta(ZetaArgs),
    /// Bipartiteness of the quotient and of the periodic graph, with a
    /// parity witness
    Bipartite(BipartiteArgs),
    /// Emit a built-in graph as a JSON document
    Example(ExampleArgs),
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("PERIODIC_SPECTRA_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Traces(args) => commands::traces(args),
        Command::Bands(args) => commands::bands(args),
        Command::Heat(args) => commands::heat(args),
        Command::Resolvent(args) => commands::resolvent(args),
        Command::Det(args) => commands::det(args),
        Command::Zeta(args) => commands::zeta(args),
        Command::Bipartite(args) => commands::bipartite(args),
        Command::Example(args) => commands::example(args),
    };
    if let Err(error) = outcome {
        eprintln!("error: {}", error.message);
        std::process::exit(error.code);
    }
}
