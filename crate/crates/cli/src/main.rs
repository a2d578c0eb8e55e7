//! `arrstab`: batch driver for the arrangement stability engine.

mod cache;
mod catalog;
mod config;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, warn};

use cache::LatticeCache;
use config::JobConfig;

const DEFAULT_CACHE: &str = ".arrstab-cache";
const DEFAULT_OUT: &str = "arrstab-out";

#[derive(Parser)]
#[command(name = "arrstab", version, about = "Cohomology and representation stability of FI^m-arrangements")]
struct Cli {
    /// Lattice cache directory
    #[arg(long, global = true, env = "ARRSTAB_CACHE", value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the computations described by a job file
    Run {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Report directory
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// List the named arrangement families
    Catalog,
    /// Delete every cached lattice
    CleanCache,
}

fn configure_threads(jobs: Option<usize>) {
    let Some(n) = jobs else { return };
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        warn!("could not size the thread pool: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    if n > 1 {
        warn!("built without the parallel feature; --jobs {n} is ignored");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    configure_threads(cli.jobs);

    match cli.command {
        Command::Catalog => {
            print!("{}", catalog::listing());
            ExitCode::SUCCESS
        }
        Command::CleanCache => {
            let cache = LatticeCache::new(cli.cache.unwrap_or_else(|| DEFAULT_CACHE.into()));
            match cache.clean() {
                Ok(n) => {
                    println!("removed {n} cached lattices from {}", cache.dir().display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    error!("cannot clean {}: {e}", cache.dir().display());
                    ExitCode::from(1)
                }
            }
        }
        Command::Run { config, out } => {
            let job = match JobConfig::load(&config) {
                Ok(job) => job,
                Err(e) => {
                    error!("{e}");
                    return ExitCode::from(1);
                }
            };
            let cache_dir = cli
                .cache
                .or_else(|| job.cache.clone())
                .unwrap_or_else(|| DEFAULT_CACHE.into());
            let out = out.or_else(|| job.out.clone()).unwrap_or_else(|| DEFAULT_OUT.into());
            let outcome = match job::run_job(&job, &LatticeCache::new(cache_dir), &out) {
                Ok(o) => o,
                Err(e) => {
                    error!("{e}");
                    return ExitCode::from(1);
                }
            };
            for line in &outcome.summary {
                println!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            if outcome.findings.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.findings {
                    println!("FALSIFIED: {f}");
                }
                ExitCode::from(2)
            }
        }
    }
}
