use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use imgviz::metrics::MetricId;
use imgviz::runner::{inspect, landscape_grid, run_experiment, run_suite, RunConfig, OUTPUT_ROOT_VAR};
use imgviz::Error;

#[derive(Parser)]
#[command(name = "imgviz", version, about = "Watch optimizers reconstruct images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a config file.
    Run { config: PathBuf },
    /// Run the experiment once per seed and aggregate the results.
    Suite {
        config: PathBuf,
        /// Seed range, `a..b` (exclusive) or `a..=b` (inclusive).
        #[arg(long)]
        seeds: String,
    },
    /// Evaluate a metric over the unit square for a two-pixel target.
    Landscape {
        metric: String,
        t1: f64,
        t2: f64,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Output directory (relative paths honor the output-root variable).
        #[arg(long, default_value = "landscape")]
        out: PathBuf,
    },
    /// Re-render the frames stored in a run manifest.
    Inspect {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>, Error> {
    let bad = || Error::config("seeds", format!("`{spec}` is not a range like 1..6 or 1..=5"));
    let (a, b, inclusive) = if let Some((a, b)) = spec.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = spec.split_once("..") {
        (a, b, false)
    } else {
        return Err(bad());
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    let seeds: Vec<u64> = if inclusive { (a..=b).collect() } else { (a..b).collect() };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

fn output_path(p: PathBuf) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_VAR) {
        Some(root) if p.is_relative() => PathBuf::from(root).join(p),
        _ => p,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let m = run_experiment(&cfg)?;
            let best = m.best.as_ref().map(|b| b.fitness.clone()).unwrap_or_default();
            println!(
                "{} iterations, {} evaluations, best {:?} -> {}",
                m.iterations,
                m.evaluations,
                best,
                cfg.output_dir().display()
            );
        }
        Command::Suite { config, seeds } => {
            let cfg = RunConfig::load(&config)?;
            let seeds = parse_seeds(&seeds)?;
            let (manifests, summary) = run_suite(&cfg, &seeds)?;
            for m in &manifests {
                let best = m.best.as_ref().map(|b| b.fitness.clone()).unwrap_or_default();
                println!("seed {}: best {:?}", m.seed, best);
            }
            println!("summary -> {}", summary.summary_csv.display());
        }
        Command::Landscape {
            metric,
            t1,
            t2,
            resolution,
            out,
        } => {
            let id: MetricId = metric.parse()?;
            let grid = landscape_grid(id, (t1, t2), resolution)?;
            let dir = output_path(out);
            let stem = format!("{}_{t1}_{t2}", id.name());
            grid.write(&dir, &stem)?;
            println!("{}", dir.join(format!("{stem}.csv")).display());
        }
        Command::Inspect { manifest, out } => {
            let files = inspect(&manifest, out.map(output_path).as_deref())?;
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}
