use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use cogrelay::montecarlo::simulate;
use cogrelay::{analytic, Scheme};
use cogrelay_cli::config::{build_spec, read_config, Overrides, SweepSpec};
use cogrelay_cli::sweep::{format_float, write_sweep_csv};
use cogrelay_cli::validate::validate;
use cogrelay_cli::RATE_CONVENTION;

const DEFAULT_SIMULATE_TRIALS: u64 = 1_000_000;

/// Outage of multi-relay selection in a cognitive relay network with
/// imperfect spectrum sensing, against direct transmission and best-relay
/// selection.
///
/// Parameters come from an optional JSON config (--config) overridden by
/// flags. Without a config the defaults are: P0 = 0.8, gamma_p = 10 dB,
/// R = 1 bit/s/Hz, N = 6, (Pd, Pf) in {(0.95, 0.05), (0.65, 0.35)},
/// gamma_s in {0, 5, ..., 30} dB, unit-mean ST->relay, relay->SD and ST->SD
/// links, PT->relay and PT->SD links with mean 0.2, trials = 0, seed = 1.
#[derive(Debug, Parser)]
#[command(name = "cogrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct Opts {
    /// JSON sweep configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Secondary SNR axis in dB, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    gamma_s_db: Option<Vec<f64>>,

    /// Schemes to evaluate: direct, best, multi (comma separated).
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    scheme: Option<Vec<String>>,

    /// Detection probability; replaces the configured sensing pairs (needs --pf).
    #[arg(long, global = true, value_name = "F")]
    pd: Option<f64>,

    /// False-alarm probability; replaces the configured sensing pairs (needs --pd).
    #[arg(long, global = true, value_name = "F")]
    pf: Option<f64>,

    /// Relay counts, comma separated (1..=24).
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    n_relays: Option<Vec<usize>>,

    /// Monte Carlo trials per point (0 = analytic only).
    #[arg(long, global = true, value_name = "INT")]
    trials: Option<u64>,

    /// Base seed; trial t of every point draws from stream (seed, t).
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Worker threads for simulation; results do not depend on it.
    #[arg(long, global = true, value_name = "INT")]
    workers: Option<usize>,

    /// Write CSV here instead of stdout (sweep only).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form outage breakdown at the first grid point.
    Analytic,
    /// Monte Carlo estimate at the first grid point (default 10^6 trials).
    Simulate,
    /// Evaluate the whole grid and emit CSV.
    Sweep,
    /// Compare closed form with simulation on the whole grid; exit 1 on FAIL.
    Validate,
}

impl Opts {
    fn spec(&self) -> anyhow::Result<SweepSpec> {
        let file = self.config.as_deref().map(read_config).transpose()?;
        let schemes = self
            .scheme
            .as_ref()
            .map(|names| names.iter().map(|n| n.parse::<Scheme>()).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        let overrides = Overrides {
            gamma_s_db: self.gamma_s_db.clone(),
            schemes,
            pd: self.pd,
            pf: self.pf,
            n_relays: self.n_relays.clone(),
            trials: self.trials,
            seed: self.seed,
        };
        Ok(build_spec(file, &overrides)?)
    }

    fn workers(&self) -> anyhow::Result<usize> {
        match self.workers {
            Some(0) => anyhow::bail!("--workers must be at least 1"),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

fn point_label(spec: &SweepSpec) -> String {
    let (pd, pf) = spec.sensing_pairs[0];
    format!(
        "n_relays={} pd={} pf={} gamma_s_db={}",
        spec.relay_counts[0],
        format_float(pd),
        format_float(pf),
        format_float(spec.gamma_s_db[0])
    )
}

fn first_point(spec: &SweepSpec) -> cogrelay::SystemParams {
    let (pd, pf) = spec.sensing_pairs[0];
    spec.point(pd, pf, spec.relay_counts[0], spec.gamma_s_db[0])
}

fn run_analytic(spec: &SweepSpec) -> anyhow::Result<()> {
    let params = first_point(spec);
    let mut out = io::stdout().lock();
    writeln!(out, "# {RATE_CONVENTION}")?;
    for &scheme in &spec.schemes {
        let b = analytic::outage(&params, scheme)?;
        writeln!(
            out,
            "scheme={scheme} {} total={} empty_h0={} empty_h1={} nonempty_h0={} nonempty_h1={}",
            point_label(spec),
            format_float(b.total),
            format_float(b.empty_h0),
            format_float(b.empty_h1),
            format_float(b.nonempty_h0),
            format_float(b.nonempty_h1),
        )?;
    }
    Ok(())
}

fn run_simulate(spec: &SweepSpec, workers: usize) -> anyhow::Result<()> {
    let params = first_point(spec);
    let trials = if spec.trials > 0 { spec.trials } else { DEFAULT_SIMULATE_TRIALS };
    let tally = simulate(&params, trials, spec.seed, workers)?;
    let mut out = io::stdout().lock();
    writeln!(out, "# {RATE_CONVENTION}")?;
    for &scheme in &spec.schemes {
        let e = tally.estimate(scheme, spec.seed);
        writeln!(
            out,
            "scheme={scheme} {} p_hat={} stderr={} trials={} seed={}",
            point_label(spec),
            format_float(e.p_hat),
            format_float(e.stderr),
            e.trials,
            e.seed,
        )?;
    }
    Ok(())
}

fn run_sweep_cmd(spec: &SweepSpec, workers: usize, out: Option<&PathBuf>) -> anyhow::Result<()> {
    eprintln!("# {RATE_CONVENTION}");
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_sweep_csv(spec, workers, BufWriter::new(file))?;
        }
        None => {
            write_sweep_csv(spec, workers, io::stdout().lock())?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let spec = cli.opts.spec()?;
    let workers = cli.opts.workers()?;
    match cli.command {
        Command::Analytic => run_analytic(&spec)?,
        Command::Simulate => run_simulate(&spec, workers)?,
        Command::Sweep => run_sweep_cmd(&spec, workers, cli.opts.out.as_ref())?,
        Command::Validate => {
            eprintln!("# {RATE_CONVENTION}");
            let report = validate(&spec, workers)?;
            println!("{report}");
            return Ok(report.pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
