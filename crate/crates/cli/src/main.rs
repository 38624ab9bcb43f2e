use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uavcovert::experiments::{
    optimization_record, run_covertness_sweep, run_detection_sweep, run_rate_sweep, run_validation, write_csv,
    CsvRecord, Trend,
};
use uavcovert::optimizer::GridSpec;
use uavcovert::{Error, ExperimentConfig, Overlay, Result, SweepSpec, SweptParameter};

const DEFAULT_PRESET: &str = include_str!("../../../presets/fig2.json");
const DEFAULT_TRIALS: u64 = 100_000;
const DEFAULT_SYMBOLS: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "uavcovert", version, about = "Covert UAV relaying: detection, rate and height-optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Warden error probabilities over a threshold sweep, closed form and Monte Carlo.
    DetectSweep(SweepArgs),
    /// Relay and destination rates over a height sweep.
    RateSweep(SweepArgs),
    /// Optimized covert rate over a covertness-requirement sweep.
    CovertnessSweep {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Optimal powers and height for one scenario.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check closed forms against simulation; exits 4 if any check fails.
    Validate {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Symbols per link simulation.
        #[arg(long)]
        symbols: Option<u64>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment or scenario JSON file (defaults to the built-in fig2 preset for validate).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Overlay parameter: p_u, p_j, h or epsilon.
    #[arg(long, value_parser = parse_parameter)]
    overlay_param: Option<SweptParameter>,
    /// Comma-separated overlay values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    overlay: Option<Vec<f64>>,
}

#[derive(Args)]
struct GridArgs {
    /// Uniform P_u grid points on (0, P_max].
    #[arg(long)]
    pu_steps: Option<usize>,
    /// Uniform P_J grid points on (0, P_max].
    #[arg(long)]
    pj_steps: Option<usize>,
}

fn parse_parameter(s: &str) -> std::result::Result<SweptParameter, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown parameter {s:?}"))
}

struct Loaded {
    config: ExperimentConfig,
    seed: u64,
    trials: u64,
}

impl CommonArgs {
    fn load(&self, fallback_to_preset: bool) -> Result<Loaded> {
        let config = match (&self.scenario, fallback_to_preset) {
            (Some(path), _) => ExperimentConfig::from_path(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            (None, true) => ExperimentConfig::from_json_str(DEFAULT_PRESET)?,
            (None, false) => return Err(Error::Config("--scenario is required".into())),
        };
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        }
        let seed = self.seed.or(config.seed).unwrap_or(0);
        let trials = self.trials.or(config.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::Config("--trials must be at least 1".into()));
        }
        Ok(Loaded { config, seed, trials })
    }

    fn emit<R: CsvRecord>(&self, records: &[R]) -> Result<()> {
        match &self.out {
            Some(path) => {
                let file = File::create(path)?;
                write_csv(BufWriter::new(file), records)?;
                eprintln!("wrote {} rows to {}", records.len(), path.display());
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                write_csv(&mut lock, records)?;
                lock.flush()?;
            }
        }
        Ok(())
    }
}

impl SweepArgs {
    /// Sweep from the config, else `default`, with command-line overrides applied.
    fn resolve(&self, config: &ExperimentConfig, parameter: SweptParameter, default: SweepSpec) -> Result<SweepSpec> {
        let mut sweep = match &config.sweep {
            Some(s) if s.parameter == parameter => s.clone(),
            Some(s) => {
                return Err(Error::Config(format!(
                    "config sweeps {}, this command sweeps {}",
                    s.parameter.name(),
                    parameter.name()
                )))
            }
            None => default,
        };
        if let Some(v) = self.start {
            sweep.start = v;
        }
        if let Some(v) = self.stop {
            sweep.stop = v;
        }
        if let Some(v) = self.steps {
            sweep.steps = v;
        }
        match (self.overlay_param, &self.overlay) {
            (Some(p), Some(values)) => sweep.overlay = Some(Overlay { parameter: p, values: values.clone() }),
            (Some(p), None) => match &mut sweep.overlay {
                Some(o) => o.parameter = p,
                None => return Err(Error::Config("--overlay-param needs --overlay values".into())),
            },
            (None, Some(values)) => match &mut sweep.overlay {
                Some(o) => o.values = values.clone(),
                None => return Err(Error::Config("--overlay needs --overlay-param when the config has none".into())),
            },
            (None, None) => {}
        }
        sweep.validate()?;
        Ok(sweep)
    }
}

impl GridArgs {
    fn grid_fn<'a>(&self, config: &'a ExperimentConfig) -> impl Fn(&uavcovert::Scenario) -> Result<GridSpec> + Sync + 'a {
        let (pu, pj) = (self.pu_steps, self.pj_steps);
        move |s| {
            let mut grid = config.grid_for(s)?;
            if let Some(n) = pu {
                grid.p_u = GridSpec::uniform(s.p_max, n, 1)?.p_u;
            }
            if let Some(n) = pj {
                grid.p_j = GridSpec::uniform(s.p_max, 1, n)?.p_j;
            }
            Ok(grid)
        }
    }
}

fn default_sweep(parameter: SweptParameter, start: f64, stop: f64, steps: usize) -> SweepSpec {
    SweepSpec { parameter, start, stop, steps, overlay: None }
}

fn report_trends(trends: &[Trend]) {
    for t in trends.iter().filter(|t| !t.holds()) {
        let curve = t.overlay.map_or_else(|| "base".to_owned(), |v| format!("overlay {v}"));
        eprintln!("warning: {} is not {:?} on {curve} ({} violations)", t.quantity, t.direction, t.violations);
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::DetectSweep(args) => {
            let l = args.common.load(false)?;
            let sweep = args.resolve(&l.config, SweptParameter::Gamma, default_sweep(SweptParameter::Gamma, 0.0, 1.0, 50))?;
            let records = run_detection_sweep(&l.config.scenario()?, &sweep, l.trials, l.seed)?;
            let outside = records.iter().filter(|r| !r.within_band()).count();
            if outside > 0 {
                eprintln!("warning: {outside} simulated points outside the Monte Carlo band");
            }
            args.common.emit(&records)?;
        }
        Command::RateSweep(args) => {
            let l = args.common.load(false)?;
            let sweep = args.resolve(&l.config, SweptParameter::H, default_sweep(SweptParameter::H, 0.0, 100.0, 51))?;
            let result = run_rate_sweep(&l.config.scenario()?, &sweep)?;
            report_trends(&result.trends);
            args.common.emit(&result.records)?;
        }
        Command::CovertnessSweep { sweep: args, grid } => {
            let l = args.common.load(false)?;
            let sweep = args.resolve(
                &l.config,
                SweptParameter::Epsilon,
                default_sweep(SweptParameter::Epsilon, 0.01, 0.05, 21),
            )?;
            let result = run_covertness_sweep(&l.config.scenario()?, &sweep, grid.grid_fn(&l.config))?;
            let infeasible = result.records.iter().filter(|r| !r.feasible).count();
            if infeasible > 0 {
                eprintln!("warning: {infeasible} of {} points infeasible", result.records.len());
            }
            report_trends(&result.trends);
            args.common.emit(&result.records)?;
        }
        Command::Optimize { common, grid } => {
            let l = common.load(false)?;
            let s = l.config.scenario()?;
            let record = optimization_record(&s, &grid.grid_fn(&l.config)(&s)?)?;
            common.emit(std::slice::from_ref(&record))?;
            if !record.feasible {
                eprintln!("infeasible: no power pair on the grid admits a covert and secure height");
                return Ok(ExitCode::from(3));
            }
        }
        Command::Validate { sweep: args, symbols } => {
            let l = args.common.load(true)?;
            let sweep = args.resolve(&l.config, SweptParameter::Gamma, default_sweep(SweptParameter::Gamma, 0.0, 1.0, 50))?;
            let n_symbols = symbols.unwrap_or(DEFAULT_SYMBOLS);
            let records = run_validation(&l.config.scenario()?, &sweep, l.trials, n_symbols, l.seed)?;
            args.common.emit(&records)?;
            let failed: Vec<_> = records.iter().filter(|r| !r.pass).collect();
            for r in &failed {
                eprintln!(
                    "FAIL {} at {}: expected {}, observed {}, tolerance {}",
                    r.check, r.at, r.expected, r.observed, r.tolerance
                );
            }
            eprintln!("{} of {} checks passed", records.len() - failed.len(), records.len());
            if !failed.is_empty() {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
