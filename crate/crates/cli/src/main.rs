//! `prbdim`: congestion and PRB dimensioning studies from scenario files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod checks;
mod csv;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use prbdim_core::dimension::{dimension_prbs, sweep, DimensionQuery, SweepAxis, DEFAULT_M_CEILING};
use prbdim_core::geometry::mean_users;
use prbdim_core::simulate::simulate;
use prbdim_core::{Error, InterferenceModel, OutdoorModel, RadiusSampler, Region, Scenario, ScenarioFile, Traffic};

use crate::csv::{Cell, Table};

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_VALIDATION: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_ACCURACY: u8 = 5;
const EXIT_IO: u8 = 6;

#[derive(Parser)]
#[command(name = "prbdim", version, about = "PRB congestion probability and dimensioning")]
struct Cli {
    /// Worker threads for Monte-Carlo loops (default: all cores).
    #[arg(long, global = true, env = "PRBDIM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Congestion curve Π(M) for M = 1..=m-max.
    Congestion(CongestionArgs),
    /// Minimal M with Π(M) ≤ target.
    Dimension(DimensionArgs),
    /// Dimensioning over a throughput or road-intensity grid.
    Sweep(SweepArgs),
    /// Empirical congestion curve by end-to-end simulation.
    Simulate(SimulateArgs),
    /// Run a self-check suite.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the number of road realizations.
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the forecast cell throughput, Mbit/s.
    #[arg(long)]
    tau_mbps: Option<f64>,
    /// Share of the throughput carried by outdoor users.
    #[arg(long)]
    outdoor_fraction: Option<f64>,
    /// Override the road intensity, roads per km.
    #[arg(long)]
    road_intensity: Option<f64>,
    #[arg(long, value_enum)]
    outdoor_model: Option<OutdoorArg>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    #[arg(long, value_enum)]
    region: Option<RegionArg>,
    /// Drop interference margins (single 0 dB region).
    #[arg(long)]
    noise_limited: bool,
    /// Output CSV file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutdoorArg {
    Cox,
    Ppp,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Paper,
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    All,
    Center,
    Middle,
    Edge,
}

#[derive(Args)]
struct CongestionArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    #[arg(long)]
    m_max: usize,
    /// Add simulated columns with Wilson 95% intervals.
    #[arg(long)]
    with_mc: bool,
    #[arg(long, default_value_t = 10_000)]
    replications: usize,
}

#[derive(Args)]
struct DimensionArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    /// Target congestion probability Π*, in (0, 1).
    #[arg(long)]
    target: f64,
    #[arg(long, default_value_t = DEFAULT_M_CEILING)]
    m_ceiling: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    #[arg(long)]
    target: f64,
    /// Comma-separated throughputs in Mbit/s, or start:stop:step.
    #[arg(long, conflicts_with = "lambda_grid")]
    tau_grid: Option<String>,
    /// Comma-separated road intensities, or start:stop:step.
    #[arg(long)]
    lambda_grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_M_CEILING)]
    m_ceiling: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    #[arg(long)]
    m_max: usize,
    #[arg(long, default_value_t = 10_000)]
    replications: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Mc,
    Figures,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Replications for the Monte-Carlo suite.
    #[arg(long, default_value_t = 10_000)]
    replications: usize,
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(Error::CeilingReached { .. } | Error::InfeasibleSplit { .. }) => EXIT_INFEASIBLE,
            CliError::Core(Error::Accuracy { .. }) => EXIT_ACCURACY,
            CliError::Core(_) => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) | CliError::Usage(e) => f.write_str(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn load_scenario(args: &ScenarioArgs) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.scenario.display())))?;
    let file = ScenarioFile::parse(&text).map_err(|e| CliError::Core(Error::Scenario(format!("{}: {e}", args.scenario.display()))))?;
    let mut s = file.to_scenario()?;
    if let Some(n) = args.realizations {
        s.mc_realizations = n;
    }
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(l) = args.road_intensity {
        s.road_intensity = l;
    }
    if args.tau_mbps.is_some() || args.outdoor_fraction.is_some() {
        let (tau, f) = match s.traffic {
            Traffic::Throughput {
                throughput_bps,
                outdoor_fraction,
            } => (Some(throughput_bps), outdoor_fraction),
            Traffic::Intensities { .. } => (None, 1.0),
        };
        let tau = args
            .tau_mbps
            .map(|t| t * 1e6)
            .or(tau)
            .ok_or_else(|| CliError::Usage("--outdoor-fraction needs a throughput (--tau-mbps)".into()))?;
        s = s.with_throughput(tau, args.outdoor_fraction.unwrap_or(f));
    }
    if let Some(m) = args.outdoor_model {
        s.outdoor_model = match m {
            OutdoorArg::Cox => OutdoorModel::Cox,
            OutdoorArg::Ppp => OutdoorModel::Ppp,
        };
    }
    if let Some(r) = args.sampler {
        s.sampler = match r {
            SamplerArg::Paper => RadiusSampler::Paper,
            SamplerArg::Standard => RadiusSampler::Standard,
        };
    }
    if let Some(r) = args.region {
        s.region = match r {
            RegionArg::All => Region::All,
            RegionArg::Center => Region::Center,
            RegionArg::Middle => Region::Middle,
            RegionArg::Edge => Region::Edge,
        };
    }
    if args.noise_limited {
        s.interference = InterferenceModel::noise_limited();
    }
    s.validate()?;
    Ok(s)
}

fn scenario_metadata(table: &mut Table, s: &Scenario) -> CliResult<()> {
    let g = s.geometry()?;
    table
        .meta("tool", format!("prbdim {}", prbdim_core::VERSION))
        .meta("seed", s.seed)
        .meta("realizations", s.mc_realizations)
        .meta("sampler", format!("{:?}", s.sampler).to_lowercase())
        .meta("outdoor_model", format!("{:?}", s.outdoor_model).to_lowercase())
        .meta("region", format!("{:?}", s.region).to_lowercase())
        .meta("road_intensity_per_km", g.road_intensity)
        .meta("outdoor_users_per_km", g.user_intensity_linear)
        .meta("indoor_users_per_km2", g.user_intensity_area)
        .meta("margins_db", format!("{:?}", s.interference.margins_db()));
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_congestion(args: &CongestionArgs) -> CliResult<()> {
    let s = load_scenario(&args.common)?;
    let model = s.prepare()?;
    let curve = model.averaged_congestion(args.m_max);
    let mut header = vec!["M", "pi_analytic", "stderr"];
    let empirical = args.with_mc.then(|| simulate(&model, args.replications).empirical_ccdf(args.m_max));
    if empirical.is_some() {
        header.extend(["pi_mc", "mc_lower", "mc_upper"]);
    }
    let mut table = Table::new(&header);
    scenario_metadata(&mut table, &s)?;
    table.meta("expected_load", model.expected_load());
    if empirical.is_some() {
        table.meta("replications", args.replications);
    }
    for m in 1..=args.m_max {
        let mut row: Vec<Cell> = vec![m.into(), curve.pi[m].into(), curve.stderr[m].into()];
        if let Some(e) = &empirical {
            row.extend([e.p_hat[m].into(), e.lower[m].into(), e.upper[m].into()]);
        }
        table.row(row);
    }
    emit(&args.common.out, &table.render())
}

fn cmd_dimension(args: &DimensionArgs) -> CliResult<()> {
    let s = load_scenario(&args.common)?;
    let query = DimensionQuery {
        scenario: s.clone(),
        target_congestion: args.target,
        m_ceiling: args.m_ceiling,
    };
    let report = dimension_prbs(&query)?;
    let g = s.geometry()?;
    println!("target congestion      {}", args.target);
    println!("nominal users          {:.3}", mean_users(&g, s.link.cell_radius_km));
    println!("expected load E(Γ)     {:.3}", s.prepare()?.expected_load());
    println!("required PRBs M        {}", report.required_m);
    println!(
        "Π(M-1) = {:.6} ± {:.6}   Π(M) = {:.6} ± {:.6}",
        report.pi_before, report.stderr_before, report.pi_at, report.stderr_at
    );
    if let Some(out) = &args.common.out {
        let mut table = Table::new(&["M", "pi_analytic", "stderr"]);
        scenario_metadata(&mut table, &s)?;
        table.meta("target", args.target).meta("required_m", report.required_m);
        for m in 1..=report.curve.m_max() {
            table.row(vec![m.into(), report.curve.pi[m].into(), report.curve.stderr[m].into()]);
        }
        write_file(out, &table.render())?;
    }
    Ok(())
}

/// `a,b,c` or `start:stop:step` (inclusive).
fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("invalid grid '{text}'"));
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    } else {
        text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
    }
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let s = load_scenario(&args.common)?;
    let axis = match (&args.tau_grid, &args.lambda_grid) {
        (Some(t), None) => SweepAxis::Throughput(parse_grid(t)?.into_iter().map(|v| v * 1e6).collect()),
        (None, Some(l)) => SweepAxis::RoadIntensity(parse_grid(l)?),
        _ => return Err(CliError::Usage("give exactly one of --tau-grid or --lambda-grid".into())),
    };
    let fraction = match s.traffic {
        Traffic::Throughput { outdoor_fraction, .. } => outdoor_fraction,
        Traffic::Intensities { .. } => {
            return Err(CliError::Usage("sweeps need a throughput-based scenario (--tau-mbps)".into()))
        }
    };
    let query = DimensionQuery {
        scenario: s.clone(),
        target_congestion: args.target,
        m_ceiling: args.m_ceiling,
    };
    query.validate()?;
    let points = sweep(&query, &axis, fraction)?;
    let mut table = Table::new(&["tau_mbps", "lambda_per_km", "target", "required_m", "pi_at", "pi_before", "status"]);
    scenario_metadata(&mut table, &s)?;
    for p in points {
        let mut row: Vec<Cell> = vec![(p.throughput_bps / 1e6).into(), p.road_intensity.into(), p.target_congestion.into()];
        match p.result {
            Ok(r) => row.extend([r.required_m.into(), r.pi_at.into(), r.pi_before.into(), "ok".into()]),
            Err(e) => row.extend([
                Cell::Text(String::new()),
                Cell::Text(String::new()),
                Cell::Text(String::new()),
                Cell::Text(e.to_string()),
            ]),
        }
        table.row(row);
    }
    emit(&args.common.out, &table.render())
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let s = load_scenario(&args.common)?;
    if args.replications < 100 {
        return Err(CliError::Usage("--replications must be at least 100".into()));
    }
    let model = s.prepare()?;
    let summary = simulate(&model, args.replications);
    let curve = summary.empirical_ccdf(args.m_max);
    let mut table = Table::new(&["M", "pi_mc", "ci_lower", "ci_upper"]);
    scenario_metadata(&mut table, &s)?;
    table
        .meta("replications", args.replications)
        .meta("mean_gamma", summary.mean_gamma())
        .meta("expected_load", model.expected_load())
        .meta("nominal_users", mean_users(model.geometry(), s.link.cell_radius_km))
        .meta("measured_outdoor_users", summary.mean_outdoor_users())
        .meta("measured_indoor_users", summary.mean_indoor_users());
    for m in 1..=args.m_max {
        table.row(vec![m.into(), curve.p_hat[m].into(), curve.lower[m].into(), curve.upper[m].into()]);
    }
    emit(&args.common.out, &table.render())
}

fn cmd_validate(args: &ValidateArgs) -> CliResult<bool> {
    let (name, results) = match args.suite {
        Suite::Identities => ("identities", checks::identities(args.seed)?),
        Suite::Mc => ("mc", checks::monte_carlo(args.seed, args.replications)?),
        Suite::Figures => ("figures", checks::figures(args.seed)?),
    };
    let mut passed = 0;
    for c in &results {
        println!(
            "{} {:<36} value={:<14} tolerance {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            format!("{:.6e}", c.value),
            c.tolerance
        );
        passed += usize::from(c.passed);
    }
    let failed = results.len() - passed;
    println!("{{\"suite\":\"{name}\",\"seed\":{},\"passed\":{passed},\"failed\":{failed}}}", args.seed);
    Ok(failed == 0)
}

fn run(cli: &Cli) -> CliResult<bool> {
    if let Some(n) = cli.threads {
        rayon_threads(n)?;
    }
    match &cli.command {
        Command::Congestion(a) => cmd_congestion(a).map(|_| true),
        Command::Dimension(a) => cmd_dimension(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
        Command::Simulate(a) => cmd_simulate(a).map(|_| true),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn rayon_threads(n: usize) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECKS_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("10,12.5").unwrap(), vec![10.0, 12.5]);
        assert_eq!(parse_grid("10:14:2").unwrap(), vec![10.0, 12.0, 14.0]);
        assert!(parse_grid("10:9:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
