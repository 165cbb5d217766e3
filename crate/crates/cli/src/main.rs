use std::path::PathBuf;
use std::process::ExitCode;

use absep::io::{read_matrix, read_state, state_file, write_json, write_text};
use absep::scan::{run_scan, to_csv, ScanFamily};
use absep::{UnitarySource, U4_DEFAULT_PHASES};
use absep_core::channels::{annihilation_sweep, family_verdict, threshold_scan, ChannelVerdict, Family, SweepOptions};
use absep_core::detection::{detect, DetectionOptions, Question, UnitaryChoice};
use absep_core::discrimination::Discrimination;
use absep_core::maps::{MapKind, PositiveMapSpec};
use absep_core::states::{
    example_state, isotropic, random_density, schmidt_state, DensityMatrix, ExampleState,
};
use absep_core::unitaries::{search_staged, GlobalUnitary, Objective, SearchConfig};
use absep_core::CMatrix;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Moment-based detection of states and channels that are not absolutely
/// separable.
#[derive(Parser)]
#[command(name = "absep", version)]
struct Cli {
    /// Worker threads for parallel sweeps and searches.
    #[arg(long, env = "ABSEP_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Try to show a state is not absolutely separable.
    Detect(DetectArgs),
    /// Try to show a state is not absolutely PPT (decomposable maps only).
    DetectPpt(DetectPptArgs),
    /// Scan an example family in p and bisect the onsets.
    Scan(ScanArgs),
    /// Entanglement-annihilation criterion for a depolarizing channel.
    ChannelDetect(ChannelDetectArgs),
    /// Smallest depolarizing parameter refuting absolute separation.
    ChannelThreshold(ChannelThresholdArgs),
    /// Channel-pair discrimination advantage of a state.
    Discriminate(DiscriminateArgs),
    /// Write a density matrix as `.dm.json`.
    GenState(GenStateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MapName {
    Transpose,
    Reduction,
}

impl MapName {
    fn spec(self, d: usize) -> PositiveMapSpec {
        let kind = match self {
            MapName::Transpose => MapKind::Transpose,
            MapName::Reduction => MapKind::Reduction,
        };
        PositiveMapSpec::by_kind(kind, d).expect("built-in map")
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 3000)]
    budget: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            objective: Objective::ThmOne,
            budget: self.budget,
            restarts: self.restarts,
            seed: self.seed,
            stop_above: Some(1e-8),
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// `.dm.json` state file.
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_enum, default_value = "transpose")]
    map: MapName,
    /// paper:U1..U4[:phi1,phi2], identity, search, haar:SEED or file:PATH.
    #[arg(long, default_value = "search")]
    unitary: String,
    /// Test Hankel determinants up to this order.
    #[arg(long, default_value_t = 2)]
    hankel: usize,
    /// Number of moments to report (raised to cover the Hankel order).
    #[arg(long, default_value_t = 5)]
    moments: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectPptArgs {
    #[command(flatten)]
    detect: DetectArgs,
    /// Haar probes for the sufficient purity test; 0 skips it.
    #[arg(long, default_value_t = 100)]
    probes: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanName {
    Isotropic3,
    Rho4,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: ScanName,
    /// Grid points on [0, 1].
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Bisection tolerance for the onsets.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Mixing parameter of the bound-entangled family.
    #[arg(long, default_value_t = 1.5)]
    b: f64,
    #[arg(long, default_value_t = U4_DEFAULT_PHASES.0)]
    phi1: f64,
    #[arg(long, default_value_t = U4_DEFAULT_PHASES.1)]
    phi2: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Dep2,
    Dep3,
}

impl FamilyName {
    fn family(self) -> Family {
        match self {
            FamilyName::Dep2 => Family::Dep2,
            FamilyName::Dep3 => Family::Dep3,
        }
    }
}

#[derive(Args)]
struct ChannelDetectArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Depolarizing parameter; omit to emit a CSV sweep over `--points` values.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 21)]
    points: usize,
    #[arg(long, value_enum, default_value = "transpose")]
    map: MapName,
    /// Schmidt grid size (default 101 for qubits, 45 for qutrits).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelThresholdArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long, value_enum, default_value = "transpose")]
    map: MapName,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscriminateArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_enum, default_value = "transpose")]
    map: MapName,
    #[arg(long, default_value = "identity")]
    unitary: String,
    /// JSON matrix for the completing state σ0 on the extended output.
    #[arg(long)]
    sigma0: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Rho1,
    Rho2,
    Rho3,
    Rho4,
    Isotropic,
    Maxmix,
    Product,
    Bell,
    Schmidt,
    Random,
}

#[derive(Args)]
struct GenStateArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Mixing parameter (rho3, rho4, isotropic, random).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1.5)]
    b: f64,
    /// Local dimension for isotropic and bell states.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Local dimensions as AxB for maxmix, product and random states.
    #[arg(long, default_value = "2x2")]
    dims: String,
    /// Comma-separated Schmidt weights summing to 1.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // Usage errors exit with 1 so that 2 always means "inconclusive".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(true)` for a detection, `Ok(false)` for an inconclusive run.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Detect(args) => cmd_detect(&args, Question::AbsoluteSeparability, 0),
        Command::DetectPpt(args) => cmd_detect(&args.detect, Question::AbsolutePpt, args.probes),
        Command::Scan(args) => cmd_scan(&args),
        Command::ChannelDetect(args) => cmd_channel_detect(&args),
        Command::ChannelThreshold(args) => cmd_channel_threshold(&args),
        Command::Discriminate(args) => cmd_discriminate(&args),
        Command::GenState(args) => cmd_gen_state(&args),
    }
}

fn cmd_detect(args: &DetectArgs, question: Question, probes: usize) -> Result<bool> {
    let (id, state) = read_state(&args.state)?;
    let map = args.map.spec(state.dim_b());
    let source: UnitarySource = args.unitary.parse()?;
    let choice = match source.resolve(state.dim())? {
        Some(u) => UnitaryChoice::Fixed(u),
        None => UnitaryChoice::Search(args.search.config()),
    };
    let opts = DetectionOptions {
        hankel_orders: (1..=args.hankel).collect(),
        moment_order: args.moments,
        thm9_samples: probes,
        seed: args.search.seed,
    };
    let report = detect(&id, &state, &map, &choice, question, &opts)?;
    write_json(&report, args.out.as_deref())?;
    Ok(report.verdict.is_detection())
}

fn cmd_scan(args: &ScanArgs) -> Result<bool> {
    let family = match args.family {
        ScanName::Isotropic3 => ScanFamily::Isotropic3,
        ScanName::Rho4 => ScanFamily::Rho4 { b: args.b, phi1: args.phi1, phi2: args.phi2 },
    };
    let scan = run_scan(&family, args.points, args.tol)?;
    write_text(&to_csv(&scan)?, args.out.as_deref())?;
    Ok(scan.thresholds.iter().any(|(_, v)| v.is_some()))
}

fn cmd_channel_detect(args: &ChannelDetectArgs) -> Result<bool> {
    let family = args.family.family();
    let d = family.local_dim();
    let map = args.map.spec(d);
    let base = SweepOptions { covariant: Some(true), ..SweepOptions::for_local_dim(d) };
    let opts = |p: f64| SweepOptions { grid: args.grid.unwrap_or(base.grid), p: Some(p), ..base };
    if let Some(p) = args.p {
        let report = annihilation_sweep(&family.channel(p)?, &map, &opts(p))?;
        write_json(&report, args.out.as_deref())?;
        return Ok(report.verdict == ChannelVerdict::NotAbsolutelySeparating);
    }
    let n = args.points.max(2) - 1;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "margin", "verdict"])?;
    let mut any = false;
    for i in 0..=n {
        let p = i as f64 / n as f64;
        let report = if args.grid.is_some() {
            annihilation_sweep(&family.channel(p)?, &map, &opts(p))?
        } else {
            family_verdict(family, &map, p)?
        };
        let hit = report.verdict == ChannelVerdict::NotAbsolutelySeparating;
        any |= hit;
        w.write_record([p.to_string(), report.margin.to_string(), format!("{:?}", report.verdict)])?;
    }
    write_text(&String::from_utf8(w.into_inner()?)?, args.out.as_deref())?;
    Ok(any)
}

#[derive(Serialize)]
struct ThresholdReport {
    family: Family,
    map: MapKind,
    tol: f64,
    p_star: f64,
    lower: f64,
    upper: f64,
    iterations: usize,
}

fn cmd_channel_threshold(args: &ChannelThresholdArgs) -> Result<bool> {
    let family = args.family.family();
    let map = args.map.spec(family.local_dim());
    let t = threshold_scan(family, &map, args.tol)?;
    let report = ThresholdReport {
        family,
        map: map.kind(),
        tol: args.tol,
        p_star: t.p_star,
        lower: t.lower,
        upper: t.upper,
        iterations: t.iterations,
    };
    write_json(&report, args.out.as_deref())?;
    Ok(true)
}

fn cmd_discriminate(args: &DiscriminateArgs) -> Result<bool> {
    let (_, state) = read_state(&args.state)?;
    let map = args.map.spec(state.dim_b());
    let sigma0 = args.sigma0.as_deref().map(read_matrix).transpose()?;
    let disc = Discrimination::new(&map, sigma0.as_ref())?;
    let source: UnitarySource = args.unitary.parse()?;
    let u: GlobalUnitary = match source.resolve(state.dim())? {
        Some(u) => u,
        None => search_staged(&state, &map, &args.search.config(), 2)?.best_unitary,
    };
    let report = disc.advantage_test(&state, &u)?;
    write_json(&report, args.out.as_deref())?;
    Ok(report.advantage > 1e-9)
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(['x', 'X']).context("dims must look like AxB")?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn cmd_gen_state(args: &GenStateArgs) -> Result<bool> {
    let need_p = || args.p.context("--p is required for this kind");
    let state: DensityMatrix = match args.kind {
        StateKind::Rho1 => example_state(ExampleState::Rho1)?,
        StateKind::Rho2 => example_state(ExampleState::Rho2)?,
        StateKind::Rho3 => example_state(ExampleState::Rho3 { p: need_p()? })?,
        StateKind::Rho4 => example_state(ExampleState::Rho4 { p: need_p()?, b: args.b })?,
        StateKind::Isotropic => isotropic(args.d, need_p()?)?,
        StateKind::Maxmix => {
            let (a, b) = parse_dims(&args.dims)?;
            DensityMatrix::maximally_mixed(a, b)
        }
        StateKind::Product => {
            let (a, b) = parse_dims(&args.dims)?;
            DensityMatrix::product_zero(a, b)
        }
        StateKind::Bell => schmidt_state(&vec![1.0 / args.d as f64; args.d])?,
        StateKind::Schmidt => {
            let text = args.coeffs.as_deref().context("--coeffs is required for schmidt states")?;
            let coeffs = text.split(',').map(|c| c.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>()?;
            schmidt_state(&coeffs)?
        }
        StateKind::Random => {
            let (a, b) = parse_dims(&args.dims)?;
            let g = random_density(a, b, args.seed);
            let p = args.p.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&p) {
                bail!("--p must lie in [0, 1]");
            }
            let n = a * b;
            let mixed = &g.matrix().scale_real(p) + &CMatrix::identity(n).scale_real((1.0 - p) / n as f64);
            DensityMatrix::validate(mixed, a, b)?
        }
    };
    write_json(&state_file(&state, args.label.clone()), args.out.as_deref())?;
    Ok(true)
}
