mod manifest;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use metro_dynamics::analysis::{
    self, compare_instability, phase_diagram, sweep_density, uniform_ratio_demand, DemandProfile,
    DiagramParams, DEFAULT_SCALES,
};
use metro_dynamics::dp::{check_homogeneous_monotone, DEFAULT_SEED};
use metro_dynamics::line::{
    build_controlled_system, build_maxplus_affine, build_maxplus_system, closed_form_headway,
    default_initial_departures, place_trains, segmentize, LineConfig, LineModel,
};
use metro_dynamics::{generalized_eigenpair, simulate, Error, PARIS_LINE14};
use serde::{Deserialize, Serialize};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(
    name = "metro-dynamics",
    version,
    about = "Train dynamics on a metro line: headways, phase diagrams and dwell control"
)]
struct Cli {
    /// Line configuration (JSON); defaults to the bundled Paris line 14.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Seed for randomized property checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Command {
    /// Asymptotic headway from the closed form, the spectral solver and simulation.
    Eigen(EigenArgs),
    /// Analytical fundamental diagram over the density range.
    PhaseDiagram(PhaseArgs),
    /// Controlled headway over train counts and demand scales.
    DemandSweep(SweepArgs),
    /// Delay propagation with and without dwell control.
    Instability(InstabilityArgs),
    /// Check a configuration and print its derived parameters.
    Validate(ValidateArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EigenArgs {
    /// Number of trains (defaults to the optimal count).
    #[arg(long)]
    trains: Option<usize>,
    /// Simulated departure events.
    #[arg(long, default_value_t = 5000)]
    events: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PhaseArgs {
    /// Number of interior density points.
    #[arg(long, default_value_t = 200)]
    steps: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Demand profile: symmetric, asymmetric or config.
    #[arg(long, default_value = "symmetric")]
    profile: String,
    /// Demand scales c.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SCALES)]
    scale: Vec<f64>,
    /// Train counts (defaults to every count strictly between 0 and n).
    #[arg(long, value_delimiter = ',')]
    trains: Option<Vec<usize>>,
    /// Simulated departure events per cell.
    #[arg(long, default_value_t = 5000)]
    events: usize,
    /// Upload rate (passengers/s) where the configuration has none.
    #[arg(long, default_value_t = 30.0)]
    alpha: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct InstabilityArgs {
    #[arg(long, default_value_t = 4)]
    trains: usize,
    /// Arrival to upload rate ratio λ/α at every platform.
    #[arg(long, default_value_t = 0.1)]
    ratio: f64,
    /// Injected delay (s).
    #[arg(long, default_value_t = 30.0)]
    delay: f64,
    /// Event at which the delay is injected.
    #[arg(long, default_value_t = 20)]
    event: usize,
    /// Events observed after the injection.
    #[arg(long, default_value_t = 200)]
    events: usize,
    #[arg(long, default_value_t = 30.0)]
    alpha: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// Random trials for the homogeneity and monotonicity checks.
    #[arg(long, default_value_t = 2000)]
    trials: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    manifest: PathBuf,
}

enum Failure {
    Config(String),
    Model(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Config(_) => 2,
            Failure::Model(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Model(m) | Failure::Output(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::Json(_)
            | Error::TrainCount { .. }
            | Error::UnknownProfile(_)
            | Error::DensityOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch { .. } => Failure::Config(e.to_string()),
            Error::Io(m) => Failure::Output(m),
            _ => Failure::Model(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn load_model(config: Option<&Path>) -> std::result::Result<LineModel, Failure> {
    let cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            LineConfig::from_json_str(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => LineConfig::from_json_str(PARIS_LINE14)?,
    };
    Ok(segmentize(&cfg)?)
}

fn create_csv(dir: &Path, name: &str) -> std::result::Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn eigen(model: &LineModel, args: &EigenArgs) -> Outcome {
    let m = args
        .trains
        .unwrap_or_else(|| analysis::optimal_train_count(model));
    let n = model.n();
    let placement = place_trains(model, m)?;
    println!("segments     {n}");
    println!("trains       {m}");
    if placement.is_degenerate() {
        println!("headway      inf s");
        println!("frequency    0 trains/h");
        return Ok(());
    }
    let closed = closed_form_headway(model, m);
    let spectral = generalized_eigenpair(&build_maxplus_system(model, &placement)?)?.mu;
    let sys = build_maxplus_affine(model, &placement)?;
    let simulated = simulate(
        &sys,
        model,
        &placement,
        &default_initial_departures(model, &placement),
        args.events,
    )?
    .headway();
    let values = [closed, spectral, simulated];
    let mut diff = 0.0f64;
    for a in values {
        for b in values {
            diff = diff.max((a - b).abs() / a.abs().min(b.abs()));
        }
    }
    println!("closed form  {closed:.6} s");
    println!("spectral     {spectral:.6} s");
    println!("simulated    {simulated:.6} s");
    println!("frequency    {:.4} trains/h", 3600.0 / closed);
    println!("max rel diff {diff:.3e}");
    Ok(())
}

fn phase(model: &LineModel, args: &PhaseArgs, out: &Path) -> Outcome {
    let p = DiagramParams::from_model(model);
    let points = phase_diagram(&p, args.steps)?;
    let mut w = create_csv(out, "phase_diagram.csv")?;
    analysis::write_phase_diagram_csv(&points, &mut w)?;
    w.flush()?;
    println!(
        "free flow below   {:.4} trains/km",
        p.free_flow_limit() * 1000.0
    );
    println!(
        "congestion above  {:.4} trains/km",
        p.congestion_onset() * 1000.0
    );
    println!("max frequency     {:.4} trains/h", p.f_max * 3600.0);
    Ok(())
}

fn demand_sweep(model: &LineModel, args: &SweepArgs, out: &Path) -> Outcome {
    let profile = DemandProfile::by_name(&args.profile, model)?;
    let demand = profile.to_demand(model, args.alpha)?;
    let ms: Vec<usize> = match &args.trains {
        Some(ms) => ms.clone(),
        None => (1..model.n()).collect(),
    };
    let rows = sweep_density(model, &demand, &ms, &args.scale, args.events)?;
    let mut w = create_csv(out, "demand_sweep.csv")?;
    analysis::write_demand_sweep_csv(&profile.name, &rows, &mut w)?;
    w.flush()?;
    println!("{} rows for profile {}", rows.len(), profile.name);
    Ok(())
}

fn instability(model: &LineModel, args: &InstabilityArgs, out: &Path) -> Outcome {
    let demand = uniform_ratio_demand(model, args.ratio, args.alpha)?;
    let cmp = compare_instability(
        model,
        args.trains,
        &demand,
        args.delay,
        args.event,
        args.events,
    )?;
    let mut w = create_csv(out, "instability.csv")?;
    analysis::write_instability_csv(
        &[
            ("uncontrolled", &cmp.uncontrolled),
            ("controlled", &cmp.controlled),
        ],
        &mut w,
    )?;
    w.flush()?;
    println!(
        "uncontrolled amplification {:.6e}",
        cmp.uncontrolled.amplification
    );
    println!(
        "controlled amplification   {:.6e}",
        cmp.controlled.amplification
    );
    Ok(())
}

fn validate(model: &LineModel, args: &ValidateArgs, seed: u64) -> Outcome {
    let p = DiagramParams::from_model(model);
    let m = analysis::optimal_train_count(model);
    println!("segments       {}", model.n());
    println!("platforms      {}", model.platforms().len());
    println!("length         {:.3} km", model.length() / 1000.0);
    println!("h_min          {:.4} s", model.h_min());
    println!("v              {:.3} km/h", p.v * 3.6);
    println!("w'             {:.3} km/h", p.w_prime * 3.6);
    println!("f_max          {:.3} trains/h", p.f_max * 3600.0);
    println!("optimal trains {m}");
    if m == 0 {
        return Ok(());
    }
    let placement = place_trains(model, m)?;
    let maxplus = build_maxplus_affine(model, &placement)?;
    let ctrl = analysis::control_params(model, &placement, model.demand())?;
    let controlled = build_controlled_system(model, &placement, &ctrl)?;
    for (name, sys) in [("max-plus", &maxplus), ("controlled", &controlled)] {
        let report = check_homogeneous_monotone(sys, args.trials, 1000.0, seed);
        println!(
            "{name:<14} homogeneous={} monotone={} nonexpansive={}",
            report.is_homogeneous(),
            report.is_monotone(),
            report.is_nonexpansive()
        );
        if !report.passes() {
            return Err(Failure::Model(format!(
                "{name} dynamics fail the monotonicity check"
            )));
        }
    }
    Ok(())
}

fn run(config: Option<&Path>, out: &Path, seed: u64, command: &Command) -> Outcome {
    if let Command::Replay(args) = command {
        let manifest = RunManifest::read(&args.manifest)
            .map_err(|e| Failure::Config(format!("{}: {e}", args.manifest.display())))?;
        return run(
            manifest.config.as_deref(),
            out,
            manifest.seed,
            &manifest.command,
        );
    }
    let model = load_model(config)?;
    match command {
        Command::Eigen(a) => return eigen(&model, a),
        Command::Validate(a) => return validate(&model, a, seed),
        Command::PhaseDiagram(a) => phase(&model, a, out)?,
        Command::DemandSweep(a) => demand_sweep(&model, a, out)?,
        Command::Instability(a) => instability(&model, a, out)?,
        Command::Replay(_) => unreachable!(),
    }
    RunManifest::new(config, seed, out, command.clone()).write()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.config.as_deref(), &cli.out, cli.seed, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
