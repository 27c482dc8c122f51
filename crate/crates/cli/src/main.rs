use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use circsizer::circkernel::Concentration;
use circsizer::inference::{BootstrapConfig, Data, Mode};
use circsizer::io::{self, AngleUnit, Convention, IngestSpec};
use circsizer::render::{self, LabelType, Palette, RadialScale, RenderSpec};
use circsizer::simgen::{self, ScenarioKind, ScenarioProvenance, ScenarioRegistry};
use circsizer::sizermap::{
    self, log_spaced, linear_spaced, Provenance, SizerMap, SmoothingGrid,
    DEFAULT_ESS_THRESHOLD, DEFAULT_NGRID_DENSITY, DEFAULT_NGRID_REGRESSION,
};

/// Scale-space significance maps (CircSiZer) for circular data.
#[derive(Debug, Parser)]
#[command(name = "circsizer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Significance map for the derivative of a circular density.
    Density(RunArgs),
    /// Significance map for the slope of a circular-linear regression.
    Regression(RunArgs),
    /// Same as `density`/`regression`, choosing the mode by flag.
    Run {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Writes a simulated sample from a named scenario as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Density,
    Regression,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Density => Mode::Density,
            ModeArg::Regression => Mode::Regression,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitArg {
    Degrees,
    Radians,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Compass,
    Math,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::Compass => Convention::Compass,
            ConventionArg::Math => Convention::Math,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PaletteArg {
    Default,
    Grayscale,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Index,
    Log,
    Linear,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// CSV file with a header row.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    input: Option<PathBuf>,
    /// Simulate the data from a named scenario instead of reading a file.
    #[arg(long)]
    scenario: Option<String>,
    /// Sample size for --scenario.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Concentration grid: a comma list (`1,5,10`) or `min:max:count`.
    #[arg(long)]
    nu: Option<String>,
    /// Space a `min:max:count` grid logarithmically.
    #[arg(long)]
    nu_log: bool,
    /// Number of equispaced evaluation angles [default: 250 density, 150 regression].
    #[arg(long)]
    ngrid: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = 500)]
    b: usize,
    /// Inner replicates for the regression standard error.
    #[arg(long = "B2", default_value_t = 250)]
    b2: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ESS_THRESHOLD)]
    ess_threshold: f64,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Angular labels: 1 directions, 2 hours, 3 radians, 4 degrees.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=4))]
    labels: u8,
    /// Convention of the input angles and of the rendered map.
    #[arg(long, value_enum, default_value_t = ConventionArg::Math)]
    convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = UnitArg::Radians)]
    angle_unit: UnitArg,
    #[arg(long, default_value = "theta")]
    angle_column: String,
    #[arg(long, default_value = "y")]
    response_column: String,
    /// Column used to check that rows are evenly spaced in time.
    #[arg(long)]
    timestamp_column: Option<String>,
    /// Keep every lag-th row of the input file.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    lag: Option<u64>,
    /// Raw value marking a missing observation (repeatable).
    #[arg(long, allow_negative_numbers = true)]
    sentinel: Vec<f64>,
    #[arg(long, value_enum, default_value_t = PaletteArg::Default)]
    palette: PaletteArg,
    #[arg(long, value_enum, default_value_t = ScaleArg::Index)]
    radial_scale: ScaleArg,
    /// SVG width and height in pixels.
    #[arg(long, default_value_t = 640)]
    size: u32,
    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV [default: standard output].
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_nu_grid(text: &str, log: bool) -> Result<Vec<Concentration>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("nu range must be min:max:count, got '{text}'");
        }
        let min: f64 = parts[0].trim().parse().with_context(|| format!("nu min '{}'", parts[0]))?;
        let max: f64 = parts[1].trim().parse().with_context(|| format!("nu max '{}'", parts[1]))?;
        let count: usize = parts[2].trim().parse().with_context(|| format!("nu count '{}'", parts[2]))?;
        let grid = if log {
            log_spaced(min, max, count)?
        } else {
            linear_spaced(min, max, count)?
        };
        return Ok(grid);
    }
    text.split(',')
        .map(|v| {
            let x: f64 = v.trim().parse().with_context(|| format!("nu value '{v}'"))?;
            Ok(Concentration::new(x)?)
        })
        .collect()
}

fn fmt_nu(grid: &[Concentration]) -> String {
    grid.iter()
        .map(|v| v.value().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

struct Loaded {
    data: Data,
    provenance: Provenance,
}

fn load_data(args: &RunArgs, mode: Mode) -> Result<Loaded> {
    if let Some(name) = &args.scenario {
        let scenario = ScenarioRegistry::builtin().get(name)?;
        let mut rng = simgen::simulation_rng(args.seed);
        let data = match (&scenario.kind, mode) {
            (ScenarioKind::Density(spec), Mode::Density) => {
                Data::Density(simgen::sample_mixture(spec, args.n, &mut rng)?)
            }
            (ScenarioKind::Regression(model), Mode::Regression) => {
                Data::Regression(simgen::sample_regression(model, args.n, &mut rng)?)
            }
            _ => bail!("scenario '{}' is not a {mode} scenario", scenario.info.name),
        };
        let provenance = Provenance {
            kind: "scenario".into(),
            source: scenario.info.name.clone(),
            n: data.len(),
            note: Some(scenario_note(&scenario.info.provenance, &scenario.info.note)),
            details: BTreeMap::new(),
        };
        return Ok(Loaded { data, provenance });
    }
    let path = args.input.as_ref().expect("clap enforces input or scenario");
    let spec = IngestSpec {
        angle_column: args.angle_column.clone(),
        response_column: (mode == Mode::Regression).then(|| args.response_column.clone()),
        angle_unit: match args.angle_unit {
            UnitArg::Degrees => AngleUnit::Degrees,
            UnitArg::Radians => AngleUnit::Radians,
        },
        convention: args.convention.into(),
        timestamp_column: args.timestamp_column.clone(),
        lag: args.lag.map(|l| l as usize),
        sentinels: args.sentinel.clone(),
    };
    let ingested = io::ingest(path, &spec)?;
    if !ingested.dropped.is_empty() {
        eprintln!(
            "dropped {} of {} selected rows",
            ingested.dropped.len(),
            ingested.dropped.len() + ingested.data.len()
        );
        for row in ingested.dropped.iter().take(10) {
            eprintln!("  line {}: {}", row.line, row.reason);
        }
        if ingested.dropped.len() > 10 {
            eprintln!("  ...");
        }
    }
    for w in &ingested.warnings {
        eprintln!("warning: {w}");
    }
    let mut details = BTreeMap::new();
    details.insert("rows_read".into(), ingested.rows_read.to_string());
    details.insert("rows_dropped".into(), ingested.dropped.len().to_string());
    Ok(Loaded {
        provenance: Provenance {
            kind: "file".into(),
            source: path.display().to_string(),
            n: ingested.data.len(),
            note: None,
            details,
        },
        data: ingested.data,
    })
}

fn scenario_note(provenance: &ScenarioProvenance, note: &str) -> String {
    match provenance {
        ScenarioProvenance::Published => format!("published parameters; {note}"),
        ScenarioProvenance::StandIn => format!("stand-in parameters, not the original values; {note}"),
    }
}

fn run(args: RunArgs, mode: Mode) -> Result<()> {
    let ngrid = args.ngrid.unwrap_or(match mode {
        Mode::Density => DEFAULT_NGRID_DENSITY,
        Mode::Regression => DEFAULT_NGRID_REGRESSION,
    });
    let nu_grid = match &args.nu {
        Some(text) => parse_nu_grid(text, args.nu_log)?,
        None => SmoothingGrid::default_nu_grid(),
    };
    let grid = SmoothingGrid::new(ngrid, nu_grid)?;
    let config = BootstrapConfig {
        alpha: args.alpha,
        b: args.b,
        b2: args.b2,
        seed: args.seed,
    };
    config.validate()?;
    let render_spec = RenderSpec {
        label_type: LabelType::from_code(args.labels)?,
        palette: match args.palette {
            PaletteArg::Default => Palette::Default,
            PaletteArg::Grayscale => Palette::Grayscale,
        },
        radial_scale: match args.radial_scale {
            ScaleArg::Index => RadialScale::Index,
            ScaleArg::Log => RadialScale::Log,
            ScaleArg::Linear => RadialScale::Linear,
        },
        display_convention: args.convention.into(),
        size: args.size,
    };

    let Loaded { data, mut provenance } = load_data(&args, mode)?;
    let d = &mut provenance.details;
    d.insert("mode".into(), mode.to_string());
    d.insert("ngrid".into(), ngrid.to_string());
    d.insert("nu".into(), fmt_nu(grid.nu_grid()));
    d.insert("seed".into(), args.seed.to_string());
    d.insert("labels".into(), args.labels.to_string());
    d.insert("convention".into(), format!("{:?}", args.convention).to_lowercase());
    d.insert("palette".into(), format!("{:?}", args.palette).to_lowercase());
    d.insert("radial_scale".into(), format!("{:?}", args.radial_scale).to_lowercase());
    d.insert("size".into(), args.size.to_string());
    if args.input.is_some() {
        d.insert("angle_unit".into(), format!("{:?}", args.angle_unit).to_lowercase());
        d.insert("angle_column".into(), args.angle_column.clone());
        if mode == Mode::Regression {
            d.insert("response_column".into(), args.response_column.clone());
        }
        d.insert("lag".into(), args.lag.unwrap_or(1).to_string());
        if let Some(t) = &args.timestamp_column {
            d.insert("timestamp_column".into(), t.clone());
        }
        if !args.sentinel.is_empty() {
            let s: Vec<String> = args.sentinel.iter().map(f64::to_string).collect();
            d.insert("sentinels".into(), s.join(","));
        }
    }
    eprintln!(
        "{mode}: n={}, {} concentrations x {} angles, B={}{}",
        data.len(),
        grid.nu_grid().len(),
        ngrid,
        config.b,
        if mode == Mode::Regression {
            format!(", B2={}", config.b2)
        } else {
            String::new()
        }
    );

    let nu_values: Vec<f64> = grid.nu_grid().iter().map(|v| v.value()).collect();
    let compute = || {
        sizermap::build_map_with_progress(&data, &grid, &config, args.ess_threshold, |done, total| {
            eprintln!(
                "  ring {done}/{total} (nu={}): {} bootstrap replicates done",
                nu_values[done - 1],
                config.b
            );
        })
    };
    let mut map = match args.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .context("starting worker pool")?
            .install(compute)?,
        None => compute()?,
    };
    map.provenance = Some(provenance);

    print_summary(&map);
    if let Some(path) = &args.out_json {
        io::export_map(&map, path)?;
        eprintln!("wrote {}", path.display());
    }
    if let Some(path) = &args.out_svg {
        render::write_svg(&map, &render_spec, path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn print_summary(map: &SizerMap) {
    let fmt = |angles: Vec<circsizer::circkernel::Angle>| {
        angles
            .iter()
            .map(|a| format!("{:.3}", a.radians()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for row in map.features() {
        let (peaks, troughs) = (row.peaks(), row.troughs());
        println!(
            "nu={}\tpeaks={}\ttroughs={}\tpeak_at=[{}]\ttrough_at=[{}]",
            row.nu.value(),
            peaks.len(),
            troughs.len(),
            fmt(peaks),
            fmt(troughs)
        );
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let scenario = ScenarioRegistry::builtin().get(&args.scenario)?;
    let mut rng = simgen::simulation_rng(args.seed);
    let data = match &scenario.kind {
        ScenarioKind::Density(spec) => Data::Density(simgen::sample_mixture(spec, args.n, &mut rng)?),
        ScenarioKind::Regression(model) => {
            Data::Regression(simgen::sample_regression(model, args.n, &mut rng)?)
        }
    };
    let comments = vec![
        format!(
            "scenario {} n={} seed={}",
            scenario.info.name, args.n, args.seed
        ),
        scenario_note(&scenario.info.provenance, &scenario.info.note),
        "angles in radians, counterclockwise from East".to_string(),
    ];
    match &args.output {
        Some(path) => {
            let mut buf = Vec::new();
            io::write_sample_csv(&data, &comments, &mut buf)?;
            write_file(path, &buf)?;
            eprintln!("wrote {} rows to {}", data.len(), path.display());
        }
        None => io::write_sample_csv(&data, &comments, std::io::stdout().lock())?,
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Density(args) => run(args, Mode::Density),
        Command::Regression(args) => run(args, Mode::Regression),
        Command::Run { mode, args } => run(args, mode.into()),
        Command::Simulate(args) => simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
