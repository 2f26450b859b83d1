//! Command-line front end.
//!
//! Exit status: 0 success, 1 tolerance breach in `validate`, 2 usage or
//! config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aoiplp::harness::report::{config_echo, render_analytic, render_comparison, render_simulation};
use aoiplp::harness::sweep::SweepRow;
use aoiplp::harness::{
    compare, emit_csv, emit_svg_chart, load_config_with, load_sweep, parse_config, preset_sweep,
    presets, run_sweep, to_csv_string, SweepSpec, SweepTable,
};
use aoiplp::{evaluate_scenario, run_simulation, Error, ScenarioConfig, SimConfig};

#[derive(Parser)]
#[command(
    name = "aoiplp",
    version,
    about = "AoI and deadline-loss analysis of a slotted random-access uplink"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the analytic model for a scenario.
    Analytic {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output format.
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Simulate a scenario slot by slot.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Output format.
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Run a sweep file and write its CSV and/or SVG outputs.
    Sweep {
        /// Sweep file, or a shipped preset name (fig3, fig4, fig5).
        spec: String,
        #[command(flatten)]
        out: SweepArgs,
    },
    /// Simulate a scenario and compare it with the analytic model.
    /// Exits 1 when any metric is outside tolerance.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Run a shipped figure preset end to end.
    Figure {
        #[arg(value_enum)]
        name: Figure,
        #[command(flatten)]
        out: SweepArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file, or the shipped preset name paperV.cfg.
    config: String,
    /// Override a config key, e.g. --set p1=0.3. Repeatable; last wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct SimArgs {
    /// Measured slots (after warmup).
    #[arg(long, default_value_t = 1_000_000)]
    slots: u64,
    /// Warmup slots discarded before measuring.
    #[arg(long, default_value_t = SimConfig::DEFAULT_WARMUP)]
    warmup: u64,
    /// Seed of the random number generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of batches for confidence intervals.
    #[arg(long, default_value_t = SimConfig::DEFAULT_BATCHES)]
    batches: u32,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            total_slots: self.warmup.saturating_add(self.slots),
            warmup_slots: self.warmup,
            seed: self.seed,
            batch_count: self.batches,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Files to write.
    #[arg(long, value_enum, default_value_t = ChartFormat::Both)]
    format: ChartFormat,
    /// Also simulate every point.
    #[arg(long)]
    simulate: bool,
    /// Seed for simulated points (point i uses seed XOR i).
    #[arg(long)]
    seed: Option<u64>,
    /// Measured slots per simulated point.
    #[arg(long)]
    slots: Option<u64>,
    /// Override a base-scenario key, e.g. --set alpha=3.5. Repeatable; last wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChartFormat {
    Csv,
    Svg,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }
}

fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioConfig, Error> {
    let path = Path::new(&args.config);
    if !path.exists() {
        if let Some(text) = presets::get(&args.config).filter(|t| !t.contains("sweep_param")) {
            let stem = path
                .file_stem()
                .map_or("scenario".into(), |s| s.to_string_lossy());
            return parse_config(text, &stem, &args.overrides);
        }
    }
    load_config_with(path, &args.overrides)
}

fn single_row_csv(cfg: &ScenarioConfig, row: SweepRow) -> Result<String, Error> {
    to_csv_string(&SweepTable {
        label: cfg.label.clone(),
        alpha: Some(cfg.radio.path_loss_exponent),
        constraints: cfg.access.aoi_constraints.clone(),
        rows: vec![row],
    })
}

fn run_spec(mut spec: SweepSpec, args: &SweepArgs) -> Result<(), Error> {
    if args.simulate && spec.sim.is_none() {
        spec.sim = Some(SimConfig::measured(1_000_000, 1));
    }
    if let Some(sim) = spec.sim.as_mut() {
        if let Some(seed) = args.seed {
            sim.seed = seed;
        }
        if let Some(slots) = args.slots {
            sim.total_slots = sim.warmup_slots.saturating_add(slots);
        }
    }
    print!("{}", config_echo(&spec.base));
    println!(
        "# sweep {}: {} over {} value(s), gamma_db = [{}], simulate = {}",
        spec.label,
        spec.param,
        spec.values.len(),
        spec.gamma_db
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(", "),
        spec.sim.is_some()
    );
    let table = run_sweep(&spec)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    if args.format != ChartFormat::Svg {
        let path = args.out.join(format!("{}.csv", spec.label));
        emit_csv(&table, &path)?;
        println!("wrote {}", path.display());
    }
    if args.format != ChartFormat::Csv {
        let path = args.out.join(format!("{}.svg", spec.label));
        emit_svg_chart(&table, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Analytic { scenario, format } => {
            let cfg = load_scenario(&scenario)?;
            let report = evaluate_scenario(&cfg)?;
            match format {
                ReportFormat::Text => print!("{}", render_analytic(&cfg, &report)),
                ReportFormat::Csv => {
                    eprint!("{}", config_echo(&cfg));
                    print!(
                        "{}",
                        single_row_csv(&cfg, SweepRow::analytic(&cfg, &report, None))?
                    );
                }
            }
        }
        Command::Simulate {
            scenario,
            sim,
            format,
        } => {
            let cfg = load_scenario(&scenario)?;
            let sim = sim.config();
            let report = run_simulation(&cfg, &sim)?;
            match format {
                ReportFormat::Text => print!("{}", render_simulation(&cfg, &sim, &report)),
                ReportFormat::Csv => {
                    eprint!("{}", config_echo(&cfg));
                    print!(
                        "{}",
                        single_row_csv(&cfg, SweepRow::simulated(&cfg, &report, None))?
                    );
                }
            }
        }
        Command::Sweep { spec, out } => {
            let path = Path::new(&spec);
            let spec = if !path.exists() && presets::get(&spec).is_some() {
                preset_sweep(&spec, &out.overrides)?
            } else {
                load_sweep(path, &out.overrides)?
            };
            run_spec(spec, &out)?;
        }
        Command::Validate { scenario, sim } => {
            let cfg = load_scenario(&scenario)?;
            let report = compare(&cfg, &sim.config())?;
            print!("{}", config_echo(&cfg));
            print!("{}", render_comparison(&report));
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Figure { name, out } => {
            run_spec(preset_sweep(name.name(), &out.overrides)?, &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
