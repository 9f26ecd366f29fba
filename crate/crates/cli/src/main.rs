mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use sirtail::battery::{analyze, run_battery, scenario_rows, Battery, ScenarioAnalysis, VerdictRow};
use sirtail::model::NetworkScenario;

use config::RunConfig;
use report::{ScenarioEntry, SweepRow};

#[derive(Parser)]
#[command(
    name = "sirtail",
    version,
    about = "Monte Carlo and asymptotic SIR tail analysis for spatial network models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// More log output; repeat for more detail.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse the configured scenario, or a whole battery.
    Run(Common),
    /// Re-run the configured scenario for each value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Scenario parameter to vary.
        #[arg(long, value_enum)]
        parameter: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
    /// Print the default configuration as TOML.
    Config,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Base seed; every scenario derives its own streams from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count per scenario.
    #[arg(short = 'n', long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Run a predefined scenario battery instead of the configured scenario.
    #[arg(short, long, value_enum)]
    battery: Option<BatteryArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BatteryArg {
    TailMatrix,
    NearestMatrix,
    Conjectures,
    EdgeUser,
}

impl From<BatteryArg> for Battery {
    fn from(b: BatteryArg) -> Self {
        match b {
            BatteryArg::TailMatrix => Battery::TailMatrix,
            BatteryArg::NearestMatrix => Battery::NearestMatrix,
            BatteryArg::Conjectures => Battery::Conjectures,
            BatteryArg::EdgeUser => Battery::EdgeUser,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    Lambda,
    Alpha,
    Epsilon,
    M,
    B,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Alpha => "alpha",
            SweepParam::Epsilon => "epsilon",
            SweepParam::M => "m",
            SweepParam::B => "b",
        }
    }

    fn apply(self, sc: &NetworkScenario, v: f64) -> NetworkScenario {
        let mut s = *sc;
        match self {
            SweepParam::Lambda => s.lambda = v,
            SweepParam::Alpha => s.path_loss.alpha = v,
            SweepParam::Epsilon => s.path_loss.epsilon = v,
            SweepParam::M => s.fading.m = v,
            SweepParam::B => s.link_distance = v,
        }
        s
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn load(common: &Common) -> AnyResult<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(n) = common.samples {
        cfg.samples = Some(n);
    }
    if let Some(o) = &common.out {
        cfg.outputs.dir = o.clone();
    }
    if let Some(b) = common.battery {
        cfg.battery = Some(b.into());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_all(
    dir: &Path,
    command: &str,
    cfg: &RunConfig,
    analyses: &[(String, &ScenarioAnalysis)],
    rows: &[VerdictRow],
) -> AnyResult<()> {
    let mut entries = Vec::new();
    for (name, a) in analyses {
        report::write_scenario(&dir.join(name), a, rows)?;
        entries.push(ScenarioEntry::new(name.clone(), a));
    }
    report::write_verdicts(dir, rows)?;
    report::write_manifest(dir, command, cfg, &entries, rows)?;
    Ok(())
}

fn log_rows(rows: &[VerdictRow]) {
    for r in rows {
        let line = format!(
            "{:?} {} | fitted class {:?} order {:?}",
            r.verdict, r.anchor, r.fitted_class, r.fitted_order
        );
        if r.passed() {
            info!("{line}");
        } else {
            warn!("{line}");
        }
    }
}

fn run(common: &Common) -> AnyResult<bool> {
    let cfg = load(common)?;
    let acfg = cfg.analysis_config();
    let dir = &cfg.outputs.dir;
    let (analyses, rows) = match cfg.battery {
        Some(b) => {
            info!("battery {} with {} samples per scenario", b.name(), acfg.samples);
            let rep = run_battery(b, &cfg.battery_params, &acfg)?;
            (rep.analyses, rep.rows)
        }
        None => {
            info!("scenario {} with {} samples", cfg.scenario.label(), acfg.samples);
            let a = analyze(&cfg.scenario, &acfg)?;
            let rows = scenario_rows(&a, "run", &acfg);
            (vec![a], rows)
        }
    };
    let named: Vec<(String, &ScenarioAnalysis)> = analyses
        .iter()
        .enumerate()
        .map(|(i, a)| (report::scenario_dir(i, a), a))
        .collect();
    write_all(dir, "run", &cfg, &named, &rows)?;
    log_rows(&rows);
    let ok = rows.iter().all(VerdictRow::passed);
    info!(
        "wrote {}; {}",
        dir.display(),
        if ok { "all verdicts pass" } else { "some verdicts fail" }
    );
    Ok(ok)
}

fn sweep(common: &Common, param: SweepParam, values: &[f64]) -> AnyResult<bool> {
    if values.is_empty() {
        return Err("sweep needs at least one value".into());
    }
    let cfg = load(common)?;
    if cfg.battery.is_some() {
        return Err("sweep varies the configured scenario; it cannot be combined with a battery".into());
    }
    let mut problems = Vec::new();
    let scenarios: Vec<NetworkScenario> = values
        .iter()
        .map(|&v| {
            let s = param.apply(&cfg.scenario, v);
            problems.extend(
                s.violations()
                    .into_iter()
                    .map(|e| format!("{} = {v}: {e}", param.name())),
            );
            s
        })
        .collect();
    if !problems.is_empty() {
        return Err(config::ConfigError::Invalid(problems).into());
    }
    let acfg = cfg.analysis_config();
    let dir = &cfg.outputs.dir;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut entries = Vec::new();
    for (i, (&v, sc)) in values.iter().zip(&scenarios).enumerate() {
        info!("{} = {v}: {} with {} samples", param.name(), sc.label(), acfg.samples);
        let a = analyze(sc, &acfg)?;
        let r = scenario_rows(&a, "sweep", &acfg);
        for t in &a.tails {
            let expected = r
                .iter()
                .find(|x| x.mode == t.mode && x.regime == t.regime && x.expected_order.is_finite());
            summary.push(SweepRow::new(param.name(), v, t, expected));
        }
        // labels repeat across values, so each report gets only its own rows
        let name = format!("{i:02}_{}_{v}", param.name());
        report::write_scenario(&dir.join(&name), &a, &r)?;
        entries.push(ScenarioEntry::new(name, &a));
        rows.extend(r);
    }
    report::write_verdicts(dir, &rows)?;
    report::write_sweep_summary(dir, &summary)?;
    report::write_manifest(dir, &format!("sweep {}", param.name()), &cfg, &entries, &rows)?;
    log_rows(&rows);
    Ok(rows.iter().all(VerdictRow::passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    let outcome = match &cli.command {
        Command::Run(c) => run(c),
        Command::Sweep {
            common,
            parameter,
            values,
        } => sweep(common, *parameter, values),
        Command::Config => {
            print!("{}", RunConfig::default().to_toml());
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
