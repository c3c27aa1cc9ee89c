use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use delam::config::{Config, Overrides};
use delam::laws;
use delam::model::{validate_scenario, AlphaEvaluation, FitScenario, ModelKind};
use delam::output::{write_run, Units};
use delam::run::{run, RunStatus};

#[derive(Parser)]
#[command(name = "delam", version, about = "Quasistatic adhesive-contact delamination in 2D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its tables.
    Run(RunArgs),
    /// Check a scenario without running it.
    Validate {
        config: PathBuf,
    },
    /// Tabulate the plasticity-derived fracture energy against mode mixity.
    GcCurve(GcArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    #[arg(long)]
    model: Option<ModelKind>,
    /// 1, 2 or none.
    #[arg(long, value_parser = parse_fit)]
    fit_scenario: Option<Fit>,
    /// Time step in seconds.
    #[arg(long)]
    tau: Option<f64>,
    /// Interface elements of a built-in benchmark.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    bulk_layers: Option<usize>,
    #[arg(long, value_parser = parse_alpha_at)]
    lebim_alpha_at: Option<AlphaEvaluation>,
    /// Output directory; defaults to `runs/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "si")]
    units: Units,
}

#[derive(Clone, Copy)]
struct Fit(Option<FitScenario>);

fn parse_fit(s: &str) -> Result<Fit, String> {
    match s {
        "none" => Ok(Fit(None)),
        _ => {
            let n: u8 = s.parse().map_err(|_| format!("expected 1, 2 or none, got '{s}'"))?;
            FitScenario::from_number(n).map(|f| Fit(Some(f))).map_err(|e| e.to_string())
        }
    }
}

fn parse_alpha_at(s: &str) -> Result<AlphaEvaluation, String> {
    match s {
        "current" => Ok(AlphaEvaluation::Current),
        "previous" => Ok(AlphaEvaluation::Previous),
        _ => Err(format!("expected current or previous, got '{s}'")),
    }
}

#[derive(clap::Args)]
struct GcArgs {
    /// Yield stress as fractions of sqrt(2 kappa_t a_I).
    #[arg(long, value_delimiter = ',')]
    yield_factor: Vec<f64>,
    /// Hardening modulus as fractions of kappa_t.
    #[arg(long, value_delimiter = ',')]
    kappa_h_ratio: Vec<f64>,
    #[arg(long, default_value_t = 75e9)]
    kappa_t: f64,
    #[arg(long, default_value_t = 187.5)]
    a_i: f64,
    /// Samples on [0, 90] degrees.
    #[arg(long, default_value_t = 181)]
    points: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(config: &Path) -> anyhow::Result<(Config, String)> {
    Config::load(config).with_context(|| format!("reading {}", config.display()))
}

fn cmd_run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let (cfg, hash) = load(&args.config)?;
    let overrides = Overrides {
        model: args.model,
        fit_scenario: args.fit_scenario.map(|f| f.0),
        tau: args.tau,
        n: args.n,
        bulk_layers: args.bulk_layers,
        lebim_alpha_at: args.lebim_alpha_at,
    };
    if overrides.model == Some(ModelKind::Aprim) && matches!(overrides.fit_scenario, Some(Some(_))) {
        bail!("--fit-scenario applies to the brittle model only");
    }
    let scenario = cfg.scenario(&overrides, args.config.parent())?;
    let report = validate_scenario(&scenario);
    for w in &report.warnings {
        log::warn!("{w}");
    }
    if !report.is_runnable() {
        for v in &report.violations {
            eprintln!("invalid: {v}");
        }
        return Ok(ExitCode::from(2));
    }
    let name = if scenario.name.is_empty() { "run".to_string() } else { scenario.name.clone() };
    let out = args.out.unwrap_or_else(|| Path::new("runs").join(&name));
    log::info!("{name}: {:?}, {} steps of {} s", scenario.model, scenario.load.steps, scenario.load.tau);
    let art = run(&scenario)?;
    write_run(&out, &scenario, &art, args.units, Some(&hash))?;
    let broken = art.final_state.z.iter().filter(|&&z| z == 0.0).count();
    println!(
        "{name}: {}/{} steps, {broken}/{} segments debonded, max KKT residual {:.1e}, written to {}",
        art.steps_completed,
        scenario.load.steps,
        art.final_state.z.len(),
        art.max_kkt,
        out.display()
    );
    match art.status {
        RunStatus::Completed => Ok(ExitCode::SUCCESS),
        RunStatus::Failed { step, message } => {
            eprintln!("failed at step {step}: {message}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_validate(config: &Path) -> anyhow::Result<ExitCode> {
    let (cfg, hash) = load(config)?;
    let scenario = cfg.scenario(&Overrides::default(), config.parent())?;
    let report = validate_scenario(&scenario);
    println!(
        "{}: {:?}, {} nodes, {} triangles, {} interface segments, {} steps (sha256 {hash})",
        config.display(),
        scenario.model,
        scenario.mesh.nodes.len(),
        scenario.mesh.triangles.len(),
        scenario.mesh.interface.segments.len(),
        scenario.load.steps
    );
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for v in &report.violations {
        println!("invalid: {v}");
    }
    Ok(if report.is_runnable() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_gc_curve(args: GcArgs) -> anyhow::Result<ExitCode> {
    if args.points < 2 {
        bail!("--points must be at least 2");
    }
    // Without explicit lists: a yield-stress family at kappa_H = 0.11 kappa_t
    // and a hardening family at 0.75 sqrt(2 kappa_t a_I).
    let sets: Vec<(f64, f64)> = match (args.kappa_h_ratio.is_empty(), args.yield_factor.is_empty()) {
        (true, true) => [0.55, 0.65, 0.75, 0.85, 0.95]
            .iter()
            .map(|&y| (0.11, y))
            .chain([0.05, 0.2, 0.5, 1.0].iter().map(|&k| (k, 0.75)))
            .collect(),
        _ => {
            let kh = if args.kappa_h_ratio.is_empty() { vec![0.11] } else { args.kappa_h_ratio.clone() };
            let yf = if args.yield_factor.is_empty() { vec![0.75] } else { args.yield_factor.clone() };
            kh.iter().flat_map(|&k| yf.iter().map(move |&y| (k, y))).collect()
        }
    };
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["kappa_h_ratio", "yield_factor", "psi_G_deg", "alpha_over_aI", "aii_over_ai"])?;
    for (kh_ratio, yf) in sets {
        let kh = kh_ratio * args.kappa_t;
        let sy = yf * laws::sigma_t_crit(args.kappa_t, args.a_i);
        let ratio = laws::sensitivity_ratio(args.a_i, args.kappa_t, kh, sy);
        for i in 0..args.points {
            let deg = 90.0 * i as f64 / (args.points - 1) as f64;
            let a = laws::alpha_plasticity_derived(deg.to_radians(), args.a_i, args.kappa_t, kh, sy)
                .with_context(|| format!("kappa_h_ratio {kh_ratio}, yield_factor {yf}"))?;
            w.write_record([kh_ratio.to_string(), yf.to_string(), deg.to_string(), (a / args.a_i).to_string(), ratio.to_string()])?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Validate { config } => cmd_validate(&config),
        Command::GcCurve(args) => cmd_gc_curve(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
