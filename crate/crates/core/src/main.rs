use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ader_mp::harness::{
    csv_string, initial_error_table, run_single, run_sweep, summary, write_initial_error_csv,
    ConfigMap, ExperimentConfig,
};
use ader_mp::metrics::max_velocity;
use ader_mp::{Error, Result};

#[derive(Parser)]
#[command(name = "ader-mp", version, about = "Mixed-precision ADER-DG experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and print its error.
    Run(Common),
    /// Sweep over orders and meshes; writes a CSV.
    Convergence(Common),
    /// Sweep over precision presets; writes a CSV.
    PrecisionSweep(Common),
    /// Relative error of casting the initial condition to each format.
    InitialError(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// Order N, or a comma-separated list for sweeps.
    #[arg(long)]
    order: Option<String>,
    /// Cells per dimension, or a comma-separated list.
    #[arg(long)]
    cells: Option<String>,
    /// Preset such as uniform-fp32/predictor=fp16, or a comma-separated list.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    storage: Option<String>,
    #[arg(long)]
    predictor: Option<String>,
    #[arg(long)]
    picard: Option<String>,
    #[arg(long)]
    corrector: Option<String>,
    /// Base formats of the generated mixed-precision grid.
    #[arg(long)]
    bases: Option<String>,
    /// Target formats of the generated mixed-precision grid.
    #[arg(long)]
    targets: Option<String>,
    /// Formats for initial-error.
    #[arg(long)]
    formats: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    #[arg(long)]
    t_end_override: Option<String>,
    #[arg(long)]
    lake_eta0: Option<String>,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn into_map(self) -> Result<ConfigMap> {
        let mut map = match &self.config {
            Some(p) => ConfigMap::load(p)?,
            None => ConfigMap::default(),
        };
        let flags = [
            ("scenario", self.scenario),
            ("order", self.order),
            ("cells", self.cells),
            ("preset", self.preset),
            ("storage", self.storage),
            ("predictor", self.predictor),
            ("picard", self.picard),
            ("corrector", self.corrector),
            ("bases", self.bases),
            ("targets", self.targets),
            ("formats", self.formats),
            ("cfl", self.cfl),
            ("t_end_override", self.t_end_override),
            ("lake_eta0", self.lake_eta0),
            ("out", self.out.map(|p| p.display().to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.set(k, &v)?;
            }
        }
        if self.parallel {
            map.set("parallel", "true")?;
        }
        Ok(map)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => File::create(p)?.write_all(text.as_bytes())?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn single(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.orders.len() != 1 || cfg.cells.len() != 1 || cfg.presets.len() != 1 {
        return Err(Error::Config("run takes a single order, cell count and preset".into()));
    }
    let mut rc = cfg.base.clone();
    rc.order = cfg.orders[0];
    rc.cells = cfg.cells[0];
    rc.preset = cfg.presets[0].clone();
    let rep = run_single(&rc)?;
    println!(
        "{} N={} n={} preset={} steps={} t={:.6} outcome={} elapsed={:.3}s",
        rc.scenario,
        rc.order,
        rc.cells,
        rc.preset.name,
        rep.steps,
        rep.final_time,
        rep.error.outcome,
        rep.elapsed.as_secs_f64()
    );
    match (rep.error.l2, rep.error.max) {
        (Some(l2), Some(mx)) => println!("l2_error={l2:.16e} max_error={mx:.16e}"),
        _ => println!(
            "failed at t={:.6} in {}",
            rep.error.failure_time.unwrap_or(f64::NAN),
            rep.error.failure_kernel.map(|k| k.name()).unwrap_or("unknown")
        ),
    }
    if rc.scenario == ader_mp::scenarios::ScenarioName::SweLake && rep.error.l2.is_some() {
        println!("max_velocity={:.16e}", max_velocity(&rep.grid));
    }
    Ok(())
}

fn sweep(cfg: &ExperimentConfig) -> Result<()> {
    let res = run_sweep(cfg)?;
    for s in &res.skipped {
        eprintln!("{s}");
    }
    eprint!("{}", summary(&res.rows));
    emit(cfg.out.as_ref(), &csv_string(&res.rows)?)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run(c) => single(&c.into_map()?.experiment()?),
        Cmd::Convergence(c) | Cmd::PrecisionSweep(c) => sweep(&c.into_map()?.experiment()?),
        Cmd::InitialError(c) => {
            let map = c.into_map()?;
            let cfg = map.experiment()?;
            let rows = initial_error_table(&cfg.base, &cfg.orders, &cfg.cells, &map.formats()?)?;
            let mut buf = Vec::new();
            write_initial_error_csv(&rows, &mut buf)?;
            emit(cfg.out.as_ref(), &String::from_utf8_lossy(&buf))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
