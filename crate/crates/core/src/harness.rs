//! Experiment driver: configuration parsing, single runs, convergence and
//! precision sweeps, CSV reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::basis::ReferenceBasis;
use crate::error::{Error, Result};
use crate::mesh::Grid;
use crate::metrics::{initial_projection_error, l2_error, ErrorReport, Outcome};
use crate::pde::DEFAULT_GRAVITY;
use crate::precision::{FloatFormat, PrecisionConfig};
use crate::scenarios::{Scenario, ScenarioName};
use crate::solver::{Solver, SolverConfig};

pub const CSV_HEADER: [&str; 14] = [
    "scenario",
    "N",
    "n",
    "h",
    "preset",
    "storage",
    "predictor",
    "picard",
    "corrector",
    "steps",
    "outcome",
    "l2_error",
    "max_error",
    "observed_order",
];

/// A named precision configuration such as `uniform-fp16/predictor=fp64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub precision: PrecisionConfig,
}

impl Preset {
    pub fn uniform(fmt: FloatFormat) -> Self {
        Self {
            name: format!("uniform-{fmt}"),
            precision: PrecisionConfig::uniform(fmt),
        }
    }

    /// Parses `uniform-<fmt>` followed by any number of `/<kernel>=<fmt>`
    /// overrides, where `<kernel>` is one of storage, predictor, picard,
    /// corrector or all (the three compute kernels).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split('/');
        let base = parts.next().unwrap_or_default();
        let fmt = base
            .strip_prefix("uniform-")
            .ok_or_else(|| Error::Config(format!("preset `{s}` must start with uniform-<format>")))?
            .parse::<FloatFormat>()?;
        let mut precision = PrecisionConfig::uniform(fmt);
        for ov in parts {
            let (kernel, value) = ov
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("malformed override `{ov}` in `{s}`")))?;
            apply_override(&mut precision, kernel.trim(), value.parse()?)?;
        }
        Ok(Self {
            name: s.to_ascii_lowercase(),
            precision,
        })
    }

    pub fn with_override(&self, kernel: &str, fmt: FloatFormat) -> Result<Self> {
        let mut precision = self.precision;
        apply_override(&mut precision, kernel, fmt)?;
        Ok(Self {
            name: format!("{}/{kernel}={fmt}", self.name),
            precision,
        })
    }
}

fn apply_override(p: &mut PrecisionConfig, kernel: &str, fmt: FloatFormat) -> Result<()> {
    match kernel.to_ascii_lowercase().as_str() {
        "storage" => p.storage = fmt,
        "predictor" => p.predictor = fmt,
        "picard" => p.picard = fmt,
        "corrector" => p.corrector = fmt,
        "all" => {
            p.predictor = fmt;
            p.picard = fmt;
            p.corrector = fmt;
        }
        other => return Err(Error::Config(format!("unknown kernel `{other}`"))),
    }
    Ok(())
}

/// Settings of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioName,
    pub order: usize,
    pub cells: usize,
    pub preset: Preset,
    /// `None` selects the order-dependent default.
    pub cfl: Option<f64>,
    pub picard_max_iters: Option<usize>,
    pub picard_tol: Option<f64>,
    pub t_end_override: Option<f64>,
    pub lake_eta0: f64,
    pub gravity: f64,
    pub parallel: bool,
}

impl RunConfig {
    pub fn new(scenario: ScenarioName, order: usize, cells: usize) -> Self {
        Self {
            scenario,
            order,
            cells,
            preset: Preset::uniform(FloatFormat::Fp64),
            cfl: None,
            picard_max_iters: None,
            picard_tol: None,
            t_end_override: None,
            lake_eta0: 2.0,
            gravity: DEFAULT_GRAVITY,
            parallel: false,
        }
    }

    pub fn with_preset(mut self, preset: Preset) -> Self {
        self.preset = preset;
        self
    }

    pub fn build_scenario(&self) -> Result<Scenario> {
        match self.scenario {
            ScenarioName::SweLake => Scenario::lake_at_rest(self.lake_eta0)?.with_gravity(self.gravity),
            name => Scenario::new(name),
        }
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cfl: self.cfl,
            picard_max_iters: self.picard_max_iters,
            picard_tol: self.picard_tol,
            precision: self.preset.precision,
            parallel: self.parallel,
            predictor: None,
            riemann: None,
        }
    }
}

/// Result of [`run_single`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub h: f64,
    pub steps: usize,
    pub final_time: f64,
    pub error: ErrorReport,
    pub elapsed: Duration,
    pub grid: Grid,
}

/// Builds, initializes and runs one simulation, then measures the L2 error
/// against the nodal analytic reference.
pub fn run_single(cfg: &RunConfig) -> Result<RunReport> {
    let scenario = cfg.build_scenario()?;
    let basis = ReferenceBasis::new(cfg.order)?;
    if let Some(t) = cfg.t_end_override {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Config(format!("t_end override must be positive, got {t}")));
        }
    }
    let t_end = cfg.t_end_override.unwrap_or(scenario.t_end);
    let mut grid = Grid::new(
        cfg.cells,
        scenario.domain,
        cfg.order,
        scenario.sys.nvars(),
        cfg.preset.precision.storage,
    )?;
    grid.initialize(&basis, |x, y| scenario.init(x, y));
    let mut solver = Solver::new(scenario.sys, grid, cfg.solver_config())?;
    let start = Instant::now();
    let result = solver.run_until(t_end);
    let elapsed = start.elapsed();
    let error = match result {
        Ok(stats) => {
            let reference = solver
                .grid
                .sample(&basis, |x, y| scenario.exact(x, y, stats.time));
            l2_error(&solver.grid, &reference, &basis)
        }
        Err(b) => ErrorReport::failed(Some(b.time), Some(b.kernel)),
    };
    Ok(RunReport {
        config: cfg.clone(),
        h: solver.grid.h,
        steps: solver.steps,
        final_time: solver.time,
        error,
        elapsed,
        grid: solver.grid,
    })
}

/// Settings of a sweep over orders, meshes and precision presets.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub base: RunConfig,
    pub orders: Vec<usize>,
    pub cells: Vec<usize>,
    pub presets: Vec<Preset>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(scenario: ScenarioName, orders: Vec<usize>, cells: Vec<usize>) -> Self {
        Self {
            base: RunConfig::new(scenario, orders.first().copied().unwrap_or(0), cells.first().copied().unwrap_or(1)),
            orders,
            cells,
            presets: vec![Preset::uniform(FloatFormat::Fp64)],
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() {
            return Err(Error::Config("empty order list".into()));
        }
        if self.cells.is_empty() {
            return Err(Error::Config("empty cells list".into()));
        }
        if self.presets.is_empty() {
            return Err(Error::Config("empty preset list".into()));
        }
        Ok(())
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: ScenarioName,
    pub order: usize,
    pub cells: usize,
    pub h: f64,
    pub preset: Preset,
    pub steps: usize,
    pub outcome: Outcome,
    pub l2_error: Option<f64>,
    pub max_error: Option<f64>,
    pub observed_order: Option<f64>,
    pub failure: Option<(f64, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Human-readable notes on skipped combinations.
    pub skipped: Vec<String>,
}

/// Convergence rate between successive orders with respect to degrees of
/// freedom per dimension, `ln(e_prev / e) / ln((N + 1) / (N_prev + 1))`.
pub fn observed_order(prev_order: usize, prev_err: f64, order: usize, err: f64) -> Option<f64> {
    if prev_err > 0.0 && err > 0.0 && order != prev_order {
        Some((prev_err / err).ln() / ((order as f64 + 1.0) / (prev_order as f64 + 1.0)).ln())
    } else {
        None
    }
}

/// Runs every (preset, n, N) combination in that nesting order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let linear = cfg.base.build_scenario()?.sys.is_linear();
    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for preset in &cfg.presets {
        if linear && preset.name.contains("picard=") {
            skipped.push(format!(
                "skipped preset {}: picard precision is unused for {}",
                preset.name, cfg.base.scenario
            ));
            continue;
        }
        for &n in &cfg.cells {
            for &order in &cfg.orders {
                let mut rc = cfg.base.clone();
                rc.order = order;
                rc.cells = n;
                rc.preset = preset.clone();
                jobs.push(rc);
            }
        }
    }
    let reports: Vec<Result<RunReport>> = if cfg.base.parallel {
        jobs.par_iter()
            .map(|rc| {
                let mut rc = rc.clone();
                rc.parallel = false;
                run_single(&rc)
            })
            .collect()
    } else {
        jobs.iter().map(run_single).collect()
    };
    let mut rows: Vec<SweepRow> = Vec::with_capacity(reports.len());
    for rep in reports {
        let rep = rep?;
        let prev = rows.last().filter(|r| {
            r.preset == rep.config.preset && r.cells == rep.config.cells && r.order < rep.config.order
        });
        let observed = match (prev, rep.error.l2) {
            (Some(p), Some(e)) => p.l2_error.and_then(|pe| observed_order(p.order, pe, rep.config.order, e)),
            _ => None,
        };
        rows.push(SweepRow {
            scenario: rep.config.scenario,
            order: rep.config.order,
            cells: rep.config.cells,
            h: rep.h,
            preset: rep.config.preset.clone(),
            steps: rep.steps,
            outcome: rep.error.outcome,
            l2_error: rep.error.l2,
            max_error: rep.error.max,
            observed_order: observed,
            failure: rep
                .error
                .failure_time
                .zip(rep.error.failure_kernel.map(|k| k.name().to_string())),
        });
    }
    Ok(SweepResult { rows, skipped })
}

/// The mixed-precision grid: each base uniform precision, then for every
/// target format each of the predictor, picard, corrector and all-kernel
/// overrides.
pub fn mixed_precision_presets(bases: &[FloatFormat], targets: &[FloatFormat]) -> Vec<Preset> {
    let mut out = Vec::new();
    for &b in bases {
        let base = Preset::uniform(b);
        out.push(base.clone());
        for &t in targets {
            if t == b {
                continue;
            }
            for kernel in ["predictor", "picard", "corrector", "all"] {
                out.push(base.with_override(kernel, t).expect("known kernel"));
            }
        }
    }
    out
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in rows {
        let p = r.preset.precision;
        wr.write_record([
            r.scenario.name().to_string(),
            r.order.to_string(),
            r.cells.to_string(),
            fmt_float(r.h),
            r.preset.name.clone(),
            p.storage.to_string(),
            p.predictor.to_string(),
            p.picard.to_string(),
            p.corrector.to_string(),
            r.steps.to_string(),
            r.outcome.to_string(),
            opt(r.l2_error),
            opt(r.max_error),
            opt(r.observed_order),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}

/// Plain-text table of a sweep.
pub fn summary(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = write!(
            s,
            "{:<16} N={} n={:<3} {:<34} steps={:<6} {:<16}",
            r.scenario.name(),
            r.order,
            r.cells,
            r.preset.name,
            r.steps,
            r.outcome.name()
        );
        if let Some(e) = r.l2_error {
            let _ = write!(s, " L2={e:.3e}");
        }
        if let Some(o) = r.observed_order {
            let _ = write!(s, " order={o:.2}");
        }
        if let Some((t, k)) = &r.failure {
            let _ = write!(s, " failed in {k} at t={t:.4}");
        }
        s.push('\n');
    }
    s
}

/// One row of an initial-error table.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialErrorRow {
    pub scenario: ScenarioName,
    pub order: usize,
    pub cells: usize,
    pub format: FloatFormat,
    pub relative_error: f64,
}

pub fn initial_error_table(
    base: &RunConfig,
    orders: &[usize],
    cells: &[usize],
    formats: &[FloatFormat],
) -> Result<Vec<InitialErrorRow>> {
    if orders.is_empty() || cells.is_empty() || formats.is_empty() {
        return Err(Error::Config("initial-error needs orders, cells and formats".into()));
    }
    let scenario = base.build_scenario()?;
    let mut rows = Vec::new();
    for &fmt in formats {
        for &n in cells {
            for &order in orders {
                rows.push(InitialErrorRow {
                    scenario: base.scenario,
                    order,
                    cells: n,
                    format: fmt,
                    relative_error: initial_projection_error(&scenario, n, order, fmt)?,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_initial_error_csv<W: std::io::Write>(rows: &[InitialErrorRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["scenario", "N", "n", "format", "relative_error"])?;
    for r in rows {
        wr.write_record([
            r.scenario.name().to_string(),
            r.order.to_string(),
            r.cells.to_string(),
            r.format.to_string(),
            fmt_float(r.relative_error),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Flat `key = value` configuration. Lines starting with `#` or `;` and
/// `[section]` headers are ignored; list values are comma-separated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

pub const CONFIG_KEYS: [&str; 19] = [
    "scenario",
    "order",
    "cells",
    "preset",
    "storage",
    "predictor",
    "picard",
    "corrector",
    "cfl",
    "picard_max_iters",
    "picard_tol",
    "t_end_override",
    "lake_eta0",
    "gravity",
    "out",
    "parallel",
    "bases",
    "targets",
    "formats",
];

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let v = v.trim().trim_matches('"');
            map.set(k.trim(), v)?;
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown config key `{key}`")));
        }
        self.entries.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| Error::Config(format!("bad value `{s}` for {key}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn scalar<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| Error::Config(format!("bad value `{s}` for {key}: {e}")))
            })
            .transpose()
    }

    /// Builds a sweep configuration. Per-kernel keys override every preset.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let scenario: ScenarioName = self
            .get("scenario")
            .ok_or_else(|| Error::Config("missing scenario".into()))?
            .parse()?;
        let orders = self.list::<usize>("order")?.unwrap_or_else(|| vec![3]);
        let cells = self.list::<usize>("cells")?.unwrap_or_else(|| vec![9]);
        let mut presets = match self.get("preset") {
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Preset::parse)
                .collect::<Result<Vec<_>>>()?,
            None => match self.list::<FloatFormat>("bases")? {
                Some(bases) => {
                    let targets = self.list::<FloatFormat>("targets")?.unwrap_or_default();
                    mixed_precision_presets(&bases, &targets)
                }
                None => vec![Preset::uniform(FloatFormat::Fp64)],
            },
        };
        for kernel in ["storage", "predictor", "picard", "corrector"] {
            if let Some(fmt) = self.scalar::<FloatFormat>(kernel)? {
                presets = presets
                    .iter()
                    .map(|p| p.with_override(kernel, fmt))
                    .collect::<Result<_>>()?;
            }
        }
        let mut base = RunConfig::new(scenario, orders.first().copied().unwrap_or(0), 1);
        base.cfl = self.scalar("cfl")?;
        base.picard_max_iters = self.scalar("picard_max_iters")?;
        base.picard_tol = self.scalar("picard_tol")?;
        base.t_end_override = self.scalar("t_end_override")?;
        if let Some(e) = self.scalar::<f64>("lake_eta0")? {
            base.lake_eta0 = e;
        }
        if let Some(g) = self.scalar::<f64>("gravity")? {
            base.gravity = g;
        }
        if let Some(p) = self.scalar::<bool>("parallel")? {
            base.parallel = p;
        }
        let cfg = ExperimentConfig {
            base,
            orders,
            cells,
            presets,
            out: self.get("out").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Formats listed under `formats`, defaulting to all reduced formats.
    pub fn formats(&self) -> Result<Vec<FloatFormat>> {
        Ok(self
            .list::<FloatFormat>("formats")?
            .unwrap_or_else(|| vec![FloatFormat::Fp32, FloatFormat::Fp16, FloatFormat::Bf16]))
    }
}
