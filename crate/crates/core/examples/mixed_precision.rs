//! Lowering one kernel at a time from an fp64 baseline.

use ader_mp::harness::{mixed_precision_presets, run_sweep, ExperimentConfig};
use ader_mp::scenarios::ScenarioName;
use ader_mp::FloatFormat;

fn main() -> ader_mp::Result<()> {
    let mut cfg = ExperimentConfig::new(ScenarioName::EulerBell, vec![3], vec![6]);
    cfg.base.t_end_override = Some(0.1);
    cfg.presets = mixed_precision_presets(&[FloatFormat::Fp64], &[FloatFormat::Fp32, FloatFormat::Bf16]);
    let res = run_sweep(&cfg)?;
    for row in &res.rows {
        let err = row.l2_error.map_or(row.outcome.name().to_string(), |e| format!("{e:.3e}"));
        println!("{:<32} {err}", row.preset.name);
    }
    for note in &res.skipped {
        println!("skipped: {note}");
    }
    Ok(())
}
