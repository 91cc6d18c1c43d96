//! Planar acoustic and elastic waves, run once per format.

use ader_mp::harness::{run_single, Preset, RunConfig};
use ader_mp::scenarios::ScenarioName;
use ader_mp::FloatFormat;

fn main() -> ader_mp::Result<()> {
    for scenario in [ScenarioName::AcousticPlanar, ScenarioName::ElasticPlanar] {
        for fmt in [FloatFormat::Fp64, FloatFormat::Fp32] {
            let mut cfg = RunConfig::new(scenario, 3, 9).with_preset(Preset::uniform(fmt));
            cfg.t_end_override = Some(0.1);
            let r = run_single(&cfg)?;
            println!(
                "{scenario} {fmt}: steps={} L2={:.3e}",
                r.steps,
                r.error.l2.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
