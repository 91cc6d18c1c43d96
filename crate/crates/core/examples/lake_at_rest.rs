//! Well-balancing test: spurious velocities of a lake at rest.

use ader_mp::harness::{run_single, Preset, RunConfig};
use ader_mp::metrics::max_velocity;
use ader_mp::scenarios::ScenarioName;
use ader_mp::FloatFormat;

fn main() -> ader_mp::Result<()> {
    for fmt in [FloatFormat::Fp64, FloatFormat::Fp32] {
        let mut cfg = RunConfig::new(ScenarioName::SweLake, 3, 6).with_preset(Preset::uniform(fmt));
        cfg.t_end_override = Some(0.1);
        let r = run_single(&cfg)?;
        println!("eta0=2 {fmt}: max |v| = {:.3e}", max_velocity(&r.grid));
    }
    // with eta0 = 0 the momentum update vanishes identically
    let mut cfg = RunConfig::new(ScenarioName::SweLake, 3, 6);
    cfg.lake_eta0 = 0.0;
    cfg.t_end_override = Some(0.1);
    let r = run_single(&cfg)?;
    println!("eta0=0 fp64: max |v| = {:.3e}", max_velocity(&r.grid));
    Ok(())
}
