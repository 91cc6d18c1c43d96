//! Advected density bell for the Euler equations, with Picard iteration
//! counts capped differently.

use ader_mp::harness::{run_single, RunConfig};
use ader_mp::scenarios::ScenarioName;

fn main() -> ader_mp::Result<()> {
    for iters in [None, Some(2), Some(1)] {
        let mut cfg = RunConfig::new(ScenarioName::EulerBell, 3, 8);
        cfg.t_end_override = Some(0.2);
        cfg.picard_max_iters = iters;
        let r = run_single(&cfg)?;
        println!(
            "picard_max_iters={iters:?}: steps={} L2={:.9e}",
            r.steps,
            r.error.l2.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
