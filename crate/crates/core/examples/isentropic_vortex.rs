use ader_mp::harness::{run_single, RunConfig};
use ader_mp::scenarios::ScenarioName;

fn main() -> ader_mp::Result<()> {
    for n in [8, 16] {
        let mut cfg = RunConfig::new(ScenarioName::EulerVortex, 3, n);
        cfg.t_end_override = Some(0.5);
        let r = run_single(&cfg)?;
        println!("n={n}: steps={} L2={:.3e}", r.steps, r.error.l2.unwrap_or(f64::NAN));
    }
    Ok(())
}
