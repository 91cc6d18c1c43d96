//! p-convergence of the planar acoustic wave on a fixed mesh.

use ader_mp::harness::{run_sweep, summary, ExperimentConfig};
use ader_mp::scenarios::ScenarioName;

fn main() -> ader_mp::Result<()> {
    let mut cfg = ExperimentConfig::new(ScenarioName::AcousticPlanar, vec![1, 2, 3, 4, 5], vec![9]);
    cfg.base.t_end_override = Some(0.2);
    let res = run_sweep(&cfg)?;
    for row in &res.rows {
        println!(
            "N={} n={} L2={:.3e} order={}",
            row.order,
            row.cells,
            row.l2_error.unwrap_or(f64::NAN),
            row.observed_order.map_or("-".to_string(), |p| format!("{p:.2}"))
        );
    }
    println!("{}", summary(&res.rows));
    Ok(())
}
