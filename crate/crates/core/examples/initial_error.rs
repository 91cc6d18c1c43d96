//! Error of storing the projected initial condition in each format.

use ader_mp::harness::{initial_error_table, write_initial_error_csv, RunConfig};
use ader_mp::scenarios::ScenarioName;
use ader_mp::FloatFormat;

fn main() -> ader_mp::Result<()> {
    let base = RunConfig::new(ScenarioName::AcousticPlanar, 3, 9);
    let rows = initial_error_table(&base, &[2, 4, 6], &[9], &FloatFormat::ALL)?;
    write_initial_error_csv(&rows, std::io::stdout())
}
