//! Sweep detector efficiency for a scenario and print the CSV the `sweep`
//! subcommand would write. Pass a config path to use something other than
//! the bundled default.

use qndsim::analysis::sweep_state;
use qndsim::config::{render_csv, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = match std::env::args().nth(1) {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default_scenario(),
    };
    eprintln!("{}", config.describe());
    let reports = sweep_state(0.05, 1.0, 20, &config.state()?, config.k)?;
    print!("{}", render_csv(&reports, config.mode));
    Ok(())
}
