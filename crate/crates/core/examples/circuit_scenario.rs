//! Push a product input through a small optical circuit and look at the
//! resulting detection statistics. The splitter and wave plate settings come
//! from the bundled illustrative config, not from a calibrated device.

use qndsim::analysis::{build_probability_table, measurement_fidelity, point_mass, OperatingMode};
use qndsim::config::ScenarioConfig;
use qndsim::optics::apply_circuit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ScenarioConfig::parse(include_str!("../configs/ppbs_illustrative.json"))?;
    let circuit = config.circuit()?;
    println!("{}", config.describe());

    let rho = config.state()?;
    // Undoing the circuit recovers the input product state.
    let undone = apply_circuit(&rho, &circuit.inverse())?;
    let occupied: Vec<_> = undone
        .basis()
        .states()
        .iter()
        .zip(undone.populations())
        .filter(|(_, p)| *p > 1e-12)
        .map(|(s, p)| format!("{s}:{p:.3}"))
        .collect();
    println!("input populations: {}", occupied.join(" "));

    let bank = config.detectors()?;
    let table = build_probability_table(&rho, &bank, OperatingMode::Coincidence)?;
    println!("\nP(signal, meter) over coincidence outcomes:");
    let labels = ["H", "V", "B"];
    print!("{:>6}", "");
    for m in labels {
        print!("{m:>10}");
    }
    println!();
    for (s, row) in table.sub_table().iter().enumerate() {
        print!("{:>6}", labels[s]);
        for p in row {
            print!("{p:>10.5}");
        }
        println!();
    }
    println!("\nF_M = {:.6}", measurement_fidelity(point_mass(config.k), &table)?);
    Ok(())
}
