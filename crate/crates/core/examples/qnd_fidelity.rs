//! Fidelities of the missed-photon scenario at one efficiency, together
//! with the state left in the signal arm after the meter reports k.

use qndsim::analysis::{conditioning_pattern, evaluate, OperatingMode, Reconstruction};
use qndsim::detection::{conditional_signal_state, DetectorBank};
use qndsim::fock::Polarization;

fn main() -> qndsim::Result<()> {
    let zeta = 0.65;
    let k = Polarization::H;
    let scenario = Reconstruction::canonical(k);
    let rho = scenario.state();
    let bank = DetectorBank::uniform(zeta)?;

    for b in scenario.branches() {
        let meter: Vec<_> = b.meter.iter().map(|(m, n)| format!("{m}={n}")).collect();
        println!("branch weight {:.2}: meter {}, signal {:?}", b.weight, meter.join(" "), b.signal);
    }

    let report = evaluate(&rho, k, &bank, zeta)?;
    println!("\nF_M          = {:.12}", report.f_m);
    println!("F_QND trace  = {:.12}", report.f_qnd_trace);
    println!("F_QND closed = {:.12}", report.f_qnd_closed);

    println!("\nmeter outcome probabilities (signal undetected):");
    let qnd = report.table(OperatingMode::Qnd);
    for (i, p) in qnd.meter_marginal().iter().enumerate() {
        println!("  {} {p:.6}", ["H", "V", "B", "0"][i]);
    }

    let (p, signal) = conditional_signal_state(&rho, &conditioning_pattern(k), &bank)?;
    println!("\nP(meter reports {k}) = {p:.6}; signal populations over (sH, sV):");
    for (state, w) in signal.basis().states().iter().zip(signal.populations()) {
        println!("  {state:<8} {w:.6}");
    }
    Ok(())
}
