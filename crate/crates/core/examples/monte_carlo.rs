//! Seeded shot-by-shot sampling compared with exact pattern probabilities.

use qndsim::analysis::Reconstruction;
use qndsim::detection::{pattern_probability, Arms, DetectorBank};
use qndsim::fock::Polarization;
use qndsim::montecarlo::{estimate_fidelities, sample_patterns};

fn main() -> qndsim::Result<()> {
    let zeta = 0.65;
    let rho = Reconstruction::canonical(Polarization::H).state();
    let bank = DetectorBank::uniform(zeta)?;
    let report = sample_patterns(&rho, &bank, 200_000, 42, Arms::Both)?;

    println!("{:<24} {:>10} {:>10} {:>8}", "pattern", "estimate", "exact", "sigmas");
    for (pattern, est) in report.pattern_estimates() {
        let exact = pattern_probability(&rho, &pattern, &bank)?;
        let z = if est.std_error > 0.0 {
            (est.value - exact) / est.std_error
        } else {
            0.0
        };
        println!("{:<24} {:>10.5} {:>10.5} {z:>8.2}", pattern.to_string(), est.value, exact);
    }

    let estimate = estimate_fidelities(&report.joint_frequencies(), Polarization::H, zeta)?;
    println!("\nF_M   ≈ {:.4}", estimate.f_m);
    println!("F_QND ≈ {:.4} (closed form {:.4})", estimate.f_qnd_trace, estimate.f_qnd_closed);
    Ok(())
}
