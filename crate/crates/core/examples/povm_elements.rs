//! Click/no-click elements of a non-number-resolving detector and what they
//! predict for zero, one and two incident photons.

use qndsim::detection::{completeness_defect, DetectorModel, Outcome};

fn main() -> qndsim::Result<()> {
    println!("{:>6} {:>24} {:>24} {:>10}", "zeta", "no click", "click", "defect");
    for zeta in [0.0, 0.25, 0.5, 0.65, 0.9, 1.0] {
        let detector = DetectorModel::new(zeta)?;
        let e0 = detector.element(Outcome::NoClick).diagonal;
        let e1 = detector.element(Outcome::Click).diagonal;
        println!(
            "{zeta:>6.2} {:>24} {:>24} {:>10.1e}",
            format!("{:.4} {:.4} {:.4}", e0[0], e0[1], e0[2]),
            format!("{:.4} {:.4} {:.4}", e1[0], e1[1], e1[2]),
            completeness_defect(zeta)
        );
    }

    // A detector that sees two photons clicks more often than one that sees
    // one, but the click alone cannot tell them apart.
    let detector = DetectorModel::new(0.65)?;
    let click = detector.element(Outcome::Click);
    println!();
    for n in 0..=2 {
        println!("P(click | {n} photon(s)) = {:.4}", click.weight(n));
    }
    Ok(())
}
