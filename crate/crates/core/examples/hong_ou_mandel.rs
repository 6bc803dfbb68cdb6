//! Two-photon interference on a variable beam splitter. At 50:50 the
//! coincidence probability vanishes and the photons leave together.

use std::f64::consts::FRAC_PI_2;

use qndsim::fock::{Basis, ModeIndex, StateVector};
use qndsim::optics::{beam_splitter, lift_unitary, permanent};

fn main() -> qndsim::Result<()> {
    let basis = Basis::global();
    let input = StateVector::fock(basis.clone(), &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)])?;

    println!("{:>8} {:>12} {:>12} {:>12}", "theta", "P(1,1)", "P(2,0)", "P(0,2)");
    for i in 0..=10 {
        let theta = FRAC_PI_2 * i as f64 / 10.0;
        let bs = beam_splitter(theta, theta)?;
        let out = input.apply(lift_unitary(&bs, &basis)?.operator())?;
        let p = |occ: &[(ModeIndex, u8)]| out.amplitude(occ).map(|a| a.norm_sqr());
        println!(
            "{theta:>8.4} {:>12.6} {:>12.6} {:>12.6}",
            p(&[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)])?,
            p(&[(ModeIndex::SIGNAL_H, 2)])?,
            p(&[(ModeIndex::METER_H, 2)])?,
        );
    }

    // The |1,1⟩ → |1,1⟩ amplitude is the permanent of the 2×2 splitter block,
    // cos²θ − sin²θ, which is zero at θ = π/4.
    let bs = beam_splitter(FRAC_PI_2 / 2.0, 0.0)?;
    let full = bs.embed(&ModeIndex::ALL)?;
    let (sh, mh) = (basis.position(ModeIndex::SIGNAL_H).unwrap(), basis.position(ModeIndex::METER_H).unwrap());
    let block = full.select_rows(&[sh, mh]).select_columns(&[sh, mh]);
    println!("\nper(U) at 50:50 = {:.3e}", permanent(&block).norm());
    Ok(())
}
