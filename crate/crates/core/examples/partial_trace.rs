//! Building joint states from party states and tracing parties back out.

use std::f64::consts::FRAC_1_SQRT_2;

use qndsim::fock::{Basis, DensityOperator, ModeIndex, Party, StateVector, C64};

fn purity(rho: &DensityOperator) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

fn main() -> qndsim::Result<()> {
    // Product state: signal H photon, meter V photon.
    let signal = DensityOperator::fock(Basis::party(Party::Signal), &[(ModeIndex::SIGNAL_H, 1)])?;
    let meter = DensityOperator::fock(Basis::party(Party::Meter), &[(ModeIndex::METER_V, 1)])?;
    let joint = signal.tensor(&meter)?;
    let back = joint.partial_trace(&ModeIndex::of_party(Party::Signal))?;
    println!("product: joint dim {}, reduced purity {:.6}", joint.basis().dim(), purity(&back));

    // Polarization-entangled pair (|H,V⟩ + |V,H⟩)/√2 across signal and meter.
    let a = C64::new(FRAC_1_SQRT_2, 0.0);
    let bell = StateVector::superposition(
        Basis::global(),
        &[
            (a, &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_V, 1)]),
            (a, &[(ModeIndex::SIGNAL_V, 1), (ModeIndex::METER_H, 1)]),
        ],
    )?
    .projector();
    let reduced = bell.partial_trace(&ModeIndex::of_party(Party::Signal))?;
    println!("entangled: joint purity {:.6}, reduced purity {:.6}", purity(&bell), purity(&reduced));
    for (state, p) in reduced.basis().states().iter().zip(reduced.populations()) {
        if p > 0.0 {
            println!("  {state}  {p:.4}");
        }
    }

    // Two photons per party exceed the total cutoff; the tensor product
    // drops that weight and reports it.
    let two = DensityOperator::fock(Basis::party(Party::Signal), &[(ModeIndex::SIGNAL_H, 2)])?;
    let (_, lost) = two.tensor_with_loss(&meter)?;
    println!("|2⟩ ⊗ |1⟩ loses weight {lost} to truncation");
    Ok(())
}
