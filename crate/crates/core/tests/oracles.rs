mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use qndsim::fock::{Basis, ModeIndex, StateVector, C64};
use qndsim::optics::{beam_splitter, lift_unitary, random_unitary, ModeUnitary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::creation_expansion;

/// Compare every column of the lifted operator with the creation-operator
/// expansion of the same input state.
fn check_against_expansion(u: &ModeUnitary, basis: &Basis, max_total: usize) {
    let lifted = lift_unitary(u, basis).unwrap();
    let full = u.embed(basis.modes()).unwrap();
    for (j, input) in basis.states().iter().enumerate() {
        if input.total() > max_total {
            continue;
        }
        let oracle = creation_expansion(&full, input.occupations());
        for (i, output) in basis.states().iter().enumerate() {
            let expected = oracle.get(output.occupations()).copied().unwrap_or(C64::new(0.0, 0.0));
            let got = lifted.operator().matrix()[(i, j)];
            assert!(
                (got - expected).norm() < 1e-12,
                "{input} -> {output}: lifted {got}, oracle {expected}"
            );
        }
    }
}

#[test]
fn permanents_match_expansion_for_two_mode_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let basis = Basis::new(&[ModeIndex::SIGNAL_H, ModeIndex::METER_H]).unwrap();
    for _ in 0..5 {
        let u = ModeUnitary::new(basis.modes().to_vec(), random_unitary(2, &mut rng)).unwrap();
        check_against_expansion(&u, &basis, 2);
    }
}

#[test]
fn permanents_match_expansion_for_four_mode_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let basis = Basis::global();
    for _ in 0..5 {
        let u = ModeUnitary::new(ModeIndex::ALL.to_vec(), random_unitary(4, &mut rng)).unwrap();
        check_against_expansion(&u, &basis, 2);
    }
}

#[test]
fn partial_mode_unitary_embeds_as_identity_elsewhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = ModeUnitary::new(vec![ModeIndex::METER_V, ModeIndex::SIGNAL_H], random_unitary(2, &mut rng)).unwrap();
    check_against_expansion(&u, &Basis::global(), 2);
}

#[test]
fn hong_ou_mandel_amplitudes() {
    // (cosθ a₁† + sinθ a₂†)(−sinθ a₁† + cosθ a₂†)|0⟩ at θ = π/4 gives
    // (−a₁†² + a₂†²)/2 |0⟩ = (−|2,0⟩ + |0,2⟩)/√2.
    let basis = Basis::global();
    let bs = beam_splitter(FRAC_PI_4, FRAC_PI_4).unwrap();
    let out = StateVector::fock(basis.clone(), &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)])
        .unwrap()
        .apply(lift_unitary(&bs, &basis).unwrap().operator())
        .unwrap();
    let oracle = creation_expansion(&bs.embed(basis.modes()).unwrap(), &[1, 0, 1, 0]);
    assert!((oracle[&vec![2, 0, 0, 0]] - C64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!((oracle[&vec![0, 0, 2, 0]] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!(oracle.get(&vec![1, 0, 1, 0]).map_or(0.0, |z| z.norm()) < 1e-12);

    assert!((out.amplitude(&[(ModeIndex::SIGNAL_H, 2)]).unwrap() - C64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-10);
    assert!((out.amplitude(&[(ModeIndex::METER_H, 2)]).unwrap() - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-10);
    assert!(out.amplitude(&[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)]).unwrap().norm() < 1e-10);
}

#[test]
fn orthogonal_polarizations_do_not_interfere() {
    let basis = Basis::global();
    let bs = beam_splitter(FRAC_PI_4, FRAC_PI_4).unwrap();
    let out = StateVector::fock(basis.clone(), &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_V, 1)])
        .unwrap()
        .apply(lift_unitary(&bs, &basis).unwrap().operator())
        .unwrap();
    let p = out.amplitude(&[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_V, 1)]).unwrap().norm_sqr()
        + out.amplitude(&[(ModeIndex::METER_H, 1), (ModeIndex::SIGNAL_V, 1)]).unwrap().norm_sqr();
    assert!((p - 0.5).abs() < 1e-12);
}
