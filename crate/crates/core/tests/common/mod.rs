#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use qndsim::fock::{Basis, CMatrix, DensityOperator, Operator, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Random normalized density operator with full-rank support over `basis`.
pub fn random_density<R: Rng>(basis: &Basis, rng: &mut R) -> DensityOperator {
    let d = basis.dim();
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(Operator::new(basis.clone(), m.unscale(tr)).unwrap()).unwrap()
}

/// Random normalized density operator supported on photon numbers `<= max_photons`.
pub fn random_density_limited<R: Rng>(basis: &Basis, max_photons: usize, rng: &mut R) -> DensityOperator {
    let d = basis.dim();
    let keep: Vec<bool> = basis.states().iter().map(|s| s.total() <= max_photons).collect();
    let a = CMatrix::from_fn(d, d, |i, _| {
        let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if keep[i] { z } else { C64::new(0.0, 0.0) }
    });
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(Operator::new(basis.clone(), m.unscale(tr)).unwrap()).unwrap()
}

/// Second-quantized transform by direct creation-operator expansion:
/// |n⟩ = Π_i (a_i†)^{n_i} / √(n_i!) |0⟩ with a_i† → Σ_j U[j,i] a_j†.
/// Returns the output amplitudes keyed by occupation vector.
pub fn creation_expansion(u: &DMatrix<Complex<f64>>, input: &[u8]) -> BTreeMap<Vec<u8>, C64> {
    let n_modes = u.nrows();
    let mut state: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
    state.insert(vec![0; n_modes], C64::new(1.0, 0.0));
    let mut norm = 1.0;
    for (i, &ni) in input.iter().enumerate() {
        for _ in 0..ni {
            let mut next: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
            for (occ, amp) in &state {
                for j in 0..n_modes {
                    let coeff = u[(j, i)];
                    if coeff == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut o = occ.clone();
                    let raise = ((o[j] + 1) as f64).sqrt();
                    o[j] += 1;
                    *next.entry(o).or_insert(C64::new(0.0, 0.0)) += amp * coeff * raise;
                }
            }
            state = next;
        }
        norm *= (1..=ni as u64).product::<u64>() as f64;
    }
    state.into_iter().map(|(k, v)| (k, v / norm.sqrt())).collect()
}
