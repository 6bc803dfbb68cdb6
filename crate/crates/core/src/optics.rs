//! Passive linear optics: single-photon mode transformations and their
//! second-quantized action on the truncated Fock space.
//!
//! Convention: a mode matrix `U` maps creation operators as
//! `a_i† → Σ_j U[j, i] a_j†`, so column `i` is the image of input mode `i`.
//! Fock-space matrix elements follow from permanents of `U` with rows and
//! columns repeated by occupation:
//!
//! ```text
//! ⟨m|Û|n⟩ = per(U[m, n]) / sqrt(Π m_i! Π n_j!)
//! ```

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fock::{
    unitarity_defect, Basis, CMatrix, DensityOperator, ModeIndex, Operator, Party, C64,
};
use crate::tolerance;

/// A unitary on a small set of modes (the identity on all others).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    modes: Vec<ModeIndex>,
    matrix: CMatrix,
}

impl ModeUnitary {
    /// `matrix` rows and columns follow the order of `modes`.
    pub fn new(modes: Vec<ModeIndex>, matrix: CMatrix) -> Result<Self> {
        check_distinct(&modes)?;
        if matrix.nrows() != modes.len() || matrix.ncols() != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if let Some(z) = matrix.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(if z.re.is_finite() { z.im } else { z.re }));
        }
        let defect = unitarity_defect(&matrix);
        if defect > tolerance::ALGEBRAIC {
            return Err(Error::NotUnitary(defect));
        }
        Ok(ModeUnitary { modes, matrix })
    }

    pub fn identity(modes: Vec<ModeIndex>) -> Result<Self> {
        let d = modes.len();
        ModeUnitary::new(modes, CMatrix::identity(d, d))
    }

    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> ModeUnitary {
        ModeUnitary {
            modes: self.modes.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// The same matrix acting on a different list of modes, position by
    /// position.
    pub fn retarget(&self, targets: &[ModeIndex]) -> Result<ModeUnitary> {
        if targets.len() != self.modes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.modes.len(),
                found: targets.len(),
            });
        }
        check_distinct(targets)?;
        Ok(ModeUnitary {
            modes: targets.to_vec(),
            matrix: self.matrix.clone(),
        })
    }

    /// Full mode matrix over `modes`, identity outside this unitary's modes.
    pub fn embed(&self, modes: &[ModeIndex]) -> Result<CMatrix> {
        let n = modes.len();
        let pos = self
            .modes
            .iter()
            .map(|m| modes.iter().position(|x| x == m).ok_or(Error::UnknownMode(*m)))
            .collect::<Result<Vec<_>>>()?;
        let mut full = CMatrix::identity(n, n);
        for (a, &pa) in pos.iter().enumerate() {
            for (b, &pb) in pos.iter().enumerate() {
                full[(pa, pb)] = self.matrix[(a, b)];
            }
        }
        Ok(full)
    }

    /// Product `self · other` over the union of both mode sets (global order).
    pub fn then_after(&self, other: &ModeUnitary) -> ModeUnitary {
        let mut modes: Vec<ModeIndex> = self.modes.clone();
        modes.extend(other.modes.iter().filter(|m| !self.modes.contains(m)));
        modes.sort();
        let a = self.embed(&modes).unwrap();
        let b = other.embed(&modes).unwrap();
        ModeUnitary { modes, matrix: a * b }
    }
}

fn check_distinct(modes: &[ModeIndex]) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(Error::DuplicateMode(*m));
        }
    }
    Ok(())
}

fn check_finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(x))
    }
}

fn rotation(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// Real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]` between the signal and
/// meter spatial modes, with separate angles for H and V. Equal angles give
/// a polarization-independent splitter; `θ = π/4` is 50:50.
pub fn beam_splitter(theta_h: f64, theta_v: f64) -> Result<ModeUnitary> {
    let rh = rotation(check_finite(theta_h)?);
    let rv = rotation(check_finite(theta_v)?);
    let mut m = CMatrix::zeros(4, 4);
    // Global order: sH(0) sV(1) mH(2) mV(3).
    for (r, (a, b)) in [(rh, (0, 2)), (rv, (1, 3))] {
        m[(a, a)] = r[0][0];
        m[(a, b)] = r[0][1];
        m[(b, a)] = r[1][0];
        m[(b, b)] = r[1][1];
    }
    ModeUnitary::new(ModeIndex::ALL.to_vec(), m)
}

/// Polarization rotation of one party: `|H⟩ → cos θ |H⟩ + sin θ |V⟩`.
pub fn wave_plate(party: Party, angle: f64) -> Result<ModeUnitary> {
    let r = rotation(check_finite(angle)?);
    let m = CMatrix::from_row_slice(2, 2, &[r[0][0], r[0][1], r[1][0], r[1][1]]);
    ModeUnitary::new(ModeIndex::of_party(party).to_vec(), m)
}

/// Phase `e^{iφ}` on a single mode.
pub fn phase_shift(mode: ModeIndex, phi: f64) -> Result<ModeUnitary> {
    let phi = check_finite(phi)?;
    ModeUnitary::new(vec![mode], CMatrix::from_element(1, 1, C64::from_polar(1.0, phi)))
}

/// Approximately Haar-distributed unitary: QR of a complex Gaussian matrix
/// with the phases of R's diagonal folded into Q.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Permanent by Laplace expansion along the first row. Intended for the
/// tiny matrices that arise at the photon cutoff.
pub fn permanent(m: &CMatrix) -> C64 {
    fn rec(m: &CMatrix, row: usize, used: &mut Vec<bool>) -> C64 {
        if row == m.nrows() {
            return C64::new(1.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..m.ncols() {
            if !used[col] {
                used[col] = true;
                acc += m[(row, col)] * rec(m, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    assert_eq!(m.nrows(), m.ncols(), "permanent of a non-square matrix");
    rec(m, 0, &mut vec![false; m.ncols()])
}

fn factorial(n: u8) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// Second-quantized operator of a mode unitary on a truncated basis.
#[derive(Debug, Clone)]
pub struct LiftedOperator {
    op: Operator,
    source: ModeUnitary,
}

impl LiftedOperator {
    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn source(&self) -> &ModeUnitary {
        &self.source
    }
}

pub fn lift_unitary(u: &ModeUnitary, basis: &Basis) -> Result<LiftedOperator> {
    let defect = unitarity_defect(u.matrix());
    if defect > tolerance::ALGEBRAIC {
        return Err(Error::NotUnitary(defect));
    }
    let full = u.embed(basis.modes())?;
    let d = basis.dim();
    let mut matrix = CMatrix::zeros(d, d);
    for (j, n) in basis.states().iter().enumerate() {
        let cols: Vec<usize> = expand(n.occupations());
        let norm_n: f64 = n.occupations().iter().map(|&k| factorial(k)).product();
        for (i, m) in basis.states().iter().enumerate() {
            // Photon number is conserved: cross-grade entries stay zero.
            if m.total() != n.total() {
                continue;
            }
            let rows = expand(m.occupations());
            let norm_m: f64 = m.occupations().iter().map(|&k| factorial(k)).product();
            let sub = CMatrix::from_fn(rows.len(), cols.len(), |r, c| full[(rows[r], cols[c])]);
            matrix[(i, j)] = permanent(&sub) / (norm_m * norm_n).sqrt();
        }
    }
    Ok(LiftedOperator {
        op: Operator::new(basis.clone(), matrix)?,
        source: u.clone(),
    })
}

/// Mode position repeated by its occupation: `[1, 0, 2] → [0, 2, 2]`.
fn expand(occupations: &[u8]) -> Vec<usize> {
    occupations
        .iter()
        .enumerate()
        .flat_map(|(p, &k)| std::iter::repeat_n(p, k as usize))
        .collect()
}

/// Ordered list of mode unitaries; the first element acts first.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    elements: Vec<ModeUnitary>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn push(mut self, element: ModeUnitary) -> Self {
        self.elements.push(element);
        self
    }

    pub fn elements(&self) -> &[ModeUnitary] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The inverse circuit: adjoints in reverse order.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            elements: self.elements.iter().rev().map(ModeUnitary::adjoint).collect(),
        }
    }

    /// Product of the lifted elements, last element leftmost.
    pub fn lifted(&self, basis: &Basis) -> Result<Operator> {
        let mut total = Operator::identity(basis.clone());
        for u in &self.elements {
            total = lift_unitary(u, basis)?.operator().compose(&total)?;
        }
        Ok(total)
    }
}

/// `ρ' = L ρ L†` with `L` the lifted circuit.
pub fn apply_circuit(rho: &DensityOperator, circuit: &Circuit) -> Result<DensityOperator> {
    rho.require_normalized()?;
    let l = circuit.lifted(rho.basis())?;
    let matrix = l.matrix() * rho.matrix() * l.matrix().adjoint();
    let out = Operator::new(rho.basis().clone(), matrix)?;
    Ok(DensityOperator::new_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn approx(a: C64, b: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() < 1e-12
    }

    #[test]
    fn splitter_examples() {
        let id = beam_splitter(0.0, 0.0).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(4, 4));

        let half = beam_splitter(FRAC_PI_4, FRAC_PI_4).unwrap();
        for (a, b) in [(0, 2), (1, 3)] {
            for (r, c) in [(a, a), (a, b), (b, a), (b, b)] {
                assert!((half.matrix()[(r, c)].re.abs() - FRAC_1_SQRT_2).abs() < 1e-15);
            }
        }

        let swap_v = beam_splitter(0.0, FRAC_PI_2).unwrap();
        let m = swap_v.matrix();
        assert!(approx(m[(0, 0)], 1.0) && approx(m[(2, 2)], 1.0));
        assert!(approx(m[(1, 1)], 0.0) && approx(m[(3, 3)], 0.0));
        assert!(approx(m[(3, 1)], 1.0) && approx(m[(1, 3)], -1.0));
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert!(matches!(beam_splitter(f64::NAN, 0.0), Err(Error::NonFinite(_))));
        assert!(matches!(wave_plate(Party::Signal, f64::INFINITY), Err(Error::NonFinite(_))));
    }

    #[test]
    fn wave_plate_rotates_polarization() {
        let basis = Basis::party(Party::Signal);
        let h = StateVector::fock(basis.clone(), &[(ModeIndex::SIGNAL_H, 1)]).unwrap();

        let zero = lift_unitary(&wave_plate(Party::Signal, 0.0).unwrap(), &basis).unwrap();
        assert!((zero.operator().matrix() - CMatrix::identity(6, 6)).camax() < 1e-15);

        let quarter = lift_unitary(&wave_plate(Party::Signal, FRAC_PI_4).unwrap(), &basis).unwrap();
        let out = h.apply(quarter.operator()).unwrap();
        assert!(approx(out.amplitude(&[(ModeIndex::SIGNAL_H, 1)]).unwrap(), FRAC_1_SQRT_2));
        assert!(approx(out.amplitude(&[(ModeIndex::SIGNAL_V, 1)]).unwrap(), FRAC_1_SQRT_2));

        let half = lift_unitary(&wave_plate(Party::Signal, FRAC_PI_2).unwrap(), &basis).unwrap();
        let out = h.apply(half.operator()).unwrap();
        assert!((out.amplitude(&[(ModeIndex::SIGNAL_V, 1)]).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_lifts_to_number_phase() {
        let phi = 0.37;
        let basis = Basis::global();
        let lifted = lift_unitary(&phase_shift(ModeIndex::METER_V, phi).unwrap(), &basis).unwrap();
        let m = lifted.operator().matrix();
        for i in 0..basis.dim() {
            let n = basis.occupation(i, ModeIndex::METER_V) as f64;
            assert!((m[(i, i)] - C64::from_polar(1.0, n * phi)).norm() < 1e-14);
            for j in 0..basis.dim() {
                if i != j {
                    assert_eq!(m[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn hom_dip() {
        let basis = Basis::global();
        let bs = lift_unitary(&beam_splitter(FRAC_PI_4, FRAC_PI_4).unwrap(), &basis).unwrap();
        let input = StateVector::fock(
            basis.clone(),
            &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)],
        )
        .unwrap();
        let out = input.apply(bs.operator()).unwrap();
        assert!(approx(out.amplitude(&[(ModeIndex::SIGNAL_H, 2)]).unwrap(), -FRAC_1_SQRT_2));
        assert!(out
            .amplitude(&[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)])
            .unwrap()
            .norm()
            < 1e-12);
        assert!(approx(out.amplitude(&[(ModeIndex::METER_H, 2)]).unwrap(), FRAC_1_SQRT_2));
    }

    #[test]
    fn hom_density_weights() {
        let basis = Basis::global();
        let rho = DensityOperator::fock(
            basis.clone(),
            &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)],
        )
        .unwrap();
        let circuit = Circuit::new().push(beam_splitter(FRAC_PI_4, FRAC_PI_4).unwrap());
        let out = apply_circuit(&rho, &circuit).unwrap();
        let pops = out.populations();
        let idx = |occ: &[(ModeIndex, u8)]| basis.index_of_occupations(occ).unwrap();
        assert!((pops[idx(&[(ModeIndex::SIGNAL_H, 2)])] - 0.5).abs() < 1e-12);
        assert!(pops[idx(&[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)])].abs() < 1e-12);
        assert!((pops[idx(&[(ModeIndex::METER_H, 2)])] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_and_inverse_circuits() {
        let basis = Basis::global();
        let rho = StateVector::superposition(
            basis.clone(),
            &[
                (C64::new(0.6, 0.0), &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_V, 1)]),
                (C64::new(0.0, 0.8), &[(ModeIndex::SIGNAL_V, 1)]),
            ],
        )
        .unwrap()
        .projector();
        let same = apply_circuit(&rho, &Circuit::new()).unwrap();
        assert!((same.matrix() - rho.matrix()).camax() < 1e-15);

        let circuit = Circuit::new()
            .push(beam_splitter(0.3, 1.1).unwrap())
            .push(wave_plate(Party::Meter, 0.7).unwrap())
            .push(phase_shift(ModeIndex::SIGNAL_V, 2.1).unwrap());
        let there = apply_circuit(&rho, &circuit).unwrap();
        let back = apply_circuit(&there, &circuit.inverse()).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < tolerance::ALGEBRAIC);
    }

    #[test]
    fn unitarity_checked() {
        let m = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(
            ModeUnitary::new(ModeIndex::of_party(Party::Meter).to_vec(), m),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn lifted_unitary_is_block_diagonal_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = Basis::global();
        let u = ModeUnitary::new(ModeIndex::ALL.to_vec(), random_unitary(4, &mut rng)).unwrap();
        let l = lift_unitary(&u, &basis).unwrap();
        assert!(unitarity_defect(l.operator().matrix()) < tolerance::PROPERTY);
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                if basis.state(i).total() != basis.state(j).total() {
                    assert_eq!(l.operator().matrix()[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
        // Single-photon block reproduces the mode matrix itself.
        for (a, &ma) in ModeIndex::ALL.iter().enumerate() {
            for (b, &mb) in ModeIndex::ALL.iter().enumerate() {
                let i = basis.index_of_occupations(&[(ma, 1)]).unwrap();
                let j = basis.index_of_occupations(&[(mb, 1)]).unwrap();
                assert!((l.operator().matrix()[(i, j)] - u.matrix()[(a, b)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn permanent_small_cases() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(4.0, 0.0)],
        );
        assert_eq!(permanent(&m), C64::new(10.0, 0.0));
        assert_eq!(permanent(&CMatrix::zeros(0, 0)), C64::new(1.0, 0.0));
        assert_eq!(expand(&[1, 0, 2]), vec![0, 2, 2]);
    }
}
