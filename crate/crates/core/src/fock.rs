//! Truncated multimode Fock space and dense operator algebra over it.
//!
//! Four polarization modes exist: signal-H, signal-V, meter-H and meter-V,
//! always ordered in that sequence. Any subset of them spans a truncated
//! Fock space holding at most [`CUTOFF`] photons in total. Basis states are
//! graded by total photon number and ordered lexicographically (ascending)
//! within a grade, so operators are block-structured by photon number.
//!
//! Tensor products silently drop every product state whose total photon
//! number exceeds the cutoff. [`Operator::tensor_with_loss`] reports the
//! discarded diagonal weight so callers can check that nothing was lost.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Maximum total photon number kept in any basis.
pub const CUTOFF: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    Signal,
    Meter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn orthogonal(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => f.write_str("H"),
            Polarization::V => f.write_str("V"),
        }
    }
}

impl FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            other => Err(format!("unknown polarization {other:?}, expected H or V")),
        }
    }
}

/// One of the four optical modes. The derived ordering is the global mode
/// order: signal before meter, H before V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    pub party: Party,
    pub polarization: Polarization,
}

impl ModeIndex {
    pub const SIGNAL_H: ModeIndex = ModeIndex::new(Party::Signal, Polarization::H);
    pub const SIGNAL_V: ModeIndex = ModeIndex::new(Party::Signal, Polarization::V);
    pub const METER_H: ModeIndex = ModeIndex::new(Party::Meter, Polarization::H);
    pub const METER_V: ModeIndex = ModeIndex::new(Party::Meter, Polarization::V);

    /// All modes in global order.
    pub const ALL: [ModeIndex; 4] = [
        ModeIndex::SIGNAL_H,
        ModeIndex::SIGNAL_V,
        ModeIndex::METER_H,
        ModeIndex::METER_V,
    ];

    pub const fn new(party: Party, polarization: Polarization) -> Self {
        ModeIndex {
            party,
            polarization,
        }
    }

    /// Both polarization modes of one party, H first.
    pub fn of_party(party: Party) -> [ModeIndex; 2] {
        [
            ModeIndex::new(party, Polarization::H),
            ModeIndex::new(party, Polarization::V),
        ]
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.party {
            Party::Signal => 's',
            Party::Meter => 'm',
        };
        write!(f, "{p}{}", self.polarization)
    }
}

impl FromStr for ModeIndex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ModeIndex::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode {s:?}, expected one of sH, sV, mH, mV"))
    }
}

impl Serialize for ModeIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModeIndex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Occupation numbers, positionally aligned with the mode list of the basis
/// the state belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockBasisState(Vec<u8>);

impl FockBasisState {
    pub fn new(occupations: Vec<u8>) -> Self {
        FockBasisState(occupations)
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

/// All occupation vectors over `n_modes` modes with total photon number at
/// most `max_total`, graded by total and ascending-lexicographic within a
/// grade.
pub fn enumerate_basis(n_modes: usize, max_total: usize) -> Vec<FockBasisState> {
    fn fill(rest: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<FockBasisState>) {
        if rest == 1 {
            prefix.push(remaining as u8);
            out.push(FockBasisState(prefix.clone()));
            prefix.pop();
            return;
        }
        for n in 0..=remaining {
            prefix.push(n as u8);
            fill(rest - 1, remaining - n, prefix, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    if n_modes == 0 {
        return out;
    }
    for grade in 0..=max_total {
        fill(n_modes, grade, &mut Vec::with_capacity(n_modes), &mut out);
    }
    out
}

/// Truncated Fock basis over an ordered set of modes.
#[derive(Debug, Clone)]
pub struct Basis {
    modes: Vec<ModeIndex>,
    states: Vec<FockBasisState>,
    lookup: HashMap<FockBasisState, usize>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes
    }
}

impl Basis {
    /// Basis over the given modes, re-sorted into global order.
    pub fn new(modes: &[ModeIndex]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModeSet);
        }
        let mut modes = modes.to_vec();
        modes.sort();
        if let Some(w) = modes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMode(w[0]));
        }
        let states = enumerate_basis(modes.len(), CUTOFF);
        let lookup = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Basis {
            modes,
            states,
            lookup,
        })
    }

    /// The four-mode basis (15 states).
    pub fn global() -> Self {
        Basis::new(&ModeIndex::ALL).expect("global modes are distinct")
    }

    pub fn party(party: Party) -> Self {
        Basis::new(&ModeIndex::of_party(party)).expect("party modes are distinct")
    }

    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    pub fn states(&self) -> &[FockBasisState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> &FockBasisState {
        &self.states[index]
    }

    pub fn index_of(&self, state: &FockBasisState) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    pub fn position(&self, mode: ModeIndex) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// Photon number in `mode` for basis state `index`; zero for modes
    /// outside this basis.
    pub fn occupation(&self, index: usize, mode: ModeIndex) -> u8 {
        self.position(mode)
            .map(|p| self.states[index].0[p])
            .unwrap_or(0)
    }

    /// Index of the state with the given per-mode occupations (unlisted
    /// modes empty).
    pub fn index_of_occupations(&self, occupations: &[(ModeIndex, u8)]) -> Result<usize> {
        let mut occ = vec![0u8; self.modes.len()];
        for &(mode, n) in occupations {
            let p = self.position(mode).ok_or(Error::UnknownMode(mode))?;
            occ[p] += n;
        }
        let state = FockBasisState(occ);
        self.index_of(&state)
            .ok_or_else(|| Error::OutsideTruncation(state.0.clone()))
    }

    fn vacuum_index(&self) -> usize {
        0
    }
}

/// Largest entrywise modulus of `a - a†`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `u†u - I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u;
    let id = CMatrix::identity(u.nrows(), u.ncols());
    (p - id).iter().fold(0.0f64, |w, z| w.max(z.norm()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    let h = (a + a.adjoint()).scale(0.5);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// A dense operator on the truncated Fock space of a mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: Basis,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(basis: Basis, matrix: CMatrix) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator { basis, matrix })
    }

    pub fn identity(basis: Basis) -> Self {
        let d = basis.dim();
        Operator {
            basis,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn from_diagonal(basis: Basis, diagonal: &[f64]) -> Result<Self> {
        if diagonal.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: diagonal.len(),
            });
        }
        let d = DVector::from_iterator(diagonal.len(), diagonal.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Operator {
            basis,
            matrix: CMatrix::from_diagonal(&d),
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn modes(&self) -> &[ModeIndex] {
        self.basis.modes()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        if self.basis != rhs.basis {
            return Err(Error::ModeSetMismatch);
        }
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        self.tensor_with_loss(other).map(|(op, _)| op)
    }

    /// Tensor product over the union of the two (disjoint) mode sets,
    /// restricted to the truncated space. The second value is the summed real
    /// diagonal weight of product states beyond the cutoff.
    pub fn tensor_with_loss(&self, other: &Operator) -> Result<(Operator, f64)> {
        if let Some(&m) = self.modes().iter().find(|m| other.modes().contains(m)) {
            return Err(Error::OverlappingModes(m));
        }
        let mut modes = self.modes().to_vec();
        modes.extend_from_slice(other.modes());
        let basis = Basis::new(&modes)?;

        // Global index for every (a, b) pair, if it survives truncation.
        let pa: Vec<usize> = self.modes().iter().map(|&m| basis.position(m).unwrap()).collect();
        let pb: Vec<usize> = other.modes().iter().map(|&m| basis.position(m).unwrap()).collect();
        let (da, db) = (self.dim(), other.dim());
        let mut joint = vec![None; da * db];
        for i in 0..da {
            for j in 0..db {
                let mut occ = vec![0u8; basis.modes().len()];
                for (k, &p) in pa.iter().enumerate() {
                    occ[p] = self.basis.state(i).0[k];
                }
                for (k, &p) in pb.iter().enumerate() {
                    occ[p] = other.basis.state(j).0[k];
                }
                joint[i * db + j] = basis.index_of(&FockBasisState(occ));
            }
        }

        let d = basis.dim();
        let mut matrix = CMatrix::zeros(d, d);
        let mut lost = 0.0;
        for (r, row) in joint.iter().enumerate() {
            let (i, j) = (r / db, r % db);
            match row {
                Some(gr) => {
                    for (c, col) in joint.iter().enumerate() {
                        if let Some(gc) = col {
                            let (k, l) = (c / db, c % db);
                            matrix[(*gr, *gc)] = self.matrix[(i, k)] * other.matrix[(j, l)];
                        }
                    }
                }
                None => lost += (self.matrix[(i, i)] * other.matrix[(j, j)]).re,
            }
        }
        Ok((Operator { basis, matrix }, lost))
    }

    /// Trace out every mode not in `keep`.
    pub fn partial_trace(&self, keep: &[ModeIndex]) -> Result<Operator> {
        if keep.is_empty() {
            return Err(Error::EmptyModeSet);
        }
        if let Some(&m) = keep.iter().find(|m| !self.modes().contains(m)) {
            return Err(Error::UnknownMode(m));
        }
        let reduced = Basis::new(keep)?;
        let kept: Vec<usize> = reduced
            .modes()
            .iter()
            .map(|&m| self.basis.position(m).unwrap())
            .collect();
        let traced: Vec<usize> = (0..self.modes().len()).filter(|p| !kept.contains(p)).collect();

        let split = |s: &FockBasisState| {
            let k: Vec<u8> = kept.iter().map(|&p| s.0[p]).collect();
            let t: Vec<u8> = traced.iter().map(|&p| s.0[p]).collect();
            (reduced.index_of(&FockBasisState(k)).unwrap(), t)
        };
        let parts: Vec<_> = self.basis.states().iter().map(split).collect();

        let d = reduced.dim();
        let mut matrix = CMatrix::zeros(d, d);
        for (i, (ri, ti)) in parts.iter().enumerate() {
            for (j, (rj, tj)) in parts.iter().enumerate() {
                if ti == tj {
                    matrix[(*ri, *rj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Operator {
            basis: reduced,
            matrix,
        })
    }

    /// Re-express the operator on a larger mode set, acting as the identity
    /// on the added modes (restricted to the truncated space).
    pub fn extend_to(&self, modes: &[ModeIndex]) -> Result<Operator> {
        let extra: Vec<ModeIndex> = modes
            .iter()
            .copied()
            .filter(|m| !self.modes().contains(m))
            .collect();
        if extra.is_empty() {
            return Ok(self.clone());
        }
        self.tensor(&Operator::identity(Basis::new(&extra)?))
    }
}

/// Validated density operator: Hermitian and positive semidefinite, with a
/// flag recording whether its trace is one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
    normalized: bool,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let herm = hermiticity_defect(op.matrix());
        if herm > tolerance::ALGEBRAIC {
            return Err(Error::NotHermitian(herm));
        }
        let min_eig = min_eigenvalue(op.matrix());
        if min_eig < -tolerance::ALGEBRAIC {
            return Err(Error::NotPositive(min_eig));
        }
        let normalized = (op.trace().re - 1.0).abs() <= tolerance::ALGEBRAIC;
        Ok(DensityOperator { op, normalized })
    }

    /// Construct without validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(op: Operator) -> Self {
        let normalized = (op.trace().re - 1.0).abs() <= tolerance::ALGEBRAIC;
        DensityOperator { op, normalized }
    }

    pub fn vacuum(basis: Basis) -> Self {
        let d = basis.dim();
        let mut diag = vec![0.0; d];
        diag[basis.vacuum_index()] = 1.0;
        DensityOperator::new_unchecked(Operator::from_diagonal(basis, &diag).unwrap())
    }

    /// Projector onto a single Fock state given by per-mode occupations.
    pub fn fock(basis: Basis, occupations: &[(ModeIndex, u8)]) -> Result<Self> {
        let i = basis.index_of_occupations(occupations)?;
        let mut diag = vec![0.0; basis.dim()];
        diag[i] = 1.0;
        Ok(DensityOperator::new_unchecked(Operator::from_diagonal(basis, &diag)?))
    }

    /// Incoherent mixture of states on the same basis.
    pub fn mixture(components: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyModeSet)?.1;
        let mut matrix = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in components {
            if rho.basis() != first.basis() {
                return Err(Error::ModeSetMismatch);
            }
            matrix += rho.matrix().scale(*w);
        }
        DensityOperator::new(Operator::new(first.basis().clone(), matrix)?)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.op.trace().re))
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn basis(&self) -> &Basis {
        self.op.basis()
    }

    pub fn modes(&self) -> &[ModeIndex] {
        self.op.modes()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Real parts of the diagonal, i.e. occupation-basis populations.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix().diagonal().iter().map(|z| z.re).collect()
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator::new_unchecked(self.op.tensor(other.operator())?))
    }

    pub fn tensor_with_loss(&self, other: &DensityOperator) -> Result<(DensityOperator, f64)> {
        let (op, lost) = self.op.tensor_with_loss(other.operator())?;
        Ok((DensityOperator::new_unchecked(op), lost))
    }

    pub fn partial_trace(&self, keep: &[ModeIndex]) -> Result<DensityOperator> {
        Ok(DensityOperator::new_unchecked(self.op.partial_trace(keep)?))
    }

    /// Full validation report: (Hermiticity defect, minimum eigenvalue, trace).
    pub fn diagnostics(&self) -> (f64, f64, f64) {
        (
            hermiticity_defect(self.matrix()),
            min_eigenvalue(self.matrix()),
            self.trace(),
        )
    }
}

pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    a.tensor(b)
}

pub fn partial_trace(rho: &DensityOperator, keep: &[ModeIndex]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

/// `Tr[op ρ]`, rejecting results with an imaginary part above tolerance.
pub fn expectation(rho: &DensityOperator, op: &Operator) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: op.dim(),
        });
    }
    if rho.basis() != op.basis() {
        return Err(Error::ModeSetMismatch);
    }
    let value = (op.matrix() * rho.matrix()).trace();
    if value.im.abs() > tolerance::ALGEBRAIC {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

/// Pure state over a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Basis,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(basis: Basis, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn fock(basis: Basis, occupations: &[(ModeIndex, u8)]) -> Result<Self> {
        Self::superposition(basis, &[(C64::new(1.0, 0.0), occupations)])
    }

    /// Unnormalized sum of amplitude-weighted Fock states.
    pub fn superposition(basis: Basis, terms: &[(C64, &[(ModeIndex, u8)])]) -> Result<Self> {
        let mut amplitudes = CVector::zeros(basis.dim());
        for (amp, occ) in terms {
            amplitudes[basis.index_of_occupations(occ)?] += amp;
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[(ModeIndex, u8)]) -> Result<C64> {
        Ok(self.amplitudes[self.basis.index_of_occupations(occupations)?])
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= tolerance::ALGEBRAIC
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_squared().sqrt();
        if n > 0.0 {
            self.amplitudes.unscale_mut(n);
        }
        self
    }

    pub fn projector(&self) -> DensityOperator {
        let matrix = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new_unchecked(Operator {
            basis: self.basis.clone(),
            matrix,
        })
    }

    pub fn apply(&self, op: &Operator) -> Result<StateVector> {
        if op.basis() != &self.basis {
            return Err(Error::ModeSetMismatch);
        }
        Ok(StateVector {
            basis: self.basis.clone(),
            amplitudes: op.matrix() * &self.amplitudes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_sizes() {
        let one = enumerate_basis(1, 2);
        assert_eq!(
            one,
            vec![
                FockBasisState::new(vec![0]),
                FockBasisState::new(vec![1]),
                FockBasisState::new(vec![2])
            ]
        );
        assert_eq!(enumerate_basis(2, 2).len(), 6);
        assert_eq!(enumerate_basis(4, 2).len(), 15);
        assert_eq!(Basis::global().dim(), 15);
    }

    #[test]
    fn basis_order_is_graded_then_lexicographic() {
        let states = enumerate_basis(3, 2);
        for w in states.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(a.total() < b.total() || (a.total() == b.total() && a < b));
        }
    }

    #[test]
    fn basis_is_a_bijection() {
        let b = Basis::global();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.state(i)), Some(i));
        }
        let mut all = Vec::new();
        for n0 in 0..=2u8 {
            for n1 in 0..=2u8 {
                for n2 in 0..=2u8 {
                    for n3 in 0..=2u8 {
                        if n0 + n1 + n2 + n3 <= 2 {
                            all.push(FockBasisState::new(vec![n0, n1, n2, n3]));
                        }
                    }
                }
            }
        }
        assert_eq!(all.len(), b.dim());
        assert!(all.iter().all(|s| b.index_of(s).is_some()));
    }

    #[test]
    fn duplicate_and_empty_modes_rejected() {
        assert!(matches!(Basis::new(&[]), Err(Error::EmptyModeSet)));
        assert!(matches!(
            Basis::new(&[ModeIndex::METER_H, ModeIndex::METER_H]),
            Err(Error::DuplicateMode(_))
        ));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in ModeIndex::ALL {
            assert_eq!(m.to_string().parse::<ModeIndex>().unwrap(), m);
        }
        assert!("xH".parse::<ModeIndex>().is_err());
    }

    #[test]
    fn product_of_single_photon_projectors() {
        let s = DensityOperator::fock(Basis::party(Party::Signal), &[(ModeIndex::SIGNAL_H, 1)]).unwrap();
        let m = DensityOperator::fock(Basis::party(Party::Meter), &[(ModeIndex::METER_H, 1)]).unwrap();
        let (rho, lost) = s.tensor_with_loss(&m).unwrap();
        assert_eq!(lost, 0.0);
        let idx = rho
            .basis()
            .index_of(&FockBasisState::new(vec![1, 0, 1, 0]))
            .unwrap();
        for i in 0..rho.dim() {
            for j in 0..rho.dim() {
                let expected = if i == idx && j == idx { 1.0 } else { 0.0 };
                assert_eq!(rho.matrix()[(i, j)], c(expected));
            }
        }
    }

    #[test]
    fn tensor_with_vacuum_embeds() {
        let s = StateVector::superposition(
            Basis::party(Party::Signal),
            &[
                (c(0.6), &[(ModeIndex::SIGNAL_H, 1)]),
                (c(0.8), &[(ModeIndex::SIGNAL_V, 1)]),
            ],
        )
        .unwrap()
        .projector();
        let vac = DensityOperator::vacuum(Basis::party(Party::Meter));
        let rho = s.tensor(&vac).unwrap();
        assert_eq!(rho.modes(), &ModeIndex::ALL);
        let back = rho.partial_trace(&ModeIndex::of_party(Party::Signal)).unwrap();
        assert!((back.matrix() - s.matrix()).camax() < tolerance::ROUND_TRIP);
        let h = rho.basis().index_of_occupations(&[(ModeIndex::SIGNAL_H, 1)]).unwrap();
        let v = rho.basis().index_of_occupations(&[(ModeIndex::SIGNAL_V, 1)]).unwrap();
        assert!((rho.matrix()[(h, v)] - c(0.48)).norm() < 1e-15);
    }

    #[test]
    fn tensor_reports_truncation() {
        let s = DensityOperator::fock(Basis::party(Party::Signal), &[(ModeIndex::SIGNAL_H, 2)]).unwrap();
        let m = DensityOperator::fock(Basis::party(Party::Meter), &[(ModeIndex::METER_V, 1)]).unwrap();
        let (rho, lost) = s.tensor_with_loss(&m).unwrap();
        assert_eq!(lost, 1.0);
        assert_eq!(rho.trace(), 0.0);
        assert!(!rho.is_normalized());
    }

    #[test]
    fn tensor_rejects_overlap() {
        let a = DensityOperator::vacuum(Basis::party(Party::Signal));
        assert!(matches!(a.tensor(&a), Err(Error::OverlappingModes(_))));
    }

    #[test]
    fn partial_trace_of_bell_pair() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::superposition(
            Basis::global(),
            &[
                (c(r), &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)]),
                (c(r), &[(ModeIndex::SIGNAL_V, 1), (ModeIndex::METER_V, 1)]),
            ],
        )
        .unwrap();
        assert!(psi.is_normalized());
        let rho = psi.projector();
        let sig = rho.partial_trace(&ModeIndex::of_party(Party::Signal)).unwrap();
        let h = sig.basis().index_of_occupations(&[(ModeIndex::SIGNAL_H, 1)]).unwrap();
        let v = sig.basis().index_of_occupations(&[(ModeIndex::SIGNAL_V, 1)]).unwrap();
        for i in 0..sig.dim() {
            for j in 0..sig.dim() {
                let expected = if i == j && (i == h || i == v) { 0.5 } else { 0.0 };
                assert!((sig.matrix()[(i, j)] - c(expected)).norm() < tolerance::ROUND_TRIP);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let rho = DensityOperator::vacuum(Basis::global());
        assert!(matches!(rho.partial_trace(&[]), Err(Error::EmptyModeSet)));
        let sig = DensityOperator::vacuum(Basis::party(Party::Signal));
        assert!(matches!(
            sig.partial_trace(&[ModeIndex::METER_H]),
            Err(Error::UnknownMode(_))
        ));
    }

    #[test]
    fn expectation_examples() {
        let b = Basis::global();
        let rho = DensityOperator::fock(b.clone(), &[(ModeIndex::METER_V, 1)]).unwrap();
        assert!((expectation(&rho, &Operator::identity(b.clone())).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(expectation(&rho, rho.operator()).unwrap(), 1.0);

        let one = Basis::new(&[ModeIndex::SIGNAL_H]).unwrap();
        let half = DensityOperator::new(Operator::from_diagonal(one.clone(), &[0.5, 0.5, 0.0]).unwrap()).unwrap();
        let p0 = Operator::from_diagonal(one, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(expectation(&half, &p0).unwrap(), 0.5);
    }

    #[test]
    fn expectation_errors() {
        let rho = DensityOperator::vacuum(Basis::global());
        let small = Operator::identity(Basis::party(Party::Meter));
        assert!(matches!(expectation(&rho, &small), Err(Error::DimensionMismatch { .. })));

        let mut m = CMatrix::zeros(15, 15);
        m[(0, 0)] = C64::new(0.0, 1.0);
        let op = Operator::new(Basis::global(), m).unwrap();
        assert!(matches!(expectation(&rho, &op), Err(Error::ImaginaryResidue(_))));
    }

    #[test]
    fn density_validation() {
        let b = Basis::new(&[ModeIndex::METER_H]).unwrap();
        let neg = Operator::from_diagonal(b.clone(), &[1.5, -0.5, 0.0]).unwrap();
        assert!(matches!(DensityOperator::new(neg), Err(Error::NotPositive(_))));
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 1)] = c(1.0);
        assert!(matches!(
            DensityOperator::new(Operator::new(b, m).unwrap()),
            Err(Error::NotHermitian(_))
        ));
    }
}
