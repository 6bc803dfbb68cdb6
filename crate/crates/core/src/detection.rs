//! Non-number-resolving click detectors with finite efficiency.
//!
//! Each detector watches one polarization mode and only tells vacuum from
//! non-vacuum. On the truncated single-mode space `{|0⟩, |1⟩, |2⟩}` its
//! two-outcome POVM is diagonal:
//!
//! ```text
//! no click: diag(1, 1 − ζ, (1 − ζ)²)
//! click:    diag(0, ζ,     ζ(2 − ζ))
//! ```
//!
//! There are no dark counts: the click element never touches `|0⟩`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{Basis, DensityOperator, ModeIndex, Operator, Party, C64};
use crate::tolerance;

/// Quantum efficiency of a single detector.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DetectorModel {
    zeta: f64,
}

impl DetectorModel {
    pub fn new(zeta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&zeta) {
            Ok(DetectorModel { zeta })
        } else {
            Err(Error::InvalidEfficiency(zeta))
        }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn element(&self, outcome: Outcome) -> PovmElement {
        let z = self.zeta;
        let diagonal = match outcome {
            Outcome::NoClick => [1.0, 1.0 - z, (1.0 - z) * (1.0 - z)],
            Outcome::Click => [0.0, z, z * (2.0 - z)],
        };
        PovmElement { outcome, diagonal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    NoClick,
    Click,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::NoClick, Outcome::Click];
}

/// One POVM element on a detector mode's truncated space, stored as its
/// diagonal over photon numbers 0, 1, 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmElement {
    pub outcome: Outcome,
    pub diagonal: [f64; 3],
}

impl PovmElement {
    /// Weight for `n` photons in the detector mode.
    pub fn weight(&self, n: u8) -> f64 {
        self.diagonal[n as usize]
    }
}

pub fn povm_element(outcome: Outcome, zeta: f64) -> Result<PovmElement> {
    Ok(DetectorModel::new(zeta)?.element(outcome))
}

/// `max |E⁽⁰⁾ + E⁽¹⁾ − I|` over `{|0⟩, |1⟩, |2⟩}`.
pub fn completeness_defect(zeta: f64) -> f64 {
    let model = DetectorModel { zeta };
    let none = model.element(Outcome::NoClick);
    let click = model.element(Outcome::Click);
    (0..3)
        .map(|n| (none.diagonal[n] + click.diagonal[n] - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Efficiencies of the four detectors. Uniform unless configured otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorBank {
    models: [DetectorModel; 4],
}

impl DetectorBank {
    pub fn uniform(zeta: f64) -> Result<Self> {
        let m = DetectorModel::new(zeta)?;
        Ok(DetectorBank { models: [m; 4] })
    }

    /// Per-detector efficiencies in global mode order.
    pub fn per_mode(zetas: [f64; 4]) -> Result<Self> {
        let mut models = [DetectorModel { zeta: 0.0 }; 4];
        for (m, z) in models.iter_mut().zip(zetas) {
            *m = DetectorModel::new(z)?;
        }
        Ok(DetectorBank { models })
    }

    pub fn model(&self, mode: ModeIndex) -> DetectorModel {
        let i = ModeIndex::ALL.iter().position(|&m| m == mode).unwrap();
        self.models[i]
    }

    pub fn is_uniform(&self) -> bool {
        self.models.iter().all(|m| m.zeta == self.models[0].zeta)
    }
}

/// Which arms carry detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arms {
    /// Meter only: the signal propagates on undetected.
    Meter,
    /// Signal and meter: coincidence counting.
    Both,
}

impl Arms {
    pub fn detectors(self) -> Vec<ModeIndex> {
        match self {
            Arms::Meter => ModeIndex::of_party(Party::Meter).to_vec(),
            Arms::Both => ModeIndex::ALL.to_vec(),
        }
    }
}

/// One outcome per declared detector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClickPattern {
    outcomes: BTreeMap<ModeIndex, Outcome>,
}

impl ClickPattern {
    /// The detector set must be exactly one of the declared arm sets.
    pub fn new(outcomes: impl IntoIterator<Item = (ModeIndex, Outcome)>) -> Result<Self> {
        let outcomes: BTreeMap<_, _> = outcomes.into_iter().collect();
        let modes: Vec<ModeIndex> = outcomes.keys().copied().collect();
        if modes != Arms::Meter.detectors() && modes != Arms::Both.detectors() {
            return Err(Error::PatternMismatch);
        }
        Ok(ClickPattern { outcomes })
    }

    /// Meter-arm pattern from the H and V detector outcomes.
    pub fn meter(h: Outcome, v: Outcome) -> Self {
        ClickPattern {
            outcomes: [(ModeIndex::METER_H, h), (ModeIndex::METER_V, v)].into(),
        }
    }

    /// Both-arm pattern, outcomes given in global mode order.
    pub fn both(outcomes: [Outcome; 4]) -> Self {
        ClickPattern {
            outcomes: ModeIndex::ALL.into_iter().zip(outcomes).collect(),
        }
    }

    /// All `2^n` patterns over the arm set, in a fixed order.
    pub fn all(arms: Arms) -> Vec<ClickPattern> {
        let detectors = arms.detectors();
        let n = detectors.len();
        (0..1usize << n)
            .map(|bits| ClickPattern {
                outcomes: detectors
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        let click = bits >> (n - 1 - i) & 1 == 1;
                        (m, if click { Outcome::Click } else { Outcome::NoClick })
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn arms(&self) -> Arms {
        if self.outcomes.len() == 4 {
            Arms::Both
        } else {
            Arms::Meter
        }
    }

    pub fn outcome(&self, mode: ModeIndex) -> Option<Outcome> {
        self.outcomes.get(&mode).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, Outcome)> + '_ {
        self.outcomes.iter().map(|(&m, &o)| (m, o))
    }

    /// The meter-arm part of this pattern.
    pub fn meter_part(&self) -> ClickPattern {
        ClickPattern::meter(
            self.outcomes[&ModeIndex::METER_H],
            self.outcomes[&ModeIndex::METER_V],
        )
    }

    /// Joint weight of the pattern for one occupation configuration.
    pub fn weight<F>(&self, detectors: &DetectorBank, occupation: F) -> f64
    where
        F: Fn(ModeIndex) -> u8,
    {
        self.iter()
            .map(|(m, o)| detectors.model(m).element(o).weight(occupation(m)))
            .product()
    }
}

impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, o)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let mark = match o {
                Outcome::Click => '1',
                Outcome::NoClick => '0',
            };
            write!(f, "{m}:{mark}")?;
        }
        Ok(())
    }
}

/// Product of the pattern's POVM elements as a diagonal operator on
/// `basis`, identity on modes without a detector.
pub fn pattern_operator(pattern: &ClickPattern, detectors: &DetectorBank, basis: &Basis) -> Result<Operator> {
    if let Some((m, _)) = pattern.iter().find(|(m, _)| basis.position(*m).is_none()) {
        return Err(Error::UnknownMode(m));
    }
    let diag: Vec<f64> = (0..basis.dim())
        .map(|i| pattern.weight(detectors, |m| basis.occupation(i, m)))
        .collect();
    Operator::from_diagonal(basis.clone(), &diag)
}

/// `Tr[(⊗ POVM elements) ρ]`.
pub fn pattern_probability(rho: &DensityOperator, pattern: &ClickPattern, detectors: &DetectorBank) -> Result<f64> {
    rho.require_normalized()?;
    let op = pattern_operator(pattern, detectors, rho.basis()).map_err(|_| Error::PatternMismatch)?;
    crate::fock::expectation(rho, &op)
}

/// Condition on a meter click pattern and discard the meter: returns the
/// pattern probability and the normalized signal state after the symmetric
/// update `√M ρ √M / p`.
pub fn conditional_signal_state(
    rho_sm: &DensityOperator,
    meter_pattern: &ClickPattern,
    detectors: &DetectorBank,
) -> Result<(f64, DensityOperator)> {
    if meter_pattern.arms() != Arms::Meter {
        return Err(Error::PatternMismatch);
    }
    let probability = pattern_probability(rho_sm, meter_pattern, detectors)?;
    if probability < tolerance::MIN_PROBABILITY {
        return Err(Error::Unconditionable(probability));
    }
    let m = pattern_operator(meter_pattern, detectors, rho_sm.basis())?;
    let root = DVector::from_iterator(m.dim(), m.matrix().diagonal().iter().map(|z| C64::new(z.re.sqrt(), 0.0)));
    let mut updated = rho_sm.matrix().clone();
    for i in 0..updated.nrows() {
        for j in 0..updated.ncols() {
            updated[(i, j)] *= root[i] * root[j] / probability;
        }
    }
    let post = DensityOperator::new(Operator::new(rho_sm.basis().clone(), updated)?)?;
    let signal = post.partial_trace(&ModeIndex::of_party(Party::Signal))?;
    Ok((probability, signal))
}
