//! Fidelity measures for the signal/meter polarization measurement.
//!
//! Two operating modes are compared:
//!
//! * **Coincidence**: both arms carry detectors and only events where each
//!   arm reports exactly one polarization are kept. The measurement fidelity
//!   `F_M` is the squared Bhattacharyya overlap between the signal input
//!   distribution and the meter outcome distribution over those events.
//! * **QND**: only the meter is detected; the signal flies on. The QND
//!   fidelity is the probability that the signal really holds `|k⟩` given
//!   the meter pattern "k clicked, ⊥k stayed dark":
//!
//! ```text
//! F_QND = Tr[E_k⁽¹⁾ E_⊥k⁽⁰⁾ ⊗ |k⟩⟨k| ρ] / Tr[E_k⁽¹⁾ E_⊥k⁽⁰⁾ ⊗ 1 ρ]
//! ```
//!
//! The pre-detection state is not fixed by any physical circuit here; the
//! canonical scenario is a reconstruction with two equally weighted
//! branches (see [`Reconstruction`]), which gives `F_QND = 1/(2 − ζ)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{pattern_operator, pattern_probability, Arms, ClickPattern, DetectorBank, Outcome};
use crate::error::{Error, Result};
use crate::fock::{expectation, Basis, DensityOperator, ModeIndex, Operator, Party, Polarization};
use crate::tolerance;

/// Per-arm reading derived from the arm's H and V detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArmOutcome {
    H,
    V,
    Both,
    None,
}

impl ArmOutcome {
    pub const ALL: [ArmOutcome; 4] = [ArmOutcome::H, ArmOutcome::V, ArmOutcome::Both, ArmOutcome::None];

    pub fn from_clicks(h: Outcome, v: Outcome) -> Self {
        match (h, v) {
            (Outcome::Click, Outcome::NoClick) => ArmOutcome::H,
            (Outcome::NoClick, Outcome::Click) => ArmOutcome::V,
            (Outcome::Click, Outcome::Click) => ArmOutcome::Both,
            (Outcome::NoClick, Outcome::NoClick) => ArmOutcome::None,
        }
    }

    pub fn polarization(self) -> Option<Polarization> {
        match self {
            ArmOutcome::H => Some(Polarization::H),
            ArmOutcome::V => Some(Polarization::V),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ArmOutcome::H => "H",
            ArmOutcome::V => "V",
            ArmOutcome::Both => "B",
            ArmOutcome::None => "0",
        }
    }
}

impl fmt::Display for ArmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl From<Polarization> for ArmOutcome {
    fn from(p: Polarization) -> Self {
        match p {
            Polarization::H => ArmOutcome::H,
            Polarization::V => ArmOutcome::V,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatingMode {
    Coincidence,
    Qnd,
}

impl OperatingMode {
    pub fn arms(self) -> Arms {
        match self {
            OperatingMode::Coincidence => Arms::Both,
            OperatingMode::Qnd => Arms::Meter,
        }
    }
}

/// Outcome probabilities keyed by (signal reading, meter reading). In QND
/// mode the signal is never read and its key is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    mode: OperatingMode,
    entries: BTreeMap<(Option<ArmOutcome>, ArmOutcome), f64>,
}

impl ProbabilityTable {
    /// Accumulate pattern probabilities into arm readings.
    pub fn from_patterns<I>(mode: OperatingMode, patterns: I) -> Self
    where
        I: IntoIterator<Item = (ClickPattern, f64)>,
    {
        let mut entries = BTreeMap::new();
        let signal_keys: Vec<Option<ArmOutcome>> = match mode {
            OperatingMode::Coincidence => ArmOutcome::ALL.iter().copied().map(Some).collect(),
            OperatingMode::Qnd => vec![None],
        };
        for s in &signal_keys {
            for m in ArmOutcome::ALL {
                entries.insert((*s, m), 0.0);
            }
        }
        for (pattern, p) in patterns {
            let key = Self::key(mode, &pattern);
            *entries.get_mut(&key).expect("pattern matches table mode") += p;
        }
        ProbabilityTable { mode, entries }
    }

    fn key(mode: OperatingMode, pattern: &ClickPattern) -> (Option<ArmOutcome>, ArmOutcome) {
        let arm = |party| {
            let [h, v] = ModeIndex::of_party(party);
            ArmOutcome::from_clicks(pattern.outcome(h).unwrap(), pattern.outcome(v).unwrap())
        };
        let signal = match mode {
            OperatingMode::Coincidence => Some(arm(Party::Signal)),
            OperatingMode::Qnd => None,
        };
        (signal, arm(Party::Meter))
    }

    pub fn mode(&self) -> OperatingMode {
        self.mode
    }

    /// Probability of a (signal, meter) reading; the signal key is ignored in
    /// QND mode.
    pub fn get(&self, signal: Option<ArmOutcome>, meter: ArmOutcome) -> f64 {
        let s = match self.mode {
            OperatingMode::Coincidence => signal,
            OperatingMode::Qnd => None,
        };
        self.entries.get(&(s, meter)).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((Option<ArmOutcome>, ArmOutcome), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn meter_marginal(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for ((_, m), p) in self.entries() {
            out[ArmOutcome::ALL.iter().position(|&x| x == m).unwrap()] += p;
        }
        out
    }

    /// The `{H, V, None} × {H, V, None}` part of a coincidence table.
    pub fn sub_table(&self) -> [[f64; 3]; 3] {
        const KEYS: [ArmOutcome; 3] = [ArmOutcome::H, ArmOutcome::V, ArmOutcome::None];
        let mut out = [[0.0; 3]; 3];
        for (i, s) in KEYS.iter().enumerate() {
            for (j, m) in KEYS.iter().enumerate() {
                out[i][j] = self.get(Some(*s), *m);
            }
        }
        out
    }
}

pub fn build_probability_table(rho: &DensityOperator, detectors: &DetectorBank, mode: OperatingMode) -> Result<ProbabilityTable> {
    let probs = ClickPattern::all(mode.arms())
        .into_iter()
        .map(|p| {
            let prob = pattern_probability(rho, &p, detectors)?;
            Ok((p, prob))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityTable::from_patterns(mode, probs))
}

/// Squared Bhattacharyya overlap `(Σ_k √(p_k q_k))²` between the input
/// distribution over `(H, V)` and the meter readings restricted to
/// coincidence events (each arm reports exactly one polarization).
pub fn measurement_fidelity(input: [f64; 2], table: &ProbabilityTable) -> Result<f64> {
    if table.mode() != OperatingMode::Coincidence {
        return Err(Error::WrongMode);
    }
    if input.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (input[0] + input[1] - 1.0).abs() > tolerance::ALGEBRAIC {
        return Err(Error::InvalidDistribution(input));
    }
    let pol = [ArmOutcome::H, ArmOutcome::V];
    let mut q = [0.0; 2];
    for (j, m) in pol.iter().enumerate() {
        q[j] = pol.iter().map(|s| table.get(Some(*s), *m)).sum();
    }
    let mass = q[0] + q[1];
    if mass < tolerance::MIN_PROBABILITY {
        return Err(Error::NoCoincidences);
    }
    Ok(overlap(input, [q[0] / mass, q[1] / mass]))
}

pub(crate) fn overlap(p: [f64; 2], q: [f64; 2]) -> f64 {
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    (bc * bc).clamp(0.0, 1.0)
}

/// Point-mass input distribution on `k`.
pub fn point_mass(k: Polarization) -> [f64; 2] {
    match k {
        Polarization::H => [1.0, 0.0],
        Polarization::V => [0.0, 1.0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadKind {
    /// Meter holds a k photon and a ⊥k photon; the ⊥k one went unnoticed.
    OrthogonalMissed,
    /// Meter holds two k photons.
    SameModePair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalContent {
    Photon(Polarization),
    Vacuum,
}

/// One incoherent branch of a reconstructed pre-detection state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub weight: f64,
    pub meter: Vec<(ModeIndex, u8)>,
    pub signal: SignalContent,
}

impl BranchState {
    pub fn occupations(&self) -> Vec<(ModeIndex, u8)> {
        let mut occ = self.meter.clone();
        if let SignalContent::Photon(p) = self.signal {
            occ.push((ModeIndex::new(Party::Signal, p), 1));
        }
        occ
    }
}

/// Two-branch mixture: with `good_weight` the meter holds one k photon and
/// the signal is `|k⟩`; with `bad_weight` the meter holds two photons and the
/// signal is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub k: Polarization,
    pub good_weight: f64,
    pub bad_weight: f64,
    pub bad_kind: BadKind,
}

impl Reconstruction {
    pub fn new(k: Polarization, good_weight: f64, bad_weight: f64, bad_kind: BadKind) -> Result<Self> {
        let ok = good_weight >= 0.0
            && bad_weight >= 0.0
            && (good_weight + bad_weight - 1.0).abs() <= tolerance::ROUND_TRIP;
        if !ok {
            return Err(Error::InvalidWeights {
                good: good_weight,
                bad: bad_weight,
            });
        }
        Ok(Reconstruction {
            k,
            good_weight,
            bad_weight,
            bad_kind,
        })
    }

    /// Equal-weight missed-orthogonal-photon scenario.
    pub fn canonical(k: Polarization) -> Self {
        Reconstruction::new(k, 0.5, 0.5, BadKind::OrthogonalMissed).unwrap()
    }

    pub fn ideal(k: Polarization) -> Self {
        Reconstruction::new(k, 1.0, 0.0, BadKind::OrthogonalMissed).unwrap()
    }

    pub fn branches(&self) -> Vec<BranchState> {
        let mk = ModeIndex::new(Party::Meter, self.k);
        let mperp = ModeIndex::new(Party::Meter, self.k.orthogonal());
        let bad_meter = match self.bad_kind {
            BadKind::OrthogonalMissed => vec![(mk, 1), (mperp, 1)],
            BadKind::SameModePair => vec![(mk, 2)],
        };
        vec![
            BranchState {
                weight: self.good_weight,
                meter: vec![(mk, 1)],
                signal: SignalContent::Photon(self.k),
            },
            BranchState {
                weight: self.bad_weight,
                meter: bad_meter,
                signal: SignalContent::Vacuum,
            },
        ]
    }

    pub fn state(&self) -> DensityOperator {
        let basis = Basis::global();
        let mut diag = vec![0.0; basis.dim()];
        for b in self.branches() {
            let i = basis
                .index_of_occupations(&b.occupations())
                .expect("branches stay within two photons");
            diag[i] += b.weight;
        }
        DensityOperator::new(Operator::from_diagonal(basis, &diag).unwrap()).expect("diagonal mixture is valid")
    }
}

pub fn reconstruct_predetection_state(
    k: Polarization,
    good_weight: f64,
    bad_weight: f64,
    bad_kind: BadKind,
) -> Result<DensityOperator> {
    Ok(Reconstruction::new(k, good_weight, bad_weight, bad_kind)?.state())
}

/// The meter pattern a QND user acts on: k clicked, ⊥k stayed dark.
pub fn conditioning_pattern(k: Polarization) -> ClickPattern {
    match k {
        Polarization::H => ClickPattern::meter(Outcome::Click, Outcome::NoClick),
        Polarization::V => ClickPattern::meter(Outcome::NoClick, Outcome::Click),
    }
}

fn qnd_operators(rho: &DensityOperator, k: Polarization, detectors: &DetectorBank) -> Result<(Operator, Operator)> {
    rho.require_normalized()?;
    let signal = Basis::party(Party::Signal);
    let meter = Basis::party(Party::Meter);
    let projector = DensityOperator::fock(signal.clone(), &[(ModeIndex::new(Party::Signal, k), 1)])?
        .operator()
        .clone();
    let m = pattern_operator(&conditioning_pattern(k), detectors, &meter)?;
    let numerator = projector.tensor(&m)?;
    let denominator = Operator::identity(signal).tensor(&m)?;
    if numerator.basis() != rho.basis() {
        return Err(Error::ModeSetMismatch);
    }
    Ok((numerator, denominator))
}

/// Unnormalized joint trace `Tr[E_k⁽¹⁾ E_⊥k⁽⁰⁾ ⊗ |k⟩⟨k| ρ]`.
pub fn qnd_numerator(rho: &DensityOperator, k: Polarization, detectors: &DetectorBank) -> Result<f64> {
    let (num, _) = qnd_operators(rho, k, detectors)?;
    expectation(rho, &num)
}

/// Probability of the conditioning meter pattern.
pub fn qnd_conditioning_probability(rho: &DensityOperator, k: Polarization, detectors: &DetectorBank) -> Result<f64> {
    let (_, den) = qnd_operators(rho, k, detectors)?;
    expectation(rho, &den)
}

/// Probability that the signal holds `|k⟩` given the conditioning meter
/// pattern, computed from the joint trace.
pub fn qnd_fidelity(rho: &DensityOperator, k: Polarization, detectors: &DetectorBank) -> Result<f64> {
    let (num, den) = qnd_operators(rho, k, detectors)?;
    let den = expectation(rho, &den)?;
    if den < tolerance::MIN_PROBABILITY {
        return Err(Error::OutcomeNeverOccurs(den));
    }
    Ok((expectation(rho, &num)? / den).clamp(0.0, 1.0))
}

/// `1 / (2 − ζ)`.
pub fn closed_form_qnd(zeta: f64) -> f64 {
    1.0 / (2.0 - zeta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub zeta: f64,
    pub k: Polarization,
    pub f_m: f64,
    pub f_qnd_trace: f64,
    pub f_qnd_closed: f64,
    pub coincidence: ProbabilityTable,
    pub qnd: ProbabilityTable,
}

impl FidelityReport {
    pub fn table(&self, mode: OperatingMode) -> &ProbabilityTable {
        match mode {
            OperatingMode::Coincidence => &self.coincidence,
            OperatingMode::Qnd => &self.qnd,
        }
    }
}

/// Both fidelities and both probability tables for one state and detector
/// bank. `zeta` feeds the closed form.
pub fn evaluate(rho: &DensityOperator, k: Polarization, detectors: &DetectorBank, zeta: f64) -> Result<FidelityReport> {
    let coincidence = build_probability_table(rho, detectors, OperatingMode::Coincidence)?;
    let qnd = build_probability_table(rho, detectors, OperatingMode::Qnd)?;
    Ok(FidelityReport {
        zeta,
        k,
        f_m: measurement_fidelity(point_mass(k), &coincidence)?,
        f_qnd_trace: qnd_fidelity(rho, k, detectors)?,
        f_qnd_closed: closed_form_qnd(zeta),
        coincidence,
        qnd,
    })
}

/// Evenly spaced efficiencies from `min` to `max` inclusive.
pub fn zeta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(0.0 <= min && min <= max && max <= 1.0) {
        return Err(Error::InvalidRange { min, max, steps });
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                max
            } else {
                min + (max - min) * i as f64 / last
            }
        })
        .collect())
}

/// One report per grid point, uniform efficiency at each point, evaluated
/// in parallel and returned in grid order.
pub fn sweep_state(min: f64, max: f64, steps: usize, rho: &DensityOperator, k: Polarization) -> Result<Vec<FidelityReport>> {
    zeta_grid(min, max, steps)?
        .into_par_iter()
        .map(|z| evaluate(rho, k, &DetectorBank::uniform(z)?, z))
        .collect()
}

pub fn sweep(min: f64, max: f64, steps: usize, scenario: &Reconstruction) -> Result<Vec<FidelityReport>> {
    sweep_state(min, max, steps, &scenario.state(), scenario.k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank(z: f64) -> DetectorBank {
        DetectorBank::uniform(z).unwrap()
    }

    fn correlated_h() -> DensityOperator {
        DensityOperator::fock(
            Basis::global(),
            &[(ModeIndex::SIGNAL_H, 1), (ModeIndex::METER_H, 1)],
        )
        .unwrap()
    }

    #[test]
    fn coincidence_table_ideal() {
        let t = build_probability_table(&correlated_h(), &bank(1.0), OperatingMode::Coincidence).unwrap();
        assert_eq!(t.get(Some(ArmOutcome::H), ArmOutcome::H), 1.0);
        assert!((t.total() - 1.0).abs() < 1e-15);
        for ((s, m), p) in t.entries() {
            if (s, m) != (Some(ArmOutcome::H), ArmOutcome::H) {
                assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn coincidence_table_lossy() {
        // Independent Bernoulli(ζ) detection of the two photons.
        let z: f64 = 0.65;
        let t = build_probability_table(&correlated_h(), &bank(z), OperatingMode::Coincidence).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(t.get(Some(ArmOutcome::H), ArmOutcome::H), 0.4225));
        assert!(close(t.get(Some(ArmOutcome::H), ArmOutcome::None), 0.2275));
        assert!(close(t.get(Some(ArmOutcome::None), ArmOutcome::H), 0.2275));
        assert!(close(t.get(Some(ArmOutcome::None), ArmOutcome::None), 0.1225));
        let sub = t.sub_table();
        assert!(close(sub.iter().flatten().sum::<f64>(), 1.0));
    }

    #[test]
    fn blind_detectors() {
        let rho = Reconstruction::canonical(Polarization::V).state();
        let c = build_probability_table(&rho, &bank(0.0), OperatingMode::Coincidence).unwrap();
        assert_eq!(c.get(Some(ArmOutcome::None), ArmOutcome::None), 1.0);
        let q = build_probability_table(&rho, &bank(0.0), OperatingMode::Qnd).unwrap();
        assert_eq!(q.get(None, ArmOutcome::None), 1.0);
        assert_eq!(q.entries().count(), 4);
    }

    #[test]
    fn measurement_fidelity_examples() {
        let t = build_probability_table(&correlated_h(), &bank(1.0), OperatingMode::Coincidence).unwrap();
        assert_eq!(measurement_fidelity([1.0, 0.0], &t).unwrap(), 1.0);

        // Meter uniform over H/V.
        let uniform = ProbabilityTable::from_patterns(
            OperatingMode::Coincidence,
            [
                (ClickPattern::both([Outcome::Click, Outcome::NoClick, Outcome::Click, Outcome::NoClick]), 0.5),
                (ClickPattern::both([Outcome::Click, Outcome::NoClick, Outcome::NoClick, Outcome::Click]), 0.5),
            ],
        );
        assert!((measurement_fidelity([1.0, 0.0], &uniform).unwrap() - 0.5).abs() < 1e-15);
        assert!((measurement_fidelity([0.5, 0.5], &uniform).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_fidelity_errors() {
        let t = build_probability_table(&correlated_h(), &bank(0.0), OperatingMode::Coincidence).unwrap();
        assert!(matches!(measurement_fidelity([1.0, 0.0], &t), Err(Error::NoCoincidences)));
        let q = build_probability_table(&correlated_h(), &bank(1.0), OperatingMode::Qnd).unwrap();
        assert!(matches!(measurement_fidelity([1.0, 0.0], &q), Err(Error::WrongMode)));
        let c = build_probability_table(&correlated_h(), &bank(1.0), OperatingMode::Coincidence).unwrap();
        assert!(matches!(
            measurement_fidelity([0.7, 0.7], &c),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn reconstruction_examples() {
        let ideal = reconstruct_predetection_state(Polarization::H, 1.0, 0.0, BadKind::SameModePair).unwrap();
        assert!((ideal.matrix() - correlated_h().matrix()).camax() < 1e-15);
        assert!(matches!(
            reconstruct_predetection_state(Polarization::H, 0.7, 0.7, BadKind::SameModePair),
            Err(Error::InvalidWeights { .. })
        ));
        assert!(reconstruct_predetection_state(Polarization::H, -0.5, 1.5, BadKind::SameModePair).is_err());
        let r = Reconstruction::canonical(Polarization::V);
        let total: f64 = r.branches().iter().map(|b| b.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(r.state().is_normalized());
    }

    #[test]
    fn qnd_fidelity_oracles() {
        // Hand-evaluated branch weights: good ζ/2, bad ζ(1−ζ)/2 (orthogonal)
        // or ζ(2−ζ)/2 (same mode).
        for z in [0.1, 0.3, 0.65, 0.9, 1.0] {
            let rho = Reconstruction::canonical(Polarization::H).state();
            let f = qnd_fidelity(&rho, Polarization::H, &bank(z)).unwrap();
            let oracle = (z / 2.0) / (z / 2.0 + z * (1.0 - z) / 2.0);
            assert!((f - oracle).abs() < 1e-12);
            assert!((qnd_numerator(&rho, Polarization::H, &bank(z)).unwrap() - z / 2.0).abs() < 1e-15);

            let pair = reconstruct_predetection_state(Polarization::H, 0.5, 0.5, BadKind::SameModePair).unwrap();
            let f = qnd_fidelity(&pair, Polarization::H, &bank(z)).unwrap();
            let oracle = (z / 2.0) / (z / 2.0 + z * (2.0 - z) / 2.0);
            assert!((f - oracle).abs() < 1e-12);
        }
        let pair = reconstruct_predetection_state(Polarization::H, 0.5, 0.5, BadKind::SameModePair).unwrap();
        let f = qnd_fidelity(&pair, Polarization::H, &bank(0.65)).unwrap();
        assert!((f - 0.425_531_914_893_617).abs() < 1e-12);
    }

    #[test]
    fn qnd_fidelity_headline() {
        let rho = Reconstruction::canonical(Polarization::H).state();
        let f = qnd_fidelity(&rho, Polarization::H, &bank(0.65)).unwrap();
        assert!((f - 0.740_740_740_740_740_7).abs() < tolerance::FIDELITY);
        assert!((f - closed_form_qnd(0.65)).abs() < 1e-12);
        assert_eq!(qnd_fidelity(&rho, Polarization::H, &bank(1.0)).unwrap(), 1.0);
    }

    #[test]
    fn qnd_fidelity_never_conditioned() {
        let rho = Reconstruction::canonical(Polarization::H).state();
        assert!(matches!(
            qnd_fidelity(&rho, Polarization::H, &bank(0.0)),
            Err(Error::OutcomeNeverOccurs(_))
        ));
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(closed_form_qnd(1.0), 1.0);
        assert_eq!(closed_form_qnd(0.0), 0.5);
        assert!((closed_form_qnd(0.65) - 0.740_740_740_740_740_7).abs() < 1e-15);
    }

    #[test]
    fn sweep_examples() {
        let canon = Reconstruction::canonical(Polarization::H);
        let one = sweep(0.65, 0.65, 1, &canon).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].f_qnd_trace - one[0].f_qnd_closed).abs() < 1e-12);

        let perfect = sweep(1.0, 1.0, 1, &Reconstruction::new(Polarization::V, 0.2, 0.8, BadKind::OrthogonalMissed).unwrap()).unwrap();
        assert_eq!(perfect[0].f_qnd_trace, 1.0);

        let rows = sweep(0.2, 0.8, 4, &canon).unwrap();
        let want = [1.0 / 1.8, 1.0 / 1.6, 1.0 / 1.4, 1.0 / 1.2];
        for (r, w) in rows.iter().zip(want) {
            assert!((r.f_qnd_trace - w).abs() < 1e-12);
            assert_eq!(r.f_m, 1.0);
        }
        assert!(rows.windows(2).all(|w| w[0].f_qnd_trace < w[1].f_qnd_trace));

        assert!(matches!(sweep(0.8, 0.2, 4, &canon), Err(Error::InvalidRange { .. })));
        assert!(matches!(sweep(0.2, 0.8, 0, &canon), Err(Error::InvalidRange { .. })));
    }
}
