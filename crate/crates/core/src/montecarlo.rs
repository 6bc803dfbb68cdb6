//! Shot-by-shot sampling of detector click patterns.
//!
//! Every POVM element used here is diagonal in the occupation basis, so a
//! shot can be drawn in two stages without loss of generality: pick an
//! occupation configuration from the diagonal of ρ, then let each photon in
//! a monitored mode be detected independently with probability ζ. A
//! detector clicks iff at least one of its photons is detected. This
//! shortcut is only valid for observables diagonal in the occupation basis.
//!
//! # Randomness
//!
//! Shot `i` of a run with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` with its stream set to `i` and word
//! position 0. The first `f64` selects the configuration by inverse CDF
//! over basis order; then, for each monitored detector in global mode order
//! (sH, sV, mH, mV) and each photon in it, one `f64 < ζ` decides detection.
//! Counts therefore do not depend on how shots are split across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    closed_form_qnd, conditioning_pattern, measurement_fidelity, point_mass, FidelityReport, OperatingMode,
    ProbabilityTable,
};
use crate::detection::{Arms, ClickPattern, DetectorBank, Outcome};
use crate::error::{Error, Result};
use crate::fock::{Basis, DensityOperator, ModeIndex, Party, Polarization};

/// One simulated shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotSample {
    /// Index into the global basis.
    pub configuration: usize,
    pub pattern: ClickPattern,
}

/// Point estimate with binomial standard error `√(p̂(1 − p̂)/N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub count: u64,
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_count(count: u64, shots: u64) -> Self {
        let value = count as f64 / shots as f64;
        Estimate {
            count,
            value,
            std_error: (value * (1.0 - value) / shots as f64).sqrt(),
        }
    }
}

fn pattern_from_mask(arms: Arms, mask: usize) -> ClickPattern {
    let detectors = arms.detectors();
    let n = detectors.len();
    let outcomes: Vec<Outcome> = (0..n)
        .map(|i| if mask >> (n - 1 - i) & 1 == 1 { Outcome::Click } else { Outcome::NoClick })
        .collect();
    match arms {
        Arms::Meter => ClickPattern::meter(outcomes[0], outcomes[1]),
        Arms::Both => ClickPattern::both([outcomes[0], outcomes[1], outcomes[2], outcomes[3]]),
    }
}

struct Sampler {
    basis: Basis,
    cdf: Vec<f64>,
    detectors: Vec<(ModeIndex, f64)>,
    base: ChaCha8Rng,
}

impl Sampler {
    fn new(rho: &DensityOperator, detectors: &DetectorBank, seed: u64, arms: Arms) -> Result<Self> {
        rho.require_normalized()?;
        let mut acc = 0.0;
        let cdf: Vec<f64> = rho
            .populations()
            .into_iter()
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        let detectors = arms
            .detectors()
            .into_iter()
            .map(|m| (m, detectors.model(m).zeta()))
            .collect();
        Ok(Sampler {
            basis: rho.basis().clone(),
            cdf,
            detectors,
            base: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// (configuration index, click mask with the first detector as MSB).
    fn shot(&self, index: u64) -> (usize, usize) {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let config = self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1);
        let mut mask = 0usize;
        for &(mode, zeta) in &self.detectors {
            let photons = self.basis.occupation(config, mode);
            let mut click = false;
            for _ in 0..photons {
                click |= rng.random::<f64>() < zeta;
            }
            mask = mask << 1 | click as usize;
        }
        (config, mask)
    }
}

/// Draw the shots individually; mainly useful for inspection.
pub fn sample_shots(rho: &DensityOperator, detectors: &DetectorBank, shots: u64, seed: u64, arms: Arms) -> Result<Vec<ShotSample>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let sampler = Sampler::new(rho, detectors, seed, arms)?;
    Ok((0..shots)
        .map(|i| {
            let (configuration, mask) = sampler.shot(i);
            ShotSample {
                configuration,
                pattern: pattern_from_mask(arms, mask),
            }
        })
        .collect())
}

pub fn sample_patterns(rho: &DensityOperator, detectors: &DetectorBank, shots: u64, seed: u64, arms: Arms) -> Result<EstimateReport> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let sampler = Sampler::new(rho, detectors, seed, arms)?;
    let n_patterns = 1usize << sampler.detectors.len();
    let dim = sampler.basis.dim();
    let counts = (0..shots)
        .into_par_iter()
        .fold(
            || vec![0u64; dim * n_patterns],
            |mut acc, i| {
                let (config, mask) = sampler.shot(i);
                acc[config * n_patterns + mask] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; dim * n_patterns],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let joint = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| ((i / n_patterns, pattern_from_mask(arms, i % n_patterns)), c))
        .collect();
    Ok(EstimateReport {
        arms,
        shots,
        seed,
        basis: sampler.basis,
        joint,
    })
}

/// Joint counts over (occupation configuration, click pattern).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub arms: Arms,
    pub shots: u64,
    pub seed: u64,
    basis: Basis,
    joint: BTreeMap<(usize, ClickPattern), u64>,
}

impl EstimateReport {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn joint_counts(&self) -> &BTreeMap<(usize, ClickPattern), u64> {
        &self.joint
    }

    /// Counts for every pattern of the arm set, zeros included.
    pub fn pattern_counts(&self) -> BTreeMap<ClickPattern, u64> {
        let mut out: BTreeMap<_, _> = ClickPattern::all(self.arms).into_iter().map(|p| (p, 0)).collect();
        for ((_, p), c) in &self.joint {
            *out.get_mut(p).unwrap() += c;
        }
        out
    }

    pub fn pattern_estimates(&self) -> Vec<(ClickPattern, Estimate)> {
        self.pattern_counts()
            .into_iter()
            .map(|(p, c)| (p, Estimate::from_count(c, self.shots)))
            .collect()
    }

    /// Counts per basis configuration, in basis order.
    pub fn configuration_counts(&self) -> Vec<u64> {
        let mut out = vec![0; self.basis.dim()];
        for ((i, _), c) in &self.joint {
            out[*i] += c;
        }
        out
    }

    pub fn joint_frequencies(&self) -> JointFrequencies {
        JointFrequencies {
            arms: self.arms,
            basis: self.basis.clone(),
            entries: self
                .joint
                .iter()
                .map(|(k, &c)| (k.clone(), c as f64 / self.shots as f64))
                .collect(),
        }
    }
}

/// Joint distribution over (configuration, pattern), empirical or exact.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFrequencies {
    pub arms: Arms,
    basis: Basis,
    entries: BTreeMap<(usize, ClickPattern), f64>,
}

impl JointFrequencies {
    /// The exact joint distribution `ρ_ii · Π E(outcome)[n]`.
    pub fn exact(rho: &DensityOperator, detectors: &DetectorBank, arms: Arms) -> Result<Self> {
        rho.require_normalized()?;
        let basis = rho.basis().clone();
        let mut entries = BTreeMap::new();
        for (i, pop) in rho.populations().into_iter().enumerate() {
            for p in ClickPattern::all(arms) {
                let w = p.weight(detectors, |m| basis.occupation(i, m));
                if pop * w > 0.0 {
                    entries.insert((i, p), pop * w);
                }
            }
        }
        Ok(JointFrequencies { arms, basis, entries })
    }

    pub fn pattern_marginal(&self) -> BTreeMap<ClickPattern, f64> {
        let mut out = BTreeMap::new();
        for ((_, p), f) in &self.entries {
            *out.entry(p.clone()).or_insert(0.0) += f;
        }
        out
    }

    fn holds_signal(&self, config: usize, k: Polarization) -> bool {
        let [h, v] = ModeIndex::of_party(Party::Signal);
        let (want_h, want_v) = match k {
            Polarization::H => (1, 0),
            Polarization::V => (0, 1),
        };
        self.basis.occupation(config, h) == want_h && self.basis.occupation(config, v) == want_v
    }
}

/// Plug frequencies into the fidelity arithmetic. The QND estimate is
/// (shots with the conditioning meter pattern and the signal in `|k⟩`) over
/// (shots with the conditioning meter pattern). Requires both arms so that
/// `F_M` can be formed.
pub fn estimate_fidelities(freqs: &JointFrequencies, k: Polarization, zeta: f64) -> Result<FidelityReport> {
    if freqs.arms != Arms::Both {
        return Err(Error::MissingCoincidenceData);
    }
    let marginal = freqs.pattern_marginal();
    let coincidence = ProbabilityTable::from_patterns(
        OperatingMode::Coincidence,
        marginal.iter().map(|(p, &f)| (p.clone(), f)),
    );
    let qnd = ProbabilityTable::from_patterns(
        OperatingMode::Qnd,
        marginal.iter().map(|(p, &f)| (p.meter_part(), f)),
    );

    let target = conditioning_pattern(k);
    let (mut hit, mut total) = (0.0, 0.0);
    for ((config, p), f) in &freqs.entries {
        if p.meter_part() == target {
            total += f;
            if freqs.holds_signal(*config, k) {
                hit += f;
            }
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroConditioningCounts);
    }

    Ok(FidelityReport {
        zeta,
        k,
        f_m: measurement_fidelity(point_mass(k), &coincidence)?,
        f_qnd_trace: (hit / total).clamp(0.0, 1.0),
        f_qnd_closed: closed_form_qnd(zeta),
        coincidence,
        qnd,
    })
}
