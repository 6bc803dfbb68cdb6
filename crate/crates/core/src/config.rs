//! Scenario configuration files and CSV rows.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "k": "H",
//!   "zeta": 0.65,
//!   "mode": "qnd",
//!   "scenario": {
//!     "type": "reconstruction",
//!     "good_weight": 0.5,
//!     "bad_weight": 0.5,
//!     "bad_kind": "orthogonal_missed"
//!   }
//! }
//! ```
//!
//! `zeta` is either one number or a per-detector map `{"sH": .., "sV": ..,
//! "mH": .., "mV": ..}`. A circuit scenario replaces the reconstruction
//! with an input product state and a list of `{type, params, targets}`
//! elements; see the README for the full schema.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::analysis::{BadKind, FidelityReport, OperatingMode, ProbabilityTable, Reconstruction, ArmOutcome};
use crate::detection::DetectorBank;
use crate::error::{Error, Result};
use crate::fock::{Basis, CVector, DensityOperator, ModeIndex, Party, Polarization, StateVector, C64};
use crate::optics::{apply_circuit, beam_splitter, phase_shift, wave_plate, Circuit, ModeUnitary};

/// The canonical scenario: equal-weight missed orthogonal photon, ζ = 0.65.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse { line: usize, column: usize, message: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse { line, column, message } => {
                write!(f, "config parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ZetaConfig {
    Uniform(f64),
    PerDetector {
        #[serde(rename = "sH")]
        signal_h: f64,
        #[serde(rename = "sV")]
        signal_v: f64,
        #[serde(rename = "mH")]
        meter_h: f64,
        #[serde(rename = "mV")]
        meter_v: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PartyInput {
    /// `"vacuum"`, `"H"` or `"V"`.
    Named(String),
    /// Single photon `cos α |H⟩ + sin α |V⟩`.
    Angle { angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub signal: PartyInput,
    pub meter: PartyInput,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    BeamSplitter,
    WavePlate,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementConfig {
    #[serde(rename = "type")]
    pub kind: ElementKind,
    pub params: Vec<f64>,
    pub targets: Vec<ModeIndex>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    Reconstruction {
        good_weight: f64,
        bad_weight: f64,
        bad_kind: BadKind,
    },
    Circuit {
        input: InputConfig,
        elements: Vec<ElementConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub k: Polarization,
    pub zeta: ZetaConfig,
    #[serde(default = "default_mode")]
    pub mode: OperatingMode,
    pub scenario: ScenarioSpec,
}

fn default_mode() -> OperatingMode {
    OperatingMode::Qnd
}

fn invalid(e: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> std::result::Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(ConfigError::Io)?;
        Self::parse(&text)
    }

    pub fn default_scenario() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled default config is valid")
    }

    fn validate(&self) -> std::result::Result<(), ConfigError> {
        self.detectors().map_err(invalid)?;
        match &self.scenario {
            ScenarioSpec::Reconstruction { .. } => {
                self.reconstruction().map_err(invalid)?;
            }
            ScenarioSpec::Circuit { .. } => {
                self.circuit().map_err(invalid)?;
                self.input_state().map_err(invalid)?;
            }
        }
        Ok(())
    }

    pub fn detectors(&self) -> Result<DetectorBank> {
        match self.zeta {
            ZetaConfig::Uniform(z) => DetectorBank::uniform(z),
            ZetaConfig::PerDetector {
                signal_h,
                signal_v,
                meter_h,
                meter_v,
            } => DetectorBank::per_mode([signal_h, signal_v, meter_h, meter_v]),
        }
    }

    /// Efficiency fed to the closed form: the uniform value, or the meter-k
    /// detector's efficiency when detectors differ.
    pub fn nominal_zeta(&self) -> f64 {
        match self.zeta {
            ZetaConfig::Uniform(z) => z,
            ZetaConfig::PerDetector { meter_h, meter_v, .. } => match self.k {
                Polarization::H => meter_h,
                Polarization::V => meter_v,
            },
        }
    }

    pub fn with_zeta(mut self, zeta: f64) -> Self {
        self.zeta = ZetaConfig::Uniform(zeta);
        self
    }

    pub fn with_mode(mut self, mode: OperatingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn reconstruction(&self) -> Result<Reconstruction> {
        match &self.scenario {
            ScenarioSpec::Reconstruction {
                good_weight,
                bad_weight,
                bad_kind,
            } => Reconstruction::new(self.k, *good_weight, *bad_weight, *bad_kind),
            ScenarioSpec::Circuit { .. } => Err(Error::InvalidElement("not a reconstruction scenario".into())),
        }
    }

    pub fn circuit(&self) -> Result<Circuit> {
        let ScenarioSpec::Circuit { elements, .. } = &self.scenario else {
            return Ok(Circuit::new());
        };
        elements
            .iter()
            .try_fold(Circuit::new(), |c, e| Ok(c.push(element_unitary(e)?)))
    }

    fn input_state(&self) -> Result<DensityOperator> {
        let ScenarioSpec::Circuit { input, .. } = &self.scenario else {
            return Err(Error::InvalidElement("not a circuit scenario".into()));
        };
        let signal = party_state(Party::Signal, &input.signal)?;
        let meter = party_state(Party::Meter, &input.meter)?;
        let (rho, lost) = signal.tensor_with_loss(&meter)?;
        debug_assert_eq!(lost, 0.0);
        Ok(rho)
    }

    /// The pre-detection state over all four modes.
    pub fn state(&self) -> Result<DensityOperator> {
        match &self.scenario {
            ScenarioSpec::Reconstruction { .. } => Ok(self.reconstruction()?.state()),
            ScenarioSpec::Circuit { .. } => apply_circuit(&self.input_state()?, &self.circuit()?),
        }
    }

    pub fn describe(&self) -> String {
        match &self.scenario {
            ScenarioSpec::Reconstruction {
                good_weight,
                bad_weight,
                bad_kind,
            } => format!(
                "reconstruction k={} good={} bad={} ({})",
                self.k,
                format_sig(*good_weight),
                format_sig(*bad_weight),
                match bad_kind {
                    BadKind::OrthogonalMissed => "orthogonal_missed",
                    BadKind::SameModePair => "same_mode_pair",
                }
            ),
            ScenarioSpec::Circuit { elements, .. } => {
                format!("circuit k={} with {} element(s), illustrative", self.k, elements.len())
            }
        }
    }
}

fn party_state(party: Party, input: &PartyInput) -> Result<DensityOperator> {
    let basis = Basis::party(party);
    let [h, v] = ModeIndex::of_party(party);
    let angle = match input {
        PartyInput::Named(s) if s == "vacuum" => return Ok(DensityOperator::vacuum(basis)),
        PartyInput::Named(s) => match s.parse::<Polarization>() {
            Ok(Polarization::H) => 0.0,
            Ok(Polarization::V) => std::f64::consts::FRAC_PI_2,
            Err(e) => return Err(Error::InvalidElement(e)),
        },
        PartyInput::Angle { angle } if angle.is_finite() => *angle,
        PartyInput::Angle { angle } => return Err(Error::NonFinite(*angle)),
    };
    let (s, c) = angle.sin_cos();
    let mut amps = CVector::zeros(basis.dim());
    amps[basis.index_of_occupations(&[(h, 1)])?] = C64::new(c, 0.0);
    amps[basis.index_of_occupations(&[(v, 1)])?] = C64::new(s, 0.0);
    Ok(StateVector::new(basis, amps)?.projector())
}

fn element_unitary(e: &ElementConfig) -> Result<ModeUnitary> {
    let want = |n_params: usize, n_targets: usize| -> Result<()> {
        if e.params.len() != n_params || e.targets.len() != n_targets {
            return Err(Error::InvalidElement(format!(
                "{:?} takes {n_params} param(s) and {n_targets} target(s), got {} and {}",
                e.kind,
                e.params.len(),
                e.targets.len()
            )));
        }
        Ok(())
    };
    match e.kind {
        ElementKind::BeamSplitter => {
            want(2, 4)?;
            beam_splitter(e.params[0], e.params[1])?.retarget(&e.targets)
        }
        ElementKind::WavePlate => {
            want(1, 2)?;
            wave_plate(Party::Signal, e.params[0])?.retarget(&e.targets)
        }
        ElementKind::Phase => {
            want(1, 1)?;
            phase_shift(e.targets[0], e.params[0])
        }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// exponent form outside `[1e-5, 1e12)`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Column names of a CSV row for the given table mode.
pub fn csv_header(mode: OperatingMode) -> Vec<String> {
    let mut cols: Vec<String> = ["zeta", "f_qnd_closed", "f_qnd_trace", "f_m"].iter().map(|s| s.to_string()).collect();
    match mode {
        OperatingMode::Coincidence => {
            for s in ArmOutcome::ALL {
                for m in ArmOutcome::ALL {
                    cols.push(format!("p_{s}{m}"));
                }
            }
        }
        OperatingMode::Qnd => {
            for m in ArmOutcome::ALL {
                cols.push(format!("p_m{m}"));
            }
        }
    }
    cols
}

/// One CSV row: fidelities then the flattened table, signal-major, outcome
/// order H, V, B (both), 0 (none).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub zeta: f64,
    pub f_qnd_closed: f64,
    pub f_qnd_trace: f64,
    pub f_m: f64,
    pub table: Vec<f64>,
}

impl CsvRow {
    pub fn from_report(report: &FidelityReport, mode: OperatingMode) -> Self {
        CsvRow {
            zeta: report.zeta,
            f_qnd_closed: report.f_qnd_closed,
            f_qnd_trace: report.f_qnd_trace,
            f_m: report.f_m,
            table: flatten(report.table(mode)),
        }
    }

    pub fn render(&self) -> String {
        let mut fields = vec![
            format_sig(self.zeta),
            format_sig(self.f_qnd_closed),
            format_sig(self.f_qnd_trace),
            format_sig(self.f_m),
        ];
        fields.extend(self.table.iter().map(|&p| format_sig(p)));
        fields.join(",")
    }
}

fn flatten(table: &ProbabilityTable) -> Vec<f64> {
    match table.mode() {
        OperatingMode::Coincidence => ArmOutcome::ALL
            .iter()
            .flat_map(|s| ArmOutcome::ALL.iter().map(move |m| table.get(Some(*s), *m)))
            .collect(),
        OperatingMode::Qnd => ArmOutcome::ALL.iter().map(|m| table.get(None, *m)).collect(),
    }
}

/// Header plus rows, comma separated, LF line endings.
pub fn render_csv(reports: &[FidelityReport], mode: OperatingMode) -> String {
    let mut out = csv_header(mode).join(",");
    out.push('\n');
    for r in reports {
        out.push_str(&CsvRow::from_report(r, mode).render());
        out.push('\n');
    }
    out
}
