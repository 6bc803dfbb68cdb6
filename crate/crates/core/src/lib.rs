//! Simulator for single-photon polarization QND measurement with linear
//! optics and imperfect click detectors.
//!
//! A signal photon and a meter photon share four modes (signal-H, signal-V,
//! meter-H, meter-V). States live in the Fock space truncated at two
//! photons, passive optics act through permanents of the mode matrix, and
//! detectors are two-outcome POVMs with efficiency ζ that cannot resolve
//! photon number.
//!
//! The crate contrasts two ways of scoring the measurement:
//!
//! * [`analysis::measurement_fidelity`] conditions on coincidences, which
//!   requires absorbing the signal photon.
//! * [`analysis::qnd_fidelity`] only looks at the meter, as a genuine QND
//!   measurement must, and is limited by missed second photons.
//!
//! ```
//! use qndsim::analysis::{closed_form_qnd, qnd_fidelity, Reconstruction};
//! use qndsim::detection::DetectorBank;
//! use qndsim::fock::Polarization;
//!
//! let scenario = Reconstruction::canonical(Polarization::H);
//! let detectors = DetectorBank::uniform(0.65).unwrap();
//! let f = qnd_fidelity(&scenario.state(), Polarization::H, &detectors).unwrap();
//! assert!((f - closed_form_qnd(0.65)).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod detection;
pub mod error;
pub mod fock;
pub mod montecarlo;
pub mod optics;
pub mod tolerance;

pub use error::{Error, Result};
