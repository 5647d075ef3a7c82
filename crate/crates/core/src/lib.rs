//! Quantum limits of optical reading.
//!
//! A memory stores data passively: each pixel reflects the probe light with
//! some attenuation and phase. This crate computes how many bits per pixel
//! and per probe photon different transmitter, code and receiver choices can
//! read, how large a coded block must be for a target reliability, and checks
//! the closed forms against a linear-optics simulation of the Hadamard-code
//! receivers.
//!
//! - [`dmc`]: entropies, induced classical channels, Blahut-Arimoto.
//! - [`transceivers`]: capacity and photon information efficiency per scheme.
//! - [`optics`]: mode-amplitude simulator (pixels, Green Machine, W states,
//!   detectors).
//! - [`montecarlo`]: word-error estimation and pixel budgets.
//! - [`exponents`]: random-coding exponent of the binary-phase coherent
//!   ensemble and pixel-count contours.

pub mod dmc;
pub mod error;
pub mod exponents;
pub mod montecarlo;
pub mod optics;
mod optimize;
pub mod special;
pub mod transceivers;

pub use dmc::{CapacityResult, InputDistribution, TransitionMatrix};
pub use error::{Error, Result};
pub use exponents::{ContourGrid, ContourPoint, ExponentBound, PixelBudget};
pub use montecarlo::{ErrorEstimate, PixelRequirement, Probe, TrialPlan};
pub use optics::{DetectionOutcome, HadamardCodebook, ModeAmplitudes, PixelPattern, StateKind};
pub use transceivers::{LossModel, PhotonBasis, SchemeId, TransceiverCurvePoint};
