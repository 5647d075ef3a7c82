//! End-to-end read cycles: prepare, reflect, attenuate, interfere, detect.

use rand::Rng;
use serde::Serialize;

use super::detect::{ClickProfile, DetectionOutcome};
use super::hadamard::{green_machine_in_place, hadamard_sign, prepare_wstate};
use super::state::{apply_uniform_loss, modulate, ModeAmplitudes, PixelPattern};
use crate::error::{check_non_negative, check_power_of_two, Error, Result};

/// Largest block the simulator will instantiate.
pub const MAX_SIMULATED_MODES: usize = 1 << 20;

/// Probe and receiver pair driven through the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReadScheme {
    /// `sqrt(n_s)` coherent amplitude on every pixel, Green Machine receiver.
    CoherentGm { n_s: f64 },
    /// One photon in a W state over the block, same receiver.
    WState,
}

/// A Hadamard-coded block of `m` pixels read by `scheme` through an
/// end-to-end transmissivity `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transceiver {
    scheme: ReadScheme,
    m: usize,
    kappa: f64,
    probe: ModeAmplitudes,
}

impl Transceiver {
    pub fn new(scheme: ReadScheme, m: usize, kappa: f64) -> Result<Self> {
        check_power_of_two(m as u64)?;
        if m > MAX_SIMULATED_MODES {
            return Err(Error::Invalid {
                what: "block length",
                reason: format!("M = {m} exceeds the simulation cap {MAX_SIMULATED_MODES}"),
            });
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::Domain {
                name: "kappa",
                value: kappa,
                expected: "(0, 1]",
            });
        }
        let probe = match scheme {
            ReadScheme::CoherentGm { n_s } => {
                check_non_negative("n_s", n_s)?;
                ModeAmplitudes::uniform_coherent(m, n_s)?
            }
            ReadScheme::WState => prepare_wstate(m)?,
        };
        Ok(Self {
            scheme,
            m,
            kappa,
            probe,
        })
    }

    pub fn scheme(&self) -> ReadScheme {
        self.scheme
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The prepared probe before it meets the memory.
    pub fn probe(&self) -> &ModeAmplitudes {
        &self.probe
    }

    /// Binary-phase pattern of Hadamard codeword `codeword` (zero based).
    pub fn pattern(&self, codeword: usize) -> Result<PixelPattern> {
        self.check_codeword(codeword)?;
        let signs: Vec<i8> = (0..self.m).map(|k| hadamard_sign(codeword, k)).collect();
        Ok(PixelPattern::bpsk(&signs))
    }

    /// State at the detector plane when the block stores `codeword`.
    pub fn receiver_output(&self, codeword: usize) -> Result<ModeAmplitudes> {
        let reflected = modulate(&self.probe, &self.pattern(codeword)?)?;
        let mut state = if self.kappa < 1.0 {
            apply_uniform_loss(&reflected, self.kappa)?
        } else {
            reflected
        };
        green_machine_in_place(state.amps_mut())?;
        Ok(state)
    }

    /// Click statistics at the detector plane for `codeword`.
    pub fn click_profile(&self, codeword: usize) -> Result<ClickProfile> {
        ClickProfile::from_state(&self.receiver_output(codeword)?)
    }

    /// One full read of `codeword`.
    pub fn read<R: Rng + ?Sized>(&self, codeword: usize, rng: &mut R) -> Result<DetectionOutcome> {
        Ok(self.click_profile(codeword)?.sample(rng))
    }

    fn check_codeword(&self, codeword: usize) -> Result<()> {
        if codeword < self.m {
            Ok(())
        } else {
            Err(Error::Invalid {
                what: "codeword index",
                reason: format!("{codeword} not below M = {}", self.m),
            })
        }
    }
}

/// Convenience wrapper: builds the transceiver and performs one read.
pub fn read_cycle<R: Rng + ?Sized>(
    scheme: ReadScheme,
    m: usize,
    kappa: f64,
    codeword: usize,
    rng: &mut R,
) -> Result<DetectionOutcome> {
    Transceiver::new(scheme, m, kappa)?.read(codeword, rng)
}
