//! Click-level sampling of ideal single-photon detector arrays.

use rand::Rng;
use serde::Serialize;

use super::state::{ModeAmplitudes, StateKind};
use crate::error::{Error, Result};

const NORM_SLACK: f64 = 1e-9;

/// What one read of an `M`-port detector array produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionOutcome {
    /// Ports that clicked, ascending.
    pub clicks: Vec<usize>,
    /// Decoded codeword index, zero based.
    pub decoded: usize,
    /// No port clicked, so `decoded` is a uniform guess.
    pub was_erasure: bool,
    /// More than one port clicked, so `decoded` is a uniform pick among them.
    pub multi_click: bool,
}

/// Per-port click statistics of a state at the detector plane, keeping
/// only ports that can click.
///
/// Coherent ports click independently with probability `1 - e^{-|a|^2}`. A
/// single photon clicks exactly one port `k` with probability `|a_k|^2`, or
/// none with the missing norm. Ports with zero amplitude never click and are
/// not stored, so sampling costs scale with the number of lit ports.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickProfile {
    kind: StateKind,
    m: usize,
    lit: Vec<(usize, f64)>,
}

impl ClickProfile {
    pub fn from_state(state: &ModeAmplitudes) -> Result<Self> {
        let lit: Vec<(usize, f64)> = match state.kind() {
            StateKind::Coherent => state
                .amps()
                .iter()
                .enumerate()
                .map(|(k, a)| (k, -(-a.norm_sqr()).exp_m1()))
                .filter(|&(_, p)| p > 0.0)
                .collect(),
            StateKind::SinglePhoton => {
                let norm = state.norm_sqr();
                if norm > 1.0 + NORM_SLACK {
                    return Err(Error::Invalid {
                        what: "single-photon state",
                        reason: format!("norm^2 = {norm} exceeds 1"),
                    });
                }
                state
                    .amps()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| (k, a.norm_sqr()))
                    .filter(|&(_, p)| p > 0.0)
                    .collect()
            }
        };
        Ok(Self {
            kind: state.kind(),
            m: state.len(),
            lit,
        })
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    /// `(port, probability)` for every port that can click.
    pub fn lit_ports(&self) -> &[(usize, f64)] {
        &self.lit
    }

    /// Probability that nothing clicks.
    pub fn erasure_probability(&self) -> f64 {
        match self.kind {
            StateKind::Coherent => self.lit.iter().map(|&(_, p)| 1.0 - p).product(),
            StateKind::SinglePhoton => {
                (1.0 - self.lit.iter().map(|&(_, p)| p).sum::<f64>()).max(0.0)
            }
        }
    }

    /// Ports that click on one shot, ascending.
    pub fn sample_clicks<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match self.kind {
            StateKind::Coherent => self
                .lit
                .iter()
                .filter(|&&(_, p)| rng.random::<f64>() < p)
                .map(|&(k, _)| k)
                .collect(),
            StateKind::SinglePhoton => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(k, p) in &self.lit {
                    acc += p;
                    if u < acc {
                        return vec![k];
                    }
                }
                Vec::new()
            }
        }
    }

    /// Samples clicks and resolves them into a decision.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DetectionOutcome {
        let clicks = self.sample_clicks(rng);
        resolve(clicks, self.m, rng)
    }
}

/// Decision rule: a lone click names the codeword, no click is an erasure
/// resolved by a uniform guess, several clicks are resolved uniformly among
/// the clicked ports.
pub(crate) fn resolve<R: Rng + ?Sized>(clicks: Vec<usize>, m: usize, rng: &mut R) -> DetectionOutcome {
    match clicks.len() {
        0 => DetectionOutcome {
            clicks,
            decoded: rng.random_range(0..m),
            was_erasure: true,
            multi_click: false,
        },
        1 => DetectionOutcome {
            decoded: clicks[0],
            clicks,
            was_erasure: false,
            multi_click: false,
        },
        n => DetectionOutcome {
            decoded: clicks[rng.random_range(0..n)],
            clicks,
            was_erasure: false,
            multi_click: true,
        },
    }
}

/// Detects a coherent state with one ideal photon counter per port.
pub fn detect_coherent<R: Rng + ?Sized>(state: &ModeAmplitudes, rng: &mut R) -> Result<DetectionOutcome> {
    if state.kind() != StateKind::Coherent {
        return Err(Error::Invalid {
            what: "detector input",
            reason: "detect_coherent needs a coherent state".into(),
        });
    }
    Ok(ClickProfile::from_state(state)?.sample(rng))
}

/// Detects a single photon: one categorical draw over the `M` ports plus
/// the loss outcome.
pub fn detect_single_photon<R: Rng + ?Sized>(
    state: &ModeAmplitudes,
    rng: &mut R,
) -> Result<DetectionOutcome> {
    if state.kind() != StateKind::SinglePhoton {
        return Err(Error::Invalid {
            what: "detector input",
            reason: "detect_single_photon needs a single-photon state".into(),
        });
    }
    Ok(ClickProfile::from_state(state)?.sample(rng))
}
