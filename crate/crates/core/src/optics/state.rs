use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{check_power_of_two, Error, Result};

const NORM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Product of coherent states; `|amp|^2` is the mean photon number.
    Coherent,
    /// One photon; `|amp|^2` is the probability of finding it in that mode.
    /// Missing norm is probability already lost.
    SinglePhoton,
}

/// Per-mode complex amplitudes over a power-of-two number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    amps: Vec<Complex64>,
    kind: StateKind,
}

impl ModeAmplitudes {
    pub fn coherent(amps: Vec<Complex64>) -> Result<Self> {
        Self::new(amps, StateKind::Coherent)
    }

    /// Fails if the squared norm exceeds one.
    pub fn single_photon(amps: Vec<Complex64>) -> Result<Self> {
        Self::new(amps, StateKind::SinglePhoton)
    }

    pub fn new(amps: Vec<Complex64>, kind: StateKind) -> Result<Self> {
        check_power_of_two(amps.len() as u64)?;
        let state = Self { amps, kind };
        if kind == StateKind::SinglePhoton && state.norm_sqr() > 1.0 + NORM_SLACK {
            return Err(Error::Invalid {
                what: "single-photon state",
                reason: format!("norm^2 = {} exceeds 1", state.norm_sqr()),
            });
        }
        Ok(state)
    }

    /// Coherent state with `sqrt(n_s)` in every one of `m` modes.
    pub fn uniform_coherent(m: usize, n_s: f64) -> Result<Self> {
        crate::error::check_non_negative("n_s", n_s)?;
        Self::coherent(vec![Complex64::new(n_s.sqrt(), 0.0); m])
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Total mean photon number, or survival probability of a single photon.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }
}

/// Reflectivity and phase of each pixel in a block.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelPattern {
    etas: Vec<f64>,
    thetas: Vec<f64>,
}

impl PixelPattern {
    /// `etas` in `[0, 1]`, `thetas` in `(0, 2 pi]`.
    pub fn new(etas: Vec<f64>, thetas: Vec<f64>) -> Result<Self> {
        if etas.len() != thetas.len() {
            return Err(Error::DimensionMismatch {
                expected: etas.len(),
                actual: thetas.len(),
            });
        }
        if let Some(&eta) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::Domain {
                name: "eta",
                value: eta,
                expected: "[0, 1]",
            });
        }
        if let Some(&theta) = thetas.iter().find(|t| !(**t > 0.0 && **t <= TAU)) {
            return Err(Error::Domain {
                name: "theta",
                value: theta,
                expected: "(0, 2 pi]",
            });
        }
        Ok(Self { etas, thetas })
    }

    /// Fully reflective binary-phase pattern: `+1` is phase `2 pi`, `-1` is `pi`.
    pub fn bpsk(signs: &[i8]) -> Self {
        Self {
            etas: vec![1.0; signs.len()],
            thetas: signs
                .iter()
                .map(|&s| if s < 0 { PI } else { TAU })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// `sqrt(eta_k) e^{i theta_k}`. The binary phases map to exactly `+-1`.
    pub fn factor(&self, k: usize) -> Complex64 {
        let amplitude = self.etas[k].sqrt();
        let theta = self.thetas[k];
        if theta == PI {
            Complex64::new(-amplitude, 0.0)
        } else if theta == TAU {
            Complex64::new(amplitude, 0.0)
        } else {
            Complex64::from_polar(amplitude, theta)
        }
    }
}

/// Reflection off the pixels: `amp_k <- sqrt(eta_k) e^{i theta_k} amp_k`.
pub fn modulate(state: &ModeAmplitudes, pattern: &PixelPattern) -> Result<ModeAmplitudes> {
    if state.len() != pattern.len() {
        return Err(Error::DimensionMismatch {
            expected: state.len(),
            actual: pattern.len(),
        });
    }
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(k, &a)| a * pattern.factor(k))
        .collect();
    Ok(ModeAmplitudes {
        amps,
        kind: state.kind,
    })
}

/// Uniform end-to-end transmissivity: `amp <- sqrt(kappa) amp`.
pub fn apply_uniform_loss(state: &ModeAmplitudes, kappa: f64) -> Result<ModeAmplitudes> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Domain {
            name: "kappa",
            value: kappa,
            expected: "(0, 1]",
        });
    }
    let scale = kappa.sqrt();
    Ok(ModeAmplitudes {
        amps: state.amps.iter().map(|a| a * scale).collect(),
        kind: state.kind,
    })
}
