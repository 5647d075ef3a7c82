//! Hadamard codes and the beam-splitter networks built from 50-50 splitters.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::state::{ModeAmplitudes, StateKind};
use crate::error::{check_power_of_two, Result};

/// Sign of entry `(row, col)` of the Sylvester-ordered Hadamard matrix,
/// `(-1)^popcount(row & col)`.
#[inline]
pub fn hadamard_sign(row: usize, col: usize) -> i8 {
    if (row & col).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The `(M, M, M/2)` binary Hadamard code in Sylvester order. Row 0 is
/// all-ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardCodebook {
    m: usize,
    signs: Vec<i8>,
}

impl HadamardCodebook {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn codeword(&self, j: usize) -> &[i8] {
        &self.signs[j * self.m..(j + 1) * self.m]
    }

    pub fn codewords(&self) -> impl Iterator<Item = &[i8]> {
        self.signs.chunks_exact(self.m)
    }
}

/// Builds the codebook by the Sylvester doubling `H_2M = [[H, H], [H, -H]]`.
pub fn hadamard_codebook(m: usize) -> Result<HadamardCodebook> {
    check_power_of_two(m as u64)?;
    let mut size = 1;
    let mut signs = vec![1i8];
    while size < m {
        let next = size * 2;
        let mut grown = vec![0i8; next * next];
        for r in 0..size {
            for c in 0..size {
                let s = signs[r * size + c];
                grown[r * next + c] = s;
                grown[r * next + c + size] = s;
                grown[(r + size) * next + c] = s;
                grown[(r + size) * next + c + size] = -s;
            }
        }
        signs = grown;
        size = next;
    }
    Ok(HadamardCodebook { m, signs })
}

/// A 50-50 beam splitter: `(a, b) -> ((a + b)/sqrt 2, (a - b)/sqrt 2)`.
#[inline]
pub fn beam_splitter(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

/// In-place Green Machine: `log2(M)` stages of `M/2` beam splitters,
/// stage `s` pairing modes `2^s` apart. Equal to `H_M / sqrt(M)` in
/// Sylvester order.
pub fn green_machine_in_place(amps: &mut [Complex64]) -> Result<()> {
    let m = amps.len();
    check_power_of_two(m as u64)?;
    let mut half = 1;
    while half < m {
        for block in amps.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                (*a, *b) = beam_splitter(*a, *b);
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Applies the Green Machine interferometer to a state of either kind.
pub fn green_machine(state: &ModeAmplitudes) -> Result<ModeAmplitudes> {
    let mut out = state.clone();
    green_machine_in_place(out.amps_mut())?;
    Ok(out)
}

/// W state over `m` modes, produced by sending one photon into mode 0 of a
/// `log2(m)`-stage splitter tree. Stage `s` splits each occupied mode `i`
/// into `i` and `i + m/2^(s+1)`.
pub fn prepare_wstate(m: usize) -> Result<ModeAmplitudes> {
    check_power_of_two(m as u64)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); m];
    amps[0] = Complex64::new(1.0, 0.0);
    let mut span = m / 2;
    while span >= 1 {
        for i in (0..m).step_by(2 * span) {
            (amps[i], amps[i + span]) = beam_splitter(amps[i], amps[i + span]);
        }
        span /= 2;
    }
    ModeAmplitudes::new(amps, StateKind::SinglePhoton)
}
