//! Discrete memoryless channels.
//!
//! Entropies, mutual information, the closed-form capacities of the binary
//! channels induced by single-pixel receivers, the `M`-ary erasure channel
//! induced by joint detection, and a Blahut-Arimoto optimizer that serves as
//! an independent check on every closed form.
//!
//! Every quantity is reported in bits. Internally the optimizer works in nats
//! and converts once on the way out.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{check_non_negative, check_power_of_two, check_probability, Error, Result};

/// Default certified gap for [`blahut_arimoto`], in bits.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Default iteration cap for [`blahut_arimoto`].
pub const DEFAULT_MAX_ITER: usize = 100_000;

const ROW_SUM_TOLERANCE: f64 = 1e-12;
// Probabilities below this contribute nothing to an entropy.
const NEGLIGIBLE: f64 = 1e-300;

/// `-p log2 p`, zero for negligible `p`.
#[inline]
fn surprisal_bits(p: f64) -> f64 {
    if p < NEGLIGIBLE {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary entropy `H(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_probability("x", x)?;
    Ok(binary_entropy_split(x, 1.0 - x))
}

/// Binary entropy from both halves of the distribution, for callers that
/// know `1 - x` more accurately than the subtraction would give it
/// (for instance `-expm1(-n)` next to `exp(-n)`).
pub(crate) fn binary_entropy_split(x: f64, one_minus_x: f64) -> f64 {
    // The log of the larger half is taken as ln_1p of the smaller one.
    let (small, large) = if x <= one_minus_x {
        (x, one_minus_x)
    } else {
        (one_minus_x, x)
    };
    if small < NEGLIGIBLE {
        return 0.0;
    }
    (-small * small.ln() - large * (-small).ln_1p()) / LN_2
}

/// Shannon entropy in bits of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().map(|&v| surprisal_bits(v)).sum()
}

/// Row-stochastic matrix `P(y|x)` of a discrete memoryless channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
}

impl TransitionMatrix {
    /// Builds a channel from row-major probabilities, checking that every
    /// entry is a probability and every row sums to one within `1e-12`.
    pub fn new(rows: usize, cols: usize, p: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Invalid {
                what: "transition matrix",
                reason: format!("shape {rows}x{cols} is empty"),
            });
        }
        if p.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: p.len(),
            });
        }
        for (x, row) in p.chunks_exact(cols).enumerate() {
            if let Some(&bad) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Invalid {
                    what: "transition matrix",
                    reason: format!("row {x} has entry {bad} outside [0, 1]"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Invalid {
                    what: "transition matrix",
                    reason: format!("row {x} sums to {sum}"),
                });
            }
        }
        Ok(Self { rows, cols, p })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.p[x * self.cols..(x + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.p.chunks_exact(self.cols)
    }

    /// Output distribution `q(y) = sum_x p(x) P(y|x)`.
    pub fn output_distribution(&self, px: &InputDistribution) -> Result<Vec<f64>> {
        if px.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: px.len(),
            });
        }
        let mut q = vec![0.0; self.cols];
        for (row, &w) in self.iter_rows().zip(px.as_slice()) {
            for (qy, &pyx) in q.iter_mut().zip(row) {
                *qy += w * pyx;
            }
        }
        Ok(q)
    }
}

/// Probability vector over channel inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDistribution {
    p: Vec<f64>,
}

impl InputDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Invalid {
                what: "input distribution",
                reason: "empty".into(),
            });
        }
        if let Some(&bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Invalid {
                what: "input distribution",
                reason: format!("entry {bad} outside [0, 1]"),
            });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::Invalid {
                what: "input distribution",
                reason: format!("sums to {sum}"),
            });
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over zero symbols");
        Self {
            p: vec![1.0 / n as f64; n],
        }
    }

    /// Two-point distribution `(1 - p, p)`.
    pub fn binary(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self { p: vec![1.0 - p, p] })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

/// Capacity of a channel together with the input distribution attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    pub capacity_bits: f64,
    pub maximizer: InputDistribution,
    /// Zero for closed forms.
    pub iterations: usize,
    /// Certified upper bound on `true capacity - capacity_bits`; zero for
    /// closed forms.
    pub gap_bits: f64,
}

impl CapacityResult {
    fn closed_form(capacity_bits: f64, maximizer: InputDistribution) -> Self {
        Self {
            capacity_bits: capacity_bits.max(0.0),
            maximizer,
            iterations: 0,
            gap_bits: 0.0,
        }
    }
}

/// `I(X;Y) = H(Y) - H(Y|X)` in bits.
pub fn mutual_information(ch: &TransitionMatrix, px: &InputDistribution) -> Result<f64> {
    let q = ch.output_distribution(px)?;
    let conditional: f64 = ch
        .iter_rows()
        .zip(px.as_slice())
        .map(|(row, &w)| w * entropy(row))
        .sum();
    Ok((entropy(&q) - conditional).max(0.0))
}

/// Blahut-Arimoto capacity with a certified stopping rule.
///
/// Each iteration computes the divergence `D_x = D(P(.|x) || q)` of every
/// input row from the current output distribution. The current mutual
/// information is `sum_x r_x D_x` and the capacity is at most `max_x D_x`,
/// so iteration stops once the two differ by less than `tol` bits. If the
/// cap is hit first the best iterate is returned inside
/// [`Error::NotConverged`].
pub fn blahut_arimoto(ch: &TransitionMatrix, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            expected: "> 0",
        });
    }
    let tol_nats = tol * LN_2;
    let (rows, cols) = (ch.rows(), ch.cols());
    let neg_entropy: Vec<f64> = ch
        .iter_rows()
        .map(|row| {
            row.iter()
                .filter(|&&w| w > NEGLIGIBLE)
                .map(|&w| w * w.ln())
                .sum()
        })
        .collect();

    let mut r = vec![1.0 / rows as f64; rows];
    let mut q = vec![0.0; cols];
    let mut d = vec![0.0; rows];
    let mut gap = f64::INFINITY;
    let mut info = 0.0;

    for iteration in 1..=max_iter {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (row, &rx) in ch.iter_rows().zip(&r) {
            for (qy, &w) in q.iter_mut().zip(row) {
                *qy += rx * w;
            }
        }
        for (x, row) in ch.iter_rows().enumerate() {
            let cross: f64 = row
                .iter()
                .zip(&q)
                .filter(|(&w, _)| w > NEGLIGIBLE)
                .map(|(&w, &qy)| w * qy.ln())
                .sum();
            d[x] = (neg_entropy[x] - cross).max(0.0);
        }
        info = r.iter().zip(&d).map(|(rx, dx)| rx * dx).sum::<f64>();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        gap = (upper - info).max(0.0);
        if gap < tol_nats {
            return Ok(CapacityResult {
                capacity_bits: info / LN_2,
                maximizer: normalized(r),
                iterations: iteration,
                gap_bits: gap / LN_2,
            });
        }
        // Multiplicative update, shifted by max D to stay in range.
        let mut norm = 0.0;
        for (rx, &dx) in r.iter_mut().zip(&d) {
            *rx *= (dx - upper).exp();
            norm += *rx;
        }
        r.iter_mut().for_each(|v| *v /= norm);
    }

    Err(Error::NotConverged {
        best: Box::new(CapacityResult {
            capacity_bits: info / LN_2,
            maximizer: normalized(r),
            iterations: max_iter,
            gap_bits: gap / LN_2,
        }),
        gap: gap / LN_2,
    })
}

fn normalized(mut r: Vec<f64>) -> InputDistribution {
    let sum: f64 = r.iter().sum();
    r.iter_mut().for_each(|v| *v /= sum);
    InputDistribution { p: r }
}

/// Binary asymmetric channel of on-off keying read by an ideal photon
/// counter. Input 0 is a dark pixel (never clicks), input 1 a reflective
/// one that misses with probability `exp(-n_s)`. Output 0 is no-click.
pub fn bac_channel(n_s: f64) -> Result<TransitionMatrix> {
    check_non_negative("n_s", n_s)?;
    let miss = (-n_s).exp();
    let click = -(-n_s).exp_m1();
    TransitionMatrix::new(2, 2, vec![1.0, 0.0, miss, click])
}

/// Mutual information of [`bac_channel`] when a fraction `p` of pixels is
/// on: `H(p(1 - e^-n)) - p H(e^-n)`.
pub fn bac_mutual_information(n_s: f64, p: f64) -> Result<f64> {
    check_non_negative("n_s", n_s)?;
    check_probability("p", p)?;
    let click = -(-n_s).exp_m1();
    let miss = (-n_s).exp();
    let out = p * click;
    Ok(binary_entropy_split(out, 1.0 - out) - p * binary_entropy_split(miss, click))
}

/// Capacity-achieving on-fraction of the on-off channel,
/// `1 / ((1 - e^-n) (1 + 2^(H(e^-n) / (1 - e^-n))))`.
///
/// Evaluated in the log domain; the `n_s -> 0` limit is `1/e`.
pub fn ook_optimal_prior(n_s: f64) -> Result<f64> {
    check_non_negative("n_s", n_s)?;
    if n_s == 0.0 {
        return Ok((-1.0f64).exp());
    }
    let click = -(-n_s).exp_m1();
    let exponent = binary_entropy_split((-n_s).exp(), click) / click;
    // ln(1 + 2^b) without overflow.
    let ln_one_plus = exponent * LN_2 + (-exponent * LN_2).exp().ln_1p();
    Ok((-click.ln() - ln_one_plus).exp())
}

/// Capacity of the on-off channel, closed form at the optimal prior.
pub fn bac_capacity(n_s: f64) -> Result<CapacityResult> {
    let p = ook_optimal_prior(n_s)?;
    let c = bac_mutual_information(n_s, p)?;
    Ok(CapacityResult::closed_form(c, InputDistribution::binary(p)?))
}

/// Binary symmetric channel with crossover `q`.
pub fn bsc_channel(q: f64) -> Result<TransitionMatrix> {
    check_probability("q", q)?;
    TransitionMatrix::new(2, 2, vec![1.0 - q, q, q, 1.0 - q])
}

/// `1 - H(q)`, attained by the uniform prior.
pub fn bsc_capacity(q: f64) -> Result<CapacityResult> {
    let h = binary_entropy(q)?;
    Ok(CapacityResult::closed_form(1.0 - h, InputDistribution::uniform(2)))
}

/// `m`-input, `m + 1`-output erasure channel. Input `j` is received intact
/// with probability `1 - p_erase`, otherwise it lands on the erasure symbol
/// (the last column).
pub fn erasure_superchannel(m: usize, p_erase: f64) -> Result<TransitionMatrix> {
    check_power_of_two(m as u64)?;
    check_probability("p_erase", p_erase)?;
    let cols = m + 1;
    let mut p = vec![0.0; m * cols];
    for j in 0..m {
        p[j * cols + j] = 1.0 - p_erase;
        p[j * cols + m] = p_erase;
    }
    TransitionMatrix::new(m, cols, p)
}

/// `log2(m) (1 - p_erase)`, attained by the uniform prior.
pub fn erasure_capacity(m: usize, p_erase: f64) -> Result<CapacityResult> {
    check_power_of_two(m as u64)?;
    check_probability("p_erase", p_erase)?;
    Ok(CapacityResult::closed_form(
        (m as f64).log2() * (1.0 - p_erase),
        InputDistribution::uniform(m),
    ))
}
