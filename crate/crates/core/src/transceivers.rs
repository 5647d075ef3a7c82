//! Capacity and photon information efficiency of each probe, code and
//! receiver combination.
//!
//! Every function returns a [`TransceiverCurvePoint`]: capacity in bits per
//! pixel, and PIE in bits per photon. Coherent-state schemes also accept a
//! [`LossModel`]; under loss the capacity is the lossless formula evaluated at
//! the detected photon number and PIE is reported per detected photon.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dmc::{bac_capacity, binary_entropy_split, entropy};
use crate::error::{check_non_negative, check_positive, check_power_of_two, Error, Result};
use crate::special::erfc;

/// Largest PSK order swept by default.
pub const DEFAULT_PSK_Q_MAX: usize = 32;
/// Largest Hadamard block length swept by default.
pub const DEFAULT_GM_M_MAX: u64 = 1 << 40;

const Y_CLAMP: f64 = 1e-9;

/// The transceivers analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchemeId {
    /// Coherent probe, on-off pixels, direct detection.
    OokDirect,
    /// Coherent probe, binary phase pixels, homodyne threshold receiver.
    BpskHomodyne,
    /// Coherent probe, binary phase pixels, Helstrom-limited (Dolinar) receiver.
    BpskDolinar,
    /// Single-rail qubit probe, binary phase pixels, optimal single-pixel measurement.
    QubitProbe,
    /// Holevo bound `g(n_s)` over all single-mode probes.
    HolevoUnrestricted,
    /// Holevo capacity of the coherent binary phase alphabet.
    BpskHolevo,
    /// Best Holevo capacity of coherent `Q`-ary phase alphabets.
    PskHolevo,
    /// Coherent probe, Hadamard code, Green Machine receiver.
    GmHadamard,
    /// Single-photon W-state probe, Hadamard code, interferometric receiver.
    WState,
}

impl SchemeId {
    pub const ALL: [SchemeId; 9] = [
        SchemeId::OokDirect,
        SchemeId::BpskHomodyne,
        SchemeId::BpskDolinar,
        SchemeId::QubitProbe,
        SchemeId::HolevoUnrestricted,
        SchemeId::BpskHolevo,
        SchemeId::PskHolevo,
        SchemeId::GmHadamard,
        SchemeId::WState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::OokDirect => "OOK_DIRECT",
            SchemeId::BpskHomodyne => "BPSK_HOMODYNE",
            SchemeId::BpskDolinar => "BPSK_DOLINAR",
            SchemeId::QubitProbe => "QUBIT_PROBE",
            SchemeId::HolevoUnrestricted => "HOLEVO_UNRESTRICTED",
            SchemeId::BpskHolevo => "BPSK_HOLEVO",
            SchemeId::PskHolevo => "PSK_HOLEVO",
            SchemeId::GmHadamard => "GM_HADAMARD",
            SchemeId::WState => "W_STATE",
        }
    }

    /// Whether the probe is a coherent state, so that loss acts by the
    /// substitution `n_s -> kappa n_s`.
    pub fn is_coherent(self) -> bool {
        !matches!(self, SchemeId::QubitProbe | SchemeId::WState)
    }

    /// Largest `n_s` for which the scheme is defined.
    pub fn max_photons(self) -> f64 {
        match self {
            SchemeId::WState => 0.5,
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == wanted)
            .ok_or_else(|| Error::Invalid {
                what: "scheme",
                reason: format!("unknown scheme {s:?}"),
            })
    }
}

/// Whether a PIE counts transmitted or detected photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonBasis {
    #[default]
    Transmitted,
    Detected,
}

/// Optimizer by-products attached to a curve point.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CurveAux {
    /// Optimal on-fraction of an on-off code.
    pub on_fraction: Option<f64>,
    /// Optimal PSK order.
    pub q_star: Option<usize>,
    /// Optimal Hadamard block length.
    pub m_star: Option<u64>,
    /// Small-`n_s` estimate `-5 / (2 n_s ln n_s)` of the optimal block length.
    pub m_star_asymptote: Option<f64>,
    /// Set when the optimum sits on the sweep bound.
    pub truncated: bool,
    /// Per-pixel error probability of a single-pixel receiver.
    pub error_probability: Option<f64>,
    pub kappa: f64,
    pub photon_basis: PhotonBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransceiverCurvePoint {
    pub scheme: SchemeId,
    /// Transmitted mean photons per pixel.
    pub n_s: f64,
    pub capacity_bits_per_pixel: f64,
    /// `capacity / n_s`, or per detected photon under loss. NaN at `n_s = 0`.
    pub pie_bits_per_photon: f64,
    pub aux: CurveAux,
}

impl TransceiverCurvePoint {
    fn new(scheme: SchemeId, n_s: f64, capacity: f64, aux: CurveAux) -> Self {
        let capacity = capacity.max(0.0);
        Self {
            scheme,
            n_s,
            capacity_bits_per_pixel: capacity,
            pie_bits_per_photon: if n_s > 0.0 { capacity / n_s } else { f64::NAN },
            aux: CurveAux { kappa: 1.0, ..aux },
        }
    }
}

/// End-to-end transmissivity `kappa` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossModel {
    kappa: f64,
}

impl LossModel {
    pub const LOSSLESS: LossModel = LossModel { kappa: 1.0 };

    pub fn new(kappa: f64) -> Result<Self> {
        if kappa > 0.0 && kappa <= 1.0 {
            Ok(Self { kappa })
        } else {
            Err(Error::Domain {
                name: "kappa",
                value: kappa,
                expected: "(0, 1]",
            })
        }
    }

    pub fn kappa(self) -> f64 {
        self.kappa
    }
}

/// `g(x) = (1+x) log2(1+x) - x log2 x`, the Holevo capacity of a pure-loss
/// mode carrying `x` photons on average.
pub fn holevo_g(x: f64) -> Result<f64> {
    check_non_negative("x", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(((1.0 + x) * x.ln_1p() - x * x.ln()) / LN_2)
}

/// On-off keying with direct detection.
pub fn ook_capacity(n_s: f64) -> Result<TransceiverCurvePoint> {
    check_positive("n_s", n_s)?;
    let res = bac_capacity(n_s)?;
    let aux = CurveAux {
        on_fraction: Some(res.maximizer.as_slice()[1]),
        ..Default::default()
    };
    Ok(TransceiverCurvePoint::new(
        SchemeId::OokDirect,
        n_s,
        res.capacity_bits,
        aux,
    ))
}

/// Capacity `1 - H(q)` of a binary symmetric channel, given `q` and `1 - q`
/// separately.
fn bsc_point(scheme: SchemeId, n_s: f64, q: f64, one_minus_q: f64) -> TransceiverCurvePoint {
    let aux = CurveAux {
        error_probability: Some(q),
        ..Default::default()
    };
    TransceiverCurvePoint::new(scheme, n_s, 1.0 - binary_entropy_split(q, one_minus_q), aux)
}

/// Binary phase keying read by homodyne detection and a sign threshold;
/// crossover `erfc(sqrt(2 n_s)) / 2`.
pub fn bpsk_homodyne_capacity(n_s: f64) -> Result<TransceiverCurvePoint> {
    check_non_negative("n_s", n_s)?;
    let x = (2.0 * n_s).sqrt();
    let q = erfc(x) / 2.0;
    let one_minus_q = erfc(-x) / 2.0;
    Ok(bsc_point(SchemeId::BpskHomodyne, n_s, q, one_minus_q))
}

/// Helstrom error probability of two equiprobable coherent states
/// `|+-sqrt(n_s)>`, `(1 - sqrt(1 - e^{-4 n_s})) / 2`.
pub fn helstrom_error(n_s: f64) -> Result<f64> {
    check_non_negative("n_s", n_s)?;
    let overlap_sq = (-4.0 * n_s).exp();
    let root = (-(-4.0 * n_s).exp_m1()).sqrt();
    Ok(overlap_sq / (2.0 * (1.0 + root)))
}

/// Binary phase keying read by the Dolinar receiver.
pub fn bpsk_dolinar_capacity(n_s: f64) -> Result<TransceiverCurvePoint> {
    let q = helstrom_error(n_s)?;
    let root = (-(-4.0 * n_s).exp_m1()).sqrt();
    Ok(bsc_point(SchemeId::BpskDolinar, n_s, q, (1.0 + root) / 2.0))
}

/// Minimum error probability for a binary phase pixel probed by the qubit
/// `sqrt(1-n)|0> + sqrt(n)|1>`; zero once `n_s >= 1/2`.
pub fn qubit_probe_error(n_s: f64) -> Result<f64> {
    check_non_negative("n_s", n_s)?;
    if n_s >= 0.5 {
        return Ok(0.0);
    }
    let root = 2.0 * (n_s * (1.0 - n_s)).sqrt();
    let gap = 1.0 - 2.0 * n_s;
    Ok(gap * gap / (2.0 * (1.0 + root)))
}

/// Single-rail qubit probe with the optimal single-pixel measurement.
pub fn qubit_probe_capacity(n_s: f64) -> Result<TransceiverCurvePoint> {
    let q = qubit_probe_error(n_s)?;
    if q == 0.0 {
        let aux = CurveAux {
            error_probability: Some(0.0),
            ..Default::default()
        };
        return Ok(TransceiverCurvePoint::new(SchemeId::QubitProbe, n_s, 1.0, aux));
    }
    let root = 2.0 * (n_s * (1.0 - n_s)).sqrt();
    Ok(bsc_point(SchemeId::QubitProbe, n_s, q, (1.0 + root) / 2.0))
}

/// Eigenvalue distribution `{y_q}` of the equiprobable `Q`-ary coherent PSK
/// ensemble of mean photon number `n_s`:
///
/// `y_q = (1/Q) sum_k exp(-n (1 - cos(2 pi k/Q))) cos(n sin(2 pi k/Q) - 2 pi k q/Q)`
///
/// for `q = 1..=Q`, returned in that order. Roundoff negatives down to
/// `-1e-9` are clamped to zero; anything larger, or a sum off by `1e-9` or
/// more, is reported as a numerical failure.
pub fn psk_y_distribution(n_s: f64, q_ary: usize) -> Result<Vec<f64>> {
    check_non_negative("n_s", n_s)?;
    if q_ary < 2 {
        return Err(Error::Invalid {
            what: "PSK order",
            reason: format!("Q = {q_ary} < 2"),
        });
    }
    let qf = q_ary as f64;
    let step = 2.0 * std::f64::consts::PI / qf;
    let terms: Vec<(f64, f64)> = (1..=q_ary)
        .map(|k| {
            let phi = step * k as f64;
            ((-n_s * (1.0 - phi.cos())).exp(), n_s * phi.sin())
        })
        .collect();

    let mut y: Vec<f64> = (1..=q_ary)
        .map(|q| {
            terms
                .iter()
                .enumerate()
                .map(|(i, &(mag, shift))| {
                    // k q reduced mod Q keeps the angle small.
                    let turn = ((i + 1) * q % q_ary) as f64;
                    mag * (shift - step * turn).cos()
                })
                .sum::<f64>()
                / qf
        })
        .collect();

    if let Some((q, &bad)) = y.iter().enumerate().find(|(_, &v)| v < -Y_CLAMP) {
        return Err(Error::Numerical(format!(
            "y_{} = {bad:e} for n_s = {n_s}, Q = {q_ary}",
            q + 1
        )));
    }
    y.iter_mut().for_each(|v| *v = v.max(0.0));
    let sum: f64 = y.iter().sum();
    if (sum - 1.0).abs() >= Y_CLAMP {
        return Err(Error::Numerical(format!(
            "PSK eigenvalues sum to {sum} for n_s = {n_s}, Q = {q_ary}"
        )));
    }
    y.iter_mut().for_each(|v| *v /= sum);
    Ok(y)
}

/// Holevo capacity of coherent binary phase keying, `H((1 + e^{-2 n_s}) / 2)`.
pub fn bpsk_holevo_capacity(n_s: f64) -> Result<TransceiverCurvePoint> {
    check_non_negative("n_s", n_s)?;
    let c = binary_entropy_split(-(-2.0 * n_s).exp_m1() / 2.0, (1.0 + (-2.0 * n_s).exp()) / 2.0);
    Ok(TransceiverCurvePoint::new(
        SchemeId::BpskHolevo,
        n_s,
        c,
        CurveAux {
            q_star: Some(2),
            ..Default::default()
        },
    ))
}

/// Best PSK Holevo capacity over `Q in {2, 4, 8, ...} <= q_max`.
pub fn psk_holevo_capacity(n_s: f64, q_max: usize) -> Result<TransceiverCurvePoint> {
    check_positive("n_s", n_s)?;
    if q_max < 2 {
        return Err(Error::Invalid {
            what: "PSK order bound",
            reason: format!("q_max = {q_max} < 2"),
        });
    }
    let mut best = (f64::NEG_INFINITY, 2);
    let mut q = 2;
    while q <= q_max {
        let c = entropy(&psk_y_distribution(n_s, q)?);
        if c > best.0 {
            best = (c, q);
        }
        q *= 2;
    }
    let aux = CurveAux {
        q_star: Some(best.1),
        truncated: best.1 * 2 > q_max && q_max > 2,
        ..Default::default()
    };
    Ok(TransceiverCurvePoint::new(SchemeId::PskHolevo, n_s, best.0, aux))
}

/// Bits per pixel of a length-`m` Hadamard code read by the Green Machine,
/// `log2(m) (1 - e^{-m n_s}) / m`.
pub fn gm_rate(m: u64, n_s: f64) -> f64 {
    let mf = m as f64;
    mf.log2() * -(-mf * n_s).exp_m1() / mf
}

/// Small-`n_s` estimate of the PIE-optimal Hadamard block length.
pub fn gm_m_star_asymptote(n_s: f64) -> Option<f64> {
    (n_s > 0.0 && n_s < 1.0).then(|| -5.0 / (2.0 * n_s * n_s.ln()))
}

/// Hadamard code with Green Machine joint detection, maximized over
/// power-of-two block lengths up to `m_max`.
///
/// If the best length is `m_max` itself the optimum may lie beyond the
/// sweep; `aux.truncated` is set in that case.
pub fn gm_capacity(n_s: f64, m_max: u64) -> Result<TransceiverCurvePoint> {
    check_positive("n_s", n_s)?;
    check_power_of_two(m_max)?;
    let mut best = (f64::NEG_INFINITY, 2u64);
    let mut m = 2u64;
    loop {
        let c = gm_rate(m, n_s);
        if c > best.0 {
            best = (c, m);
        }
        if m >= m_max {
            break;
        }
        m *= 2;
    }
    let aux = CurveAux {
        m_star: Some(best.1),
        m_star_asymptote: gm_m_star_asymptote(n_s),
        truncated: best.1 == m_max && m_max > 2,
        ..Default::default()
    };
    Ok(TransceiverCurvePoint::new(SchemeId::GmHadamard, n_s, best.0, aux))
}

/// W-state probe: `n_s log2(1/n_s)` bits per pixel, error-free, for
/// `0 < n_s <= 1/2`.
pub fn wstate_capacity(n_s: f64) -> Result<TransceiverCurvePoint> {
    if !(n_s > 0.0 && n_s <= 0.5) {
        return Err(Error::Domain {
            name: "n_s",
            value: n_s,
            expected: "(0, 1/2]",
        });
    }
    let inv = 1.0 / n_s;
    let m_star = (inv.fract() == 0.0 && (inv as u64).is_power_of_two()).then_some(inv as u64);
    let aux = CurveAux {
        m_star,
        error_probability: Some(0.0),
        ..Default::default()
    };
    Ok(TransceiverCurvePoint::new(
        SchemeId::WState,
        n_s,
        n_s * inv.log2(),
        aux,
    ))
}

/// Evaluates `scheme` at `n_s` with the default sweep bounds.
pub fn evaluate(scheme: SchemeId, n_s: f64) -> Result<TransceiverCurvePoint> {
    match scheme {
        SchemeId::OokDirect => ook_capacity(n_s),
        SchemeId::BpskHomodyne => bpsk_homodyne_capacity(n_s),
        SchemeId::BpskDolinar => bpsk_dolinar_capacity(n_s),
        SchemeId::QubitProbe => qubit_probe_capacity(n_s),
        SchemeId::HolevoUnrestricted => {
            let g = holevo_g(n_s)?;
            Ok(TransceiverCurvePoint::new(scheme, n_s, g, CurveAux::default()))
        }
        SchemeId::BpskHolevo => bpsk_holevo_capacity(n_s),
        SchemeId::PskHolevo => psk_holevo_capacity(n_s, DEFAULT_PSK_Q_MAX),
        SchemeId::GmHadamard => gm_capacity(n_s, DEFAULT_GM_M_MAX),
        SchemeId::WState => wstate_capacity(n_s),
    }
}

/// Coherent-state scheme under end-to-end transmissivity `kappa`: the
/// lossless formula at `kappa n_s`, capacity per pixel, PIE per detected
/// photon.
pub fn apply_loss(scheme: SchemeId, n_s: f64, loss: LossModel) -> Result<TransceiverCurvePoint> {
    if !scheme.is_coherent() {
        return Err(Error::UnsupportedScheme(scheme.name()));
    }
    let detected = evaluate(scheme, loss.kappa() * n_s)?;
    Ok(TransceiverCurvePoint {
        n_s,
        aux: CurveAux {
            kappa: loss.kappa(),
            photon_basis: if loss.kappa() < 1.0 {
                PhotonBasis::Detected
            } else {
                PhotonBasis::Transmitted
            },
            ..detected.aux
        },
        ..detected
    })
}
