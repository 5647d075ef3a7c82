//! Word-error estimation over many simulated read cycles, and the analytic
//! pixel budgets those simulations are checked against.
//!
//! Every trial draws from its own ChaCha stream, keyed by the master seed and
//! the trial index, and results are reduced as integer counts. Estimates are
//! therefore bit-identical for a given plan no matter how rayon schedules
//! the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dmc::TransitionMatrix;
use crate::error::{check_non_negative, check_power_of_two, Error, Result};
use crate::optics::{ClickProfile, ReadScheme, Transceiver};
use crate::transceivers::PhotonBasis;

/// Blocks up to this size have every codeword's detector statistics
/// precomputed once per plan.
const PROFILE_CACHE_MODES: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Probe {
    CoherentGm,
    WState,
}

impl Probe {
    pub fn name(self) -> &'static str {
        match self {
            Probe::CoherentGm => "COHERENT_GM",
            Probe::WState => "W_STATE",
        }
    }
}

impl std::str::FromStr for Probe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "COHERENT_GM" | "GM" | "GM_HADAMARD" => Ok(Probe::CoherentGm),
            "W_STATE" | "W" => Ok(Probe::WState),
            _ => Err(Error::Invalid {
                what: "probe",
                reason: format!("unknown probe {s:?}"),
            }),
        }
    }
}

/// Parameters of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialPlan {
    pub scheme: Probe,
    pub m: usize,
    /// Transmitted photons per pixel; ignored by the W state (`1/M`).
    pub n_s: f64,
    pub kappa: f64,
    /// Copies of the probe sent at the same block; the first copy that
    /// clicks decides.
    pub k_copies: u32,
    pub trials: u64,
    pub master_seed: u64,
}

impl TrialPlan {
    pub fn coherent(m: usize, n_s: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            scheme: Probe::CoherentGm,
            m,
            n_s,
            kappa: 1.0,
            k_copies: 1,
            trials,
            master_seed,
        }
    }

    pub fn wstate(m: usize, kappa: f64, k_copies: u32, trials: u64, master_seed: u64) -> Self {
        Self {
            scheme: Probe::WState,
            m,
            n_s: 1.0 / m as f64,
            kappa,
            k_copies,
            trials,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_power_of_two(self.m as u64)?;
        if self.trials == 0 {
            return Err(Error::Invalid {
                what: "trial plan",
                reason: "trials must be at least 1".into(),
            });
        }
        if self.k_copies == 0 {
            return Err(Error::Invalid {
                what: "trial plan",
                reason: "k_copies must be at least 1".into(),
            });
        }
        if self.scheme == Probe::CoherentGm {
            check_non_negative("n_s", self.n_s)?;
        }
        self.transceiver().map(|_| ())
    }

    fn transceiver(&self) -> Result<Transceiver> {
        let scheme = match self.scheme {
            Probe::CoherentGm => ReadScheme::CoherentGm { n_s: self.n_s },
            Probe::WState => ReadScheme::WState,
        };
        Transceiver::new(scheme, self.m, self.kappa)
    }

    /// Probability that every copy of the probe goes undetected.
    pub fn analytic_erasure_rate(&self) -> f64 {
        let single = match self.scheme {
            Probe::CoherentGm => (-self.kappa * self.m as f64 * self.n_s).exp(),
            Probe::WState => 1.0 - self.kappa,
        };
        single.powi(self.k_copies as i32)
    }

    /// Erasure probability times the chance that the guess is wrong.
    pub fn analytic_word_error(&self) -> f64 {
        let m = self.m as f64;
        (m - 1.0) / m * self.analytic_erasure_rate()
    }
}

/// The random stream for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Empirical word-error probability with its binomial standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub p_e_hat: f64,
    pub stderr: f64,
    pub erasure_rate: f64,
    pub trials: u64,
    pub errors: u64,
    pub erasures: u64,
}

impl ErrorEstimate {
    fn from_counts(counts: Counts, trials: u64) -> Self {
        let n = trials as f64;
        let p = counts.errors as f64 / n;
        Self {
            p_e_hat: p,
            stderr: (p * (1.0 - p) / n).sqrt(),
            erasure_rate: counts.erasures as f64 / n,
            trials,
            errors: counts.errors,
            erasures: counts.erasures,
        }
    }

    /// `(p_hat - p) / sqrt(p (1 - p) / n)` against an analytic probability;
    /// `None` when the analytic variance is zero.
    pub fn z_score(&self, analytic: f64) -> Option<f64> {
        let sigma = (analytic * (1.0 - analytic) / self.trials as f64).sqrt();
        (sigma > 0.0).then(|| (self.p_e_hat - analytic) / sigma)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    errors: u64,
    erasures: u64,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts {
            errors: self.errors + other.errors,
            erasures: self.erasures + other.erasures,
        }
    }
}

/// Detector statistics per codeword, precomputed for small blocks.
enum Profiles {
    Cached(Vec<ClickProfile>),
    OnDemand(Transceiver),
}

impl Profiles {
    fn new(tx: Transceiver) -> Result<Self> {
        if tx.m() <= PROFILE_CACHE_MODES {
            let profiles = (0..tx.m())
                .into_par_iter()
                .map(|cw| tx.click_profile(cw))
                .collect::<Result<Vec<_>>>()?;
            Ok(Profiles::Cached(profiles))
        } else {
            Ok(Profiles::OnDemand(tx))
        }
    }

    fn with_profile<T>(&self, codeword: usize, f: impl FnOnce(&ClickProfile) -> T) -> Result<T> {
        match self {
            Profiles::Cached(all) => Ok(f(&all[codeword])),
            Profiles::OnDemand(tx) => Ok(f(&tx.click_profile(codeword)?)),
        }
    }
}

/// Outcome of sending `k` copies at one stored codeword: the decision and
/// whether it was a guess.
fn read_copies<R: Rng + ?Sized>(profile: &ClickProfile, k: u32, rng: &mut R) -> (usize, bool) {
    for _ in 0..k {
        let clicks = profile.sample_clicks(rng);
        if !clicks.is_empty() {
            let outcome = crate::optics::detect_resolve(clicks, profile.modes(), rng);
            return (outcome.decoded, false);
        }
    }
    (rng.random_range(0..profile.modes()), true)
}

/// Runs `plan.trials` reads with uniformly random stored codewords and
/// counts word errors.
pub fn estimate_word_error(plan: &TrialPlan) -> Result<ErrorEstimate> {
    plan.validate()?;
    let profiles = Profiles::new(plan.transceiver()?)?;
    let m = plan.m;
    let counts = (0..plan.trials)
        .into_par_iter()
        .map(|t| -> Result<Counts> {
            let mut rng = trial_rng(plan.master_seed, t);
            let stored = rng.random_range(0..m);
            let (decoded, guessed) =
                profiles.with_profile(stored, |p| read_copies(p, plan.k_copies, &mut rng))?;
            Ok(Counts {
                errors: u64::from(decoded != stored),
                erasures: u64::from(guessed),
            })
        })
        .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))?;
    Ok(ErrorEstimate::from_counts(counts, plan.trials))
}

/// Empirical `M x (M + 1)` transition matrix of the stored-codeword to
/// decision channel, with erasures (all copies unclicked) counted in the
/// last column before any guess. `plan.trials` reads are made per codeword.
pub fn estimate_induced_channel(plan: &TrialPlan) -> Result<TransitionMatrix> {
    plan.validate()?;
    if plan.trials < 100 {
        return Err(Error::Invalid {
            what: "trial plan",
            reason: format!("{} trials per codeword, need at least 100", plan.trials),
        });
    }
    let profiles = Profiles::new(plan.transceiver()?)?;
    let m = plan.m;
    let cols = m + 1;
    let rows = (0..m)
        .into_par_iter()
        .map(|stored| -> Result<Vec<f64>> {
            let mut counts = vec![0u64; cols];
            for t in 0..plan.trials {
                let index = stored as u64 * plan.trials + t;
                let mut rng = trial_rng(plan.master_seed, index);
                let (decoded, guessed) =
                    profiles.with_profile(stored, |p| read_copies(p, plan.k_copies, &mut rng))?;
                counts[if guessed { m } else { decoded }] += 1;
            }
            let n = plan.trials as f64;
            Ok(counts.into_iter().map(|c| c as f64 / n).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::new(m, cols, rows.concat())
}

/// Smallest block meeting a PIE target at a word-error ceiling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PixelRequirement {
    pub scheme: Probe,
    pub m: u64,
    pub log2_m: u32,
    /// Transmitted photons per pixel at the operating point (coherent only).
    pub n_s: Option<f64>,
    pub k_copies: u64,
    pub pie_bits_per_photon: f64,
    pub word_error: f64,
    pub kappa: f64,
    pub photon_basis: PhotonBasis,
}

/// Smallest power-of-two block that reaches `pie_target` bits per detected
/// photon with word-error probability at most `epsilon`.
///
/// Coherent Green Machine: `P_e = (M-1)/M e^{-x}` and
/// `PIE = log2(M) (1 - e^{-x}) / x` with `x = kappa M n_s` detected photons
/// per block. For each `M` the `x` giving exactly the target PIE is solved
/// for and the error law checked there.
///
/// W state with `K` copies: `P_e = (M-1)/M (1-kappa)^K` and
/// `PIE = log2(M) / (kappa K)`; for each `M` the fewest copies meeting
/// `epsilon` are used.
pub fn pixels_for_target(
    scheme: Probe,
    pie_target: f64,
    epsilon: f64,
    kappa: f64,
) -> Result<PixelRequirement> {
    budget(scheme, pie_target, epsilon, kappa, u64::MAX)
}

/// [`pixels_for_target`] for a W state restricted to a single copy.
pub fn wstate_single_shot_budget(pie_target: f64, epsilon: f64, kappa: f64) -> Result<PixelRequirement> {
    budget(Probe::WState, pie_target, epsilon, kappa, 1)
}

fn budget(
    scheme: Probe,
    pie_target: f64,
    epsilon: f64,
    kappa: f64,
    max_copies: u64,
) -> Result<PixelRequirement> {
    if !(pie_target > 0.0 && pie_target.is_finite()) {
        return Err(Error::Domain {
            name: "pie_target",
            value: pie_target,
            expected: "> 0",
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            expected: "(0, 1)",
        });
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Domain {
            name: "kappa",
            value: kappa,
            expected: "(0, 1]",
        });
    }
    let photon_basis = if kappa < 1.0 {
        PhotonBasis::Detected
    } else {
        PhotonBasis::Transmitted
    };
    for log2_m in 1..=63u32 {
        let m = 1u64 << log2_m;
        let mf = m as f64;
        let bits = f64::from(log2_m);
        let found = match scheme {
            Probe::CoherentGm => gm_operating_point(bits, pie_target).and_then(|x| {
                let p_e = (mf - 1.0) / mf * (-x).exp();
                (p_e <= epsilon).then(|| PixelRequirement {
                    scheme,
                    m,
                    log2_m,
                    n_s: Some(x / (kappa * mf)),
                    k_copies: 1,
                    pie_bits_per_photon: pie_target,
                    word_error: p_e,
                    kappa,
                    photon_basis,
                })
            }),
            Probe::WState => {
                let copies = if kappa >= 1.0 {
                    1
                } else {
                    let need = (epsilon * mf / (mf - 1.0)).ln() / (1.0 - kappa).ln();
                    need.ceil().max(1.0) as u64
                };
                let pie = bits / (kappa * copies as f64);
                (copies <= max_copies && pie >= pie_target).then(|| PixelRequirement {
                    scheme,
                    m,
                    log2_m,
                    n_s: None,
                    k_copies: copies,
                    pie_bits_per_photon: pie,
                    word_error: (mf - 1.0) / mf * (1.0 - kappa).powf(copies as f64),
                    kappa,
                    photon_basis,
                })
            }
        };
        if let Some(req) = found {
            return Ok(req);
        }
    }
    Err(Error::Infeasible(format!(
        "{} cannot reach {pie_target} bits/photon at P_e <= {epsilon} with kappa = {kappa} \
         for any M <= 2^63",
        scheme.name()
    )))
}

/// Detected photons per block `x` with `bits (1 - e^{-x}) / x = pie`, if any.
fn gm_operating_point(bits: f64, pie: f64) -> Option<f64> {
    // The left side falls from `bits` at x -> 0 towards zero.
    if bits <= pie {
        return None;
    }
    let f = |x: f64| bits * -(-x).exp_m1() / x - pie;
    let (mut lo, mut hi) = (0.0f64, bits / pie);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid > 0.0 && f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // `lo` keeps PIE at or above target.
    Some(if lo > 0.0 { lo } else { hi })
}
