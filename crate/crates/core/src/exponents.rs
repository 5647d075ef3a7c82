//! Random-coding lower bound on the reliability of reading a binary-phase
//! memory with a coherent probe and an optimal joint receiver.
//!
//! The two reflected states `|+-sqrt(n_s)>` are pure with overlap
//! `gamma = e^{-2 n_s}`. For a prior `(1 - p, p)` the averaged state
//! `G_p = (1-p)|+><+| + p|-><-|` has eigenvalues
//! `lambda_{+-} = 1/2 +- sqrt(1/4 - p(1-p)(1-gamma^2))`, and the pure-state
//! random-coding exponent is
//!
//! `E_LB(R) = max_{s in [0,1], p} [ -ln Tr G_p^{1+s} - s R ln 2 ]`
//!
//! in nats per pixel for a rate `R` in bits per pixel. A block of
//! `M >= -ln(eps) / E_LB` pixels then suffices for word-error probability
//! `eps`.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_non_negative, check_positive, check_probability, Error, Result};
use crate::optimize::golden_max;
use crate::transceivers::bpsk_holevo_capacity;

const S_TOL: f64 = 1e-10;
const PRIOR_TOL: f64 = 1e-10;
const PRIOR_GRID: usize = 10;
/// Exponents below this are roundoff around zero.
const EXPONENT_FLOOR: f64 = 1e-15;

/// `<-sqrt(n_s)|sqrt(n_s)> = e^{-2 n_s}`.
pub fn gram_overlap(n_s: f64) -> Result<f64> {
    check_non_negative("n_s", n_s)?;
    Ok((-2.0 * n_s).exp())
}

/// `E_0(s, p) = -ln(lambda_+^{1+s} + lambda_-^{1+s})` in nats.
pub fn e0_pure_binary(s: f64, prior: f64, gamma: f64) -> Result<f64> {
    check_probability("s", s)?;
    check_probability("prior", prior)?;
    check_probability("gamma", gamma)?;
    Ok(e0_unchecked(s, prior, gamma))
}

fn e0_unchecked(s: f64, prior: f64, gamma: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    // lambda_+ lambda_- = p(1-p)(1-gamma^2), so the small root is formed
    // without cancellation and lambda_+ = 1 - lambda_-.
    let det = prior * (1.0 - prior) * (1.0 - gamma * gamma);
    let big = 0.5 + (0.25 - det).max(0.0).sqrt();
    let small = det / big;
    if small <= 0.0 {
        return 0.0;
    }
    let order = 1.0 + s;
    let ln_big = (-small).ln_1p();
    -(order * ln_big + ((small.ln() - ln_big) * order).exp().ln_1p())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentBound {
    pub n_s: f64,
    pub rate_bits: f64,
    /// Lower bound on the reliability function, nats per pixel.
    pub e_lb: f64,
    pub s_star: f64,
    pub p_star: f64,
}

fn best_tilt(prior: f64, gamma: f64, rate_nats: f64) -> (f64, f64) {
    golden_max(
        |s| e0_unchecked(s, prior, gamma) - s * rate_nats,
        0.0,
        1.0,
        S_TOL,
    )
}

/// Random-coding bound at `n_s` photons per pixel and `rate_bits` bits per
/// pixel.
///
/// The tilt is optimized by golden section for each prior, and the prior by
/// successively refined grids over `[0, 1]`. Where the bound is zero (rate
/// at or above the ensemble's Holevo capacity) the reported optimizers are
/// `s = 0` and `p = 1/2`.
pub fn random_coding_bound(n_s: f64, rate_bits: f64) -> Result<ExponentBound> {
    check_positive("n_s", n_s)?;
    check_non_negative("rate_bits", rate_bits)?;
    let gamma = gram_overlap(n_s)?;
    let rate_nats = rate_bits * LN_2;

    let mut best = (f64::NEG_INFINITY, 0.0, 0.5);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let step = (hi - lo) / PRIOR_GRID as f64;
        for i in 0..=PRIOR_GRID {
            let p = (lo + step * i as f64).clamp(0.0, 1.0);
            let (s, value) = best_tilt(p, gamma, rate_nats);
            if value > best.0 {
                best = (value, s, p);
            }
        }
        if step < PRIOR_TOL {
            break;
        }
        lo = (best.2 - step).max(0.0);
        hi = (best.2 + step).min(1.0);
    }

    let (value, s_star, p_star) = best;
    Ok(if value > EXPONENT_FLOOR {
        ExponentBound {
            n_s,
            rate_bits,
            e_lb: value,
            s_star,
            p_star,
        }
    } else {
        ExponentBound {
            n_s,
            rate_bits,
            e_lb: 0.0,
            s_star: 0.0,
            p_star: 0.5,
        }
    })
}

/// Pixel budget `-ln(eps) / E_LB`, or `None` where the bound vanishes.
pub fn pixel_bound(epsilon: f64, e_lb: f64) -> Option<f64> {
    (e_lb > 0.0).then(|| -epsilon.ln() / e_lb)
}

/// The smallest pixel budget found along a constant-PIE line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PixelBudget {
    /// `ceil(-ln eps / E_LB)`, at least 1.
    pub m_ub: u64,
    /// The unrounded budget.
    pub m_ub_exact: f64,
    pub epsilon: f64,
    pub pie: f64,
    /// Photons per pixel at the best point of the line.
    pub n_s: f64,
    pub rate_bits: f64,
    pub e_lb: f64,
    /// Rate over the binary-phase Holevo capacity at that point.
    pub rate_fraction_of_capacity: f64,
}

/// Largest `n_s` at which `pie` bits per photon is still below the
/// binary-phase Holevo capacity. The capacity PIE falls monotonically from
/// infinity, so bisection in `ln n_s` brackets it.
pub fn capacity_edge(pie: f64) -> Result<f64> {
    check_positive("pie", pie)?;
    let pie_at = |n: f64| bpsk_holevo_capacity(n).map(|p| p.pie_bits_per_photon);
    let (mut lo, mut hi) = (-60.0f64, 10.0f64);
    if pie_at(hi.exp())? >= pie {
        return Ok(hi.exp());
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pie_at(mid.exp())? > pie {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.exp())
}

/// Minimizes `-ln(eps) / E_LB(n_s, pie n_s)` over `n_s` below the capacity
/// edge: a log-spaced scan followed by golden-section refinement around the
/// best grid point.
pub fn min_pixels_for_pie(pie_target: f64, epsilon: f64) -> Result<PixelBudget> {
    check_positive("pie_target", pie_target)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            expected: "(0, 1]",
        });
    }
    const SCAN: usize = 240;
    const DECADES: f64 = 8.0;
    let edge = capacity_edge(pie_target)?.ln();
    let start = edge - DECADES * std::f64::consts::LN_10;
    let exponent_at = |ln_n: f64| -> f64 {
        let n = ln_n.exp();
        random_coding_bound(n, pie_target * n).map_or(0.0, |b| b.e_lb)
    };

    let grid: Vec<f64> = (0..=SCAN)
        .map(|i| start + (edge - start) * i as f64 / SCAN as f64)
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| exponent_at(x)).collect();
    let (best_i, &best_e) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    if best_e <= 0.0 {
        return Err(Error::Infeasible(format!(
            "random-coding exponent vanishes along PIE = {pie_target}"
        )));
    }
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(SCAN)];
    let (ln_n, e_lb) = golden_max(exponent_at, lo, hi, 1e-9);
    let (ln_n, e_lb) = if e_lb >= best_e {
        (ln_n, e_lb)
    } else {
        (grid[best_i], best_e)
    };

    let n_s = ln_n.exp();
    let rate_bits = pie_target * n_s;
    let m_exact = -epsilon.ln() / e_lb;
    Ok(PixelBudget {
        m_ub: (m_exact.ceil() as u64).max(1),
        m_ub_exact: m_exact,
        epsilon,
        pie: pie_target,
        n_s,
        rate_bits,
        e_lb,
        rate_fraction_of_capacity: rate_bits
            / bpsk_holevo_capacity(n_s)?.capacity_bits_per_pixel,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourPoint {
    pub n_s: f64,
    pub pie: f64,
    pub rate_bits: f64,
    pub e_lb: f64,
    /// `None` where the exponent is zero, i.e. the budget is unbounded.
    pub m_ub: Option<f64>,
    /// PIE at the binary-phase Holevo capacity for this `n_s`.
    pub capacity_pie: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourGrid {
    pub n_s_min: f64,
    pub n_s_max: f64,
    pub n_s_points: usize,
    pub pie_min: f64,
    pub pie_max: f64,
    pub pie_points: usize,
}

/// Budget table over a log-spaced `n_s` axis and a linear PIE axis, rows
/// ordered by `n_s` then PIE.
pub fn exponent_contours(grid: &ContourGrid, epsilon: f64) -> Result<Vec<ContourPoint>> {
    check_positive("n_s_min", grid.n_s_min)?;
    check_positive("pie_min", grid.pie_min)?;
    if grid.n_s_max < grid.n_s_min || grid.pie_max < grid.pie_min {
        return Err(Error::Invalid {
            what: "contour grid",
            reason: "range upper bound below lower bound".into(),
        });
    }
    if grid.n_s_points == 0 || grid.pie_points == 0 {
        return Err(Error::Invalid {
            what: "contour grid",
            reason: "empty axis".into(),
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            expected: "(0, 1]",
        });
    }
    let n_axis = log_axis(grid.n_s_min, grid.n_s_max, grid.n_s_points);
    let pie_axis = linear_axis(grid.pie_min, grid.pie_max, grid.pie_points);
    let cells: Vec<(f64, f64)> = n_axis
        .iter()
        .flat_map(|&n| pie_axis.iter().map(move |&pie| (n, pie)))
        .collect();
    cells
        .par_iter()
        .map(|&(n_s, pie)| {
            let rate_bits = pie * n_s;
            let bound = random_coding_bound(n_s, rate_bits)?;
            Ok(ContourPoint {
                n_s,
                pie,
                rate_bits,
                e_lb: bound.e_lb,
                m_ub: pixel_bound(epsilon, bound.e_lb),
                capacity_pie: bpsk_holevo_capacity(n_s)?.pie_bits_per_photon,
            })
        })
        .collect()
}

pub(crate) fn log_axis(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

fn linear_axis(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}
