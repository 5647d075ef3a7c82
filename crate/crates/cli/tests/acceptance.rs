//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; any failure exits nonzero.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use photon_reader::dmc::{
    bac_capacity, bac_channel, blahut_arimoto, bsc_capacity, bsc_channel, erasure_capacity,
    erasure_superchannel, ook_optimal_prior, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use photon_reader::exponents::{min_pixels_for_pie, random_coding_bound};
use photon_reader::montecarlo::{estimate_word_error, pixels_for_target, trial_rng};
use photon_reader::optics::{green_machine_in_place, ReadScheme, Transceiver};
use photon_reader::transceivers::{
    bpsk_dolinar_capacity, bpsk_homodyne_capacity, evaluate, holevo_g, ook_capacity,
    psk_y_distribution, qubit_probe_capacity, qubit_probe_error,
};
use photon_reader::{Probe, SchemeId, TrialPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Binary entropy in bits, written out independently of the library.
fn h2(p: f64) -> f64 {
    let t = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
    t(p) + t(1.0 - p)
}

fn within(v: f64, target: f64, rel: f64) -> bool {
    (v - target).abs() <= rel * target
}

fn ook_pie_cap() -> Check {
    let pie = ook_capacity(1e-4).map_err(|e| e.to_string())?.pie_bits_per_photon;
    ensure((0.5254..=0.5360).contains(&pie), format!("pie = {pie}"))?;
    Ok(format!("pie(1e-4) = {pie:.4}"))
}

fn optimal_prior_limits() -> Check {
    let lo = ook_optimal_prior(1e-4).map_err(|e| e.to_string())?;
    let hi = ook_optimal_prior(10.0).map_err(|e| e.to_string())?;
    ensure((0.366..=0.370).contains(&lo), format!("p*(1e-4) = {lo}"))?;
    ensure((0.495..=0.505).contains(&hi), format!("p*(10) = {hi}"))?;
    Ok(format!("p*(1e-4) = {lo:.4}, p*(10) = {hi:.4}"))
}

fn bpsk_pie_caps() -> Check {
    let ln2 = std::f64::consts::LN_2;
    let homodyne = bpsk_homodyne_capacity(1e-4).map_err(|e| e.to_string())?.pie_bits_per_photon;
    let dolinar = bpsk_dolinar_capacity(1e-4).map_err(|e| e.to_string())?.pie_bits_per_photon;
    let homodyne_cap = 4.0 / (std::f64::consts::PI * ln2);
    let dolinar_cap = 2.0 / ln2;
    ensure(within(homodyne, homodyne_cap, 0.02), format!("homodyne {homodyne} vs {homodyne_cap}"))?;
    ensure(within(dolinar, dolinar_cap, 0.02), format!("Dolinar {dolinar} vs {dolinar_cap}"))?;
    Ok(format!(
        "homodyne {homodyne:.4} (cap {homodyne_cap:.4}), Dolinar {dolinar:.4} (cap {dolinar_cap:.4})"
    ))
}

fn qubit_probe_exact() -> Check {
    for n in [0.5, 0.7, 1.0] {
        let pe = qubit_probe_error(n).map_err(|e| e.to_string())?;
        let c = qubit_probe_capacity(n).map_err(|e| e.to_string())?.capacity_bits_per_pixel;
        ensure(pe == 0.0 && c == 1.0, format!("n_s = {n}: P_e = {pe}, C = {c}"))?;
    }
    Ok("P_e = 0, C = 1 at n_s = 0.5, 0.7, 1".into())
}

/// Eigenvalues of the Gram matrix of `Q` phase-shifted coherent states,
/// each weighted 1/Q.
fn gram_eigenvalues(n_s: f64, q: usize) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / q as f64;
    let g = DMatrix::from_fn(q, q, |j, k| {
        let d = step * (k as f64 - j as f64);
        Complex64::new(n_s * (d.cos() - 1.0), n_s * d.sin()).exp() / q as f64
    });
    let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn psk_consistency() -> Check {
    let mut worst_h = 0f64;
    for n in log_grid(1e-4, 10.0, 50) {
        let y = psk_y_distribution(n, 2).map_err(|e| e.to_string())?;
        let h: f64 = y.iter().map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 }).sum();
        let want = h2((1.0 + (-2.0 * n).exp()) / 2.0);
        worst_h = worst_h.max((h - want).abs());
    }
    ensure(worst_h <= 1e-12, format!("binary entropy gap {worst_h:e}"))?;
    let mut worst_eig = 0f64;
    for q in [2, 3, 4, 5, 8, 12, 16] {
        for n in [1e-3, 0.05, 0.5, 2.0, 7.0] {
            let mut y = psk_y_distribution(n, q).map_err(|e| e.to_string())?;
            y.sort_by(f64::total_cmp);
            for (a, b) in y.iter().zip(gram_eigenvalues(n, q)) {
                worst_eig = worst_eig.max((a - b).abs());
            }
        }
    }
    ensure(worst_eig <= 1e-9, format!("eigenvalue gap {worst_eig:e}"))?;
    Ok(format!("entropy gap {worst_h:.1e}, eigenvalue gap {worst_eig:.1e}"))
}

fn holevo_dominance() -> Check {
    let mut points = 0;
    let mut slack = f64::INFINITY;
    for n in log_grid(1e-4, 10.0, 200) {
        let g = holevo_g(n).map_err(|e| e.to_string())?;
        for scheme in SchemeId::ALL {
            if n > scheme.max_photons() {
                continue;
            }
            let c = evaluate(scheme, n).map_err(|e| e.to_string())?.capacity_bits_per_pixel;
            ensure(c <= g + 1e-12, format!("{} at n_s = {n}: {c} > g = {g}", scheme.name()))?;
            slack = slack.min(g - c);
            points += 1;
        }
    }
    Ok(format!("{points} points, min slack {slack:.1e}"))
}

fn dense_hadamard(m: usize) -> DMatrix<f64> {
    let base = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < m {
        h = h.kronecker(&base);
    }
    h / (m as f64).sqrt()
}

fn green_machine_structure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for m in [2, 4, 8, 16] {
        let h = dense_hadamard(m);
        for _ in 0..200 {
            let x: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let mut y = x.clone();
            green_machine_in_place(&mut y).map_err(|e| e.to_string())?;
            for (i, yi) in y.iter().enumerate() {
                let want: Complex64 = (0..m).map(|j| x[j] * h[(i, j)]).sum();
                worst = worst.max((yi - want).norm());
            }
        }
    }
    ensure(worst <= 1e-12, format!("dense mismatch {worst:e}"))?;
    let mut codewords = 0;
    for log_m in 1..=12 {
        let m = 1usize << log_m;
        let tx = Transceiver::new(ReadScheme::CoherentGm { n_s: 1.0 / m as f64 }, m, 1.0)
            .map_err(|e| e.to_string())?;
        for j in 0..m {
            let out = tx.receiver_output(j).map_err(|e| e.to_string())?;
            let off: f64 = out
                .amps()
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            ensure(off < 1e-20, format!("M = {m}, codeword {j}: off-port energy {off:e}"))?;
            codewords += 1;
        }
    }
    Ok(format!("dense gap {worst:.1e}; {codewords} codewords on their own port"))
}

fn monte_carlo_vs_analytic() -> Check {
    let m = 1024;
    let plan = TrialPlan::coherent(m, 1000f64.ln() / m as f64, 1_000_000, 20_240_801);
    let est = estimate_word_error(&plan).map_err(|e| e.to_string())?;
    let z = est
        .z_score(plan.analytic_word_error())
        .ok_or("analytic word error has zero variance")?;
    ensure(z.abs() <= 4.0, format!("word-error z = {z}"))?;
    let pe = plan.analytic_erasure_rate();
    let sigma = (pe * (1.0 - pe) / est.trials as f64).sqrt();
    let ze = (est.erasure_rate - pe) / sigma;
    ensure(ze.abs() <= 4.0, format!("erasure z = {ze}"))?;
    Ok(format!(
        "p_hat = {:.3e} (analytic {:.3e}, z = {z:.2}); erasures z = {ze:.2}",
        est.p_e_hat,
        plan.analytic_word_error()
    ))
}

fn wstate_zero_error() -> Check {
    let mut reads = 0u64;
    for log_m in 1..=8 {
        let m = 1usize << log_m;
        let tx = Transceiver::new(ReadScheme::WState, m, 1.0).map_err(|e| e.to_string())?;
        for j in 0..m {
            let profile = tx.click_profile(j).map_err(|e| e.to_string())?;
            let mut rng = trial_rng(1000 + log_m as u64, j as u64);
            for _ in 0..1000 {
                let o = profile.sample(&mut rng);
                ensure(o.decoded == j && !o.was_erasure, format!("M = {m}, codeword {j} misread"))?;
                reads += 1;
            }
        }
    }
    // Counting codewords and ports from one, as in the figure.
    let tx = Transceiver::new(ReadScheme::WState, 64, 1.0).map_err(|e| e.to_string())?;
    let mut rng = trial_rng(64, 38);
    for _ in 0..1000 {
        let o = tx.read(37, &mut rng).map_err(|e| e.to_string())?;
        ensure(o.decoded == 37, format!("M = 64 codeword 38 read as {}", o.decoded + 1))?;
    }
    Ok(format!("{reads} reads error-free; codeword 38 of 64 -> port 38"))
}

fn pixel_budgets() -> Check {
    let gm = pixels_for_target(Probe::CoherentGm, 5.0, 1e-3, 1.0).map_err(|e| e.to_string())?;
    let w = pixels_for_target(Probe::WState, 5.0, 1e-3, 1.0).map_err(|e| e.to_string())?;
    let lossy = pixels_for_target(Probe::WState, 5.0, 1e-3, 0.01).map_err(|e| e.to_string())?;
    ensure(gm.log2_m.abs_diff(35) <= 1, format!("GM M = 2^{}", gm.log2_m))?;
    ensure(w.m == 32, format!("W state M = {}", w.m))?;
    ensure(lossy.log2_m.abs_diff(35) <= 1, format!("lossy W state M = 2^{}", lossy.log2_m))?;
    Ok(format!(
        "GM 2^{}, W state {}, W state at kappa 0.01: 2^{} with K = {}",
        gm.log2_m, w.m, lossy.log2_m, lossy.k_copies
    ))
}

fn exponent_anchor() -> Check {
    let b = min_pixels_for_pie(5.0, 1e-3).map_err(|e| e.to_string())?;
    let report = format!(
        "M_UB = {} at n_s = {:.5}, rate {:.4} bits ({:.3} of capacity), E = {:.3e} nats",
        b.m_ub, b.n_s, b.rate_bits, b.rate_fraction_of_capacity, b.e_lb
    );
    ensure((4080..=5520).contains(&b.m_ub), format!("reconstruction discrepancy: {report}"))?;
    Ok(report)
}

fn exponent_zero_crossing() -> Check {
    for n in [0.01f64, 0.1, 1.0] {
        let c = h2((1.0 + (-2.0 * n).exp()) / 2.0);
        let below = random_coding_bound(n, c - 1e-6).map_err(|e| e.to_string())?.e_lb;
        let above = random_coding_bound(n, c + 1e-6).map_err(|e| e.to_string())?.e_lb;
        ensure(below > 0.0, format!("n_s = {n}: E(C - 1e-6) = {below}"))?;
        ensure(above == 0.0, format!("n_s = {n}: E(C + 1e-6) = {above}"))?;
    }
    Ok("zero crossing at C within 1e-6 for n_s = 0.01, 0.1, 1".into())
}

/// Z-channel capacity with miss probability `q` on the lit input.
fn z_channel_oracle(q: f64) -> f64 {
    (1.0 + (1.0 - q) * q.powf(q / (1.0 - q))).log2()
}

fn oracle_equivalence() -> Check {
    let ba = |ch| {
        blahut_arimoto(&ch, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)
            .map(|r| r.capacity_bits)
            .map_err(|e| e.to_string())
    };
    let mut cases = Vec::new();
    for n in [1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let closed = bac_capacity(n).map_err(|e| e.to_string())?.capacity_bits;
        cases.push((format!("BAC {n}"), ba(bac_channel(n).map_err(|e| e.to_string())?)?, closed, z_channel_oracle((-n).exp())));
    }
    for q in [0.0, 0.01, 0.1, 0.25, 0.4, 0.49, 0.9] {
        let closed = bsc_capacity(q).map_err(|e| e.to_string())?.capacity_bits;
        cases.push((format!("BSC {q}"), ba(bsc_channel(q).map_err(|e| e.to_string())?)?, closed, 1.0 - h2(q)));
    }
    for (m, p) in [(2, 0.0), (4, 0.3), (8, 0.5), (16, 0.9), (32, 0.1), (64, 0.99)] {
        let closed = erasure_capacity(m, p).map_err(|e| e.to_string())?.capacity_bits;
        cases.push((
            format!("erasure M={m} p={p}"),
            ba(erasure_superchannel(m, p).map_err(|e| e.to_string())?)?,
            closed,
            (1.0 - p) * (m as f64).log2(),
        ));
    }
    let mut worst = 0f64;
    for (name, iterative, closed, oracle) in &cases {
        let gap = (iterative - closed).abs().max((closed - oracle).abs());
        ensure(gap <= 1e-9, format!("{name}: BA {iterative}, closed {closed}, oracle {oracle}"))?;
        worst = worst.max(gap);
    }
    Ok(format!("{} cases, worst gap {worst:.1e}", cases.len()))
}

fn simulate_with_threads(threads: &str) -> std::result::Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_photon-reader"))
        .args([
            "simulate",
            "--schemes",
            "GM",
            "--m",
            "256",
            "--trials",
            "300000",
            "--seed",
            "99",
            "--deterministic",
        ])
        .env("PHOTON_READER_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), String::from_utf8_lossy(&out.stderr).into_owned())?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let one = simulate_with_threads("1")?;
    let four = simulate_with_threads("4")?;
    ensure(!one.is_empty(), "empty output")?;
    ensure(one == four, "outputs differ between 1 and 4 threads")?;
    Ok(format!("{} identical bytes with 1 and 4 threads", one.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("OOK photon efficiency cap", ook_pie_cap),
        ("optimal on-off prior limits", optimal_prior_limits),
        ("binary-phase receiver caps", bpsk_pie_caps),
        ("qubit probe is error-free", qubit_probe_exact),
        ("phase-alphabet eigenvalues", psk_consistency),
        ("Holevo dominance", holevo_dominance),
        ("Green Machine structure", green_machine_structure),
        ("Monte Carlo vs analytic", monte_carlo_vs_analytic),
        ("W-state zero error", wstate_zero_error),
        ("pixel budgets", pixel_budgets),
        ("error exponent anchor", exponent_anchor),
        ("exponent zero crossing", exponent_zero_crossing),
        ("Blahut-Arimoto vs closed forms", oracle_equivalence),
        ("thread-count determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
