//! One function per subcommand, each turning a resolved config into a
//! [`Report`].

use photon_reader::exponents::{exponent_contours, min_pixels_for_pie};
use photon_reader::montecarlo::{estimate_word_error, pixels_for_target, wstate_single_shot_budget};
use photon_reader::optics::MAX_SIMULATED_MODES;
use photon_reader::transceivers::{apply_loss, evaluate, holevo_g, CurveAux};
use photon_reader::{
    ContourGrid, ContourPoint, Error as CoreError, LossModel, PhotonBasis, PixelRequirement, Probe,
    SchemeId, TransceiverCurvePoint, TrialPlan,
};
use serde_json::{json, Value};

use crate::args::Command;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{Cell, Report};
use crate::svg::{Plot, Series};

pub fn run_command(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::PieCurve => pie_curve(cfg),
        Command::Tradeoff => tradeoff(cfg),
        Command::Simulate => simulate(cfg),
        Command::Exponent => exponent(cfg),
        Command::Budget => budget(cfg),
    }
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
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

fn is_all(names: &[String]) -> bool {
    names.iter().any(|s| s.trim().eq_ignore_ascii_case("all"))
}

fn parse_schemes(names: &[String]) -> Result<Vec<SchemeId>> {
    if is_all(names) {
        return Ok(SchemeId::ALL.to_vec());
    }
    names
        .iter()
        .map(|s| s.parse::<SchemeId>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn parse_probes(names: &[String]) -> Result<Vec<Probe>> {
    if is_all(names) {
        return Ok(vec![Probe::CoherentGm, Probe::WState]);
    }
    let mut out = Vec::new();
    for s in names {
        let p = s.parse::<Probe>().map_err(|e| CliError::Usage(e.to_string()))?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Curve points for every scheme on the grid. Points outside a scheme's
/// domain are skipped and counted; evaluation errors become failures.
struct Curves {
    points: Vec<TransceiverCurvePoint>,
    notes: Vec<String>,
    failures: Vec<String>,
}

fn curves(cfg: &RunConfig) -> Result<Curves> {
    let schemes = parse_schemes(&cfg.schemes)?;
    let grid = log_grid(cfg.ns_min, cfg.ns_max, cfg.ns_points);
    let kappa = cfg.first_kappa();
    let loss = LossModel::new(kappa)?;
    let mut out = Curves {
        points: Vec::new(),
        notes: Vec::new(),
        failures: Vec::new(),
    };
    for scheme in schemes {
        let mut skipped = 0;
        for &n in &grid {
            if n > scheme.max_photons() {
                skipped += 1;
                continue;
            }
            let point = if kappa < 1.0 {
                apply_loss(scheme, n, loss)
            } else {
                evaluate(scheme, n)
            };
            match point {
                Ok(p) => out.points.push(p),
                Err(e) => out.failures.push(format!("{scheme} at n_s = {n}: {e}")),
            }
        }
        if skipped > 0 {
            out.notes.push(format!(
                "{scheme} is defined for n_s <= {}; {skipped} grid points skipped",
                scheme.max_photons()
            ));
        }
    }
    Ok(out)
}

fn aux_cell(aux: &CurveAux) -> Cell {
    let mut kv: Vec<(String, Cell)> = Vec::new();
    if let Some(p) = aux.on_fraction {
        kv.push(("on_fraction".into(), p.into()));
    }
    if let Some(q) = aux.q_star {
        kv.push(("q_star".into(), (q as u64).into()));
    }
    if let Some(m) = aux.m_star {
        kv.push(("m_star".into(), m.into()));
    }
    if let Some(m) = aux.m_star_asymptote {
        kv.push(("m_star_asymptote".into(), m.into()));
    }
    if aux.truncated {
        kv.push(("truncated".into(), true.into()));
    }
    if let Some(p) = aux.error_probability {
        kv.push(("error_probability".into(), p.into()));
    }
    if aux.kappa < 1.0 {
        kv.push(("kappa".into(), aux.kappa.into()));
    }
    if aux.photon_basis == PhotonBasis::Detected {
        kv.push(("photon_basis".into(), "detected".into()));
    }
    Cell::Map(kv)
}

fn series_by_scheme(
    points: &[TransceiverCurvePoint],
    xy: impl Fn(&TransceiverCurvePoint) -> (f64, f64),
) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for p in points {
        let name = p.scheme.name();
        match out.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push(xy(p)),
            None => {
                let s = Series::new(name, vec![xy(p)]);
                out.push(if p.scheme == SchemeId::HolevoUnrestricted { s.dashed() } else { s });
            }
        }
    }
    out
}

fn photon_unit(cfg: &RunConfig) -> &'static str {
    if cfg.first_kappa() < 1.0 {
        "bits per detected photon"
    } else {
        "bits per photon"
    }
}

fn pie_curve(cfg: &RunConfig) -> Result<Report> {
    let c = curves(cfg)?;
    let rows = c
        .points
        .iter()
        .map(|p| {
            vec![
                p.scheme.name().into(),
                p.n_s.into(),
                p.capacity_bits_per_pixel.into(),
                p.pie_bits_per_photon.into(),
                aux_cell(&p.aux),
            ]
        })
        .collect();
    let plot = Plot {
        title: "Photon information efficiency".into(),
        x_label: "mean photons per pixel n_s".into(),
        y_label: format!("PIE ({})", photon_unit(cfg)),
        x_log: true,
        y_log: false,
        series: series_by_scheme(&c.points, |p| (p.n_s, p.pie_bits_per_photon)),
    };
    Ok(Report {
        columns: vec!["scheme", "n_s", "capacity_bits_per_pixel", "pie_bpp", "aux"],
        rows,
        notes: c.notes,
        plot: Some(plot),
        failures: c.failures,
        ..Default::default()
    })
}

fn tradeoff(cfg: &RunConfig) -> Result<Report> {
    let c = curves(cfg)?;
    let kappa = cfg.first_kappa();
    let mut rows = Vec::with_capacity(c.points.len());
    let mut notes = c.notes;
    let mut above = 0;
    for p in &c.points {
        let bound = holevo_g(kappa * p.n_s)?;
        let ok = p.capacity_bits_per_pixel <= bound + 1e-12;
        above += usize::from(!ok);
        rows.push(vec![
            p.scheme.name().into(),
            p.n_s.into(),
            p.capacity_bits_per_pixel.into(),
            p.pie_bits_per_photon.into(),
            bound.into(),
            ok.into(),
            (p.scheme == SchemeId::OokDirect).into(),
        ]);
    }
    if above > 0 {
        notes.push(format!("{above} points exceed the Holevo bound"));
    }
    let plot = Plot {
        title: "Photon efficiency against encoding efficiency".into(),
        x_label: "bits per pixel".into(),
        y_label: format!("PIE ({})", photon_unit(cfg)),
        x_log: true,
        y_log: false,
        series: series_by_scheme(&c.points, |p| (p.capacity_bits_per_pixel, p.pie_bits_per_photon)),
    };
    Ok(Report {
        columns: vec![
            "scheme",
            "n_s",
            "bits_per_pixel",
            "bits_per_photon",
            "holevo_bits_per_pixel",
            "within_holevo",
            "conventional",
        ],
        rows,
        notes,
        plot: Some(plot),
        failures: c.failures,
        ..Default::default()
    })
}

fn simulate(cfg: &RunConfig) -> Result<Report> {
    let probe = if is_all(&cfg.schemes) {
        Probe::CoherentGm
    } else {
        match parse_probes(&cfg.schemes)?.as_slice() {
            [one] => *one,
            _ => return Err(CliError::Usage("simulate takes exactly one scheme".into())),
        }
    };
    if !cfg.m.is_power_of_two() || cfg.m < 2 {
        return Err(CliError::Usage(format!("--m must be a power of two >= 2, got {}", cfg.m)));
    }
    if cfg.m > MAX_SIMULATED_MODES as u64 {
        return Err(CliError::Usage(format!(
            "--m {} exceeds the simulation limit 2^20; use `budget` for larger blocks",
            cfg.m
        )));
    }
    let m = cfg.m as usize;
    let kappa = cfg.first_kappa();
    let mut notes = Vec::new();
    let plan = match probe {
        Probe::CoherentGm => {
            let n_s = cfg.n_s.unwrap_or_else(|| {
                notes.push("n_s defaults to ln(1000)/M".into());
                1000f64.ln() / m as f64
            });
            TrialPlan {
                kappa,
                k_copies: cfg.k_copies,
                ..TrialPlan::coherent(m, n_s, cfg.trials, cfg.seed)
            }
        }
        Probe::WState => TrialPlan::wstate(m, kappa, cfg.k_copies, cfg.trials, cfg.seed),
    };
    let est = estimate_word_error(&plan)?;
    let analytic = plan.analytic_word_error();
    let row = vec![
        probe.name().into(),
        (m as u64).into(),
        plan.n_s.into(),
        kappa.into(),
        u64::from(plan.k_copies).into(),
        plan.trials.into(),
        plan.master_seed.into(),
        est.p_e_hat.into(),
        est.stderr.into(),
        est.erasure_rate.into(),
        est.errors.into(),
        est.erasures.into(),
        analytic.into(),
        plan.analytic_erasure_rate().into(),
        est.z_score(analytic).into(),
    ];
    Ok(Report {
        columns: vec![
            "probe",
            "m",
            "n_s",
            "kappa",
            "k_copies",
            "trials",
            "seed",
            "p_e_hat",
            "stderr",
            "erasure_rate",
            "errors",
            "erasures",
            "analytic_p_e",
            "analytic_erasure_rate",
            "z_score",
        ],
        rows: vec![row],
        notes,
        single: true,
        ..Default::default()
    })
}

fn requirement_m(req: &std::result::Result<PixelRequirement, CoreError>) -> Value {
    match req {
        Ok(r) => json!({ "m": r.m, "log2_m": r.log2_m, "k_copies": r.k_copies }),
        Err(_) => Value::Null,
    }
}

/// Level curves of `m_ub` over the table, traced column by column. At fixed
/// `n_s` the budget only grows with PIE, so each level is crossed at most
/// once per column.
fn contour_lines(points: &[ContourPoint], pie_points: usize, levels: &[f64]) -> Vec<Series> {
    let columns: Vec<&[ContourPoint]> = points.chunks(pie_points).collect();
    levels
        .iter()
        .map(|&level| {
            let mut line = Vec::new();
            for col in &columns {
                for w in col.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    let (Some(ma), mb) = (a.m_ub, b.m_ub.unwrap_or(f64::INFINITY)) else {
                        continue;
                    };
                    if ma <= level && level < mb {
                        let pie = if mb.is_finite() {
                            let t = (level.ln() - ma.ln()) / (mb.ln() - ma.ln());
                            a.pie + t * (b.pie - a.pie)
                        } else {
                            // 1/m_ub falls to zero at the capacity edge.
                            let edge = a.capacity_pie.min(b.pie);
                            a.pie + (1.0 - ma / level) * (edge - a.pie)
                        };
                        line.push((a.n_s, pie));
                        break;
                    }
                }
            }
            Series::new(format!("M_UB = {level:e}"), line)
        })
        .collect()
}

fn exponent(cfg: &RunConfig) -> Result<Report> {
    let grid = ContourGrid {
        n_s_min: cfg.ns_min,
        n_s_max: cfg.ns_max,
        n_s_points: cfg.ns_points,
        pie_min: cfg.pie_min,
        pie_max: cfg.pie_max,
        pie_points: cfg.pie_points,
    };
    let points = exponent_contours(&grid, cfg.epsilon)?;
    let rows = points
        .iter()
        .map(|p| {
            vec![
                p.n_s.into(),
                p.pie.into(),
                p.rate_bits.into(),
                p.e_lb.into(),
                Cell::Num(p.m_ub.unwrap_or(f64::INFINITY)),
                p.capacity_pie.into(),
            ]
        })
        .collect();

    let mut notes = Vec::new();
    let mut summary = Vec::new();
    for &pie in &cfg.pie {
        let gm = pixels_for_target(Probe::CoherentGm, pie, cfg.epsilon.min(0.5), 1.0);
        let w = pixels_for_target(Probe::WState, pie, cfg.epsilon.min(0.5), 1.0);
        let describe = |r: &std::result::Result<PixelRequirement, CoreError>| match r {
            Ok(r) => format!("M = 2^{}", r.log2_m),
            Err(_) => "infeasible".to_string(),
        };
        match min_pixels_for_pie(pie, cfg.epsilon) {
            Ok(b) => {
                notes.push(format!(
                    "PIE {pie} at epsilon {}: optimal joint receiver M_UB = {} (n_s = {:.5}, rate {:.3} of capacity); Green Machine {}; W state {}",
                    cfg.epsilon,
                    b.m_ub,
                    b.n_s,
                    b.rate_fraction_of_capacity,
                    describe(&gm),
                    describe(&w),
                ));
                summary.push(json!({
                    "pie": pie,
                    "epsilon": cfg.epsilon,
                    "m_ub": b.m_ub,
                    "m_ub_exact": b.m_ub_exact,
                    "n_s": b.n_s,
                    "rate_bits": b.rate_bits,
                    "e_lb": b.e_lb,
                    "rate_fraction_of_capacity": b.rate_fraction_of_capacity,
                    "green_machine": requirement_m(&gm),
                    "w_state": requirement_m(&w),
                }));
            }
            Err(CoreError::Infeasible(reason)) => {
                notes.push(format!("PIE {pie}: {reason}"));
                summary.push(json!({ "pie": pie, "epsilon": cfg.epsilon, "m_ub": null }));
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut series = contour_lines(&points, cfg.pie_points, &[1e2, 1e3, 1e4, 1e5, 1e6]);
    let mut edge: Vec<(f64, f64)> = Vec::new();
    for col in points.chunks(cfg.pie_points) {
        if col[0].capacity_pie <= cfg.pie_max {
            edge.push((col[0].n_s, col[0].capacity_pie));
        }
    }
    series.push(Series::new("capacity boundary", edge).dashed());
    let plot = Plot {
        title: format!("Pixel budget contours, epsilon = {}", cfg.epsilon),
        x_label: "mean photons per pixel n_s".into(),
        y_label: "PIE R/n_s (bits per photon)".into(),
        x_log: true,
        y_log: false,
        series,
    };

    let mut extra = serde_json::Map::new();
    extra.insert("summary".into(), Value::Array(summary));
    Ok(Report {
        columns: vec!["n_s", "pie", "rate_bits", "e_lb", "m_ub", "capacity_pie"],
        rows,
        notes,
        extra,
        plot: Some(plot),
        ..Default::default()
    })
}

fn budget(cfg: &RunConfig) -> Result<Report> {
    let probes = parse_probes(&cfg.schemes)?;
    if !(cfg.epsilon < 1.0) {
        return Err(CliError::Usage("budget needs --epsilon below 1".into()));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &kappa in &cfg.kappa {
        for &pie in &cfg.pie {
            let mut cases: Vec<(&str, std::result::Result<PixelRequirement, CoreError>)> = Vec::new();
            if probes.contains(&Probe::CoherentGm) {
                cases.push(("COHERENT_GM", pixels_for_target(Probe::CoherentGm, pie, cfg.epsilon, kappa)));
            }
            if probes.contains(&Probe::WState) {
                cases.push(("W_STATE", pixels_for_target(Probe::WState, pie, cfg.epsilon, kappa)));
                cases.push(("W_STATE_SINGLE_SHOT", wstate_single_shot_budget(pie, cfg.epsilon, kappa)));
            }
            for (name, res) in cases {
                let head: Vec<Cell> = vec![name.into(), kappa.into(), pie.into(), cfg.epsilon.into()];
                let tail: Vec<Cell> = match res {
                    Ok(r) => vec![
                        true.into(),
                        r.m.into(),
                        u64::from(r.log2_m).into(),
                        r.k_copies.into(),
                        r.n_s.into(),
                        r.word_error.into(),
                        r.pie_bits_per_photon.into(),
                        match r.photon_basis {
                            PhotonBasis::Transmitted => "transmitted",
                            PhotonBasis::Detected => "detected",
                        }
                        .into(),
                        Cell::Null,
                    ],
                    Err(CoreError::Infeasible(reason)) => {
                        let mut t = vec![false.into()];
                        t.extend(std::iter::repeat_n(Cell::Null, 7));
                        t.push(Cell::Text(reason));
                        t
                    }
                    Err(e) => {
                        failures.push(format!("{name} kappa = {kappa} pie = {pie}: {e}"));
                        continue;
                    }
                };
                rows.push(head.into_iter().chain(tail).collect());
            }
        }
    }
    Ok(Report {
        columns: vec![
            "scheme",
            "kappa",
            "pie_target",
            "epsilon",
            "feasible",
            "m",
            "log2_m",
            "k_copies",
            "n_s",
            "word_error",
            "pie_bits_per_photon",
            "photon_basis",
            "reason",
        ],
        rows,
        failures,
        ..Default::default()
    })
}
