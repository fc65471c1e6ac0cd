//! Config-driven experiment runners.

pub mod config;
pub mod report;

use std::time::Instant;

use rayon::prelude::*;

use crate::counterexamples::{
    default_spacing, paper_window, phi_grid, phi_n, psi_grid, psi_n, DataFamily, SHIFT,
};
use crate::error::{Error, Result};
use crate::functionals::{
    dissipative_global_norm, dissipative_pointwise_bound, local_kato_norm, sharp_trace_norm_with, tail_decomposition,
    whole_time_point_norm, windowed_data_energy, windowed_evolved_energy, QuadratureSpec,
};
use crate::propagator::{Evolution, DISSIPATION_FLOOR};
use crate::spectral::{
    bridge, evaluate_with_backend, Backend, FilonGuard, FrequencyGrid, PhaseBudget, SmoothWindow, SpectralFunction,
    UniformNodes,
};
use crate::symbols::{DispersiveSymbol, PolynomialSymbol, Symbol};

pub use config::{ExperimentConfig, ExperimentKind, SymbolSpec, Thresholds};
pub use report::{Check, Report, Row, Verdict};

/// Settings that come from the command line rather than the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Fill the `runtime_ms` column.
    pub timing: bool,
}

/// Largest number of frequency nodes the trapezoid path may use for `B_n`
/// before the Filon backend takes over.
const MAX_TRAPEZOID_NODES: f64 = (1u64 << 22) as f64;

/// Frequency spacing of the data grids in the whole-time runs.
const DISPERSIVE_SPACING: f64 = 0.01;

pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    cfg.validate(kind)?;
    match kind {
        ExperimentKind::Thm1 => run_thm1(cfg, opts),
        ExperimentKind::Thm2 => run_thm2(cfg, opts),
        ExperimentKind::Baseline => run_baseline(cfg, opts),
        ExperimentKind::Trace => run_trace(cfg, opts),
        ExperimentKind::Y1 => run_y1(cfg, opts),
        ExperimentKind::ValidateSymbol => validate_symbol(cfg),
        ExperimentKind::Evolve => Err(Error::Config("evolve produces a field dump; use run_evolve".into())),
    }
}

fn elapsed_ms(start: Instant, opts: &RunOptions) -> Option<u64> {
    opts.timing.then(|| start.elapsed().as_millis() as u64)
}

fn sweep_times(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.t_sweep.is_empty() {
        vec![cfg.t]
    } else {
        cfg.t_sweep.clone()
    }
}

/// Run `point` for every `n` in parallel. Resolution failures truncate the
/// schedule (reported in `notes`); any other error aborts.
fn schedule<T: Send>(
    ns: &[u32],
    notes: &mut Vec<String>,
    point: impl Fn(u32) -> Result<T> + Sync,
) -> Result<(Vec<(u32, T)>, bool)> {
    let results: Vec<(u32, Result<T>)> = ns.par_iter().map(|&n| (n, point(n))).collect();
    let mut out = Vec::new();
    let mut truncated = false;
    let mut first_resolution = None;
    for (n, r) in results {
        match r {
            Ok(v) => out.push((n, v)),
            Err(e @ Error::Resolution { .. }) => {
                notes.push(format!("n={n} dropped: {e}"));
                truncated = true;
                first_resolution.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        if let Some(e) = first_resolution {
            return Err(e);
        }
    }
    Ok((out, truncated))
}

fn combine_sweep(verdicts: &[Verdict], report: &mut Report) {
    let v = if verdicts.windows(2).all(|w| w[0] == w[1]) {
        verdicts[0]
    } else {
        report.notes.push("verdict changes across the T sweep".into());
        Verdict::Inconclusive
    };
    report.verdict = Some(v);
}

fn ratio_last_first(v: &[f64]) -> f64 {
    v[v.len() - 1] / v[0]
}

fn polynomial_symbol(cfg: &ExperimentConfig, what: &str) -> Result<PolynomialSymbol> {
    match cfg.symbol.resolve()? {
        Symbol::Polynomial(p) => {
            p.classify()?;
            Ok(p)
        }
        Symbol::Dispersive(_) => Err(Error::Config(format!("{what} needs a polynomial symbol"))),
    }
}

fn dispersive_symbol(cfg: &ExperimentConfig, what: &str) -> Result<DispersiveSymbol> {
    match cfg.symbol.resolve()? {
        Symbol::Dispersive(d) => Ok(d.with_threshold(cfg.big_n)),
        Symbol::Polynomial(_) => Err(Error::Config(format!("{what} needs a dispersive symbol"))),
    }
}

// ---------------------------------------------------------------- thm1

/// Frequency spacing and backend for `B_n`: the trapezoid grid that meets
/// the phase budget if it is small enough, else the Filon grid that meets
/// the guard.
pub fn evolved_resolution(
    sym: &PolynomialSymbol,
    n: u32,
    t: f64,
    w: &SmoothWindow,
    spacing: f64,
    backend: Backend,
    guard: FilonGuard,
) -> (f64, Backend) {
    let mut edge = n as f64 + 1.0;
    if sym.classify().is_ok_and(|c| c.is_dissipative()) {
        let floor = DISSIPATION_FLOOR.ln();
        let mut xi = 0.0;
        while xi < edge && sym.re_q(xi) * t >= floor {
            xi += 0.01;
        }
        edge = xi + 0.01;
    }
    let (lo, hi) = w.support();
    let samples = 4000;
    let d = 1e-4 * edge;
    let (mut rate, mut curv) = (0.0f64, 0.0f64);
    for j in 0..=samples {
        let xi = edge * j as f64 / samples as f64;
        let s = SHIFT + sym.im_q_prime(xi) * t;
        rate = rate.max((s + lo).abs()).max((s + hi).abs());
        let c = (sym.im_q_prime(xi + d) - sym.im_q_prime((xi - d).max(0.0))) / (xi + d - (xi - d).max(0.0)) * t;
        curv = curv.max(c.abs());
    }
    let trap = PhaseBudget::default().max_spacing(rate).min(spacing);
    let filon = (0.9 * (2.0 * guard.max_residual / curv.max(f64::MIN_POSITIVE)).sqrt()).min(spacing);
    match backend {
        Backend::Filon => (filon, Backend::Filon),
        Backend::OversampledFft => (trap, Backend::OversampledFft),
        Backend::Auto if 2.0 * edge / trap <= MAX_TRAPEZOID_NODES => (trap, Backend::OversampledFft),
        Backend::Auto => (filon, Backend::Filon),
    }
}

/// One member of the data family together with the pointwise check of
/// dissipative flows.
pub struct Thm1Point {
    pub row: Row,
    /// `(max |Lambda^eps u(x, T)|, bound)` on the window.
    pub pointwise: Option<(f64, f64)>,
}

pub fn thm1_point(sym: &PolynomialSymbol, n: u32, t: f64, cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Thm1Point> {
    let start = Instant::now();
    let eps = cfg.epsilon;
    let q = cfg.quadrature();
    let backend = cfg.backend()?;
    let guard = FilonGuard::default();
    let spacing = cfg.quadrature.spacing.unwrap_or_else(default_spacing);
    let w = paper_window();
    let phi = phi_n(n, phi_grid(n, spacing)?)?;
    let a = windowed_data_energy(&phi, &w, eps, q.x_step, backend)?;
    let (h, be) = evolved_resolution(sym, n, t, &w, spacing, backend, guard);
    let phi_b = if h < spacing { phi_n(n, phi_grid(n, h)?)? } else { phi.clone() };
    let ev = Evolution::new(sym.clone(), phi_b.clone())?;
    let b = windowed_evolved_energy(&ev, t, &w, eps, q.x_step, be, guard)?;
    let pointwise = if sym.classify()?.is_dissipative() {
        let ev_eps = Evolution::new(sym.clone(), phi_b.bessel_potential(eps))?;
        let s = ev_eps.solution_on_window(t, &w, q.x_step, be, PhaseBudget::default(), guard)?;
        let max = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Some((max, dissipative_pointwise_bound(sym, eps, t, phi_b.l2_norm())?))
    } else {
        None
    };
    let backend_name = if a.backend == b.backend {
        b.backend.name().to_string()
    } else {
        format!("{}+{}", a.backend.name(), b.backend.name())
    };
    Ok(Thm1Point {
        row: Row {
            experiment: "thm1".into(),
            symbol: sym.label(),
            n,
            eps,
            t,
            r: cfg.r,
            norm_data: Some(phi.l2_norm()),
            norm_eps_data: Some(phi.sobolev_norm(eps)),
            a_n: Some(a.value),
            b_n: Some(b.value),
            backend: backend_name,
            guard_margin: Some(1.0 - a.guard_usage.max(b.guard_usage)),
            runtime_ms: elapsed_ms(start, opts),
            ..Row::default()
        },
        pointwise,
    })
}

pub fn thm1_verdict(rows: &[Row], eps: f64, th: &Thresholds, truncated: bool, notes: &mut Vec<String>) -> Verdict {
    let a: Vec<f64> = rows.iter().filter_map(|r| r.a_n).collect();
    let b: Vec<f64> = rows.iter().filter_map(|r| r.b_n).collect();
    let norms: Vec<f64> = rows.iter().filter_map(|r| r.norm_data).collect();
    if a.len() < 2 {
        notes.push("schedule too short for a verdict".into());
        return Verdict::Inconclusive;
    }
    let norm_ok = ratio_last_first(&norms) <= th.norm_ratio;
    let a_growing = report::strictly_increasing(&a, 0.0) && ratio_last_first(&a) >= th.growth_factor;
    let a_bounded = ratio_last_first(&a) < th.growth_factor && report::bounded_by_median(&a, th.bounded_ratio);
    let b_bounded = report::bounded_by_median(&b, th.bounded_ratio) && !report::growing_tail(&b, th.growth_tol);
    notes.push(format!(
        "T={}: ||phi_n|| last/first = {:.4}, A_n last/first = {:.4} (strictly increasing: {}), B_n max/median = {:.4}",
        rows[0].t,
        ratio_last_first(&norms),
        ratio_last_first(&a),
        report::strictly_increasing(&a, 0.0),
        b.iter().copied().fold(0.0, f64::max) / report::median(&b)
    ));
    if truncated || !norm_ok || !b_bounded {
        return Verdict::Inconclusive;
    }
    if eps == 0.0 {
        return if a_bounded { Verdict::NoDivergence } else { Verdict::Inconclusive };
    }
    if a_growing {
        Verdict::Confirmed
    } else if a_bounded {
        Verdict::NoDivergence
    } else {
        Verdict::Inconclusive
    }
}

fn run_thm1(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    let sym = polynomial_symbol(cfg, "thm1")?;
    let mut report = Report::new(ExperimentKind::Thm1);
    let mut verdicts = Vec::new();
    for t in sweep_times(cfg) {
        let (points, truncated) = schedule(&cfg.n_schedule, &mut report.notes, |n| thm1_point(&sym, n, t, cfg, opts))?;
        let rows: Vec<Row> = points.iter().map(|(_, p)| p.row.clone()).collect();
        let mut pointwise_ok = true;
        for (n, p) in &points {
            if let Some((max, bound)) = p.pointwise {
                let pass = max <= bound;
                pointwise_ok &= pass;
                report.checks.push(Check { name: format!("pointwise_bound(T={t})"), n: *n, value: max, limit: bound, pass });
            }
        }
        let mut v = thm1_verdict(&rows, cfg.epsilon, &cfg.thresholds, truncated, &mut report.notes);
        if !pointwise_ok {
            v = Verdict::Inconclusive;
        }
        let ns: Vec<u32> = rows.iter().map(|r| r.n).collect();
        let a: Vec<f64> = rows.iter().filter_map(|r| r.a_n).collect();
        report.log_slope = report::log_slope(&ns, &a, cfg.epsilon);
        verdicts.push(v);
        report.rows.extend(rows);
    }
    combine_sweep(&verdicts, &mut report);
    Ok(report)
}

// ---------------------------------------------------------------- thm2

pub struct Thm2Point {
    pub row: Row,
    /// `(tail estimate, tail fraction, I_quad)` when `J_n` was synthesized.
    pub tail: Option<(f64, f64, f64)>,
}

pub fn thm2_point(sym: &DispersiveSymbol, n: u32, t: f64, cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Thm2Point> {
    let start = Instant::now();
    let eps = cfg.epsilon;
    let spacing = cfg.quadrature.spacing.unwrap_or(DISPERSIVE_SPACING);
    let psi = psi_n(n, cfg.big_n, psi_grid(n, cfg.big_n, spacing)?)?;
    let sigma = eps + sym.gain_exponent();
    let mut row = Row {
        experiment: "thm2".into(),
        symbol: sym.label(),
        n,
        eps,
        t,
        r: cfg.r,
        norm_data: Some(psi.l2_norm()),
        norm_eps_data: Some(psi.sobolev_norm(eps)),
        ..Row::default()
    };
    let mut tail = None;
    if n <= cfg.j_max_n {
        let q = QuadratureSpec { t, ..cfg.quadrature() };
        let d = tail_decomposition(sym, &psi, sigma, &q)?;
        row.i_n = Some(d.i_n);
        row.finite_window = Some(d.finite_window);
        row.j_n = Some(d.j_n);
        row.backend = "time_fft".into();
        row.guard_margin = Some(1.0 - d.tail_fraction() / cfg.thresholds.tail_fraction);
        tail = Some((d.tail_estimate, d.tail_fraction(), d.i_quad));
    } else {
        row.i_n = Some(2.0 * cfg.r * whole_time_point_norm(sym, &psi, sigma)?);
        row.backend = "frequency_exact".into();
    }
    row.runtime_ms = elapsed_ms(start, opts);
    Ok(Thm2Point { row, tail })
}

fn run_thm2(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    let sym = dispersive_symbol(cfg, "thm2")?;
    let top = *cfg.n_schedule.last().unwrap() as f64 + cfg.big_n + 2.0;
    let probe = FrequencyGrid::new(-top, top, 20_001)?;
    sym.validate(&probe)?;
    let th = cfg.thresholds;
    let mut report = Report::new(ExperimentKind::Thm2);
    let mut verdicts = Vec::new();
    for t in sweep_times(cfg) {
        let (points, truncated) = schedule(&cfg.n_schedule, &mut report.notes, |n| thm2_point(&sym, n, t, cfg, opts))?;
        let mut checks_ok = true;
        for (n, p) in &points {
            if let Some((_, frac, i_quad)) = p.tail {
                let i_n = p.row.i_n.unwrap();
                let j_n = p.row.j_n.unwrap();
                let tol = cfg.quadrature().time_tol * i_n;
                let cs = [
                    Check { name: format!("tail_fraction(T={t})"), n: *n, value: frac, limit: th.tail_fraction, pass: frac < th.tail_fraction },
                    Check { name: format!("J_nonnegative(T={t})"), n: *n, value: j_n, limit: -tol, pass: j_n >= -tol },
                    Check {
                        name: format!("I_quad_vs_I(T={t})"),
                        n: *n,
                        value: (i_quad - i_n).abs() / i_n,
                        limit: cfg.quadrature().time_tol,
                        pass: (i_quad - i_n).abs() <= cfg.quadrature().time_tol * i_n,
                    },
                ];
                checks_ok &= cs.iter().all(|c| c.pass);
                report.checks.extend(cs);
            }
        }
        let rows: Vec<Row> = points.into_iter().map(|(_, p)| p.row).collect();
        let i: Vec<f64> = rows.iter().filter_map(|r| r.i_n).collect();
        let j: Vec<f64> = rows.iter().filter_map(|r| r.j_n).collect();
        let ns: Vec<u32> = rows.iter().map(|r| r.n).collect();
        report.log_slope = report::log_slope(&ns, &i, cfg.epsilon);
        let v = if i.len() < 2 || j.is_empty() {
            report.notes.push("schedule too short for a verdict".into());
            Verdict::Inconclusive
        } else {
            let i_growing = report::strictly_increasing(&i, 0.0) && ratio_last_first(&i) >= th.growth_factor;
            let i_bounded = ratio_last_first(&i) < th.growth_factor && report::bounded_by_median(&i, th.bounded_ratio);
            let j_bounded = report::bounded_by_median(&j, th.bounded_ratio);
            report.notes.push(format!(
                "T={t}: I_n last/first = {:.4} (strictly increasing: {}), J_n max/median = {:.4}",
                ratio_last_first(&i),
                report::strictly_increasing(&i, 0.0),
                j.iter().copied().fold(0.0, f64::max) / report::median(&j)
            ));
            if truncated || !checks_ok || !j_bounded {
                Verdict::Inconclusive
            } else if cfg.epsilon == 0.0 {
                if i_bounded { Verdict::NoDivergence } else { Verdict::Inconclusive }
            } else if i_growing {
                Verdict::Confirmed
            } else if i_bounded {
                Verdict::NoDivergence
            } else {
                Verdict::Inconclusive
            }
        };
        verdicts.push(v);
        report.rows.extend(rows);
    }
    combine_sweep(&verdicts, &mut report);
    Ok(report)
}

// ---------------------------------------------------------------- baselines

fn random_data(cfg: &ExperimentConfig, i: usize) -> Result<(u64, SpectralFunction)> {
    let seed = cfg.seed.wrapping_add(i as u64);
    let fam = DataFamily::RandomBandlimited { seed, band: cfg.band };
    let spacing = cfg.quadrature.spacing.unwrap_or(DISPERSIVE_SPACING);
    Ok((seed, fam.build(fam.grid(spacing, 0.0)?, 0.0)?))
}

fn spread_note(report: &mut Report, what: &str, ratios: &[f64], th: &Thresholds) -> bool {
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    report.notes.push(format!("{what}: max ratio = {max:.6e}, spread max/min = {spread:.4}"));
    report.checks.push(Check { name: format!("{what}_spread"), n: 0, value: spread, limit: th.spread, pass: spread <= th.spread });
    spread <= th.spread
}

fn run_baseline(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    let symbol = cfg.symbol.resolve()?;
    if let Symbol::Polynomial(p) = &symbol {
        p.classify()?;
    }
    let q = cfg.quadrature();
    let gain = symbol.gain_exponent();
    let sigma = cfg.s + gain;
    let mut report = Report::new(ExperimentKind::Baseline);
    let random: Vec<Result<Row>> = (0..cfg.seeds)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let (seed, f) = random_data(cfg, i)?;
            let data_norm = f.sobolev_norm(cfg.s);
            let value = local_kato_norm(&Evolution::new(symbol.clone(), f.clone())?, sigma, &q)?;
            Ok(Row {
                experiment: format!("baseline/random_bandlimited({seed}, {})", cfg.band),
                symbol: symbol.label(),
                n: i as u32,
                eps: 0.0,
                t: cfg.t,
                r: cfg.r,
                norm_data: Some(f.l2_norm()),
                norm_eps_data: Some(data_norm),
                i_n: Some(value),
                j_n: Some(value / (data_norm * data_norm)),
                backend: Backend::Auto.name().into(),
                runtime_ms: elapsed_ms(start, opts),
                ..Row::default()
            })
        })
        .collect();
    let random: Vec<Row> = random.into_iter().collect::<Result<_>>()?;
    let ratios: Vec<f64> = random.iter().filter_map(|r| r.j_n).collect();
    let ok = ratios.is_empty() || spread_note(&mut report, "random", &ratios, &cfg.thresholds);

    // the counterexample family at the gain plus epsilon, for comparison
    let adversarial: Vec<Result<Row>> = cfg
        .n_schedule
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let spacing = cfg.quadrature.spacing.unwrap_or_else(default_spacing);
            let (sym, f) = match &symbol {
                Symbol::Polynomial(_) => (symbol.clone(), phi_n(n, phi_grid(n, spacing)?)?),
                Symbol::Dispersive(d) => {
                    (Symbol::from(d.clone().with_threshold(cfg.big_n)), psi_n(n, cfg.big_n, psi_grid(n, cfg.big_n, spacing)?)?)
                }
            };
            let data_norm = f.sobolev_norm(cfg.s);
            let value = local_kato_norm(&Evolution::new(sym, f.clone())?, sigma + cfg.epsilon, &q)?;
            Ok(Row {
                experiment: "baseline/counterexample".into(),
                symbol: symbol.label(),
                n,
                eps: cfg.epsilon,
                t: cfg.t,
                r: cfg.r,
                norm_data: Some(f.l2_norm()),
                norm_eps_data: Some(data_norm),
                i_n: Some(value),
                j_n: Some(value / (data_norm * data_norm)),
                backend: Backend::Auto.name().into(),
                runtime_ms: elapsed_ms(start, opts),
                ..Row::default()
            })
        })
        .collect();
    let adversarial: Vec<Row> = adversarial.into_iter().collect::<Result<_>>()?;
    if !adversarial.is_empty() {
        let r: Vec<f64> = adversarial.iter().filter_map(|r| r.j_n).collect();
        report.notes.push(format!(
            "counterexample family at sigma = s + gain + eps: ratio last/first = {:.4}",
            ratio_last_first(&r)
        ));
    }
    report.rows.extend(random);
    report.rows.extend(adversarial);
    report.verdict = Some(if ok { Verdict::NoDivergence } else { Verdict::Inconclusive });
    Ok(report)
}

/// Default `x` values of trace certificates.
fn certificate_xs(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.x_samples.is_empty() {
        [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|x| x * cfg.r).collect()
    } else {
        cfg.x_samples.clone()
    }
}

/// Multiply by a smooth taper vanishing on `xi <= N` and equal to 1 on `xi >= N + 1`.
pub fn one_sided(f: &SpectralFunction, big_n: f64) -> SpectralFunction {
    f.map_amplitude(|xi, a| a * bridge(big_n + 1.0 - xi), false)
}

fn run_trace(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    let symbol = cfg.symbol.resolve()?;
    let order = cfg.order.unwrap_or(symbol.gain_exponent());
    let q = cfg.quadrature();
    let xs = certificate_xs(cfg);
    let spacing = cfg.quadrature.spacing.unwrap_or(DISPERSIVE_SPACING);
    let mut data: Vec<(String, SpectralFunction)> = Vec::new();
    let families = if cfg.data.is_empty() { vec![DataFamily::Bump { center: 3.0, width: 0.3 }] } else { cfg.data_families()? };
    for fam in families {
        data.push((fam.to_string(), fam.build(fam.grid(spacing, cfg.big_n)?, cfg.big_n)?));
    }
    for i in 0..cfg.seeds {
        let (seed, f) = random_data(cfg, i)?;
        data.push((format!("random_bandlimited({seed}, {})", cfg.band), f));
    }
    let results: Vec<Result<(Row, f64, usize)>> = data
        .par_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let start = Instant::now();
            let f = if cfg.one_sided { one_sided(f, cfg.big_n) } else { f.clone() };
            let ev = Evolution::new(symbol.clone(), f.clone())?;
            let tr = sharp_trace_norm_with(&ev, order, cfg.trace_multiplier, &xs, &q)?;
            let norm_sq = f.l2_norm_sq();
            Ok((
                Row {
                    experiment: format!("trace/{name}"),
                    symbol: symbol.label(),
                    n: i as u32,
                    eps: 0.0,
                    t: cfg.t,
                    r: cfg.r,
                    norm_data: Some(norm_sq.sqrt()),
                    i_n: Some(tr.value),
                    j_n: Some(tr.value / norm_sq),
                    backend: if tr.time_domain.is_empty() { "frequency_exact".into() } else { "time_fft".into() },
                    guard_margin: (!tr.time_domain.is_empty()).then(|| 1.0 - tr.max_deviation / q.time_tol),
                    runtime_ms: elapsed_ms(start, opts),
                    ..Row::default()
                },
                tr.max_deviation,
                tr.time_domain.len(),
            ))
        })
        .collect();
    let mut report = Report::new(ExperimentKind::Trace);
    let mut ok = true;
    for r in results {
        let (row, dev, certified) = r?;
        if certified > 0 {
            let pass = dev <= q.time_tol;
            ok &= pass;
            report.checks.push(Check { name: "trace_x_independence".into(), n: row.n, value: dev, limit: q.time_tol, pass });
        }
        report.rows.push(row);
    }
    let ratios: Vec<f64> = report.rows.iter().filter_map(|r| r.j_n).collect();
    report.notes.push(format!("order {order} trace constant over {} data", ratios.len()));
    ok &= spread_note(&mut report, "trace", &ratios, &cfg.thresholds);
    report.verdict = Some(if ok { Verdict::NoDivergence } else { Verdict::Inconclusive });
    Ok(report)
}

/// Time steps of the trapezoid cross-check of the global dissipative norm.
const Y1_TIME_STEPS: usize = 2000;

fn run_y1(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    let sym = polynomial_symbol(cfg, "y1")?;
    let m = sym
        .dissipative_order()
        .ok_or_else(|| Error::Orientation("y1 needs a dissipative symbol".into()))? as f64;
    let steps = cfg.quadrature.t_step.map_or(Y1_TIME_STEPS, |dt| (cfg.t / dt).ceil() as usize);
    let results: Vec<Result<(Row, f64)>> = (0..cfg.seeds)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let (seed, f) = random_data(cfg, i)?;
            let exact = dissipative_global_norm(&sym, &f, cfg.s, cfg.t)?;
            let ev = Evolution::new(sym.clone(), f.clone())?;
            let h = cfg.t / steps as f64;
            let mut quad = 0.0;
            for k in 0..=steps {
                let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                quad += w * ev.evolve(k as f64 * h)?.sobolev_norm(cfg.s + m).powi(2);
            }
            quad *= h;
            let data_norm = f.sobolev_norm(cfg.s);
            Ok((
                Row {
                    experiment: format!("y1/random_bandlimited({seed}, {})", cfg.band),
                    symbol: sym.label(),
                    n: i as u32,
                    eps: 0.0,
                    t: cfg.t,
                    r: cfg.r,
                    norm_data: Some(f.l2_norm()),
                    norm_eps_data: Some(data_norm),
                    i_n: Some(exact),
                    j_n: Some(exact / (data_norm * data_norm)),
                    backend: "frequency_exact".into(),
                    runtime_ms: elapsed_ms(start, opts),
                    ..Row::default()
                },
                quad,
            ))
        })
        .collect();
    let mut report = Report::new(ExperimentKind::Y1);
    let tol = 0.01;
    let mut ok = true;
    for r in results {
        let (row, quad) = r?;
        let exact = row.i_n.unwrap();
        let rel = (quad - exact).abs() / exact;
        ok &= rel <= tol;
        report.checks.push(Check { name: "exact_vs_time_quadrature".into(), n: row.n, value: rel, limit: tol, pass: rel <= tol });
        report.rows.push(row);
    }
    let ratios: Vec<f64> = report.rows.iter().filter_map(|r| r.j_n).collect();
    ok &= spread_note(&mut report, "y1", &ratios, &cfg.thresholds);
    report.verdict = Some(if ok { Verdict::NoDivergence } else { Verdict::Inconclusive });
    Ok(report)
}

fn validate_symbol(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(ExperimentKind::ValidateSymbol);
    match cfg.symbol.resolve()? {
        Symbol::Polynomial(p) => {
            let c = p.classify()?;
            report.notes.push(format!("{}: {c}", p.label()));
            report.notes.push(format!("gain exponent {}", p.gain_exponent()));
        }
        Symbol::Dispersive(d) => {
            let d = d.with_threshold(cfg.big_n);
            let top = cfg.n_schedule.last().map_or(1000.0, |&n| n as f64 + cfg.big_n + 2.0);
            let v = d.validate(&FrequencyGrid::new(-top, top, 20_001)?)?;
            report.notes.push(format!("{}: valid on [-{top}, {top}] with N = {}", d.label(), cfg.big_n));
            report.notes.push(format!(
                "min upper margin {:.6e}, min lower margin {:.6e}, gain exponent {}",
                v.min_upper_margin,
                v.min_lower_margin,
                d.gain_exponent()
            ));
        }
    }
    Ok(report)
}

/// Field dump of `u(x, T)` over `cfg.window`: CSV with columns `x,t,re,im,abs`.
pub fn run_evolve(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    cfg.validate(ExperimentKind::Evolve)?;
    let symbol = cfg.symbol.resolve()?;
    let fam = cfg.data_families()?.into_iter().next().unwrap_or(DataFamily::Gaussian(1.5));
    let spacing = cfg.quadrature.spacing.unwrap_or(DISPERSIVE_SPACING);
    let f = fam.build(fam.grid(spacing, cfg.big_n)?, cfg.big_n)?;
    let u = Evolution::new(symbol, f)?.evolve(cfg.t)?;
    let nodes = UniformNodes::covering(cfg.window[0], cfg.window[1], cfg.quadrature().x_step);
    let s = evaluate_with_backend(&u, nodes, cfg.backend()?, PhaseBudget::default(), FilonGuard::default())?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["x", "t", "re", "im", "abs"])?;
    for (j, v) in s.values.iter().enumerate() {
        wtr.serialize((nodes.node(j), cfg.t, v.re, v.im, v.norm()))?;
    }
    wtr.flush()?;
    wtr.into_inner().map_err(|e| e.into_error().into())
}
