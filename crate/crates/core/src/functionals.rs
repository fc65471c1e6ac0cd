//! Smoothing functionals: local Kato norms, windowed energies, whole-time
//! point norms and their time tails, sharp trace norms, the global
//! dissipative norm and the dissipative pointwise bound.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::propagator::{Evolution, Orientation, TimeSynthesizer};
use crate::spectral::quad::gauss_legendre_on;
use crate::spectral::{
    evaluate_with_backend, windowed_energy_with, Backend, FilonGuard, PhaseBudget, SmoothWindow, SpectralFunction,
    UniformNodes, WindowedEnergy,
};
use crate::symbols::{DispersiveSymbol, PolynomialSymbol, Symbol};

const INV_TWO_PI: f64 = 0.5 * std::f64::consts::FRAC_1_PI;

/// Discretization parameters of the space-time functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub x_step: f64,
    /// Upper bound on the time step; the Nyquist bound may force a smaller one.
    pub t_step: f64,
    /// Half-width `T` of the time window.
    pub t: f64,
    /// Truncation of whole-line time integrals.
    pub t_max: f64,
    /// Spatial half-width `R`.
    pub r: f64,
    /// Gauss-Legendre nodes in `x` for whole-time functionals.
    pub x_nodes: usize,
    /// Relative tolerance of frequency-side quadratures.
    pub rel_tol: f64,
    /// Relative tolerance of time-domain cross-checks.
    pub time_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            x_step: 0.05,
            t_step: 0.01,
            t: 1.0,
            t_max: 200.0,
            r: 1.0,
            x_nodes: 12,
            rel_tol: 1e-3,
            time_tol: 0.02,
        }
    }
}

/// One row of a sharpness experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SharpnessReport {
    pub n: u32,
    pub norm_data: f64,
    pub norm_eps_data: f64,
    pub a_n: Option<f64>,
    pub b_n: Option<f64>,
    pub i_n: Option<f64>,
    pub i_n_quad: Option<f64>,
    pub finite_window: Option<f64>,
    pub j_n: Option<f64>,
    pub backend: String,
    pub guard_margin: f64,
}

/// `int int_{|x| <= R} |Lambda^sigma u(x, t)|^2 dx dt` by tensor trapezoid over
/// `t in [0, T]` (dissipative flows) or `[-T, T]`. The steps of `q` are
/// refined to the bandwidth of the data when needed.
pub fn local_kato_norm(ev: &Evolution, sigma: f64, q: &QuadratureSpec) -> Result<f64> {
    let f = ev.initial();
    let Some((lo, hi)) = f.support() else {
        return Ok(0.0);
    };
    let t_lo = match ev.orientation() {
        Orientation::Forward => 0.0,
        Orientation::AllTime => -q.t,
    };
    // |u|^2 oscillates in t at most at the spread of the phase and in x at
    // most at the width of the support
    let (a, b) = f.support_indices().unwrap();
    let (pmin, pmax) = (a..=b)
        .map(|k| phase_of(ev.symbol(), f.grid().node(k)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p), h.max(p)));
    let t_step = q.t_step.min(std::f64::consts::PI / (pmax - pmin).max(f64::MIN_POSITIVE));
    let x_step = q.x_step.min(std::f64::consts::PI / (hi - lo).max(f64::MIN_POSITIVE));
    let times = UniformNodes::covering(t_lo, q.t, t_step);
    let xs = UniformNodes::covering(-q.r, q.r, x_step);
    let mut total = 0.0;
    for j in 0..times.count {
        let u = ev.evolve(times.node(j))?.bessel_potential(sigma);
        let s = evaluate_with_backend(&u, xs, Backend::Auto, PhaseBudget::default(), FilonGuard::default())?;
        let e = trapezoid(&s.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), xs.dx);
        let edge = if j == 0 || j + 1 == times.count { 0.5 } else { 1.0 };
        total += edge * e;
    }
    Ok(total * times.dx)
}

fn trapezoid(v: &[f64], h: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1])) * h,
    }
}

/// `A = int w |Lambda^eps phi|^2 dx`.
pub fn windowed_data_energy(
    data: &SpectralFunction,
    w: &SmoothWindow,
    epsilon: f64,
    x_step: f64,
    backend: Backend,
) -> Result<WindowedEnergy> {
    windowed_energy_with(data, w, epsilon, x_step, backend, PhaseBudget::default(), FilonGuard::default())
}

/// `B = int w |Lambda^eps u(., T)|^2 dx`.
pub fn windowed_evolved_energy(
    ev: &Evolution,
    t: f64,
    w: &SmoothWindow,
    epsilon: f64,
    x_step: f64,
    backend: Backend,
    guard: FilonGuard,
) -> Result<WindowedEnergy> {
    windowed_energy_with(&ev.evolve(t)?, w, epsilon, x_step, backend, PhaseBudget::default(), guard)
}

/// Where `exp(2 Re Q T)` drops below this the integrand is dropped.
const BOUND_FLOOR: f64 = 1e-18;

/// `(1/sqrt(2pi)) (int exp(2 Re Q(i xi) T) (1 + xi^2)^eps dxi)^(1/2) ||phi||`:
/// the Cauchy-Schwarz bound on `|Lambda^eps u(x, T)|` in our normalization
/// (`||phi^||_{L^2(dxi)} = sqrt(2pi) ||phi||`).
pub fn dissipative_pointwise_bound(sym: &PolynomialSymbol, epsilon: f64, t: f64, l2_of_data: f64) -> Result<f64> {
    if !sym.classify()?.is_dissipative() {
        return Err(Error::Orientation(
            "pointwise bound is vacuous for purely dispersive symbols (Re Q = 0)".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::Orientation(format!("pointwise bound needs T > 0, got {t}")));
    }
    let integrand = |xi: f64| (2.0 * sym.re_q(xi) * t).exp() * (1.0 + xi * xi).powf(epsilon);
    let cut = dissipation_cutoff(sym, t);
    let integral = 2.0 * composite_gauss(integrand, 0.0, cut, 0.25);
    Ok(INV_TWO_PI.sqrt() * integral.sqrt() * l2_of_data)
}

/// Smallest `c` such that `exp(2 Re Q T) < BOUND_FLOOR` on `[c, 4c]` (sampled).
fn dissipation_cutoff(sym: &PolynomialSymbol, t: f64) -> f64 {
    let log_floor = BOUND_FLOOR.ln();
    let below = |xi: f64| 2.0 * sym.re_q(xi) * t < log_floor;
    let mut c = 0.01;
    loop {
        if below(c) && (1..=64).all(|k| below(c * (1.0 + 3.0 * k as f64 / 64.0))) {
            return c;
        }
        c *= 1.05;
    }
}

/// Composite 20-point Gauss-Legendre over panels of width at most `panel`.
fn composite_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panel: f64) -> f64 {
    let m = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / m as f64;
    (0..m)
        .map(|k| {
            gauss_legendre_on(20, a + k as f64 * h, a + (k + 1) as f64 * h)
                .into_iter()
                .map(|(x, w)| w * f(x))
                .sum::<f64>()
        })
        .sum()
}

fn check_dispersive_support(sym: &DispersiveSymbol, psi: &SpectralFunction) -> Result<()> {
    let Some((lo, hi)) = psi.support() else {
        return Ok(());
    };
    if lo < sym.n_threshold {
        return Err(Error::Domain(format!(
            "data support starts at {lo}, below N = {}",
            sym.n_threshold
        )));
    }
    let (a, b) = psi.support_indices().unwrap();
    for k in a..=b {
        let xi = psi.grid().node(k);
        if psi.amplitude()[k].norm_sqr() > 0.0 && !(sym.p_prime(xi) > 0.0) {
            return Err(Error::Division(format!("p' vanishes on the support at xi = {xi} (support [{lo}, {hi}])")));
        }
    }
    Ok(())
}

/// `(1/2pi) int (1 + xi^2)^sigma |psi^|^2 / p' dxi`, the exact value of
/// `int_R |Lambda^sigma v(x, t)|^2 dt` for every `x`.
pub fn whole_time_point_norm(sym: &DispersiveSymbol, psi: &SpectralFunction, sigma: f64) -> Result<f64> {
    check_dispersive_support(sym, psi)?;
    Ok(psi.weighted_energy(|xi| (1.0 + xi * xi).powf(sigma) / sym.p_prime(xi)))
}

/// Outcome of the tail decomposition `I_n = FiniteWindow_n + J_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailDecomposition {
    /// `2R * whole_time_point_norm`.
    pub i_n: f64,
    /// Time-domain `int_{-R}^{R} int_{-T}^{T}`.
    pub finite_window: f64,
    /// `I_n - FiniteWindow_n`.
    pub j_n: f64,
    /// Time-domain tail over `T < |t| < T_max`.
    pub j_direct: f64,
    /// Extrapolated energy beyond `T_max` under the `c / t^2` tail model.
    pub tail_estimate: f64,
    /// `FiniteWindow + J_direct + tail`.
    pub i_quad: f64,
    /// Per-node whole-time values `(x, int |F|^2 dt)` including the extrapolated tail.
    pub per_x: Vec<(f64, f64)>,
    /// Exact per-x value for comparison.
    pub point_norm: f64,
    pub dt: f64,
    pub tau_nodes: usize,
    pub fft_len: usize,
}

impl TailDecomposition {
    /// Extrapolated tail relative to `J_n`.
    pub fn tail_fraction(&self) -> f64 {
        self.tail_estimate / self.j_n.abs().max(f64::MIN_POSITIVE)
    }
}

/// Time step `T / K` with `K` minimal such that the step respects `t_step`
/// and the Nyquist bound `pi / tau_max`.
pub fn time_step_for(t: f64, t_step: f64, tau_max: f64) -> f64 {
    let dt_max = t_step.min(std::f64::consts::PI / tau_max);
    t / (t / dt_max).ceil()
}

pub fn tail_decomposition(
    sym: &DispersiveSymbol,
    psi: &SpectralFunction,
    sigma: f64,
    q: &QuadratureSpec,
) -> Result<TailDecomposition> {
    if !(q.t < q.t_max) {
        return Err(Error::Config(format!("need T < T_max, got T = {}, T_max = {}", q.t, q.t_max)));
    }
    let point_norm = whole_time_point_norm(sym, psi, sigma)?;
    let i_n = 2.0 * q.r * point_norm;
    let (_, hi) = psi.support().ok_or_else(|| Error::Domain("zero data".into()))?;
    let top = (hi + psi.grid().spacing()).min(psi.grid().xi_max());
    let dt = time_step_for(q.t, q.t_step, sym.p(top).abs().max(sym.p(psi.support().unwrap().0).abs()));
    let k_window = (q.t / dt).round() as usize;
    let k_max = (q.t_max / dt).ceil() as usize;
    let t_grid = UniformNodes { x0: -(k_max as f64) * dt, dx: dt, count: 2 * k_max + 1 };
    let gl = gauss_legendre_on(q.x_nodes, -q.r, q.r);
    let xs: Vec<f64> = gl.iter().map(|p| p.0).collect();
    let ev = Evolution::new(sym.clone(), psi.clone())?;
    let synth = TimeSynthesizer::new(
        &ev,
        |xi| (1.0 + xi * xi).powf(0.5 * sigma),
        t_grid.last(),
        dt,
        &xs,
        PhaseBudget::default(),
    )?;

    let centre = k_max;
    let half_max = k_max / 2;
    let mut finite_window = 0.0;
    let mut j_direct = 0.0;
    let mut tail = 0.0;
    let mut per_x = Vec::with_capacity(xs.len());
    for &(x, w) in &gl {
        let f = synth.series(x, t_grid)?;
        let e: Vec<f64> = f.iter().map(Complex64::norm_sqr).collect();
        let fw = trapezoid(&e[centre - k_window..=centre + k_window], dt);
        let jd = trapezoid(&e[centre + k_window..], dt) + trapezoid(&e[..=centre - k_window], dt);
        // c / t^2 tail: int_{T_max}^inf = int_{T_max/2}^{T_max}
        let tl = trapezoid(&e[centre + half_max..], dt) + trapezoid(&e[..=centre - half_max], dt);
        finite_window += w * fw;
        j_direct += w * jd;
        tail += w * tl;
        per_x.push((x, fw + jd + tl));
    }
    Ok(TailDecomposition {
        i_n,
        finite_window,
        j_n: i_n - finite_window,
        j_direct,
        tail_estimate: tail,
        i_quad: finite_window + j_direct + tail,
        per_x,
        point_norm,
        dt,
        tau_nodes: synth.tau_nodes(),
        fft_len: synth.fft_len(),
    })
}

/// Time-domain evaluation of `int |F(x, t)|^2 dt` at the given `x` values
/// (with the `c / t^2` tail extrapolation beyond `t_max`).
pub fn whole_time_point_norm_time_domain(
    ev: &Evolution,
    weight: impl Fn(f64) -> f64,
    xs: &[f64],
    t_max: f64,
    t_step: f64,
) -> Result<Vec<f64>> {
    let f = ev.initial();
    let (lo, hi) = f.support().ok_or_else(|| Error::Domain("zero data".into()))?;
    let top = (hi + f.grid().spacing()).min(f.grid().xi_max());
    let tau_max = phase_of(ev.symbol(), top).abs().max(phase_of(ev.symbol(), lo).abs());
    let dt = time_step_for(t_max, t_step, tau_max);
    let k_max = (t_max / dt).round() as usize;
    let t_grid = UniformNodes { x0: -(k_max as f64) * dt, dx: dt, count: 2 * k_max + 1 };
    let synth = TimeSynthesizer::new(ev, weight, t_grid.last(), dt, xs, PhaseBudget::default())?;
    let half = k_max / 2;
    xs.iter()
        .map(|&x| {
            let e: Vec<f64> = synth.series(x, t_grid)?.iter().map(Complex64::norm_sqr).collect();
            let tail = trapezoid(&e[k_max + half..], dt) + trapezoid(&e[..=k_max - half], dt);
            Ok(trapezoid(&e, dt) + tail)
        })
        .collect()
}

/// Phase `phi(xi)` with `u^(xi, t) = exp(i phi(xi) t) u^(xi, 0)` for norm-preserving flows.
fn phase_of(symbol: &Symbol, xi: f64) -> f64 {
    match symbol {
        Symbol::Polynomial(q) => q.im_q(xi),
        Symbol::Dispersive(d) => -d.p(xi),
    }
}

fn phase_rate_of(symbol: &Symbol, xi: f64) -> f64 {
    match symbol {
        Symbol::Polynomial(q) => q.im_q_prime(xi),
        Symbol::Dispersive(d) => -d.p_prime(xi),
    }
}

/// Sharp trace norm with its x-independence certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceNorm {
    /// Frequency-exact `int_R |d^order u(x, t)|^2 dt`.
    pub value: f64,
    /// Time-domain recomputation at each sampled `x`, when the data avoid
    /// stationary points of the phase.
    pub time_domain: Vec<(f64, f64)>,
    /// `max |time_domain - value| / value` (0 when no time-domain check ran).
    pub max_deviation: f64,
}

/// `int_R |d_x^order u(x, t)|^2 dt` with the fractional derivative read as the
/// multiplier `|xi|^order`.
pub fn sharp_trace_norm(ev: &Evolution, order: f64, xs: &[f64], q: &QuadratureSpec) -> Result<TraceNorm> {
    sharp_trace_norm_with(ev, order, TraceMultiplier::Homogeneous, xs, q)
}

/// Reading of the fractional derivative in trace norms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMultiplier {
    /// `|xi|^order`.
    #[default]
    Homogeneous,
    /// `(1 + xi^2)^(order / 2)`.
    Bessel,
}

impl TraceMultiplier {
    pub fn eval(self, xi: f64, order: f64) -> f64 {
        match self {
            TraceMultiplier::Homogeneous => xi.abs().powf(order),
            TraceMultiplier::Bessel => (1.0 + xi * xi).powf(0.5 * order),
        }
    }
}

/// Trace norm by the change of variables `tau = phase(xi)` on each monotone
/// branch. Branches whose `tau` ranges overlap would produce an x-dependent
/// cross term and are rejected.
pub fn sharp_trace_norm_with(
    ev: &Evolution,
    order: f64,
    multiplier: TraceMultiplier,
    xs: &[f64],
    q: &QuadratureSpec,
) -> Result<TraceNorm> {
    if ev.orientation() != Orientation::AllTime {
        return Err(Error::Orientation("trace norms need a norm-preserving flow".into()));
    }
    let f = ev.initial();
    let sym = ev.symbol();
    let Some((a, b)) = f.support_indices() else {
        return Ok(TraceNorm { value: 0.0, time_domain: Vec::new(), max_deviation: 0.0 });
    };
    let grid = f.grid();
    // tau ranges of the increasing and decreasing branches
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for k in a..=b {
        if f.amplitude()[k].norm_sqr() == 0.0 {
            continue;
        }
        let xi = grid.node(k);
        let r = phase_rate_of(sym, xi);
        if r == 0.0 {
            continue;
        }
        let branch = usize::from(r < 0.0);
        let tau = phase_of(sym, xi);
        ranges[branch].0 = ranges[branch].0.min(tau);
        ranges[branch].1 = ranges[branch].1.max(tau);
    }
    let [(l0, h0), (l1, h1)] = ranges;
    if l0 <= h0 && l1 <= h1 && l0.max(l1) < h0.min(h1) {
        return Err(Error::PhaseMonotonicity(format!(
            "phase branches overlap on tau in [{}, {}]; the time integral depends on x",
            l0.max(l1),
            h0.min(h1)
        )));
    }
    let weight = |xi: f64| {
        let r = phase_rate_of(sym, xi).abs();
        let num = multiplier.eval(xi, order).powi(2);
        if r > 0.0 {
            num / r
        } else {
            // removable point: average the two neighbours
            let h = grid.spacing();
            0.5 * (multiplier.eval(xi - h, order).powi(2) / phase_rate_of(sym, xi - h).abs()
                + multiplier.eval(xi + h, order).powi(2) / phase_rate_of(sym, xi + h).abs())
        }
    };
    let value = f.weighted_energy(weight);

    let mut time_domain = Vec::new();
    let mut max_deviation = 0.0;
    if let (false, Some(pieces)) = (xs.is_empty(), monotone_pieces(f, sym)) {
        // distinct pieces have disjoint tau ranges, so their time integrals add
        let mut totals = vec![0.0; xs.len()];
        let mut certified = true;
        for piece in pieces {
            let ev_k = Evolution::new(sym.clone(), piece)?;
            match whole_time_point_norm_time_domain(&ev_k, |xi| multiplier.eval(xi, order), xs, q.t_max, q.t_step) {
                Ok(vals) => totals.iter_mut().zip(vals).for_each(|(t, v)| *t += v),
                Err(Error::PhaseMonotonicity(_)) => {
                    certified = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if certified {
            for (&x, v) in xs.iter().zip(totals) {
                max_deviation = f64::max(max_deviation, (v - value).abs() / value);
                time_domain.push((x, v));
            }
        }
    }
    Ok(TraceNorm { value, time_domain, max_deviation })
}

/// Split `f` into pieces on which the phase rate keeps a strict sign, or
/// `None` if the data do not vanish where the rate does.
fn monotone_pieces(f: &SpectralFunction, sym: &Symbol) -> Option<Vec<SpectralFunction>> {
    let (a, b) = f.support_indices()?;
    let grid = f.grid();
    let mut pieces = Vec::new();
    let mut start: Option<(usize, bool)> = None;
    let mut flush = |from: usize, to: usize| {
        let (lo, hi) = (grid.node(from), grid.node(to));
        let piece = f.restrict(lo, hi);
        if piece.support().is_some() {
            pieces.push(piece);
        }
    };
    for k in a..=b {
        let r = phase_rate_of(sym, grid.node(k));
        if r == 0.0 {
            if f.amplitude()[k].norm_sqr() > 0.0 {
                return None;
            }
            if let Some((s, _)) = start.take() {
                flush(s, k - 1);
            }
            continue;
        }
        match start {
            Some((s, sign)) if sign != (r > 0.0) => {
                flush(s, k - 1);
                start = Some((k, r > 0.0));
            }
            None => start = Some((k, r > 0.0)),
            _ => {}
        }
    }
    if let Some((s, _)) = start {
        flush(s, b);
    }
    Some(pieces)
}

/// `||u||^2_{L^2(0,T; H^(s+m))} = (1/2pi) int (1+xi^2)^(s+m) |phi^|^2 G dxi`,
/// `G = (exp(2 Re Q T) - 1) / (2 Re Q)` (`= T` where `Re Q = 0`), with `m`
/// the dissipative order of the symbol.
pub fn dissipative_global_norm(sym: &PolynomialSymbol, phi: &SpectralFunction, s: f64, t: f64) -> Result<f64> {
    let m = sym
        .dissipative_order()
        .ok_or_else(|| Error::Orientation("global dissipative norm needs a dissipative symbol".into()))?;
    Ok(phi.weighted_energy(|xi| (1.0 + xi * xi).powf(s + m as f64) * time_factor(sym.re_q(xi), t)))
}

/// `int_0^T exp(2 r t) dt`.
pub fn time_factor(r: f64, t: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        (2.0 * r * t).exp_m1() / (2.0 * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::{gaussian, psi_grid, psi_n, DataFamily};
    use crate::spectral::FrequencyGrid;

    #[test]
    fn zero_data_has_zero_norms() {
        let g = FrequencyGrid::symmetric(5.0, 0.01).unwrap();
        let ev = Evolution::new(PolynomialSymbol::airy(), SpectralFunction::zeros(g)).unwrap();
        assert_eq!(local_kato_norm(&ev, 1.0, &QuadratureSpec::default()).unwrap(), 0.0);
        let tr = sharp_trace_norm(&ev, 1.0, &[0.0], &QuadratureSpec::default()).unwrap();
        assert_eq!(tr.value, 0.0);
    }

    #[test]
    fn g_factor_limit() {
        assert_eq!(time_factor(0.0, 1.7), 1.7);
        assert!((time_factor(-1e-12, 1.0) - 1.0).abs() < 1e-11);
        assert!((time_factor(-1.0, 1.0) - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn heat_bound_closed_form() {
        // int exp(-2 xi^2) dxi = sqrt(pi / 2)
        let b = dissipative_pointwise_bound(&PolynomialSymbol::heat(), 0.0, 1.0, 1.0).unwrap();
        let exact = (std::f64::consts::FRAC_PI_2.sqrt() / std::f64::consts::TAU).sqrt();
        assert!((b - exact).abs() < 1e-12 * exact, "{b} vs {exact}");
        let b2 = dissipative_pointwise_bound(&PolynomialSymbol::heat(), 0.0, 2.0, 1.0).unwrap();
        assert!(b2 < b);
        assert!(matches!(
            dissipative_pointwise_bound(&PolynomialSymbol::airy(), 0.25, 1.0, 1.0),
            Err(Error::Orientation(_))
        ));
    }

    #[test]
    fn point_norm_of_sharp_bump() {
        // psi^ ~ 1 on [1, 2]: value -> ln 2 / (4 pi)
        let g = FrequencyGrid::new(0.5, 2.5, 40_001).unwrap();
        let sym = DispersiveSymbol::schrodinger().with_threshold(0.5);
        let expect = std::f64::consts::LN_2 / (4.0 * std::f64::consts::PI);
        let mut prev_err = f64::INFINITY;
        for width in [0.05, 0.01, 0.002, 0.0004] {
            let f = SpectralFunction::sample(
                g,
                |xi| {
                    let edge = crate::spectral::bridge((1.0 - xi) / width) * crate::spectral::bridge((xi - 2.0) / width);
                    Complex64::new(edge, 0.0)
                },
                |_| 0.0,
                |_| 0.0,
                false,
            )
            .unwrap();
            let v = whole_time_point_norm(&sym, &f, 0.0).unwrap();
            let err = (v - expect).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-3 * expect);
    }

    #[test]
    fn point_norm_rejects_support_below_threshold() {
        let f = psi_n(8, 1.0, psi_grid(8, 1.0, 0.01).unwrap()).unwrap();
        let sym = DispersiveSymbol::schrodinger().with_threshold(1.5);
        assert!(matches!(whole_time_point_norm(&sym, &f, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tail_decomposition_is_consistent() {
        let sym = DispersiveSymbol::schrodinger().with_threshold(1.0);
        let f = psi_n(8, 1.0, psi_grid(8, 1.0, 0.01).unwrap()).unwrap();
        let q = QuadratureSpec { t_max: 100.0, x_nodes: 6, ..QuadratureSpec::default() };
        let d = tail_decomposition(&sym, &f, 0.5 + 0.25, &q).unwrap();
        assert!((d.finite_window + d.j_n - d.i_n).abs() < 1e-12 * d.i_n);
        assert!(d.j_n > 0.0);
        assert!((d.i_quad - d.i_n).abs() < 0.02 * d.i_n, "{} vs {}", d.i_quad, d.i_n);
        for (x, v) in &d.per_x {
            assert!((v - d.point_norm).abs() < 0.02 * d.point_norm, "x={x}: {v} vs {}", d.point_norm);
        }
        // FiniteWindow is nondecreasing in T
        let q2 = QuadratureSpec { t: 2.0, ..q };
        let d2 = tail_decomposition(&sym, &f, 0.75, &q2).unwrap();
        assert!(d2.finite_window >= d.finite_window);
    }

    #[test]
    fn airy_trace_constant_is_one_third() {
        let g = FrequencyGrid::symmetric(12.0, 0.005).unwrap();
        let f = gaussian(1.5, g).unwrap();
        let ev = Evolution::new(PolynomialSymbol::airy(), f.clone()).unwrap();
        let tr = sharp_trace_norm(&ev, 1.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((tr.value - f.l2_norm_sq() / 3.0).abs() < 1e-6 * tr.value);
    }

    #[test]
    fn bessel_trace_adds_the_low_order_term() {
        // (1 + xi^2) / (3 xi^2) = 1/3 + 1 / (3 xi^2)
        let fam = DataFamily::Bump { center: 3.0, width: 0.3 };
        let f = fam.build(fam.grid(0.01, 0.0).unwrap(), 0.0).unwrap();
        let ev = Evolution::new(PolynomialSymbol::airy(), f.clone()).unwrap();
        let q = QuadratureSpec::default();
        let tr = sharp_trace_norm_with(&ev, 1.0, TraceMultiplier::Bessel, &[0.0, 0.7], &q).unwrap();
        let want = f.l2_norm_sq() / 3.0 + f.weighted_energy(|xi| 1.0 / (3.0 * xi * xi));
        assert!((tr.value - want).abs() < 1e-12 * want);
        assert_eq!(tr.time_domain.len(), 2);
        assert!(tr.max_deviation < 2e-3);
    }

    #[test]
    fn two_sided_schrodinger_trace_is_rejected() {
        let g = FrequencyGrid::symmetric(12.0, 0.01).unwrap();
        let f = gaussian(1.5, g).unwrap();
        let ev = Evolution::new(DispersiveSymbol::schrodinger(), f).unwrap();
        assert!(matches!(
            sharp_trace_norm(&ev, 0.5, &[], &QuadratureSpec::default()),
            Err(Error::PhaseMonotonicity(_))
        ));
    }

    #[test]
    fn heat_global_norm_matches_time_quadrature() {
        let fam = DataFamily::RandomBandlimited { seed: 3, band: 4.0 };
        let f = fam.build(fam.grid(0.01, 0.0).unwrap(), 0.0).unwrap();
        let sym = PolynomialSymbol::heat();
        let exact = dissipative_global_norm(&sym, &f, 0.0, 1.0).unwrap();
        let ev = Evolution::new(sym, f).unwrap();
        let steps = 2000;
        let h = 1.0 / steps as f64;
        let vals: Vec<f64> = (0..=steps)
            .map(|k| ev.evolve(k as f64 * h).unwrap().sobolev_norm(1.0).powi(2))
            .collect();
        let quad = trapezoid(&vals, h);
        assert!((quad - exact).abs() < 1e-3 * exact, "{quad} vs {exact}");
    }

    #[test]
    fn airy_trace_certificate_is_x_independent() {
        let g = FrequencyGrid::symmetric(8.0, 0.005).unwrap();
        let f = crate::counterexamples::bump(3.0, 0.3, g).unwrap();
        let ev = Evolution::new(PolynomialSymbol::airy(), f.clone()).unwrap();
        let q = QuadratureSpec { t_max: 50.0, ..QuadratureSpec::default() };
        let tr = sharp_trace_norm(&ev, 1.0, &[-1.0, 0.0, 1.0], &q).unwrap();
        assert_eq!(tr.time_domain.len(), 3);
        assert!(tr.max_deviation < 2e-3, "{tr:?}");
        assert!((tr.value * 3.0 / f.l2_norm_sq() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn schrodinger_half_order_constant() {
        let g = FrequencyGrid::symmetric(8.0, 0.005).unwrap();
        let f = crate::counterexamples::bump(3.0, 0.3, g).unwrap().restrict(0.0, 8.0);
        let ev = Evolution::new(DispersiveSymbol::schrodinger(), f.clone()).unwrap();
        let q = QuadratureSpec { t_max: 50.0, ..QuadratureSpec::default() };
        let tr = sharp_trace_norm(&ev, 0.5, &[0.5], &q).unwrap();
        assert!((tr.value / f.l2_norm_sq() - 0.5).abs() < 1e-12);
        assert!(tr.max_deviation < 2e-3, "{tr:?}");
    }

    #[test]
    fn local_kato_norm_self_converges() {
        let fam = DataFamily::RandomBandlimited { seed: 11, band: 3.0 };
        let f = fam.build(fam.grid(0.01, 0.0).unwrap(), 0.0).unwrap();
        let ev = Evolution::new(PolynomialSymbol::airy(), f).unwrap();
        let q = QuadratureSpec { x_step: 0.1, t_step: 0.02, ..QuadratureSpec::default() };
        let coarse = local_kato_norm(&ev, 1.0, &q).unwrap();
        let fine = local_kato_norm(&ev, 1.0, &QuadratureSpec { x_step: 0.05, t_step: 0.01, ..q }).unwrap();
        assert!((coarse - fine).abs() < 5e-3 * fine, "{coarse} vs {fine}");
    }
}
