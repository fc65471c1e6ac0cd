//! Exact-in-frequency evolution by `exp(Q(i xi) t)` or `exp(-i p(xi) t)`, and
//! synthesis of time series `t -> (Lambda^sigma u)(x, t)` in the variable
//! `tau = p(xi)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::spectral::quad::{hermite_uniform, Pchip};
use crate::spectral::transform::MAX_FFT_LEN;
use crate::spectral::{
    evaluate_with_backend, window_nodes, Backend, FilonGuard, PhaseBudget, PhysicalSamples, SmoothWindow,
    SpectralFunction, UniformNodes,
};
use crate::symbols::{Classification, DispersionLaw, DispersiveSymbol, Symbol};

/// Multipliers below this are treated as zero by dissipative flows.
pub const DISSIPATION_FLOOR: f64 = 1e-16;

/// Admissible time direction of a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `t >= 0` only (dissipative flows).
    Forward,
    /// All real `t` (norm-preserving flows).
    AllTime,
}

/// A flow together with its initial data.
#[derive(Debug, Clone)]
pub struct Evolution {
    symbol: Symbol,
    initial: SpectralFunction,
    orientation: Orientation,
}

impl Evolution {
    pub fn new(symbol: impl Into<Symbol>, initial: SpectralFunction) -> Result<Self> {
        let symbol = symbol.into();
        let orientation = match &symbol {
            Symbol::Polynomial(p) => match p.classify()? {
                Classification::PurelyDispersive => Orientation::AllTime,
                _ => Orientation::Forward,
            },
            Symbol::Dispersive(_) => Orientation::AllTime,
        };
        Ok(Self { symbol, initial, orientation })
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn initial(&self) -> &SpectralFunction {
        &self.initial
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// `u^(., t)`.
    pub fn evolve(&self, t: f64) -> Result<SpectralFunction> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite, got {t}")));
        }
        if t < 0.0 && self.orientation == Orientation::Forward {
            return Err(Error::Orientation(format!(
                "dissipative flow cannot run backward (t = {t})"
            )));
        }
        if t == 0.0 {
            return Ok(self.initial.clone());
        }
        let f = &self.initial;
        Ok(match &self.symbol {
            Symbol::Polynomial(q) => {
                let hermitian = f.is_hermitian() && q.preserves_hermitian();
                f.modulate(
                    |xi| {
                        let g = (q.re_q(xi) * t).exp();
                        if g < DISSIPATION_FLOOR {
                            0.0
                        } else {
                            g
                        }
                    },
                    |xi| q.im_q(xi) * t,
                    |xi| q.im_q_prime(xi) * t,
                    hermitian,
                )
            }
            Symbol::Dispersive(d) => {
                let hermitian = f.is_hermitian() && d.preserves_hermitian();
                f.modulate(|_| 1.0, |xi| -d.p(xi) * t, |xi| -d.p_prime(xi) * t, hermitian)
            }
        })
    }

    /// Physical samples of `u(., t)` over `support(w)`.
    pub fn solution_on_window(
        &self,
        t: f64,
        w: &SmoothWindow,
        x_step: f64,
        backend: Backend,
        budget: PhaseBudget,
        guard: FilonGuard,
    ) -> Result<PhysicalSamples> {
        let u = self.evolve(t)?;
        let (lo, hi) = w.support();
        let nodes = window_nodes(&u, lo, hi, x_step);
        evaluate_with_backend(&u, nodes, backend, budget, guard)
    }

    /// `F(t) = (Lambda^sigma u)(x, t)` on `t_grid`.
    pub fn time_series(&self, x: f64, sigma: f64, t_grid: UniformNodes) -> Result<Vec<Complex64>> {
        let weight = move |xi: f64| (1.0 + xi * xi).powf(0.5 * sigma);
        let t_abs = t_grid.x0.abs().max(t_grid.last().abs());
        TimeSynthesizer::new(self, weight, t_abs, t_grid.dx, &[x], PhaseBudget::default())?.series(x, t_grid)
    }

    /// Largest `|d^2 phase / dxi^2|` of `u^(., t)` over its support, by
    /// differencing the analytic slopes.
    pub fn phase_curvature(&self, t: f64) -> Result<f64> {
        let u = self.evolve(t)?;
        let Some((a, b)) = u.support_indices() else {
            return Ok(0.0);
        };
        let h = u.grid().spacing();
        let s = u.phase_slope();
        let lo = a.saturating_sub(1);
        let hi = (b + 1).min(u.grid().count() - 1);
        Ok((lo..hi).map(|k| ((s[k + 1] - s[k]) / h).abs()).fold(0.0, f64::max))
    }
}

/// The dispersive law seen by the time synthesis: a `DispersiveSymbol`, or a
/// purely dispersive polynomial flow `exp(i Im Q t) = exp(-i p t)` with `p = -Im Q`.
fn synthesis_symbol(symbol: &Symbol) -> Result<DispersiveSymbol> {
    match symbol {
        Symbol::Dispersive(d) => Ok(d.clone()),
        Symbol::Polynomial(q) => {
            if q.classify()? != Classification::PurelyDispersive {
                return Err(Error::Domain("time synthesis needs a norm-preserving flow".into()));
            }
            let (q1, q2) = (q.clone(), q.clone());
            let law = DispersionLaw::Custom {
                name: q.label(),
                p: Arc::new(move |xi| -q1.im_q(xi)),
                dp: Arc::new(move |xi| -q2.im_q_prime(xi)),
                odd: q.preserves_hermitian(),
            };
            DispersiveSymbol::new(law, (2 * q.omega() + 1) as f64, 1.0, 1.0, 0.0, f64::NEG_INFINITY)
        }
    }
}

/// Precomputed change of variables `tau = p(xi)` for one data set, shared by
/// every `x`.
///
/// `F(t) = (1/2pi) int G(tau) exp(-i t tau) dtau` with
/// `G(tau) = weight(nu) u^(nu) nu' exp(i x nu)`, `nu = nu(tau)`. The
/// x-independent part of `G` is resampled once on a uniform `tau` grid whose
/// spacing is dual to the time step, so each `x` costs one FFT.
pub struct TimeSynthesizer {
    tau0: f64,
    dtau: f64,
    dt: f64,
    fft_len: usize,
    nu: Vec<f64>,
    base: Vec<Complex64>,
    /// `p` was negated to make it increasing; `F` is then read at `-t`.
    reversed: bool,
}

/// Newton tolerance for `nu(tau)` relative to `|tau|`.
const INVERSION_TOL: f64 = 1e-13;

impl TimeSynthesizer {
    /// Prepare a synthesis valid for `|t| <= t_abs` with time step `dt`, and
    /// for the listed `x` values.
    pub fn new(
        ev: &Evolution,
        weight: impl Fn(f64) -> f64,
        t_abs: f64,
        dt: f64,
        xs: &[f64],
        budget: PhaseBudget,
    ) -> Result<Self> {
        let sym = synthesis_symbol(&ev.symbol)?;
        let f = &ev.initial;
        let grid = f.grid();
        let (a, b) = f
            .support_indices()
            .ok_or_else(|| Error::Domain("time synthesis of zero data".into()))?;
        let xi_lo = grid.node(a);
        if xi_lo < sym.n_threshold {
            return Err(Error::Domain(format!(
                "data support starts at {xi_lo}, below N = {}",
                sym.n_threshold
            )));
        }
        let end = (b + 1).min(grid.count() - 1);
        let xi_hi = grid.node(end);
        let (dp_lo, dp_hi) = (sym.p_prime(xi_lo), sym.p_prime(xi_hi));
        let reversed = dp_lo < 0.0;
        let sgn = if reversed { -1.0 } else { 1.0 };
        let min_rate = (a..=end)
            .map(|k| sgn * sym.p_prime(grid.node(k)))
            .fold(f64::INFINITY, f64::min);
        if !(min_rate > 0.0) || dp_lo * dp_hi <= 0.0 {
            return Err(Error::PhaseMonotonicity(format!(
                "p' must keep one sign on the data support [{xi_lo}, {xi_hi}]"
            )));
        }
        let sym = if reversed {
            let s2 = sym.clone();
            let s3 = sym.clone();
            DispersiveSymbol::new(
                DispersionLaw::Custom {
                    name: format!("-({})", sym.label()),
                    p: Arc::new(move |xi| -s2.p(xi)),
                    dp: Arc::new(move |xi| -s3.p_prime(xi)),
                    odd: sym.preserves_hermitian(),
                },
                sym.m,
                sym.c1,
                sym.c2,
                sym.r_sym,
                f64::NEG_INFINITY,
            )?
        } else {
            sym.with_threshold(f64::NEG_INFINITY)
        };

        let tau_lo = sym.p(xi_lo);
        let tau_hi = sym.p(xi_hi);
        let tau_max = tau_lo.abs().max(tau_hi.abs());
        if dt * tau_max > std::f64::consts::PI {
            return Err(Error::resolution("time step (Nyquist)", dt * tau_max, std::f64::consts::PI));
        }

        // tau spacing: phase budget of exp(-i t tau), and >= 4 knots per
        // oscillation of exp(i x nu(tau))
        let x_abs = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut dtau_max = budget.max_spacing(t_abs);
        if x_abs > 0.0 {
            dtau_max = dtau_max.min(0.5 * std::f64::consts::PI * min_rate / x_abs);
        }
        // never coarser than the data grid mapped through p
        dtau_max = dtau_max.min(min_rate * grid.spacing()).min(tau_hi - tau_lo);
        let fft_len = (std::f64::consts::TAU / (dt * dtau_max)).ceil() as usize;
        let t_count = (2.0 * t_abs / dt).ceil() as usize + 1;
        let fft_len = fft_len.max(t_count);
        if fft_len > MAX_FFT_LEN {
            return Err(Error::resolution(
                "time synthesis length",
                fft_len as f64,
                MAX_FFT_LEN as f64,
            ));
        }
        let dtau = std::f64::consts::TAU / (fft_len as f64 * dt);
        let count = ((tau_hi - tau_lo) / dtau).ceil() as usize + 1;

        // interpolants of the data in xi, on [xi_lo, xi_hi] only so the jump at
        // the support start stays on the first tau node
        let h = grid.spacing();
        let amp = &f.amplitude()[a..=end];
        let re = Pchip::uniform(xi_lo, h, amp.iter().map(|z| z.re).collect());
        let im = Pchip::uniform(xi_lo, h, amp.iter().map(|z| z.im).collect());
        let phase = &f.phase()[a..=end];
        let slope = &f.phase_slope()[a..=end];
        let oscillatory = phase.iter().any(|&p| p != 0.0) || slope.iter().any(|&s| s != 0.0);

        let mut nu = Vec::with_capacity(count);
        let mut base = Vec::with_capacity(count);
        let mut guess = xi_lo;
        for k in 0..count {
            let tau = tau_lo + k as f64 * dtau;
            if tau > tau_hi {
                nu.push(xi_hi);
                base.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let xi = if k == 0 {
                xi_lo
            } else {
                sym.invert_p_from(tau, INVERSION_TOL * tau.abs().max(1.0), guess)?
            };
            guess = xi;
            let dp = sym.p_prime(xi);
            if dp <= 0.0 {
                return Err(Error::Division(format!("p' vanishes at xi = {xi}")));
            }
            let mut g = Complex64::new(re.eval(xi), im.eval(xi));
            if oscillatory {
                g *= Complex64::cis(hermite_uniform(xi_lo, h, phase, slope, xi));
            }
            let edge = if k == 0 || k + 1 == count { 0.5 } else { 1.0 };
            nu.push(xi);
            base.push(g * (weight(xi) / dp * edge * dtau));
        }
        Ok(Self { tau0: tau_lo, dtau, dt, fft_len, nu, base, reversed })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn tau_nodes(&self) -> usize {
        self.nu.len()
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    /// `F` at `x` on `t_grid` (step must equal the prepared `dt`).
    pub fn series(&self, x: f64, t_grid: UniformNodes) -> Result<Vec<Complex64>> {
        if (t_grid.dx - self.dt).abs() > 1e-12 * self.dt {
            return Err(Error::Grid(format!(
                "time grid step {} differs from the prepared step {}",
                t_grid.dx, self.dt
            )));
        }
        if t_grid.count > self.fft_len {
            return Err(Error::Grid("time grid longer than the synthesis period".into()));
        }
        // reversed: F(t) = F~(-t), and -t runs over a grid starting at -last
        let t0 = if self.reversed { -t_grid.last() } else { t_grid.x0 };
        let l = self.fft_len;
        let mut buf = vec![Complex64::new(0.0, 0.0); l];
        for (k, (&nu, &g)) in self.nu.iter().zip(&self.base).enumerate() {
            if g.re == 0.0 && g.im == 0.0 {
                continue;
            }
            let tau = self.tau0 + k as f64 * self.dtau;
            buf[k % l] += g * Complex64::cis(x * nu - t0 * tau);
        }
        FftPlanner::<f64>::new().plan_fft_forward(l).process(&mut buf);
        let scale = 0.5 * std::f64::consts::FRAC_1_PI;
        let mut out: Vec<Complex64> = (0..t_grid.count)
            .map(|j| buf[j % l] * Complex64::cis(-(j as f64) * self.dt * self.tau0) * scale)
            .collect();
        if self.reversed {
            out.reverse();
        }
        Ok(out)
    }
}
