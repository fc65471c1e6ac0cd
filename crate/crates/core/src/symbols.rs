//! Evolution symbols: constant-coefficient polynomial operators `Q(d/dx)` and
//! real dispersive symbols `p(xi)` with their inverse branch.
//!
//! A polynomial operator acts in frequency by `Q(i xi)` with
//! `Q(i xi) = sum_j a_j (i xi)^(2j+1) + sum_k b_k (i xi)^(2k)`, `b_k = alpha_k + i beta_k`,
//! so that `u_t = Q(d/dx) u` becomes `u^_t = Q(i xi) u^`.
//! A dispersive symbol generates `w^(xi, t) = exp(-i p(xi) t) q^(xi)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::FrequencyGrid;

/// Which structural condition a polynomial symbol satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// All `alpha_k = 0` and `(-1)^omega a_omega > 0`.
    PurelyDispersive,
    /// `(-1)^omega a_omega > 0` and `alpha_k` vanishes above `nu_idx`, with
    /// `(-1)^nu_idx alpha_nu_idx < 0`.
    DissipativeDispersive { nu_idx: usize },
    /// `a_omega = 0` and `(-1)^omega alpha_omega < 0`.
    DissipativeDominant,
}

impl Classification {
    pub fn is_dissipative(&self) -> bool {
        !matches!(self, Classification::PurelyDispersive)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::PurelyDispersive => write!(f, "purely dispersive"),
            Classification::DissipativeDispersive { nu_idx } => write!(f, "dissipative-dispersive (nu_idx = {nu_idx})"),
            Classification::DissipativeDominant => write!(f, "dissipative-dominant"),
        }
    }
}

#[inline]
fn sign_pow(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `Q(d/dx)` of order `2 omega + 1` with real odd coefficients `a_0..a_omega`
/// and complex even coefficients `b_1..b_omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSymbol {
    a: Vec<f64>,
    b: Vec<Complex64>,
}

impl PolynomialSymbol {
    /// `a[j]` multiplies `d^(2j+1)`, `b[k-1]` multiplies `d^(2k)`. Both lists
    /// are zero-padded to a common `omega = max(a.len() - 1, b.len())`.
    pub fn new(a: Vec<f64>, b: Vec<Complex64>) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Config("polynomial coefficients must be finite".into()));
        }
        let omega = a.len().saturating_sub(1).max(b.len());
        let mut a = a;
        let mut b = b;
        a.resize(omega + 1, 0.0);
        b.resize(omega, Complex64::new(0.0, 0.0));
        Ok(Self { a, b })
    }

    /// `u_t = -u_xxx`.
    pub fn airy() -> Self {
        Self::new(vec![0.0, -1.0], vec![]).unwrap()
    }

    /// Linear KdV-Burgers `u_t = -u_x - u_xxx + u_xx`.
    pub fn kdv_burgers() -> Self {
        Self::new(vec![-1.0, -1.0], vec![Complex64::new(1.0, 0.0)]).unwrap()
    }

    /// `u_t = u_xx`.
    pub fn heat() -> Self {
        Self::new(vec![0.0, 0.0], vec![Complex64::new(1.0, 0.0)]).unwrap()
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "airy" => Ok(Self::airy()),
            "kdv_burgers" => Ok(Self::kdv_burgers()),
            "heat" => Ok(Self::heat()),
            other => Err(Error::Config(format!("unknown polynomial symbol '{other}'"))),
        }
    }

    pub fn omega(&self) -> usize {
        self.b.len().max(self.a.len() - 1)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// `alpha_k`, `k = 1..=omega` (zero outside).
    pub fn alpha(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.b.get(k - 1).map_or(0.0, |c| c.re)
        }
    }

    pub fn beta(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.b.get(k - 1).map_or(0.0, |c| c.im)
        }
    }

    /// The substitution `x -> -x`: odd-derivative coefficients change sign.
    pub fn mirror(&self) -> Self {
        Self {
            a: self.a.iter().map(|v| -v).collect(),
            b: self.b.clone(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a: self.a.iter().map(|v| v * c).collect(),
            b: self.b.iter().map(|v| v * c).collect(),
        }
    }

    pub fn classify(&self) -> Result<Classification> {
        let w = self.omega();
        let a_w = self.a[w];
        let alpha_w = self.alpha(w);
        if a_w == 0.0 {
            if sign_pow(w) * alpha_w < 0.0 {
                return Ok(Classification::DissipativeDominant);
            }
            return Err(Error::Classification {
                message: format!(
                    "a_omega = 0 requires (-1)^omega alpha_omega < 0, got alpha_{w} = {alpha_w}"
                ),
                mirror_fixes: false,
            });
        }
        let dissipation = self.dissipation_index();
        let dissipation_ok = match dissipation {
            None => true,
            Some(nu) => sign_pow(nu) * self.alpha(nu) < 0.0,
        };
        let leading_ok = sign_pow(w) * a_w > 0.0;
        match (leading_ok, dissipation_ok) {
            (true, true) => Ok(match dissipation {
                None => Classification::PurelyDispersive,
                Some(nu_idx) => Classification::DissipativeDispersive { nu_idx },
            }),
            (false, true) => Err(Error::Classification {
                message: format!("(-1)^omega a_omega = {} is not positive", sign_pow(w) * a_w),
                mirror_fixes: true,
            }),
            (_, false) => {
                let nu = dissipation.unwrap_or(0);
                Err(Error::Classification {
                    message: format!(
                        "(-1)^nu alpha_nu = {} is not negative at nu = {nu}; Re Q(i xi) is unbounded above",
                        sign_pow(nu) * self.alpha(nu)
                    ),
                    mirror_fixes: false,
                })
            }
        }
    }

    /// Largest `k` with `alpha_k != 0`.
    fn dissipation_index(&self) -> Option<usize> {
        (1..=self.omega()).rev().find(|&k| self.alpha(k) != 0.0)
    }

    /// `Q(i xi)`.
    pub fn eval_q(&self, xi: f64) -> Complex64 {
        Complex64::new(self.re_q(xi), self.im_q(xi))
    }

    /// `Re Q(i xi) = sum_k (-1)^k alpha_k xi^(2k)`.
    pub fn re_q(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        let mut p = 1.0;
        let mut s = 0.0;
        for k in 1..=self.omega() {
            p *= x2;
            s += sign_pow(k) * self.alpha(k) * p;
        }
        s
    }

    /// `Im Q(i xi) = sum_j (-1)^j a_j xi^(2j+1) + sum_k (-1)^k beta_k xi^(2k)`.
    pub fn im_q(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        let mut odd = xi;
        let mut s = 0.0;
        for (j, &a) in self.a.iter().enumerate() {
            s += sign_pow(j) * a * odd;
            odd *= x2;
        }
        let mut even = 1.0;
        for k in 1..=self.omega() {
            even *= x2;
            s += sign_pow(k) * self.beta(k) * even;
        }
        s
    }

    /// `d/dxi Im Q(i xi)`.
    pub fn im_q_prime(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        let mut even = 1.0;
        let mut s = 0.0;
        for (j, &a) in self.a.iter().enumerate() {
            s += sign_pow(j) * a * (2 * j + 1) as f64 * even;
            even *= x2;
        }
        let mut odd = xi;
        for k in 1..=self.omega() {
            s += sign_pow(k) * self.beta(k) * (2 * k) as f64 * odd;
            odd *= x2;
        }
        s
    }

    /// The multiplier `exp(Q(i xi) t)` keeps real data real iff every `beta_k = 0`.
    pub fn preserves_hermitian(&self) -> bool {
        self.b.iter().all(|c| c.im == 0.0)
    }

    /// Kato gain `omega` of the local smoothing estimate.
    pub fn gain_exponent(&self) -> f64 {
        self.omega() as f64
    }

    /// Order `m` of global dissipative smoothing: `Re Q ~ -c xi^(2m)`.
    pub fn dissipative_order(&self) -> Option<usize> {
        match self.classify().ok()? {
            Classification::PurelyDispersive => None,
            Classification::DissipativeDispersive { nu_idx } => Some(nu_idx),
            Classification::DissipativeDominant => Some(self.omega()),
        }
    }

    /// Constants `(M, C1)` with `Im Q'(xi) T >= C1 xi^(2 omega)` for every probe
    /// node with `|xi| > M`. `C1` is half the asymptotic coefficient
    /// `(2 omega + 1)(-1)^omega a_omega T`.
    pub fn nonstationary_constants(&self, t: f64, probe: &FrequencyGrid) -> Result<(f64, f64)> {
        let w = self.omega();
        let lead = (2 * w + 1) as f64 * sign_pow(w) * self.a[w] * t;
        if lead <= 0.0 {
            return Err(Error::Classification {
                message: "non-stationary constants need (-1)^omega a_omega T > 0".into(),
                mirror_fixes: self.a[w] != 0.0 && t > 0.0,
            });
        }
        let c1 = 0.5 * lead;
        let m = probe
            .nodes()
            .filter(|&xi| self.im_q_prime(xi) * t < c1 * xi.powi(2 * w as i32))
            .fold(0.0f64, |acc, xi| acc.max(xi.abs()));
        Ok((m, c1))
    }

    pub fn label(&self) -> String {
        let a: Vec<String> = self.a.iter().map(|v| format!("{v}")).collect();
        let b: Vec<String> = self
            .b
            .iter()
            .map(|c| if c.im == 0.0 { format!("{}", c.re) } else { format!("{}{:+}i", c.re, c.im) })
            .collect();
        format!("poly(a=[{}];b=[{}])", a.join(" "), b.join(" "))
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Shape of a dispersive symbol `p(xi)`.
#[derive(Clone)]
pub enum DispersionLaw {
    /// `xi^2`.
    Schrodinger,
    /// `xi^3`.
    AiryDispersion,
    /// `|xi|^(m-1) xi`.
    PowerM(f64),
    /// `sum c_j xi^(k_j)` with integer powers.
    Monomials(Vec<(f64, u32)>),
    /// User-supplied `p`, `p'` and parity.
    Custom { name: String, p: RealFn, dp: RealFn, odd: bool },
}

impl fmt::Debug for DispersionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DispersionLaw::Schrodinger => write!(f, "Schrodinger"),
            DispersionLaw::AiryDispersion => write!(f, "AiryDispersion"),
            DispersionLaw::PowerM(m) => write!(f, "PowerM({m})"),
            DispersionLaw::Monomials(t) => write!(f, "Monomials({t:?})"),
            DispersionLaw::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl DispersionLaw {
    fn p(&self, xi: f64) -> f64 {
        match self {
            DispersionLaw::Schrodinger => xi * xi,
            DispersionLaw::AiryDispersion => xi * xi * xi,
            DispersionLaw::PowerM(m) => xi.abs().powf(m - 1.0) * xi,
            DispersionLaw::Monomials(terms) => terms.iter().map(|&(c, k)| c * xi.powi(k as i32)).sum(),
            DispersionLaw::Custom { p, .. } => p(xi),
        }
    }

    fn dp(&self, xi: f64) -> f64 {
        match self {
            DispersionLaw::Schrodinger => 2.0 * xi,
            DispersionLaw::AiryDispersion => 3.0 * xi * xi,
            DispersionLaw::PowerM(m) => m * xi.abs().powf(m - 1.0),
            DispersionLaw::Monomials(terms) => terms
                .iter()
                .filter(|&&(_, k)| k > 0)
                .map(|&(c, k)| c * k as f64 * xi.powi(k as i32 - 1))
                .sum(),
            DispersionLaw::Custom { dp, .. } => dp(xi),
        }
    }

    fn is_odd(&self) -> bool {
        match self {
            DispersionLaw::Schrodinger => false,
            DispersionLaw::AiryDispersion | DispersionLaw::PowerM(_) => true,
            DispersionLaw::Monomials(terms) => terms.iter().all(|&(c, k)| c == 0.0 || k % 2 == 1),
            DispersionLaw::Custom { odd, .. } => *odd,
        }
    }

    fn name(&self) -> String {
        match self {
            DispersionLaw::Schrodinger => "schrodinger".into(),
            DispersionLaw::AiryDispersion => "airy_dispersion".into(),
            DispersionLaw::PowerM(m) => format!("power_m({m})"),
            DispersionLaw::Monomials(terms) => {
                let parts: Vec<String> = terms.iter().map(|(c, k)| format!("{c}xi^{k}")).collect();
                format!("monomials({})", parts.join("+"))
            }
            DispersionLaw::Custom { name, .. } => name.clone(),
        }
    }
}

/// Real symbol `p` with growth order `m`, bounds
/// `|p| <= C1 (1+|xi|)^m`, `|p'| >= C2 (1+|xi|)^(m-1)` for `|xi| > R_sym`,
/// and strict monotonicity on `(N, inf)`.
#[derive(Debug, Clone)]
pub struct DispersiveSymbol {
    pub law: DispersionLaw,
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub r_sym: f64,
    pub n_threshold: f64,
}

/// Per-node margins of a dispersive symbol validation.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub nodes: Vec<f64>,
    /// `C1 (1+|xi|)^m - |p(xi)|`.
    pub upper_margin: Vec<f64>,
    /// `|p'(xi)| - C2 (1+|xi|)^(m-1)`, `None` inside `|xi| <= R_sym`.
    pub lower_margin: Vec<Option<f64>>,
    pub min_upper_margin: f64,
    pub min_lower_margin: f64,
}

impl DispersiveSymbol {
    pub fn new(law: DispersionLaw, m: f64, c1: f64, c2: f64, r_sym: f64, n_threshold: f64) -> Result<Self> {
        if !(m > 1.0) || !(c1 > 0.0) || !(c2 > 0.0) || !(r_sym >= 0.0) || n_threshold.is_nan() {
            return Err(Error::Config(format!(
                "dispersive symbol needs m > 1, C1 > 0, C2 > 0, R_sym >= 0 (got m={m}, C1={c1}, C2={c2}, R={r_sym})"
            )));
        }
        Ok(Self { law, m, c1, c2, r_sym, n_threshold })
    }

    pub fn schrodinger() -> Self {
        Self::new(DispersionLaw::Schrodinger, 2.0, 1.0, 1.0, 1.0, 0.0).unwrap()
    }

    pub fn airy_dispersion() -> Self {
        Self::new(DispersionLaw::AiryDispersion, 3.0, 1.0, 0.75, 1.0, 0.0).unwrap()
    }

    /// `|xi|^(m-1) xi` with the sharp constants `C1 = 1`, `C2 = m / 2^(m-1)`.
    pub fn power_m(m: f64) -> Result<Self> {
        Self::new(DispersionLaw::PowerM(m), m, 1.0, m / 2f64.powf(m - 1.0), 1.0, 0.0)
    }

    /// Registry of built-in dispersive symbols.
    pub fn named(name: &str, m: Option<f64>) -> Result<Self> {
        match name {
            "schrodinger" => Ok(Self::schrodinger()),
            "airy_dispersion" => Ok(Self::airy_dispersion()),
            "power_m" => Self::power_m(m.ok_or_else(|| Error::Config("power_m needs m".into()))?),
            other => Err(Error::Config(format!("unknown dispersive symbol '{other}'"))),
        }
    }

    pub fn with_threshold(mut self, n: f64) -> Self {
        self.n_threshold = n;
        self
    }

    #[inline]
    pub fn p(&self, xi: f64) -> f64 {
        self.law.p(xi)
    }

    #[inline]
    pub fn p_prime(&self, xi: f64) -> f64 {
        self.law.dp(xi)
    }

    /// `exp(-i p t)` keeps real data real iff `p` is odd.
    pub fn preserves_hermitian(&self) -> bool {
        self.law.is_odd()
    }

    /// Kato gain `(m - 1) / 2`.
    pub fn gain_exponent(&self) -> f64 {
        0.5 * (self.m - 1.0)
    }

    pub fn label(&self) -> String {
        self.law.name()
    }

    /// Check the growth bounds and monotonicity at every probe node.
    pub fn validate(&self, probe: &FrequencyGrid) -> Result<ValidationReport> {
        let slack = 1e-12;
        let mut report = ValidationReport {
            nodes: Vec::with_capacity(probe.count()),
            upper_margin: Vec::with_capacity(probe.count()),
            lower_margin: Vec::with_capacity(probe.count()),
            min_upper_margin: f64::INFINITY,
            min_lower_margin: f64::INFINITY,
        };
        let mut prev: Option<(f64, f64)> = None;
        for xi in probe.nodes() {
            let p = self.p(xi);
            let dp = self.p_prime(xi);
            if !p.is_finite() || !dp.is_finite() {
                return Err(Error::Validation { node: xi, reason: "symbol is not finite".into() });
            }
            let scale = (1.0 + xi.abs()).powf(self.m);
            let upper = self.c1 * scale - p.abs();
            if upper < -slack * scale {
                return Err(Error::Validation {
                    node: xi,
                    reason: format!("|p| = {} exceeds C1 (1+|xi|)^m = {}", p.abs(), self.c1 * scale),
                });
            }
            report.min_upper_margin = report.min_upper_margin.min(upper);
            let lower = if xi.abs() > self.r_sym {
                let bound = self.c2 * (1.0 + xi.abs()).powf(self.m - 1.0);
                let margin = dp.abs() - bound;
                if margin < -slack * bound {
                    return Err(Error::Validation {
                        node: xi,
                        reason: format!("|p'| = {} is below C2 (1+|xi|)^(m-1) = {bound}", dp.abs()),
                    });
                }
                report.min_lower_margin = report.min_lower_margin.min(margin);
                Some(margin)
            } else {
                None
            };
            if xi > self.n_threshold {
                if dp <= 0.0 {
                    return Err(Error::Validation {
                        node: xi,
                        reason: format!("p' = {dp} is not positive beyond N = {}", self.n_threshold),
                    });
                }
                if let Some((xp, pp)) = prev {
                    if xp > self.n_threshold && p <= pp {
                        return Err(Error::Validation {
                            node: xi,
                            reason: "p is not strictly increasing beyond N".into(),
                        });
                    }
                }
            }
            prev = Some((xi, p));
            report.nodes.push(xi);
            report.upper_margin.push(upper);
            report.lower_margin.push(lower);
        }
        Ok(report)
    }

    /// `nu(tau)` with `p(nu) = tau` on `(N, inf)`.
    pub fn invert_p(&self, tau: f64, tol: f64) -> Result<f64> {
        let guess = tau.abs().powf(1.0 / self.m).copysign(tau);
        self.invert_p_from(tau, tol, guess)
    }

    /// As [`Self::invert_p`], Newton started from `guess`.
    pub fn invert_p_from(&self, tau: f64, tol: f64, guess: f64) -> Result<f64> {
        let n = self.n_threshold;
        let floor = if n.is_finite() { self.p(n) } else { f64::NEG_INFINITY };
        if !(tau >= floor) {
            return Err(Error::Domain(format!("tau = {tau} is below p(N) = {floor}")));
        }
        let f = |xi: f64| self.p(xi) - tau;

        // bracket [lo, hi] with f(lo) <= 0 <= f(hi)
        let mut lo;
        let mut hi;
        let start = if guess.is_finite() { guess.max(n) } else { n.max(0.0) };
        let width0 = 1.0 + start.abs();
        if f(start) <= 0.0 {
            lo = start;
            hi = start + width0;
            let mut w = width0;
            while f(hi) < 0.0 {
                lo = hi;
                w *= 2.0;
                hi += w;
                if !hi.is_finite() {
                    return Err(Error::Domain(format!("no preimage of tau = {tau}")));
                }
            }
        } else {
            hi = start;
            let mut w = width0;
            lo = (start - w).max(n);
            while f(lo) > 0.0 {
                if lo <= n {
                    return Err(Error::Domain(format!("tau = {tau} is below p(N)")));
                }
                hi = lo;
                w *= 2.0;
                lo = (lo - w).max(n);
                if !lo.is_finite() {
                    return Err(Error::Domain(format!("no preimage of tau = {tau}")));
                }
            }
        }

        let mut x = start.clamp(lo, hi);
        let mut residual = f(x);
        for _ in 0..200 {
            if residual.abs() <= tol {
                return Ok(x);
            }
            if residual < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                // no representable improvement left
                return Ok(x);
            }
            let dp = self.p_prime(x);
            let newton = x - residual / dp;
            x = if dp != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            residual = f(x);
        }
        if residual.abs() <= tol {
            Ok(x)
        } else {
            Err(Error::Convergence { iterations: 200, residual: residual.abs() })
        }
    }

    /// `nu'(tau) = 1 / p'(nu(tau))`.
    pub fn inverse_derivative(&self, tau: f64, tol: f64) -> Result<f64> {
        let xi = self.invert_p(tau, tol)?;
        let dp = self.p_prime(xi);
        if dp == 0.0 {
            return Err(Error::Division(format!("p' vanishes at xi = {xi}")));
        }
        Ok(1.0 / dp)
    }
}

/// Either kind of flow symbol.
#[derive(Debug, Clone)]
pub enum Symbol {
    Polynomial(PolynomialSymbol),
    Dispersive(DispersiveSymbol),
}

impl Symbol {
    pub fn gain_exponent(&self) -> f64 {
        match self {
            Symbol::Polynomial(p) => p.gain_exponent(),
            Symbol::Dispersive(d) => d.gain_exponent(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Symbol::Polynomial(p) => p.label(),
            Symbol::Dispersive(d) => d.label(),
        }
    }
}

impl From<PolynomialSymbol> for Symbol {
    fn from(p: PolynomialSymbol) -> Self {
        Symbol::Polynomial(p)
    }
}

impl From<DispersiveSymbol> for Symbol {
    fn from(d: DispersiveSymbol) -> Self {
        Symbol::Dispersive(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classifies_the_worked_examples() {
        assert_eq!(PolynomialSymbol::airy().classify().unwrap(), Classification::PurelyDispersive);
        assert_eq!(
            PolynomialSymbol::kdv_burgers().classify().unwrap(),
            Classification::DissipativeDispersive { nu_idx: 1 }
        );
        assert_eq!(PolynomialSymbol::heat().classify().unwrap(), Classification::DissipativeDominant);
    }

    #[test]
    fn wrong_orientation_reports_mirror_fix() {
        let s = PolynomialSymbol::airy().mirror();
        match s.classify() {
            Err(Error::Classification { mirror_fixes, .. }) => assert!(mirror_fixes),
            other => panic!("{other:?}"),
        }
        assert!(s.mirror().classify().is_ok());
        // backward heat is not fixed by mirroring
        let bad = PolynomialSymbol::new(vec![0.0, 0.0], vec![Complex64::new(-1.0, 0.0)]).unwrap();
        match bad.classify() {
            Err(Error::Classification { mirror_fixes, .. }) => assert!(!mirror_fixes),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn anti_dissipation_is_rejected() {
        // u_t = -u_xxx - u_xx: Re Q = +xi^2
        let s = PolynomialSymbol::new(vec![0.0, -1.0], vec![Complex64::new(-1.0, 0.0)]).unwrap();
        assert!(s.classify().is_err());
    }

    #[test]
    fn eval_q_examples() {
        let airy = PolynomialSymbol::airy().eval_q(2.0);
        assert_eq!(airy, Complex64::new(0.0, 8.0));
        assert_eq!(PolynomialSymbol::heat().eval_q(3.0), Complex64::new(-9.0, 0.0));
        let kb = PolynomialSymbol::kdv_burgers();
        let xi = 1.7;
        let i = Complex64::new(0.0, 1.0);
        let direct = -(i * xi) - (i * xi).powi(3) + (i * xi).powi(2);
        assert!((kb.eval_q(xi) - direct).norm() < 1e-14);
    }

    #[test]
    fn im_q_prime_matches_finite_difference() {
        let s = PolynomialSymbol::new(vec![0.3, -1.2, 0.5], vec![Complex64::new(0.0, 0.7), Complex64::new(0.0, -0.2)])
            .unwrap();
        for &xi in &[-2.0, -0.3, 0.0, 0.9, 3.1] {
            let h = 1e-5;
            let fd = (s.im_q(xi + h) - s.im_q(xi - h)) / (2.0 * h);
            assert!((fd - s.im_q_prime(xi)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn gains() {
        assert_eq!(PolynomialSymbol::airy().gain_exponent(), 1.0);
        assert_eq!(DispersiveSymbol::schrodinger().gain_exponent(), 0.5);
        assert_eq!(PolynomialSymbol::heat().gain_exponent(), 1.0);
        assert_eq!(PolynomialSymbol::heat().dissipative_order(), Some(1));
        assert_eq!(PolynomialSymbol::airy().dissipative_order(), None);
    }

    #[test]
    fn nonstationary_constants_for_airy() {
        let probe = FrequencyGrid::symmetric(50.0, 0.01).unwrap();
        let (m, c1) = PolynomialSymbol::airy().nonstationary_constants(1.0, &probe).unwrap();
        assert_eq!(c1, 1.5);
        assert_eq!(m, 0.0);
        // KdV-Burgers: Im Q' = 3 xi^2 - 1 >= 1.5 xi^2 iff |xi| >= sqrt(2/3)
        let (m, _) = PolynomialSymbol::kdv_burgers().nonstationary_constants(1.0, &probe).unwrap();
        assert!((m - (2.0f64 / 3.0).sqrt()).abs() < 0.011, "{m}");
        assert!(PolynomialSymbol::heat().nonstationary_constants(1.0, &probe).is_err());
    }

    #[test]
    fn validation_examples() {
        let probe = FrequencyGrid::new(0.0, 200.0, 20_001).unwrap();
        let rep = DispersiveSymbol::schrodinger().validate(&probe).unwrap();
        assert!(rep.min_upper_margin >= 0.0 && rep.min_lower_margin >= 0.0);
        DispersiveSymbol::airy_dispersion().validate(&probe).unwrap();
        let sin = DispersiveSymbol::new(
            DispersionLaw::Custom { name: "sin".into(), p: Arc::new(f64::sin), dp: Arc::new(f64::cos), odd: true },
            2.0,
            1.0,
            0.1,
            1.0,
            f64::NEG_INFINITY,
        )
        .unwrap();
        match sin.validate(&probe) {
            Err(Error::Validation { node, .. }) => assert!(node > 1.0 && node < 2.0, "{node}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn airy_dispersion_sharp_c2() {
        // min over xi > 1 of 3 xi^2 / (1 + xi)^2 is approached at xi -> 1+
        let probe = FrequencyGrid::new(0.0, 100.0, 100_001).unwrap();
        let too_big = DispersiveSymbol::new(DispersionLaw::AiryDispersion, 3.0, 1.0, 0.76, 1.0, 0.0).unwrap();
        assert!(too_big.validate(&probe).is_err());
    }

    #[test]
    fn inversion_examples() {
        let s = DispersiveSymbol::schrodinger();
        assert!((s.invert_p(4.0, 1e-13).unwrap() - 2.0).abs() < 1e-12);
        let cubic_plus = DispersiveSymbol::new(DispersionLaw::Monomials(vec![(1.0, 3), (1.0, 1)]), 3.0, 2.0, 1.0, 1.0, 0.0)
            .unwrap();
        assert!((cubic_plus.invert_p(10.0, 1e-13).unwrap() - 2.0).abs() < 1e-12);
        let a = DispersiveSymbol::airy_dispersion();
        assert!((a.invert_p(27.0, 1e-13).unwrap() - 3.0).abs() < 1e-12);
        assert!((a.inverse_derivative(27.0, 1e-13).unwrap() - 1.0 / 27.0).abs() < 1e-14);
        let n1 = DispersiveSymbol::schrodinger().with_threshold(1.0);
        assert!(matches!(n1.invert_p(0.5, 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn hermitian_preservation_flags() {
        assert!(PolynomialSymbol::kdv_burgers().preserves_hermitian());
        assert!(!DispersiveSymbol::schrodinger().preserves_hermitian());
        assert!(DispersiveSymbol::airy_dispersion().preserves_hermitian());
    }

    proptest! {
        #[test]
        fn purely_dispersive_has_zero_real_part(xi in -1e3f64..1e3) {
            prop_assert_eq!(PolynomialSymbol::airy().re_q(xi), 0.0);
        }

        #[test]
        fn classification_is_scale_invariant(
            a in proptest::collection::vec(-3.0f64..3.0, 1..4),
            al in proptest::collection::vec(-3.0f64..3.0, 0..3),
            c in 0.01f64..100.0,
        ) {
            let b = al.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            let s = PolynomialSymbol::new(a, b).unwrap();
            let l = s.classify().ok();
            let r = s.scaled(c).classify().ok();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn invert_then_apply_is_identity(xi in 1.0f64..500.0) {
            let s = DispersiveSymbol::power_m(2.5).unwrap().with_threshold(0.5);
            let tau = s.p(xi);
            let back = s.invert_p(tau, 1e-10 * tau).unwrap();
            prop_assert!((back - xi).abs() < 1e-9 * xi);
        }

        #[test]
        fn inverse_is_increasing(t1 in 1.0f64..1e4, dt in 1e-3f64..1e3) {
            let s = DispersiveSymbol::schrodinger().with_threshold(1.0);
            prop_assert!(s.invert_p(t1 + dt, 1e-12).unwrap() > s.invert_p(t1, 1e-12).unwrap());
        }

        #[test]
        fn dissipative_classes_have_bounded_real_part(al in -5.0f64..-0.01, xi in -100.0f64..100.0) {
            // b_1 = al < 0 flips to Re Q = -al xi^2 > 0, so use -al
            let s = PolynomialSymbol::new(vec![0.0, -1.0], vec![Complex64::new(-al, 0.0)]).unwrap();
            prop_assert!(s.classify().unwrap().is_dissipative());
            prop_assert!(s.re_q(xi) <= 0.0);
        }
    }
}
