//! Library values against an independent adaptive quadrature.

use std::f64::consts::TAU;

use num_complex::Complex64;

use kato_lab::counterexamples::{eta_hat, gaussian, mu_n, paper_window, phi_grid, phi_n, psi_grid, psi_n, chi_n};
use kato_lab::functionals::{
    dissipative_global_norm, dissipative_pointwise_bound, sharp_trace_norm, whole_time_point_norm, QuadratureSpec,
};
use kato_lab::propagator::Evolution;
use kato_lab::spectral::{evaluate_physical, FrequencyGrid, PhaseBudget, SpectralFunction};
use kato_lab::symbols::{DispersiveSymbol, PolynomialSymbol};

use crate::common::{integrate, integrate_pieces, rel};

#[test]
fn physical_values_of_a_shifted_gaussian() {
    // u^ = exp(-xi^2/2 + 3 i xi)  =>  u(x) = exp(-(x+3)^2/2) / sqrt(2 pi)
    let grid = FrequencyGrid::symmetric(12.0, 0.02).unwrap();
    let f = SpectralFunction::sample(
        grid,
        |xi| Complex64::new((-0.5 * xi * xi).exp(), 0.0),
        |xi| 3.0 * xi,
        |_| 3.0,
        true,
    )
    .unwrap();
    let xs = [-6.0, -3.5, -3.0, -1.0, 0.0, 1.5];
    let u = evaluate_physical(&f, &xs, PhaseBudget::default()).unwrap();
    for (&x, v) in xs.iter().zip(&u) {
        let want = integrate(|xi| (-0.5 * xi * xi).exp() * (xi * (x + 3.0)).cos(), -12.0, 12.0, 1e-14) / TAU;
        assert!((v.re - want).abs() < 1e-12 && v.im.abs() < 1e-12, "x={x}: {v} vs {want}");
    }
}

#[test]
fn sobolev_norm_of_phi_n_against_oracle() {
    for n in [8u32, 32, 128] {
        let phi = phi_n(n, phi_grid(n, 0.01).unwrap()).unwrap();
        let eps = 0.25;
        let oracle = 2.0
            * integrate_pieces(
                |xi| (1.0 + xi * xi).powf(eps) * (chi_n(n, xi) * eta_hat(xi)).powi(2),
                0.0,
                n as f64 + 1.0,
                1e-13,
            )
            / TAU;
        let lib = phi.sobolev_norm(eps).powi(2);
        assert!(rel(lib, oracle) < 1e-5, "n={n}: {lib} vs {oracle}");
    }
}

#[test]
fn windowed_data_energy_captures_the_sobolev_norm() {
    // phi_n sits inside the plateau, so A_n is the whole norm up to tails
    let w = paper_window();
    for n in [8u32, 16, 32, 64] {
        let phi = phi_n(n, phi_grid(n, 0.005).unwrap()).unwrap();
        let a = kato_lab::spectral::windowed_energy(&phi, &w, 0.25, 0.05).unwrap();
        let full = phi.sobolev_norm(0.25).powi(2);
        assert!(a <= full * (1.0 + 1e-12) && a >= full * (1.0 - 1e-9), "n={n}: {a} vs {full}");
    }
}

#[test]
fn heat_pointwise_bound_against_oracle() {
    let heat = PolynomialSymbol::heat();
    for (eps, t) in [(0.25, 1.0), (0.0, 0.5), (0.4, 2.0)] {
        let inner = integrate(|xi| (-2.0 * xi * xi * t).exp() * (1.0 + xi * xi).powf(eps), -30.0, 30.0, 1e-14);
        let oracle = inner.sqrt() / TAU.sqrt() * 1.7;
        let lib = dissipative_pointwise_bound(&heat, eps, t, 1.7).unwrap();
        assert!(rel(lib, oracle) < 1e-9, "eps={eps} t={t}: {lib} vs {oracle}");
    }
}

#[test]
fn kdv_burgers_pointwise_bound_against_oracle() {
    // Re Q(i xi) = -xi^2 for the KdV-Burgers symbol
    let sym = PolynomialSymbol::kdv_burgers();
    let inner = integrate(|xi| (-2.0 * xi * xi).exp() * (1.0 + xi * xi).powf(0.25), -30.0, 30.0, 1e-14);
    let lib = dissipative_pointwise_bound(&sym, 0.25, 1.0, 1.0).unwrap();
    assert!(rel(lib, inner.sqrt() / TAU.sqrt()) < 1e-9);
}

#[test]
fn whole_time_point_norm_against_oracle() {
    let sym = DispersiveSymbol::schrodinger().with_threshold(1.0);
    for (n, sigma) in [(8u32, 0.75), (64, 0.5), (256, 0.75)] {
        let psi = psi_n(n, 1.0, psi_grid(n, 1.0, 0.01).unwrap()).unwrap();
        let lib = whole_time_point_norm(&sym, &psi, sigma).unwrap();
        let oracle = integrate_pieces(
            |xi| (1.0 + xi * xi).powf(sigma) * (mu_n(n, 1.0, xi) * eta_hat(xi)).powi(2) / (2.0 * xi),
            1.0,
            n as f64 + 2.0,
            1e-13,
        ) / TAU;
        assert!(rel(lib, oracle) < 1e-3, "n={n}: {lib} vs {oracle}");
    }
}

#[test]
fn heat_global_norm_against_oracle() {
    // gain m = 1: (1/2pi) int (1+xi^2)^(s+1) exp(-xi^2/s0^2) (1 - exp(-2 xi^2 T)) / (2 xi^2)
    let heat = PolynomialSymbol::heat();
    let g = FrequencyGrid::symmetric(15.0, 0.005).unwrap();
    let phi = gaussian(1.5, g).unwrap();
    for (s, t) in [(0.0, 1.0), (0.5, 0.25)] {
        let f = |xi: f64| {
            let g = if xi == 0.0 { t } else { -(-2.0 * xi * xi * t).exp_m1() / (2.0 * xi * xi) };
            (1.0 + xi * xi).powf(s + 1.0) * (-xi * xi / 2.25).exp() * g
        };
        let oracle = integrate_pieces(f, -1.5 * 80f64.sqrt(), 1.5 * 80f64.sqrt(), 1e-13) / TAU;
        let lib = dissipative_global_norm(&heat, &phi, s, t).unwrap();
        assert!(rel(lib, oracle) < 1e-6, "s={s} t={t}: {lib} vs {oracle}");
    }
}

#[test]
fn trace_constants_against_oracle() {
    // Airy order 1: |xi|^2 / (3 xi^2) = 1/3; order 1/2 for p = xi^2: |xi| / |2 xi| = 1/2
    let amp = |xi: f64| (-(xi.abs() - 2.5).powi(2) / 0.18).exp();
    let g = FrequencyGrid::symmetric(6.0, 0.01).unwrap();
    let f = SpectralFunction::sample(g, |xi| Complex64::new(amp(xi), 0.0), |_| 0.0, |_| 0.0, true).unwrap();
    let norm_sq = 2.0 * integrate(|xi| amp(xi).powi(2), 0.0, 6.0, 1e-14) / TAU;
    let q = QuadratureSpec::default();
    let airy = sharp_trace_norm(&Evolution::new(PolynomialSymbol::airy(), f).unwrap(), 1.0, &[], &q).unwrap();
    assert!(rel(airy.value, norm_sq / 3.0) < 1e-6, "{} vs {}", airy.value, norm_sq / 3.0);

    let g = FrequencyGrid::one_sided(1.0, 6.0, 0.01).unwrap();
    let f = SpectralFunction::sample(g, |xi| Complex64::new(amp(xi), 0.0), |_| 0.0, |_| 0.0, false).unwrap();
    let sym = DispersiveSymbol::schrodinger().with_threshold(1.0);
    let half = sharp_trace_norm(&Evolution::new(sym, f).unwrap(), 0.5, &[], &q).unwrap();
    let norm_sq = integrate(|xi| amp(xi).powi(2), 1.0, 6.0, 1e-14) / TAU;
    assert!(rel(half.value, norm_sq / 2.0) < 1e-6);
}

#[test]
fn eta_hat_matches_definition() {
    for xi in [0.0f64, 0.5, 3.0, 100.0, 1e4] {
        let want = 1.0 / ((1.0 + xi * xi).powf(0.25) * (1.0 + (1.0 + xi * xi).ln()).powi(2));
        assert!(rel(eta_hat(xi), want) < 1e-14);
    }
}
