use num_complex::Complex64;
use proptest::prelude::*;

use kato_lab::counterexamples::{make_window, random_bandlimited};
use kato_lab::functionals::{
    dissipative_global_norm, sharp_trace_norm, whole_time_point_norm, QuadratureSpec,
};
use kato_lab::propagator::Evolution;
use kato_lab::spectral::{windowed_energy, FrequencyGrid, SpectralFunction};
use kato_lab::symbols::{DispersiveSymbol, PolynomialSymbol};

fn data(seed: u64) -> SpectralFunction {
    random_bandlimited(seed, 4.0, FrequencyGrid::symmetric(5.0, 0.01).unwrap()).unwrap()
}

/// Multiply |f^| by `1 + bump` with a nonnegative even bump.
fn amplified(f: &SpectralFunction, at: f64, height: f64) -> SpectralFunction {
    f.map_amplitude(|xi, a| a * (1.0 + height * (-(xi.abs() - at).powi(2)).exp()), f.is_hermitian())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plancherel_on_a_wide_window(seed in 0u64..10_000) {
        let f = data(seed);
        let w = make_window((-60.0, 60.0), (-61.0, 61.0)).unwrap();
        let phys = windowed_energy(&f, &w, 0.0, 0.05).unwrap();
        prop_assert!((phys - f.l2_norm_sq()).abs() <= 1e-6 * f.l2_norm_sq());
    }

    #[test]
    fn bessel_potentials_compose(seed in 0u64..10_000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = data(seed);
        let lhs = f.bessel_potential(a).bessel_potential(b);
        let rhs = f.bessel_potential(a + b);
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).norm() <= 1e-12 * y.norm().max(1e-300));
        }
    }

    #[test]
    fn frequency_functionals_grow_with_the_amplitude(
        seed in 0u64..10_000,
        at in 1.5f64..4.5,
        height in 0.0f64..3.0,
    ) {
        let f = data(seed);
        let g = amplified(&f, at, height);
        let heat = PolynomialSymbol::heat();
        prop_assert!(dissipative_global_norm(&heat, &g, 0.0, 1.0).unwrap()
            >= dissipative_global_norm(&heat, &f, 0.0, 1.0).unwrap());
        let q = QuadratureSpec::default();
        let tr = |h: &SpectralFunction| {
            sharp_trace_norm(&Evolution::new(PolynomialSymbol::airy(), h.clone()).unwrap(), 1.0, &[], &q)
                .unwrap()
                .value
        };
        prop_assert!(tr(&g) >= tr(&f));
        prop_assert!(g.sobolev_norm(0.25) >= f.sobolev_norm(0.25));

        let sym = DispersiveSymbol::schrodinger().with_threshold(1.0);
        let (f1, g1) = (f.restrict(1.0, 5.0), g.restrict(1.0, 5.0));
        prop_assert!(whole_time_point_norm(&sym, &g1, 0.75).unwrap() >= whole_time_point_norm(&sym, &f1, 0.75).unwrap());
    }

    #[test]
    fn dissipative_norm_nondecreasing_in_time(seed in 0u64..10_000, t in 0.0f64..3.0, dt in 0.0f64..2.0) {
        let f = data(seed);
        let sym = PolynomialSymbol::kdv_burgers();
        prop_assert!(dissipative_global_norm(&sym, &f, 0.0, t + dt).unwrap()
            >= dissipative_global_norm(&sym, &f, 0.0, t).unwrap());
    }

    #[test]
    fn dispersive_flow_is_an_isometry(seed in 0u64..10_000, t in -20.0f64..20.0) {
        let f = data(seed);
        let ev = Evolution::new(PolynomialSymbol::airy(), f.clone()).unwrap();
        let u = ev.evolve(t).unwrap();
        prop_assert!((u.l2_norm_sq() - f.l2_norm_sq()).abs() <= 1e-12 * f.l2_norm_sq());
        prop_assert!(u.check_hermitian().is_ok());
    }

    #[test]
    fn dissipative_flow_contracts(seed in 0u64..10_000, t in 0.0f64..5.0, dt in 0.0f64..1.0) {
        let ev = Evolution::new(PolynomialSymbol::kdv_burgers(), data(seed)).unwrap();
        prop_assert!(ev.evolve(t + dt).unwrap().l2_norm() <= ev.evolve(t).unwrap().l2_norm());
    }

    #[test]
    fn sample_scaling_is_linear(seed in 0u64..10_000, c in 0.1f64..10.0) {
        let f = data(seed);
        let g = f.map_amplitude(|_, a| a * Complex64::new(c, 0.0), true);
        prop_assert!((g.l2_norm_sq() - c * c * f.l2_norm_sq()).abs() <= 1e-12 * g.l2_norm_sq());
    }
}
