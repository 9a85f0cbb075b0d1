// Independent numerical oracles for quadrature-based and sampled quantities.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use goldstone_core::asymptotics::bose_bubble_integral;
use goldstone_core::fluctuations::finite::{plane_density, second_moment};
use goldstone_core::fluctuations::*;
use goldstone_core::linalg::C64;
use goldstone_core::quasifree::QuasiFreeState;
use goldstone_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `∫ d³k/(2π)³ n(ε_{k+q})(1 + n(ε_k))` by tensor Gauss-Legendre in `(|k|, cos θ)`.
///
/// The weight `χ = |k+q|²/(|k|² + |k+q|²)` splits the integrand so that each piece is singular
/// only at the origin of its own spherical frame, where the `r²` Jacobian absorbs the `1/r²` pole.
fn bubble_oracle(q: f64, beta: f64, mass: f64, order: usize) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
    let n = |e: f64| 1.0 / (beta * e).exp_m1();
    let one_plus_n = |e: f64| -1.0 / (-beta * e).exp_m1();
    let eps = |k2: f64| k2 / (2.0 * mass);
    let mut breaks = vec![0.0, 0.25 * q, 0.5 * q, q];
    while *breaks.last().unwrap() < 12.0 {
        let next = breaks.last().unwrap() * 1.5;
        breaks.push(next);
    }
    let piece = |shifted: bool| {
        let mut total = 0.0;
        for w in breaks.windows(2) {
            total += gl.integrate(w[0], w[1], |r| {
                gl.integrate(-1.0, 1.0, |u| {
                    let r2 = r * r;
                    if shifted {
                        // k' = k + q; the singular factor n(ε_{k'}) sits at r = 0.
                        let k2 = r2 + q * q - 2.0 * r * q * u;
                        r2 * n(eps(r2)) * one_plus_n(eps(k2)) * k2 / (k2 + r2)
                    } else {
                        let kq2 = r2 + q * q + 2.0 * r * q * u;
                        r2 * n(eps(kq2)) * one_plus_n(eps(r2)) * kq2 / (kq2 + r2)
                    }
                })
            });
        }
        total
    };
    (piece(false) + piece(true)) / (4.0 * PI * PI)
}

#[test]
fn bubble_matches_tensor_quadrature() {
    let p = ModelParams { beta: Beta::Finite(1.0), mass: 0.5, condensate_density: 1.0, ..Default::default() };
    for q in [0.1, 0.5, 2.0] {
        let mut prev = bubble_oracle(q, 1.0, p.mass, 24);
        let mut order = 24;
        let oracle = loop {
            order *= 2;
            let next = bubble_oracle(q, 1.0, p.mass, order);
            if (next - prev).abs() <= 1e-7 * next.abs() {
                break next;
            }
            assert!(order < 800, "oracle did not settle at q = {q}: {prev} vs {next}");
            prev = next;
        };
        let lib = bose_bubble_integral(q, &p).unwrap().value;
        let expected = oracle / (2.0 * p.condensate_density);
        assert!((lib / expected - 1.0).abs() < 1e-6, "q = {q}: {lib} vs {expected}");
        if q == 0.1 {
            let v = variance_rho_imperfect(q, &p).unwrap();
            let closed = 0.5 / (0.5 * p.kinetic(q)).tanh() + expected;
            assert!((v / closed - 1.0).abs() < 1e-6);
        }
    }
}

fn random_spec(rng: &mut ChaCha8Rng, model: ModelTag, q: f64) -> FluctuationSpec {
    let mut c = || C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    FluctuationSpec::new(model, q, Coefficient::constant(c()), Coefficient::constant(c())).unwrap()
}

#[test]
fn cauchy_schwarz_on_random_pairs() {
    let imperfect = ModelParams { beta: Beta::Finite(0.7), ..Default::default() };
    let wibg = ModelParams { beta: Beta::Finite(2.0), ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let q = rng.random_range(0.05..3.0);
        let (model, p) = if i % 2 == 0 { (ModelTag::Imperfect, &imperfect) } else { (ModelTag::Wibg, &wibg) };
        let (a, b) = (random_spec(&mut rng, model, q), random_spec(&mut rng, model, q));
        let sigma = covariance_form(&a, &b, p).unwrap().sigma;
        let (saa, sbb) = (variance_general(&a, p).unwrap(), variance_general(&b, p).unwrap());
        assert!(sigma * sigma / 4.0 <= saa * sbb * (1.0 + 1e-12), "{model} q = {q}");
        assert_eq!(covariance_form(&b, &a, p).unwrap().sigma, -sigma);
    }
}

#[test]
fn free_gas_structure_factor_from_wick_moments() {
    let p = ModelParams { beta: Beta::Finite(1.0), condensate_amplitude: 0.0, mu_shift: -0.3, ..Default::default() };
    let grid = MomentumGrid::new(5.0, 4.0, 3).unwrap();
    let state = QuasiFreeState::new(ModelTag::Free, p.clone(), grid.clone()).unwrap();
    for n in [1, 2] {
        let obs = plane_density(&grid, [0, 0, n], true);
        let wick = second_moment(&state, &obs).unwrap();
        let lattice = excited_structure_factor_lattice([0, 0, n], &grid, &p);
        assert!((wick - lattice).abs() < 1e-10 * lattice, "n = {n}: {wick} vs {lattice}");
    }
}
