// Quasi-free state formulas checked against explicit vectors on a truncated Fock space.

use goldstone_core::fock::state::{coherent_cutoff, pair_ground};
use goldstone_core::fock::*;
use goldstone_core::linalg::{expm_multiply, inner, C64, I};
use goldstone_core::quasifree::{Observable, QuasiFreeState, Token};
use goldstone_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: Mode = [0, 0, 1];
const MQ: Mode = [0, 0, -1];

fn plane_workspace(n_max: Vec<usize>, box_side: f64) -> FockWorkspace {
    let modes = vec![FockMode::Plane([0, 0, 0]), FockMode::Plane(Q), FockMode::Plane(MQ)];
    FockWorkspace::new(modes, n_max, 2.0 * std::f64::consts::PI / box_side, box_side.powi(3)).unwrap()
}

fn trace_word(ws: &FockWorkspace, state: &FiniteState, word: &[Token]) -> C64 {
    state.components().iter().map(|(w, psi)| *w * inner(psi, &ws.apply_word(word, psi).unwrap())).sum()
}

fn tokens() -> Vec<Token> {
    [[0, 0, 0], Q, MQ].iter().flat_map(|&m| [Token::create(m), Token::annihilate(m)]).collect()
}

/// Every word up to length two, then random words of length three and four.
fn words(seed: u64, random: usize) -> Vec<Vec<Token>> {
    let t = tokens();
    let mut out: Vec<Vec<Token>> = t.iter().map(|&a| vec![a]).collect();
    for &a in &t {
        for &b in &t {
            out.push(vec![a, b]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        let len = 3 + i % 2;
        out.push((0..len).map(|_| t[rng.random_range(0..t.len())]).collect());
    }
    out
}

fn imperfect() -> (ModelParams, MomentumGrid, FockWorkspace, FiniteState) {
    let p = ModelParams { beta: Beta::Finite(0.2), condensate_density: 0.5, total_density: 1.0, ..Default::default() };
    let grid = MomentumGrid::new(2.0, 4.0, 1).unwrap();
    let ws = plane_workspace(vec![28, 14, 14], 2.0);
    // Geometric occupation at ε_q, written out independently of the library helpers.
    let k = 2.0 * std::f64::consts::PI / 2.0;
    let nbar = 1.0 / ((0.2 * k * k / (2.0 * p.mass)).exp() - 1.0);
    let z = (p.condensate_density * grid.volume()).sqrt();
    let state = FiniteState::coherent_thermal(&ws, z, &[(1, nbar), (2, nbar)]).unwrap();
    (p, grid, ws, state)
}

fn wibg() -> (ModelParams, MomentumGrid, FockWorkspace, FiniteState) {
    let p = ModelParams { beta: Beta::Infinite, condensate_amplitude: 0.8, mass: 1.0, ..Default::default() };
    let l = 3.0;
    let grid = MomentumGrid::new(l, 3.0, 1).unwrap();
    let k = 2.0 * std::f64::consts::PI / l;
    let (eps, c2v) = (k * k / 2.0, p.c2v(k));
    let (coeffs, _) = pair_ground(eps + c2v, c2v, 1e-24).unwrap();
    let pair = coeffs.len() - 1;
    let z = p.condensate_amplitude * grid.volume().sqrt();
    let ws = plane_workspace(vec![coherent_cutoff(z), pair, pair], l);
    let state = FiniteState::product(
        &ws,
        &[Factor::Coherent { mode: 0, amplitude: z }, Factor::Pair { modes: (1, 2), coeffs }],
    )
    .unwrap();
    (p, grid, ws, state)
}

fn compare(model: ModelTag, (p, grid, ws, state): (ModelParams, MomentumGrid, FockWorkspace, FiniteState)) {
    let qf = QuasiFreeState::new(model, p, grid).unwrap();
    assert!(state.top_population(&ws) < 1e-11);
    for w in words(7, 60) {
        let wick = qf.wick_expectation(&w).unwrap();
        let fock = trace_word(&ws, &state, &w);
        let scale = 1.0 + wick.norm();
        assert!((wick - fock).norm() < 1e-8 * scale, "{model} {w:?}: {wick} vs {fock}");
    }
}

#[test]
fn wick_moments_match_thermal_fock_trace() {
    compare(ModelTag::Imperfect, imperfect());
}

#[test]
fn wick_moments_match_paired_ground_state() {
    // Also pins the sign of the anomalous pair ⟨a_q a_{−q}⟩ < 0.
    let setup = wibg();
    let (ws, state) = (&setup.2, &setup.3);
    let anomalous = trace_word(ws, state, &[Token::annihilate(Q), Token::annihilate(MQ)]);
    assert!(anomalous.re < 0.0);
    compare(ModelTag::Wibg, setup);
}

fn segal_field(f: &[(Mode, C64)]) -> Observable {
    let mut obs = Observable::new();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for &(m, z) in f {
        obs.push(z.conj() * s, vec![Token::annihilate(m)]);
        obs.push(z * s, vec![Token::create(m)]);
    }
    obs
}

#[test]
fn characteristic_function_matches_weyl_exponential() {
    let (p, grid, ws, state) = imperfect();
    let qf = QuasiFreeState::new(ModelTag::Imperfect, p, grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let f: Vec<(Mode, C64)> = [[0, 0, 0], Q, MQ]
            .iter()
            .map(|&m| (m, C64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))))
            .collect();
        let phi = ws.observable_matrix(&segal_field(&f)).unwrap();
        let fock: C64 = state.components().iter().map(|(w, psi)| *w * inner(psi, &expm_multiply(&phi, psi, I))).sum();
        let formula = qf.characteristic_function(&f).unwrap();
        assert!((fock - formula).norm() < 1e-9, "{fock} vs {formula}");
        assert!(fock.norm() <= 1.0 + 1e-12);
    }
}

fn small_workspace() -> FockWorkspace {
    plane_workspace(vec![5, 4, 4], 4.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ccr_below_truncation(n in 2usize..7, m in 2usize..6) {
        let ws = plane_workspace(vec![n, m, 2], 3.0);
        prop_assert!(ws.ccr_defect() < 1e-12);
    }

    #[test]
    fn fluctuations_are_self_adjoint(re in -2.0f64..2.0, im in -2.0f64..2.0, g in -2.0f64..2.0) {
        let ws = small_workspace();
        let x = zero_mode_fluctuation(&ws, Q, 1.7, C64::new(re, im), C64::new(g, 0.0)).unwrap();
        prop_assert!(x.is_hermitian(1e-12));
    }

    #[test]
    fn characteristic_function_bounded(t in 0.01f64..3.0, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let ws = small_workspace();
        let x = zero_mode_fluctuation(&ws, Q, 1.3, C64::new(re, im), C64::new(0.5, 0.0)).unwrap();
        let state = FiniteState::coherent_vacuum(&ws, 0.6).unwrap();
        let r = clt_char_function(&ws, &x, &[t], &state).unwrap();
        prop_assert!(r.values[0].norm() <= 1.0 + 1e-12);
    }
}
