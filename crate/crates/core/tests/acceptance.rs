// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use goldstone_core::asymptotics::{bose_bubble_integral, delta_exponent, extrapolate_to_zero, fit_power_law, PhaseTag};
use goldstone_core::fluctuations::finite::{oracle_variance, Which};
use goldstone_core::fluctuations::*;
use goldstone_core::fock::*;
use goldstone_core::linalg::C64;
use goldstone_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn ground() -> ModelParams {
    ModelParams { beta: Beta::Infinite, ..Default::default() }
}

fn small_q_grid() -> MomentumGrid {
    MomentumGrid::new(2.0 * PI * 1e4, 0.1, 16).unwrap()
}

fn spectrum_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let eps = rng.random_range(0.05..3.0);
        let c2v = rng.random_range(0.0..3.0);
        let dense = two_mode_gap(eps, c2v).unwrap();
        worst = worst.max(rel(bogoliubov_spectrum(eps, c2v).unwrap(), dense));
    }
    let p = ground();
    let q = small_q_grid().q_norms()[0];
    let ratio = bogoliubov_spectrum(p.kinetic(q), p.c2v(q)).unwrap() * q / p.kinetic(q);
    let gap = rel(ratio, omega_gap(&p).unwrap());
    outcome(
        worst < 1e-8 && gap < 1e-3,
        format!("max rel gap error {worst:.2e}; E|q|/eps vs Omega at q={q:.1e}: {gap:.2e}"),
    )
}

fn oracle_params() -> ModelParams {
    ModelParams {
        mass: 0.5,
        beta: Beta::Finite(1.0),
        condensate_density: 0.5,
        total_density: 2.0,
        ..Default::default()
    }
}

fn variance_oracle() -> Outcome {
    let p = oracle_params();
    let a = 2.0;
    let ls = [4.0, 6.0, 8.0];
    // Mode n = L/2 on a box of side aL sits at |q| = π/a for every L.
    let q = PI / a;
    let cases: [(Which, fn(f64, &ModelParams) -> Result<f64>, &str); 4] = [
        (Which::RhoImperfect, variance_rho_imperfect, "rho"),
        (Which::AImperfect, variance_a_imperfect, "A"),
        (Which::Rho0Wibg, variance_rho0_wibg, "rho0"),
        (Which::AWibg, variance_a_wibg, "A_wibg"),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (which, closed, name) in cases {
        let xs: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
        let ys: Vec<f64> = ls
            .iter()
            .map(|&l| oracle_variance(which, &p, &MomentumGrid::new(a * l, 6.0, 2).unwrap(), (l / 2.0) as i64).unwrap())
            .collect();
        let limit = extrapolate_to_zero(&xs, &ys, &[1.0, 3.0]).unwrap();
        let err = rel(limit, closed(q, &p).unwrap());
        worst = worst.max(err);
        parts.push(format!("{name} {err:.1e}"));
    }
    let g = ModelParams { beta: Beta::Infinite, ..p };
    let grid = MomentumGrid::new(a * 4.0, 6.0, 2).unwrap();
    let ground = [
        oracle_variance(Which::RhoImperfect, &g, &grid, 2).unwrap(),
        oracle_variance(Which::AImperfect, &g, &grid, 2).unwrap(),
    ];
    let closed = [variance_rho_imperfect(q, &g).unwrap(), variance_a_imperfect(q, &g).unwrap()];
    let exact = closed.iter().all(|&v| v == 0.5) && ground.iter().all(|&v| (v - 0.5).abs() < 1e-12);
    outcome(
        worst < 1e-3 && exact,
        format!(
            "max rel error {worst:.2e} ({}); ground state oracle {:.6}/{:.6}, closed form {:.6}/{:.6}",
            parts.join(", "),
            ground[0],
            ground[1],
            closed[0],
            closed[1]
        ),
    )
}

/// Grid points in the smallest decade of the q sequence.
fn last_decade(grid: &MomentumGrid) -> Vec<f64> {
    let qs = grid.q_norms();
    let top = 10.0 * qs[0] * (1.0 + 1e-9);
    qs.into_iter().filter(|&q| q <= top).collect()
}

fn divergence_exponents() -> Outcome {
    let p = ModelParams { condensate_density: 1.0, ..oracle_params() };
    let grid = MomentumGrid::new(2.0 * PI * 1e4, 0.1, 24).unwrap();
    let qs = last_decade(&grid);
    let coth: Vec<(f64, f64)> =
        qs.iter().map(|&q| (q, p.condensate_density * coth_half(p.beta, p.kinetic(q)))).collect();
    let bubble: Vec<(f64, f64)> = qs.iter().map(|&q| (q, bose_bubble_integral(q, &p).unwrap().value)).collect();
    let ec = fit_power_law(&coth).unwrap().exponent;
    let eb = fit_power_law(&bubble).unwrap().exponent;
    outcome(
        (ec + 2.0).abs() <= 0.02 && (eb + 1.0).abs() <= 0.05,
        format!(
            "coth exponent {ec:.4}, bubble exponent {eb:.4} over {} points in [{:.1e}, {:.1e}]",
            qs.len(),
            qs[0],
            qs[qs.len() - 1]
        ),
    )
}

fn delta_classification() -> Outcome {
    let p = ModelParams { condensate_density: 1.0, ..oracle_params() };
    let mut pass = true;
    let mut parts = Vec::new();
    for phase in [PhaseTag::Condensed, PhaseTag::Critical, PhaseTag::Normal { mu_shift: -0.5 }] {
        let r = delta_exponent(phase, &p).unwrap();
        pass &= (r.delta - r.target).abs() <= 0.03;
        parts.push(format!("{} {:.4} (target {:.4})", phase.name(), r.delta, r.target));
    }
    outcome(pass, parts.join(", "))
}

fn bch() -> Outcome {
    let rows = bch_sweep(&ground(), &[8.0, 27.0, 64.0], 10).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].1.defect < w[0].1.defect);
    let bounded = rows.iter().all(|(_, r)| r.defect <= r.bound);
    let text: Vec<String> = rows.iter().map(|(v, r)| format!("V={v}: {:.3e} <= {:.3e}", r.defect, r.bound)).collect();
    outcome(decreasing && bounded, text.join(", "))
}

fn clt() -> Outcome {
    let p = ground();
    let ts: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut phase, mut leak): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..10 {
        let mut draw = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (f, g) = (draw(), draw());
        let (r, s) = checks::clt_imperfect(&p, f, g, 125.0, &ts).unwrap();
        worst = worst.max(rel(r.s_fit, s));
        phase = phase.max(r.max_phase);
        leak = leak.max(r.leakage);
    }
    outcome(
        worst < 1e-2 && phase < 1e-6,
        format!("V=125: max rel s error {worst:.2e}, max phase {phase:.1e}, leakage {leak:.1e}"),
    )
}

fn closure() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for model in [ModelTag::Imperfect, ModelTag::Wibg] {
        let r = goldstone_closure_check(model, &ground(), &ClosureConfig::default()).unwrap();
        let identity = r.rows.iter().map(|row| row.identity_defect).fold(0.0, f64::max);
        let rate = r.remainder_fit.exponent;
        pass &= identity < 1e-10 && (rate + 0.5).abs() <= 0.1 && (r.virial - 1.0).abs() < 1e-3;
        parts.push(format!("{model}: identity {identity:.1e}, remainder rate {rate:.3}, virial {:.6}", r.virial));
    }
    outcome(pass, parts.join("; "))
}

fn structure_factor_dichotomy() -> Outcome {
    let p = ground();
    let grid = MomentumGrid::new(2.0 * PI * 1e4, 1e-2, 16).unwrap();
    let qs = last_decade(&grid);
    let cond: Vec<f64> = qs.iter().map(|&q| structure_factor(q, &p, DensityKind::Condensate).unwrap() / q).collect();
    let full: Vec<f64> = qs.iter().map(|&q| structure_factor(q, &p, DensityKind::Full).unwrap()).collect();
    let spread = |v: &[f64]| {
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        (max / min, min)
    };
    let (sc, _) = spread(&cond);
    let (sf, floor) = spread(&full);
    outcome(
        sc - 1.0 < 1e-2 && sf < 1.05 && floor > 0.0,
        format!(
            "S0/q spread {:.2e}, full S max/min {sf:.5} (min {floor:.4}) over [{:.1e}, {:.1e}]",
            sc - 1.0,
            qs[0],
            qs[qs.len() - 1]
        ),
    )
}

fn u_commutation() -> Outcome {
    let ws = FockWorkspace::cyclic(3, 4, 0.9, 3.0).unwrap();
    let r = u_density_commutator_check(&ws, &ground(), [0, 0, 1]).unwrap();
    outcome(
        r.commutator < 1e-10 && r.wibg_commutator > 1e-3 && r.warning.is_none(),
        format!(
            "[U, F] {:.1e}, [U(c), F] {:.3e}, rewrite defect {:.1e}",
            r.commutator, r.wibg_commutator, r.rewrite_defect
        ),
    )
}

fn equivalence() -> Outcome {
    let p = ModelParams { beta: Beta::Infinite, ..oracle_params() };
    let grid = small_q_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = Coefficient::constant(C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        let a = FluctuationSpec::new(ModelTag::Imperfect, 1.0, f.clone(), Coefficient::zero()).unwrap();
        let b = FluctuationSpec::new(ModelTag::Imperfect, 1.0, Coefficient::zero(), f.j()).unwrap();
        worst = worst.max(equivalence_distance(&a, &b, &p, &grid).unwrap());
    }
    outcome(worst < 1e-10, format!("max distance {worst:.1e} over 20 draws"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("spectrum identity", spectrum_identity, Duration::from_secs(5)),
        ("variance oracle", variance_oracle, Duration::from_secs(30)),
        ("divergence exponents", divergence_exponents, Duration::from_secs(120)),
        ("delta classification", delta_classification, Duration::from_secs(180)),
        ("bch defect", bch, Duration::from_secs(120)),
        ("clt gaussianity", clt, Duration::from_secs(120)),
        ("goldstone closure", closure, Duration::from_secs(180)),
        ("structure factor", structure_factor_dichotomy, Duration::from_secs(60)),
        ("interaction commutation", u_commutation, Duration::from_secs(60)),
        ("equivalence relation", equivalence, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *budget;
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {} [{:.2} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
