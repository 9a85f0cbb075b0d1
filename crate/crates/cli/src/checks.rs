//! Registry of runnable checks. Each runner returns one table and a pass flag.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use goldstone_core::asymptotics::{
    bose_bubble_integral, delta_exponent, extrapolate_to_zero, fit_power_law, lifetime_exponent, PhaseTag,
};
use goldstone_core::fluctuations::finite::{oracle_variance, Which};
use goldstone_core::fluctuations::*;
use goldstone_core::fock::{
    bch_sweep, clt_imperfect, goldstone_closure_check, truncation_rederivation_check, two_mode_gap,
    u_density_commutator_check, ClosureConfig, FockMode, FockWorkspace,
};
use goldstone_core::linalg::C64;
use goldstone_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::table::{Cell, ResultTable};

pub struct Context<'a> {
    pub config: &'a ScenarioConfig,
    pub model: ModelTag,
    pub params: ModelParams,
    pub tolerances: BTreeMap<String, f64>,
}

impl Context<'_> {
    fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Checks stated for the zero-temperature state ignore the configured `beta`.
    fn ground(&self) -> ModelParams {
        ModelParams { beta: Beta::Infinite, ..self.params.clone() }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }

    fn grid(&self) -> Result<MomentumGrid> {
        self.config.finest_grid().map_err(|e| Error::InvalidParameter { name: "grid", reason: e.to_string() })
    }
}

pub struct Outcome {
    pub table: ResultTable,
    pub pass: bool,
    pub note: String,
}

pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    /// Short description of the statement the check exercises.
    pub anchor: &'static str,
    pub tolerances: &'static [(&'static str, f64)],
    pub run: fn(&Context) -> Result<Outcome>,
}

pub const REGISTRY: &[Check] = &[
    Check {
        name: "spectrum",
        module: "model_core",
        anchor: "Bogoliubov dispersion turns linear at small momenta with slope set by the gap constant",
        tolerances: &[("spectrum.omega", 1e-3)],
        run: spectrum,
    },
    Check {
        name: "two-mode-gap",
        module: "fock_oracle",
        anchor: "dense diagonalization of the paired two-mode block reproduces the quasiparticle energy",
        tolerances: &[("two-mode-gap.rel", 1e-8)],
        run: two_mode,
    },
    Check {
        name: "variance-imperfect",
        module: "fluctuations",
        anchor: "mean-field gas: density variance is the order variance plus a thermal bubble term",
        tolerances: &[],
        run: variance_imperfect,
    },
    Check {
        name: "variance-wibg",
        module: "fluctuations",
        anchor: "weakly interacting gas: the variance product respects the uncertainty floor",
        tolerances: &[("variance-wibg.floor", 1e-12)],
        run: variance_wibg,
    },
    Check {
        name: "variance-oracle",
        module: "quasifree_engine",
        anchor: "finite-box Wick moments extrapolate to the closed-form variances",
        tolerances: &[("variance-oracle.rel", 1e-3)],
        run: variance_oracle,
    },
    Check {
        name: "divergence-exponents",
        module: "asymptotics",
        anchor: "thermal order variance blows up as inverse square, the bubble as inverse first power",
        tolerances: &[("divergence.coth", 0.02), ("divergence.bubble", 0.05)],
        run: divergence,
    },
    Check {
        name: "delta-exponents",
        module: "asymptotics",
        anchor: "abnormal-fluctuation exponent separates condensed, critical and normal phases",
        tolerances: &[("delta.abs", 0.03)],
        run: delta,
    },
    Check {
        name: "lifetime-exponents",
        module: "asymptotics",
        anchor: "collective-mode time scale grows as inverse square or inverse first power of momentum",
        tolerances: &[("lifetime.abs", 0.02)],
        run: lifetime,
    },
    Check {
        name: "bch",
        module: "fock_oracle",
        anchor: "Weyl composition defect of the density/order pair shrinks with volume under its bound",
        tolerances: &[],
        run: bch,
    },
    Check {
        name: "clt",
        module: "fock_oracle",
        anchor: "ground-state characteristic function of a fluctuation is Gaussian with the limit variance",
        tolerances: &[("clt.rel", 1e-2), ("clt.phase", 1e-6)],
        run: clt,
    },
    Check {
        name: "virial-imperfect",
        module: "fock_oracle",
        anchor: "mean-field gas: the emergent oscillator pair balances kinetic and potential parts",
        tolerances: &[("closure.identity", 1e-10), ("closure.rate", 0.1), ("closure.virial", 1e-3)],
        run: virial_imperfect,
    },
    Check {
        name: "virial-wibg",
        module: "fock_oracle",
        anchor: "weakly interacting gas: renormalized oscillator pair balances at frequency Omega",
        tolerances: &[("closure.identity", 1e-10), ("closure.rate", 0.1), ("closure.virial", 1e-3)],
        run: virial_wibg,
    },
    Check {
        name: "structure-factor",
        module: "fluctuations",
        anchor: "static structure function: linear for the condensate part, finite offset in total",
        tolerances: &[("structure.linear", 1e-2), ("structure.flat", 5e-2)],
        run: structure,
    },
    Check {
        name: "u-commutator",
        module: "fock_oracle",
        anchor: "full two-body interaction commutes with density fluctuations, the truncated one does not",
        tolerances: &[("u-commutator.zero", 1e-10), ("u-commutator.nonzero", 1e-3)],
        run: u_commutator,
    },
    Check {
        name: "equivalence",
        module: "fluctuations",
        anchor: "density smeared by f and order field smeared by Jf give the same limit field",
        tolerances: &[("equivalence.abs", 1e-10)],
        run: equivalence,
    },
    Check {
        name: "truncation",
        module: "fock_oracle",
        anchor:
            "keeping only condensate terms of the interaction and substituting the amplitude yields the quadratic model",
        tolerances: &[("truncation.abs", 1e-10)],
        run: truncation,
    },
];

pub fn find(name: &str) -> Option<&'static Check> {
    REGISTRY.iter().find(|c| c.name == name)
}

/// Every tolerance name with its default.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    REGISTRY.iter().flat_map(|c| c.tolerances.iter()).map(|&(n, v)| (n.to_string(), v)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Points of a smallest-first sequence lying in its first decade.
fn first_decade(qs: &[f64]) -> Vec<f64> {
    let top = 10.0 * qs[0] * (1.0 + 1e-9);
    qs.iter().copied().filter(|&q| q <= top).collect()
}

pub const SPECTRUM_COLUMNS: &[(&str, &str)] =
    &[("q", "1/length"), ("eps", "energy"), ("E", "energy"), ("E_q_over_eps", "1/length"), ("omega", "1/length")];

/// One spectrum row. Without pairing `E = ε` and there is no linear slope, so `Ω` is reported as 0.
pub fn spectrum_row(model: ModelTag, q: f64, p: &ModelParams) -> Result<Vec<Cell>> {
    let eps = p.kinetic(q);
    let (e, omega) = match model {
        ModelTag::Wibg => (bogoliubov_spectrum(eps, p.c2v(q))?, omega_gap(p)?),
        ModelTag::Imperfect | ModelTag::Free => (eps, 0.0),
    };
    Ok(vec![q.into(), eps.into(), e.into(), (e * q / eps).into(), omega.into()])
}

fn spectrum(ctx: &Context) -> Result<Outcome> {
    let qs = ctx.grid()?.q_norms();
    let mut table = ResultTable::new(SPECTRUM_COLUMNS);
    for row in qs.par_iter().map(|&q| spectrum_row(ctx.model, q, &ctx.params)).collect::<Result<Vec<_>>>()? {
        table.push(row);
    }
    let (pass, note) = match ctx.model {
        ModelTag::Wibg => {
            let q = qs[0];
            let p = &ctx.params;
            let ratio = bogoliubov_spectrum(p.kinetic(q), p.c2v(q))? * q / p.kinetic(q);
            let err = rel(ratio, omega_gap(p)?);
            (err < ctx.tol("spectrum.omega"), format!("E|q|/eps at q={q:.1e} within {err:.2e} of Omega"))
        }
        _ => (true, "quadratic spectrum, no linear slope to compare".into()),
    };
    Ok(Outcome { table, pass, note })
}

fn two_mode(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.two_mode;
    let mut rng = ctx.rng(2);
    let draws: Vec<(f64, f64)> =
        (0..s.draws).map(|_| (rng.random_range(0.05..s.eps_max), rng.random_range(0.0..s.c2v_max))).collect();
    let rows = draws
        .par_iter()
        .map(|&(eps, c2v)| Ok((eps, c2v, bogoliubov_spectrum(eps, c2v)?, two_mode_gap(eps, c2v)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&[
        ("eps", "energy"),
        ("c2v", "energy"),
        ("E", "energy"),
        ("dense_gap", "energy"),
        ("rel_err", "-"),
    ]);
    let mut worst: f64 = 0.0;
    for (eps, c2v, e, gap) in rows {
        let err = rel(e, gap);
        worst = worst.max(err);
        table.push(vec![eps.into(), c2v.into(), e.into(), gap.into(), err.into()]);
    }
    Ok(Outcome { table, pass: worst < ctx.tol("two-mode-gap.rel"), note: format!("max rel error {worst:.2e}") })
}

fn variance_imperfect(ctx: &Context) -> Result<Outcome> {
    let qs = ctx.grid()?.q_norms();
    let rows = qs
        .par_iter()
        .map(|&q| {
            let a = variance_a_imperfect(q, &ctx.params)?;
            Ok((q, variance_rho_imperfect(q, &ctx.params)?, a))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&[("q", "1/length"), ("var_rho", "-"), ("var_A", "-"), ("bubble", "-")]);
    let mut pass = true;
    for (q, r, a) in rows {
        pass &= r.is_finite() && a >= 0.5 && r >= a;
        table.push(vec![q.into(), r.into(), a.into(), (r - a).into()]);
    }
    Ok(Outcome { table, pass, note: "requires var_A >= 1/2 and var_rho >= var_A".into() })
}

fn variance_wibg(ctx: &Context) -> Result<Outcome> {
    let qs = ctx.grid()?.q_norms();
    let mut table = ResultTable::new(&[("q", "1/length"), ("var_rho0", "-"), ("var_A", "-"), ("product", "-")]);
    let floor = 0.25 * (1.0 - ctx.tol("variance-wibg.floor"));
    let mut pass = true;
    for &q in &qs {
        let (r, a) = (variance_rho0_wibg(q, &ctx.params)?, variance_a_wibg(q, &ctx.params)?);
        pass &= r * a >= floor;
        table.push(vec![q.into(), r.into(), a.into(), (r * a).into()]);
    }
    Ok(Outcome { table, pass, note: "requires var_rho0 * var_A >= 1/4".into() })
}

fn variance_oracle(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.oracle;
    if s.sizes.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "sizes",
            reason: "the 1/L extrapolation needs three sizes".into(),
        });
    }
    let q = PI / s.spacing;
    let cases: [(Which, &str, fn(f64, &ModelParams) -> Result<f64>); 4] = [
        (Which::RhoImperfect, "rho", variance_rho_imperfect),
        (Which::AImperfect, "A", variance_a_imperfect),
        (Which::Rho0Wibg, "rho0_wibg", variance_rho0_wibg),
        (Which::AWibg, "A_wibg", variance_a_wibg),
    ];
    let mut table = ResultTable::new(&[
        ("quantity", "-"),
        ("L", "spacing"),
        ("oracle", "-"),
        ("extrapolated", "-"),
        ("closed_form", "-"),
        ("rel_err", "-"),
    ]);
    let mut worst: f64 = 0.0;
    for (which, name, closed) in cases {
        let ys = s
            .sizes
            .par_iter()
            .map(|&l| {
                let grid = MomentumGrid::new(s.spacing * l as f64, s.cutoff, 2)?;
                oracle_variance(which, &ctx.params, &grid, (l / 2) as i64)
            })
            .collect::<Result<Vec<_>>>()?;
        let xs: Vec<f64> = s.sizes.iter().map(|&l| 1.0 / l as f64).collect();
        let limit = extrapolate_to_zero(&xs, &ys, &[1.0, 3.0])?;
        let exact = closed(q, &ctx.params)?;
        let err = rel(limit, exact);
        worst = worst.max(err);
        for (&l, &y) in s.sizes.iter().zip(&ys) {
            table.push(vec![name.into(), l.into(), y.into(), limit.into(), exact.into(), err.into()]);
        }
    }
    Ok(Outcome {
        table,
        pass: worst < ctx.tol("variance-oracle.rel"),
        note: format!("|q| = {q:.6}, max rel error {worst:.2e}"),
    })
}

fn divergence(ctx: &Context) -> Result<Outcome> {
    let p = &ctx.params;
    let qs = first_decade(&ctx.grid()?.q_norms());
    let coth: Vec<(f64, f64)> = qs.iter().map(|&q| (q, 0.5 * coth_half(p.beta, p.kinetic(q)))).collect();
    let bubble = qs.par_iter().map(|&q| Ok((q, bose_bubble_integral(q, p)?.value))).collect::<Result<Vec<_>>>()?;
    let mut table =
        ResultTable::new(&[("term", "-"), ("exponent", "-"), ("target", "-"), ("points", "-"), ("r_squared", "-")]);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, samples, target, tol) in
        [("coth", coth, -2.0, ctx.tol("divergence.coth")), ("bubble", bubble, -1.0, ctx.tol("divergence.bubble"))]
    {
        let fit = fit_power_law(&samples)?;
        pass &= (fit.exponent - target).abs() <= tol;
        parts.push(format!("{name} {:.4}", fit.exponent));
        table.push(vec![name.into(), fit.exponent.into(), target.into(), fit.points.into(), fit.r_squared.into()]);
    }
    Ok(Outcome { table, pass, note: format!("{} over [{:.1e}, {:.1e}]", parts.join(", "), qs[0], qs[qs.len() - 1]) })
}

fn delta(ctx: &Context) -> Result<Outcome> {
    let phases =
        [PhaseTag::Condensed, PhaseTag::Critical, PhaseTag::Normal { mu_shift: ctx.config.delta.normal_mu_shift }];
    let reports = phases.iter().map(|&ph| delta_exponent(ph, &ctx.params)).collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&[("phase", "-"), ("delta", "-"), ("target", "-"), ("r_squared", "-")]);
    let mut pass = true;
    let mut parts = Vec::new();
    for r in reports {
        pass &= (r.delta - r.target).abs() <= ctx.tol("delta.abs");
        parts.push(format!("{} {:.4}", r.phase.name(), r.delta));
        table.push(vec![r.phase.name().into(), r.delta.into(), r.target.into(), r.fit.r_squared.into()]);
    }
    Ok(Outcome { table, pass, note: parts.join(", ") })
}

fn lifetime(ctx: &Context) -> Result<Outcome> {
    let grid = ctx.grid()?;
    let mut table = ResultTable::new(&[("model", "-"), ("fitted", "-"), ("target", "-")]);
    let mut pass = true;
    let mut parts = Vec::new();
    for model in [ModelTag::Imperfect, ModelTag::Wibg] {
        let r = lifetime_exponent(model, &ctx.params, &grid)?;
        pass &= (r.fit.exponent - r.exponent).abs() <= ctx.tol("lifetime.abs");
        parts.push(format!("{model} {:.4}", r.fit.exponent));
        table.push(vec![model.as_str().into(), r.fit.exponent.into(), r.exponent.into()]);
    }
    Ok(Outcome { table, pass, note: parts.join(", ") })
}

fn bch(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.bch;
    let rows = bch_sweep(&ctx.ground(), &s.volumes, s.excited_cutoff)?;
    let mut table = ResultTable::new(&[
        ("volume", "length^3"),
        ("defect", "-"),
        ("bound", "-"),
        ("overlap_gap", "-"),
        ("leakage", "-"),
    ]);
    let decreasing = rows.windows(2).all(|w| w[1].1.defect < w[0].1.defect);
    let bounded = rows.iter().all(|(_, r)| r.defect <= r.bound);
    for (v, r) in rows {
        table.push(vec![v.into(), r.defect.into(), r.bound.into(), r.overlap_gap.into(), r.leakage.into()]);
    }
    Ok(Outcome {
        table,
        pass: decreasing && bounded,
        note: format!("strictly decreasing: {decreasing}; bound respected: {bounded}"),
    })
}

fn clt(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.clt;
    let p = ctx.ground();
    let ts: Vec<f64> = (1..=s.t_points).map(|i| s.t_max * i as f64 / s.t_points as f64).collect();
    let mut rng = ctx.rng(6);
    let draws: Vec<(C64, C64)> = (0..s.draws)
        .map(|_| {
            let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c(), c())
        })
        .collect();
    let reports = draws.par_iter().map(|&(f, g)| clt_imperfect(&p, f, g, s.volume, &ts)).collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&[
        ("draw", "-"),
        ("f_re", "-"),
        ("f_im", "-"),
        ("g_re", "-"),
        ("g_im", "-"),
        ("s_fit", "-"),
        ("s_closed", "-"),
        ("rel_err", "-"),
        ("max_phase", "rad"),
        ("leakage", "-"),
    ]);
    let mut pass = true;
    for (i, ((f, g), (r, closed))) in draws.iter().zip(reports).enumerate() {
        let err = rel(r.s_fit, closed);
        pass &= err < ctx.tol("clt.rel") && r.max_phase < ctx.tol("clt.phase");
        table.push(vec![
            i.into(),
            f.re.into(),
            f.im.into(),
            g.re.into(),
            g.im.into(),
            r.s_fit.into(),
            closed.into(),
            err.into(),
            r.max_phase.into(),
            r.leakage.into(),
        ]);
    }
    Ok(Outcome { table, pass, note: format!("volume {}", s.volume) })
}

fn closure(ctx: &Context, model: ModelTag) -> Result<Outcome> {
    let s = &ctx.config.closure;
    let config = ClosureConfig {
        q: s.q,
        volumes: s.volumes.clone(),
        virial_momenta: s.virial_momenta.clone(),
        excited_cutoff: s.excited_cutoff,
        ..ClosureConfig::default()
    };
    let r = goldstone_closure_check(model, &ctx.ground(), &config)?;
    let identity = r.rows.iter().map(|row| row.identity_defect).fold(0.0, f64::max);
    let rate = r.remainder_fit.exponent;
    let mut table = ResultTable::new(&[("quantity", "-"), ("volume", "length^3"), ("value", "-")]);
    for row in &r.rows {
        table.push(vec!["identity_defect".into(), row.volume.into(), row.identity_defect.into()]);
        table.push(vec!["remainder".into(), row.volume.into(), row.remainder.into()]);
        table.push(vec!["rho_sq".into(), row.volume.into(), row.rho_sq.into()]);
        table.push(vec!["a_sq".into(), row.volume.into(), row.a_sq.into()]);
    }
    for (name, value) in [
        ("omega", r.omega),
        ("remainder_rate", rate),
        ("virial_ratio", r.virial),
        ("map_defect_rho", r.map_defects[0]),
        ("map_defect_a", r.map_defects[1]),
    ] {
        table.push(vec![name.into(), "limit".into(), value.into()]);
    }
    let pass = identity < ctx.tol("closure.identity")
        && (rate + 0.5).abs() <= ctx.tol("closure.rate")
        && (r.virial - 1.0).abs() < ctx.tol("closure.virial");
    Ok(Outcome { table, pass, note: format!("identity {identity:.1e}, rate {rate:.3}, virial {:.6}", r.virial) })
}

fn virial_imperfect(ctx: &Context) -> Result<Outcome> {
    closure(ctx, ModelTag::Imperfect)
}

fn virial_wibg(ctx: &Context) -> Result<Outcome> {
    closure(ctx, ModelTag::Wibg)
}

fn structure(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.structure;
    let p = ctx.ground();
    let qs = first_decade(&MomentumGrid::new(s.box_side, s.cutoff, s.q_count)?.q_norms());
    let rows = qs
        .par_iter()
        .map(|&q| {
            let c = structure_factor(q, &p, DensityKind::Condensate)?;
            Ok((q, c, structure_factor(q, &p, DensityKind::Full)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let spread = |v: Vec<f64>| {
        let max = v.iter().copied().fold(f64::MIN, f64::max);
        let min = v.iter().copied().fold(f64::MAX, f64::min);
        (max / min, min)
    };
    let (linear, _) = spread(rows.iter().map(|r| r.1 / r.0).collect());
    let (flat, floor) = spread(rows.iter().map(|r| r.2).collect());
    let mut table = ResultTable::new(&[
        ("q", "1/length"),
        ("S_condensate", "-"),
        ("S_condensate_over_q", "length"),
        ("S_full", "-"),
    ]);
    for (q, c, f) in rows {
        table.push(vec![q.into(), c.into(), (c / q).into(), f.into()]);
    }
    Ok(Outcome {
        table,
        pass: linear - 1.0 < ctx.tol("structure.linear") && flat - 1.0 < ctx.tol("structure.flat") && floor > 0.0,
        note: format!("S0/q spread {:.2e}, full max/min {flat:.5}", linear - 1.0),
    })
}

fn u_commutator(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.commutator;
    let ws = FockWorkspace::cyclic(s.period, s.n_max, s.unit, s.volume)?;
    let r = u_density_commutator_check(&ws, &ctx.ground(), [0, 0, 1])?;
    let mut table =
        ResultTable::new(&[("commutator", "energy"), ("wibg_commutator", "energy"), ("rewrite_defect", "energy")]);
    table.push(vec![r.commutator.into(), r.wibg_commutator.into(), r.rewrite_defect.into()]);
    let pass = r.commutator < ctx.tol("u-commutator.zero") && r.wibg_commutator > ctx.tol("u-commutator.nonzero");
    Ok(Outcome { table, pass, note: r.warning.unwrap_or_else(|| "below-truncation norms".into()) })
}

fn equivalence(ctx: &Context) -> Result<Outcome> {
    let p = ctx.ground();
    let grid = ctx.grid()?;
    let mut rng = ctx.rng(10);
    let mut table = ResultTable::new(&[("draw", "-"), ("f_re", "-"), ("f_im", "-"), ("distance", "-")]);
    let mut worst: f64 = 0.0;
    for i in 0..ctx.config.equivalence.draws {
        let z = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let f = Coefficient::constant(z);
        let a = FluctuationSpec::new(ModelTag::Imperfect, 1.0, f.clone(), Coefficient::zero())?;
        let b = FluctuationSpec::new(ModelTag::Imperfect, 1.0, Coefficient::zero(), f.j())?;
        let d = equivalence_distance(&a, &b, &p, &grid)?;
        worst = worst.max(d);
        table.push(vec![i.into(), z.re.into(), z.im.into(), d.into()]);
    }
    Ok(Outcome { table, pass: worst < ctx.tol("equivalence.abs"), note: format!("max distance {worst:.1e}") })
}

fn truncation(ctx: &Context) -> Result<Outcome> {
    let s = &ctx.config.truncation;
    let modes = vec![FockMode::Plane([0, 0, 0]), FockMode::Plane([0, 0, 1]), FockMode::Plane([0, 0, -1])];
    let ws = FockWorkspace::new(modes, vec![s.n_max; 3], 2.0 * PI / s.box_side, s.box_side.powi(3))?;
    let r = truncation_rederivation_check(&ws, &ctx.ground())?;
    let mut table = ResultTable::new(&[
        ("defect", "energy"),
        ("free_defect", "energy"),
        ("phi_zero", "energy"),
        ("constant", "energy"),
    ]);
    table.push(vec![r.defect.into(), r.free_defect.into(), r.phi_zero.into(), r.constant.into()]);
    let tol = ctx.tol("truncation.abs");
    Ok(Outcome {
        table,
        pass: r.defect < tol && r.free_defect < tol,
        note: "largest entry two levels below truncation".into(),
    })
}
