use std::f64::consts::PI;

use super::algebra::substitute_zero_mode;
use super::operators::{
    build_hamiltonian, condensate_density, density_fluctuation, dynamics_commutator, interaction, interaction_rewrite,
    kinetic_energy, number_squared, order_fluctuation, pair_operator, phi_zero, plane_density, product,
    wibg_interaction, zero_mode_fluctuation,
};
use super::state::{coherent_cutoff, pair_sector_ground, squeezed_ground, top_population, Factor, FiniteState};
use super::workspace::{FockMode, FockWorkspace};
use crate::asymptotics::{extrapolate_to_zero, fit_power_law, richardson_to_zero, PowerLawFit};
use crate::error::{invalid, Error, Result};
use crate::fluctuations::{variance_general, Coefficient, FluctuationSpec};
use crate::linalg::{expm_multiply, inner, vec_norm, SparseMatrix, C64, I};
use crate::model::{bogoliubov_spectrum, omega_gap, Beta, Mode, ModelParams, ModelTag, MomentumGrid};
use crate::quasifree::Observable;

/// Volumes of the finite-size sequences (lattice units).
pub const VOLUMES: [f64; 4] = [8.0, 27.0, 64.0, 125.0];

/// Top-level population above which a truncation warning is attached.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

const Q: Mode = [0, 0, 1];

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Gap between the `Δ = 1` and `Δ = 0` ground energies of the two-mode quadratic block
/// `(ε + c²v)(n_q + n_{−q}) + c²v(a*_q a*_{−q} + a_q a_{−q})`, by dense diagonalization. The cutoff is
/// doubled until the gap is stable to `10⁻¹¹`, well above the eigensolver rounding of the large levels.
pub fn two_mode_gap(eps: f64, c2v: f64) -> Result<f64> {
    bogoliubov_spectrum(eps, c2v)?;
    if !(eps > 0.0) {
        return Err(invalid("eps", "the pair block needs positive kinetic energy"));
    }
    let (a, b) = (eps + c2v, c2v);
    let gap = |n| pair_sector_ground(a, b, 1, n) - pair_sector_ground(a, b, 0, n);
    let mut n = 32;
    let mut prev = gap(n);
    loop {
        n *= 2;
        let next = gap(n);
        if (next - prev).abs() <= 1e-11 * next.abs() {
            return Ok(next);
        }
        if n >= 1024 {
            return Err(Error::CapExceeded { dimension: n, cap: 1024 });
        }
        prev = next;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UDensityReport {
    /// `‖[U_L, F_q(N)]‖` below truncation.
    pub commutator: f64,
    /// `‖U_L − (½Σ v F F + (v(0)/2V)N² − ½φ(0)N)‖` below truncation.
    pub rewrite_defect: f64,
    /// `‖[U_L(c), F_q(N)]‖` below truncation.
    pub wibg_commutator: f64,
    pub warning: Option<String>,
}

/// Commutation of the two-body interaction with the density fluctuation on a cyclic workspace.
/// Norms are the largest matrix entry on columns at least three levels below every cutoff.
pub fn u_density_commutator_check(ws: &FockWorkspace, params: &ModelParams, q: Mode) -> Result<UDensityReport> {
    if ws.period().is_none() {
        return Err(invalid("workspace", "the interaction check needs a cyclic mode set"));
    }
    let margin = 3;
    let warning = (!ws.below(margin).contains(&true))
        .then(|| format!("cutoffs {:?} leave no states {margin} levels below truncation", ws.n_max()));
    let u = ws.observable_matrix(&interaction(ws, params))?;
    let f = ws.observable_matrix(&plane_density(ws, q))?;
    let rewrite = interaction_rewrite(ws, params)?;
    let uc = wibg_interaction(ws, params)?;
    Ok(UDensityReport {
        commutator: ws.restricted_norm(&u.commutator(&f), margin),
        rewrite_defect: ws.restricted_norm(&u.sub(&rewrite), 2),
        wibg_commutator: ws.restricted_norm(&uc.commutator(&f), margin),
        warning,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BchReport {
    /// `‖e^{iF₁}e^{iF₂} − e^{i(F₁+F₂)}e^{−½[F₁,F₂]}‖_ω`
    pub defect: f64,
    /// `⅓ max_{t∈[0,1]} ‖[[F₂,F₁], tF₁ + F₂]‖_ω`; the norm is convex in `t`, so the endpoints suffice.
    pub bound: f64,
    /// `|ω(e^{−iF₂}e^{−iF₁}e^{i(F₁+F₂)}e^{−½[F₁,F₂]}) − 1|`
    pub overlap_gap: f64,
    pub leakage: f64,
}

pub fn bch_defect(ws: &FockWorkspace, f1: &SparseMatrix, f2: &SparseMatrix, state: &FiniteState) -> BchReport {
    let k = f1.commutator(f2);
    let sum = f1.add(f2);
    let (mut d2, mut overlap) = (0.0, C64::new(0.0, 0.0));
    let mut outputs = Vec::new();
    for (w, psi) in state.components() {
        let left = expm_multiply(f1, &expm_multiply(f2, psi, I), I);
        let right = expm_multiply(&sum, &expm_multiply(&k, psi, re(-0.5)), I);
        let diff: Vec<C64> = left.iter().zip(&right).map(|(a, b)| a - b).collect();
        d2 += w * vec_norm(&diff).powi(2);
        overlap += w * inner(&left, &right);
        outputs.push((w, left));
    }
    let comps: Vec<(f64, &[C64])> = outputs.iter().map(|(w, v)| (*w, v.as_slice())).collect();
    let k21 = k.scale_re(-1.0);
    let bound = [f2.clone(), sum].iter().map(|x| state.omega_norm(&k21.commutator(x))).fold(0.0, f64::max) / 3.0;
    BchReport { defect: d2.sqrt(), bound, overlap_gap: (overlap - 1.0).norm(), leakage: top_population(ws, &comps) }
}

/// Coherent zero mode of amplitude `√(ρ₀V)` with the symmetric `±q` mode in its vacuum.
pub fn condensate_workspace(z: f64, q: f64, volume: f64, excited_cutoff: usize) -> Result<FockWorkspace> {
    FockWorkspace::new(
        vec![FockMode::Plane([0, 0, 0]), FockMode::Symmetric(Q)],
        vec![coherent_cutoff(z), excited_cutoff],
        q,
        volume,
    )
}

/// BCH defect of `(ρ_q, A_q)` in the imperfect-gas ground state along a volume sequence.
pub fn bch_sweep(params: &ModelParams, volumes: &[f64], excited_cutoff: usize) -> Result<Vec<(f64, BchReport)>> {
    volumes
        .iter()
        .map(|&v| {
            let z = (params.condensate_density * v).sqrt();
            let ws = condensate_workspace(z, 2.0 * PI / v.cbrt(), v, excited_cutoff)?;
            let state = FiniteState::coherent_vacuum(&ws, z)?;
            let rho = density_fluctuation(&ws, Q, z)?;
            let a = order_fluctuation(&ws, Q)?;
            Ok((v, bch_defect(&ws, &rho, &a, &state)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltReport {
    pub ts: Vec<f64>,
    pub values: Vec<C64>,
    /// `s` of the least-squares fit `ln|ω(e^{itF})| = −t²s/2`.
    pub s_fit: f64,
    /// `max_t |Im ln ω(e^{itF})|`
    pub max_phase: f64,
    pub leakage: f64,
    pub warning: Option<String>,
}

/// `ω(e^{itF})` on an increasing grid of `t ≥ 0`, propagated step by step.
pub fn clt_char_function(ws: &FockWorkspace, f: &SparseMatrix, ts: &[f64], state: &FiniteState) -> Result<CltReport> {
    if ts.is_empty() || ts[0] < 0.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("t_grid", "must be nonempty, nonnegative and increasing"));
    }
    let comps = state.components();
    let mut current: Vec<Vec<C64>> = comps.iter().map(|(_, v)| v.to_vec()).collect();
    let mut values = Vec::with_capacity(ts.len());
    let mut leakage: f64 = 0.0;
    let mut last = 0.0;
    for &t in ts {
        for v in current.iter_mut() {
            *v = expm_multiply(f, v, I * (t - last));
        }
        last = t;
        let value: C64 = comps.iter().zip(&current).map(|((w, psi), v)| *w * inner(psi, v)).sum();
        let evolved: Vec<(f64, &[C64])> = comps.iter().zip(&current).map(|((w, _), v)| (*w, v.as_slice())).collect();
        leakage = leakage.max(top_population(ws, &evolved));
        values.push(value);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&t, v) in ts.iter().zip(&values) {
        num += t * t * v.norm().ln();
        den += t.powi(4);
    }
    if den == 0.0 {
        return Err(invalid("t_grid", "needs some t > 0"));
    }
    let max_phase = values.iter().map(|v| v.arg().abs()).fold(0.0, f64::max);
    let warning =
        (leakage > LEAKAGE_LIMIT).then(|| format!("top-level population {leakage:.2e} exceeds {LEAKAGE_LIMIT:e}"));
    Ok(CltReport { ts: ts.to_vec(), values, s_fit: -2.0 * num / den, max_phase, leakage, warning })
}

/// Characteristic function of the zero-mode fluctuation `F_q(f, g)` in the imperfect-gas ground
/// state at volume `v`, compared against the closed-form `s_q(f,g|f,g)`.
pub fn clt_imperfect(params: &ModelParams, f: C64, g: C64, volume: f64, ts: &[f64]) -> Result<(CltReport, f64)> {
    let z = (params.condensate_density * volume).sqrt();
    let q = 2.0 * PI / volume.cbrt();
    let ws = condensate_workspace(z, q, volume, 16)?;
    let state = FiniteState::coherent_vacuum(&ws, z)?;
    let op = zero_mode_fluctuation(&ws, Q, z, f, g)?;
    let report = clt_char_function(&ws, &op, ts, &state)?;
    let spec = FluctuationSpec::new(ModelTag::Imperfect, q, Coefficient::constant(f), Coefficient::constant(g))?;
    Ok((report, variance_general(&spec, params)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureConfig {
    /// Momentum of the closure identities and the remainder fit.
    pub q: f64,
    pub volumes: Vec<f64>,
    /// Momenta of the virial extrapolation `q → 0`.
    pub virial_momenta: Vec<f64>,
    /// Grid whose four smallest momenta carry the closed-form `q → 0` limits of the maps.
    pub map_grid: MomentumGrid,
    /// Cutoff of the symmetric mode for the imperfect gas (the WIBG cutoff is adaptive).
    pub excited_cutoff: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self {
            q: 0.4,
            volumes: VOLUMES.to_vec(),
            virial_momenta: vec![0.4, 0.3, 0.2],
            map_grid: MomentumGrid::new(2.0 * PI * 1e3, 0.1, 8).expect("valid grid"),
            excited_cutoff: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureRow {
    pub volume: f64,
    /// Largest entry of the two commutator identities with their explicit remainders.
    pub identity_defect: f64,
    /// `√(‖R_ρ‖²_ω + ‖R_A‖²_ω)` of the terms beyond the oscillator pair.
    pub remainder: f64,
    /// `ω(ρ̃²)` and `ω(Ã²)` with the model's `|q|` renormalization.
    pub rho_sq: f64,
    pub a_sq: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport {
    pub model: ModelTag,
    pub omega: f64,
    pub rows: Vec<ClosureRow>,
    pub remainder_fit: PowerLawFit,
    /// `Ω²ω(ρ̃²)/ω(Ã²)` extrapolated in `1/V` and then in `q`.
    pub virial: f64,
    /// Seminorm distances of `i[H̃, ρ̃] − Ã/Ω` and `−i[H̃, Ã] − Ωρ̃` in the limit state.
    pub map_defects: [f64; 2],
}

struct ClosureSample {
    row: ClosureRow,
}

fn closure_sample(
    model: ModelTag,
    params: &ModelParams,
    q: f64,
    volume: f64,
    excited_cutoff: usize,
) -> Result<ClosureSample> {
    let eps = params.kinetic(q);
    let (z, ws, state) = match model {
        ModelTag::Imperfect => {
            let z = (params.condensate_density * volume).sqrt();
            let ws = condensate_workspace(z, q, volume, excited_cutoff)?;
            let state = FiniteState::coherent_vacuum(&ws, z)?;
            (z, ws, state)
        }
        ModelTag::Wibg => {
            let c = params.condensate_amplitude;
            let z = c * volume.sqrt();
            let c2v = params.c2v(q);
            let (coeffs, _) = squeezed_ground(eps + c2v, c2v, 1e-15)?;
            let ws = condensate_workspace(z, q, volume, coeffs.len() - 1)?;
            let state = FiniteState::product(
                &ws,
                &[Factor::Coherent { mode: 0, amplitude: z }, Factor::Single { mode: 1, coeffs }],
            )?;
            (z, ws, state)
        }
        ModelTag::Free => return Err(invalid("model", "the free gas has no Goldstone pair")),
    };
    let h = build_hamiltonian(model, &ws, params)?;
    let rho = density_fluctuation(&ws, Q, z)?;
    let a = order_fluctuation(&ws, Q)?;
    let c = pair_operator(&ws, Q)?;
    let cd = c.adjoint();
    let n = ws.total_number();
    let v = ws.volume();
    let c_plus = cd.add(&c);
    let c_minus = cd.sub(&c);
    // i[H, ρ] = ρ(ε̃) + R_ρ, where ρ(ε̃) is the fluctuation with f(q,0) = iε_q.
    let rho_eps = zero_mode_fluctuation(&ws, Q, z, I * eps, re(0.0))?;
    let (r_rho, a_lhs, a_main, r_a) = match model {
        ModelTag::Imperfect => {
            let (lambda, mu) = (params.coupling, params.chemical_potential());
            // i[H, A] = −½ε(C* + C) − (λ/2V)(C* + C)N + ½μ(C* + C) − (λ/4V)(C* − C)
            let r_a = c_plus
                .matmul(&n)
                .scale_re(-0.5 * lambda / v)
                .add(&c_plus.scale_re(0.5 * mu))
                .sub(&c_minus.scale_re(0.25 * lambda / v));
            let lhs = dynamics_commutator(&h, &a);
            (SparseMatrix::zeros(ws.dimension(), ws.dimension()), lhs, c_plus.scale_re(-0.5 * eps), r_a)
        }
        _ => {
            let (v0, mu, c2v) = (params.v(0.0), params.wibg_chemical_potential(), params.c2v(q));
            let a0 = ws.annihilator(0);
            let d0 = a0.sub(&a0.adjoint());
            // R_ρ = (i c²v / 2c√V)[C*(a₀ − a₀*) + (a₀ − a₀*)C]
            let r_rho = cd.matmul(&d0).add(&d0.matmul(&c)).scale(I * (0.5 * c2v / z));
            // −i[H, A] = ½(ε + 2c²v)(C* + C) + (v(0)/2V)(C* + C)N − ½μ(C* + C) + (v(0)/4V)(C* − C)
            let r_a = c_plus
                .matmul(&n)
                .scale_re(0.5 * v0 / v)
                .sub(&c_plus.scale_re(0.5 * mu))
                .add(&c_minus.scale_re(0.25 * v0 / v));
            let lhs = dynamics_commutator(&h, &a).scale_re(-1.0);
            (r_rho, lhs, c_plus.scale_re(0.5 * (eps + 2.0 * c2v)), r_a)
        }
    };
    let rho_lhs = dynamics_commutator(&h, &rho);
    let margin = 2;
    let identity_defect = ws
        .restricted_norm(&rho_lhs.sub(&rho_eps).sub(&r_rho), margin)
        .max(ws.restricted_norm(&a_lhs.sub(&a_main).sub(&r_a), margin));
    let remainder =
        (state.omega_norm(&rho_lhs.sub(&rho_eps)).powi(2) + state.omega_norm(&a_lhs.sub(&a_main)).powi(2)).sqrt();
    let (rho_scale, a_scale) = match model {
        ModelTag::Wibg => (1.0 / q, q),
        _ => (1.0, 1.0),
    };
    Ok(ClosureSample {
        row: ClosureRow {
            volume,
            identity_defect,
            remainder,
            rho_sq: state.omega_norm(&rho).powi(2) * rho_scale,
            a_sq: state.omega_norm(&a).powi(2) * a_scale,
            leakage: state.top_population(&ws),
        },
    })
}

/// `√(lim_{q→0} ω((F₁ − F₂)²))` for two `q`-dependent zero-mode coefficient pairs, by Richardson
/// extrapolation over the four smallest momenta of `grid`.
fn map_distance(
    model: ModelTag,
    params: &ModelParams,
    grid: &MomentumGrid,
    first: impl Fn(f64) -> (C64, C64),
    second: impl Fn(f64) -> (C64, C64),
) -> Result<f64> {
    let qs: Vec<f64> = grid.q_norms().into_iter().take(4).collect();
    let ys = qs
        .iter()
        .map(|&q| {
            let ((f1, g1), (f2, g2)) = (first(q), second(q));
            let spec = FluctuationSpec::new(model, q, Coefficient::constant(f1 - f2), Coefficient::constant(g1 - g2))?;
            variance_general(&spec, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(richardson_to_zero(&qs, &ys)?.max(0.0).sqrt())
}

fn closure_params(model: ModelTag, params: &ModelParams) -> ModelParams {
    let total_density = match model {
        ModelTag::Wibg => params.condensate_amplitude.powi(2),
        _ => params.condensate_density,
    };
    ModelParams { beta: Beta::Infinite, total_density, ..params.clone() }
}

/// Dynamical closure of the Goldstone pair: commutator identities with explicit remainders,
/// remainder decay in `V`, the rescaled maps `ρ̃ → Ã/Ω`, `Ã → Ωρ̃` and the virial ratio.
/// The state is the zero-temperature coherent condensate, so the density entering `μ` is taken to
/// be the condensate density (`ρ₀` or `c²`) whatever `total_density` and `beta` say.
pub fn goldstone_closure_check(model: ModelTag, params: &ModelParams, config: &ClosureConfig) -> Result<ClosureReport> {
    let params = &closure_params(model, params);
    let omega = match model {
        ModelTag::Imperfect => 1.0,
        ModelTag::Wibg => omega_gap(params)?,
        ModelTag::Free => return Err(invalid("model", "the free gas has no Goldstone pair")),
    };
    let rows = config
        .volumes
        .iter()
        .map(|&v| Ok(closure_sample(model, params, config.q, v, config.excited_cutoff)?.row))
        .collect::<Result<Vec<_>>>()?;
    let remainder_fit = fit_power_law(&rows.iter().map(|r| (r.volume, r.remainder)).collect::<Vec<_>>())?;
    let inv_v: Vec<f64> = config.volumes.iter().map(|v| 1.0 / v).collect();
    let mut ratios = Vec::new();
    for &q in &config.virial_momenta {
        let samples = config
            .volumes
            .iter()
            .map(|&v| Ok(closure_sample(model, params, q, v, config.excited_cutoff)?.row))
            .collect::<Result<Vec<_>>>()?;
        let rho = extrapolate_to_zero(&inv_v, &samples.iter().map(|r| r.rho_sq).collect::<Vec<_>>(), &[1.0])?;
        let a = extrapolate_to_zero(&inv_v, &samples.iter().map(|r| r.a_sq).collect::<Vec<_>>(), &[1.0])?;
        ratios.push(omega * omega * rho / a);
    }
    let powers: Vec<f64> = (1..config.virial_momenta.len()).map(|j| 2.0 * j as f64).collect();
    let virial = extrapolate_to_zero(&config.virial_momenta, &ratios, &powers)?;
    let zero = re(0.0);
    let map_defects = match model {
        ModelTag::Imperfect => {
            // i[H/ε, ρ] = ρ(ε̃/ε): f = i.  −i[H/ε, A] ≈ A(ε̃/ε) = ½(C + C*): g = −i.
            let d1 = map_distance(model, params, &config.map_grid, |_| (I, zero), |_| (zero, re(1.0)))?;
            let d2 = map_distance(model, params, &config.map_grid, |_| (zero, -I), |_| (re(1.0), zero))?;
            [d1, d2]
        }
        _ => {
            let e = |q: f64| bogoliubov_spectrum(params.kinetic(q), params.c2v(q)).unwrap_or(f64::NAN);
            let d1 = map_distance(
                model,
                params,
                &config.map_grid,
                |q| (I * (params.kinetic(q) / (e(q) * q.sqrt())), zero),
                |q| (zero, re(q.sqrt() / omega)),
            )?;
            let d2 = map_distance(
                model,
                params,
                &config.map_grid,
                |q| (zero, -I * ((params.kinetic(q) + 2.0 * params.c2v(q)) * q.sqrt() / e(q))),
                |q| (re(omega / q.sqrt()), zero),
            )?;
            [d1, d2]
        }
    };
    Ok(ClosureReport { model, omega, rows, remainder_fit, virial, map_defects })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    /// Largest entry of `T − μN + Subst(½Σv F(N₀)F(N₀)) + (v(0)/2V)N² − ½φ(0)N − H(c) + ½φ(0)N − const`.
    pub defect: f64,
    /// `φ_S(0) = (1/V)Σ_{k∈S} v(k)`, the coefficient of the chemical-potential shift `−½φ(0)N`.
    pub phi_zero: f64,
    /// `½(φ_S(0) − v(0)/V)c²V`; the `k = 0` term is absent from a finite sum over `k ≠ 0`.
    pub constant: f64,
    /// Same identity at `c = 0` against the free quadratic part plus `(v(0)/2V)N² − μN`.
    pub free_defect: f64,
}

/// Rebuilds the WIBG Hamiltonian from the zero-mode truncation of the density-density interaction
/// and the substitution `a₀ → c√V`.
pub fn truncation_rederivation_check(ws: &FockWorkspace, params: &ModelParams) -> Result<TruncationReport> {
    let v = ws.volume();
    let mut half_ff = Observable::new();
    for m in ws.modes() {
        match *m {
            FockMode::Plane(k) if k != [0, 0, 0] => {
                let minus = k.map(|x| -x);
                ws.plane(minus)?;
                let term = product(&condensate_density(k, v), &condensate_density(minus, v));
                half_ff = half_ff.plus(term.scaled(re(0.5 * params.v(ws.momentum(ws.plane(k)?)))));
            }
            FockMode::Plane(_) => {}
            FockMode::Symmetric(s) => return Err(Error::InvalidMode(s)),
        }
    }
    let phi = phi_zero(ws, params);
    let v0 = params.v(0.0);
    let n = ws.total_number();
    let mu = params.wibg_chemical_potential();
    let open = kinetic_energy(ws, params)
        .sub(&n.scale_re(mu))
        .add(&number_squared(ws).scale_re(0.5 * v0 / v))
        .sub(&n.scale_re(0.5 * phi));
    let identity = |p: &ModelParams, constant: f64| -> Result<f64> {
        let amp = re(p.condensate_amplitude * v.sqrt());
        let subst = ws.observable_matrix(&substitute_zero_mode(&half_ff, amp))?;
        let lhs = open.add(&subst);
        let rhs = build_hamiltonian(ModelTag::Wibg, ws, p)?
            .sub(&n.scale_re(0.5 * phi))
            .add(&ws.identity().scale_re(constant));
        Ok(ws.restricted_norm(&lhs.sub(&rhs), 2))
    };
    let c2 = params.condensate_amplitude.powi(2);
    let constant = 0.5 * (phi - v0 / v) * c2 * v;
    let defect = identity(params, constant)?;
    let free = ModelParams { condensate_amplitude: 0.0, ..params.clone() };
    let free_defect = identity(&free, 0.0)?;
    Ok(TruncationReport { defect, phi_zero: phi, constant, free_defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Beta;

    fn ground() -> ModelParams {
        ModelParams { beta: Beta::Infinite, ..Default::default() }
    }

    #[test]
    fn gap_matches_spectrum() {
        for (eps, c2v) in [(0.05, 5.0), (1.0, 0.0), (2.0, 0.3)] {
            let gap = two_mode_gap(eps, c2v).unwrap();
            assert!((gap / bogoliubov_spectrum(eps, c2v).unwrap() - 1.0).abs() < 1e-10, "{eps} {c2v}");
        }
    }

    #[test]
    fn single_quadrature_bch_is_exact() {
        let ws = FockWorkspace::new(vec![FockMode::Plane([0, 0, 1])], vec![60], 1.0, 1.0).unwrap();
        let x = ws.creator(0).add(ws.annihilator(0)).scale_re(0.3);
        let p = ws.creator(0).sub(ws.annihilator(0)).scale(I * 0.4);
        let vac = FiniteState::product(&ws, &[]).unwrap();
        let r = bch_defect(&ws, &x, &p, &vac);
        assert!(r.defect < 1e-12 && r.leakage < 1e-20);
    }

    #[test]
    fn vacuum_quadrature_characteristic_function() {
        let ws = FockWorkspace::new(vec![FockMode::Plane([0, 0, 1])], vec![40], 1.0, 1.0).unwrap();
        let x = ws.creator(0).add(ws.annihilator(0)).scale_re(std::f64::consts::FRAC_1_SQRT_2);
        let vac = FiniteState::product(&ws, &[]).unwrap();
        let ts = [0.0, 0.5, 1.0, 1.5];
        let r = clt_char_function(&ws, &x, &ts, &vac).unwrap();
        for (t, v) in ts.iter().zip(&r.values) {
            assert!((v - re((-t * t / 4.0).exp())).norm() < 1e-12);
            assert!(v.norm() <= 1.0 + 1e-14);
        }
        assert!((r.s_fit - 0.5).abs() < 1e-10);
    }

    #[test]
    fn bch_defect_shrinks_with_volume() {
        let rows = bch_sweep(&ground(), &[8.0, 27.0], 10).unwrap();
        assert!(rows[1].1.defect < rows[0].1.defect);
        for (_, r) in &rows {
            assert!(r.defect <= r.bound);
        }
    }

    #[test]
    fn u_commutes_with_density_on_cyclic_set() {
        let ws = FockWorkspace::cyclic(3, 4, 0.9, 3.0).unwrap();
        let r = u_density_commutator_check(&ws, &ground(), [0, 0, 1]).unwrap();
        assert!(r.commutator < 1e-10 && r.rewrite_defect < 1e-10, "{r:?}");
        assert!(r.wibg_commutator > 1e-3);
        assert!(r.warning.is_none());
    }

    #[test]
    fn closure_ignores_thermal_density() {
        let cfg = ClosureConfig { volumes: vec![8.0, 27.0, 64.0, 125.0], ..Default::default() };
        let a = goldstone_closure_check(ModelTag::Imperfect, &ground(), &cfg).unwrap();
        let hot = ModelParams { beta: Beta::Finite(1.0), total_density: 2.0, ..ground() };
        let b = goldstone_closure_check(ModelTag::Imperfect, &hot, &cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert!((a.remainder_fit.exponent + 0.5).abs() < 0.1);
    }

    #[test]
    fn truncation_identity() {
        let modes = vec![FockMode::Plane([0, 0, 0]), FockMode::Plane([0, 0, 1]), FockMode::Plane([0, 0, -1])];
        let ws = FockWorkspace::new(modes, vec![4, 4, 4], 0.8, 8.0).unwrap();
        let r = truncation_rederivation_check(&ws, &ground()).unwrap();
        assert!(r.defect < 1e-10 && r.free_defect < 1e-10, "{r:?}");
        assert!(r.constant > 0.0);
    }
}
