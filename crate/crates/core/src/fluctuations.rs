//! Closed-form variances and forms of the smeared fluctuation operators, plus their finite-volume
//! counterparts as observables for the Wick oracle.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::asymptotics::{bose_bubble_integral, bubble_kernel, integrate, richardson_to_zero, Tolerance};
use crate::error::{invalid, Error, Result};
use crate::linalg::{C64, I};
use crate::model::{
    bogoliubov_coefficients, bogoliubov_spectrum, bose_occupation, coth_half, Beta, Mode, ModelParams, ModelTag,
    MomentumGrid,
};
use crate::quasifree::{Observable, QuasiFreeState, Token};

/// A value `Σⱼ cⱼ |q|^{eⱼ}` of a test function at `(q, 0)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Coefficient {
    terms: Vec<(C64, f64)>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(z: C64) -> Self {
        Self::power(z, 0.0)
    }

    pub fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    pub fn power(z: C64, exponent: f64) -> Self {
        Self { terms: vec![(z, exponent)] }
    }

    pub fn eval(&self, q: f64) -> C64 {
        self.terms.iter().map(|&(c, e)| if e == 0.0 { c } else { c * q.abs().powf(e) }).sum()
    }

    /// The map `(Jf)(q,0) = −i f(q,0)`.
    pub fn j(&self) -> Self {
        self.clone() * (-I)
    }

    /// Multiplies by `|q|^e`.
    pub fn renormalized(&self, e: f64) -> Self {
        Self { terms: self.terms.iter().map(|&(c, x)| (c, x + e)).collect() }
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(mut self, rhs: Coefficient) -> Coefficient {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        self * C64::new(-1.0, 0.0)
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Coefficient) -> Coefficient {
        self + (-rhs)
    }
}

impl Mul<C64> for Coefficient {
    type Output = Coefficient;
    fn mul(mut self, s: C64) -> Coefficient {
        self.terms.iter_mut().for_each(|(c, _)| *c *= s);
        self
    }
}

/// `F_q(f, g) = ρ_q(f) + A_q(g)` in the cos-fluctuation normalization. Only `f(q,0)` and
/// `g(q,0)` are stored; `f(0,q)` is their conjugate by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSpec {
    pub model: ModelTag,
    pub q: f64,
    pub f: Coefficient,
    pub g: Coefficient,
}

impl FluctuationSpec {
    pub fn new(model: ModelTag, q: f64, f: Coefficient, g: Coefficient) -> Result<Self> {
        if !(q != 0.0 && q.is_finite()) {
            return Err(invalid("q", "fluctuations need a nonzero momentum"));
        }
        Ok(Self { model, q: q.abs(), f, g })
    }

    /// Density fluctuation `ρ_q` (the condensate part `ρ⁰_q` for the WIBG).
    pub fn density(model: ModelTag, q: f64) -> Result<Self> {
        Self::new(model, q, Coefficient::real(1.0), Coefficient::zero())
    }

    /// Order-parameter fluctuation `A_q`.
    pub fn order(model: ModelTag, q: f64) -> Result<Self> {
        Self::new(model, q, Coefficient::zero(), Coefficient::real(1.0))
    }

    /// Multiplies the whole operator by `|q|^e`.
    pub fn renormalized(&self, e: f64) -> Self {
        Self { f: self.f.renormalized(e), g: self.g.renormalized(e), ..self.clone() }
    }

    pub fn at(&self, q: f64) -> Self {
        Self { q: q.abs(), ..self.clone() }
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.model != other.model {
            return Err(Error::SpecMismatch(format!("models {} and {}", self.model, other.model)));
        }
        Ok(Self { f: self.f.clone() - other.f.clone(), g: self.g.clone() - other.g.clone(), ..self.clone() })
    }

    /// `f(q,0) + i g(q,0)`, the only combination entering the zero-mode part.
    pub fn x(&self) -> C64 {
        self.f.eval(self.q) + I * self.g.eval(self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormValue {
    pub s: f64,
    pub sigma: f64,
    pub full: C64,
}

fn require_q(q: f64) -> Result<()> {
    if q == 0.0 || !q.is_finite() {
        return Err(invalid("q", "must be nonzero"));
    }
    Ok(())
}

pub fn variance_rho_imperfect(q: f64, params: &ModelParams) -> Result<f64> {
    require_q(q)?;
    if !(params.condensate_density > 0.0) {
        return Err(Error::ZeroCondensateDensity);
    }
    Ok(0.5 * coth_half(params.beta, params.kinetic(q)) + bose_bubble_integral(q, params)?.value)
}

pub fn variance_a_imperfect(q: f64, params: &ModelParams) -> Result<f64> {
    require_q(q)?;
    Ok(0.5 * coth_half(params.beta, params.kinetic(q)))
}

fn wibg_data(q: f64, params: &ModelParams) -> Result<(f64, f64, f64)> {
    require_q(q)?;
    if params.condensate_amplitude == 0.0 {
        return Err(Error::NoCondensate);
    }
    let eps = params.kinetic(q);
    let c2v = params.c2v(q);
    Ok((eps, c2v, bogoliubov_spectrum(eps, c2v)?))
}

pub fn variance_rho0_wibg(q: f64, params: &ModelParams) -> Result<f64> {
    let (eps, _, e) = wibg_data(q, params)?;
    Ok(eps / (2.0 * e) * coth_half(params.beta, e))
}

pub fn variance_a_wibg(q: f64, params: &ModelParams) -> Result<f64> {
    let (eps, _, e) = wibg_data(q, params)?;
    Ok(e / (2.0 * eps) * coth_half(params.beta, e))
}

/// Limit form `ω(F₁F₂) = s + iσ/2` at the specs' common `q`.
pub fn covariance_form(spec1: &FluctuationSpec, spec2: &FluctuationSpec, params: &ModelParams) -> Result<FormValue> {
    if spec1.model != spec2.model {
        return Err(Error::SpecMismatch(format!("models {} and {}", spec1.model, spec2.model)));
    }
    if spec1.q != spec2.q {
        return Err(Error::SpecMismatch(format!("momenta {} and {}", spec1.q, spec2.q)));
    }
    let q = spec1.q;
    let (x1, x2) = (spec1.x(), spec2.x());
    let overlap = x1.conj() * x2;
    let sigma = overlap.im;
    let s = match spec1.model {
        ModelTag::Imperfect => {
            let coth = coth_half(params.beta, params.kinetic(q));
            let f_overlap = (spec1.f.eval(q).conj() * spec2.f.eval(q)).re;
            let bubble = if f_overlap == 0.0 { 0.0 } else { f_overlap * bose_bubble_integral(q, params)?.value };
            0.5 * coth * overlap.re + bubble
        }
        ModelTag::Wibg => {
            // (ε + c²v)Re(x̄₁x₂) − c²v Re(x₁x₂) rewritten without cancellation.
            let (eps, c2v, e) = wibg_data(q, params)?;
            coth_half(params.beta, e) * (eps * overlap.re + 2.0 * c2v * x1.im * x2.im) / (2.0 * e)
        }
        ModelTag::Free => return Err(invalid("model", "the free gas has no condensate to normalize by")),
    };
    Ok(FormValue { s, sigma, full: C64::new(s, 0.5 * sigma) })
}

pub fn symplectic_sigma(spec1: &FluctuationSpec, spec2: &FluctuationSpec, params: &ModelParams) -> Result<f64> {
    Ok(covariance_form(spec1, spec2, params)?.sigma)
}

pub fn variance_general(spec: &FluctuationSpec, params: &ModelParams) -> Result<f64> {
    Ok(covariance_form(spec, spec, params)?.s)
}

/// Growth of the WIBG zero-mode combination: `|Re X|·|q|^{1/2} + |Im X|·|q|^{−1/2}` must stay
/// bounded as `q → 0` for the variance to have a finite limit.
fn check_admissible(spec: &FluctuationSpec, qs: &[f64]) -> Result<()> {
    let h = |q: f64| {
        let x = spec.at(q).x();
        x.re.abs() * q.sqrt() + x.im.abs() / q.sqrt()
    };
    let (q_small, q_large) = (qs[0], qs[qs.len() - 1]);
    let (h_small, h_large) = (h(q_small), h(q_large));
    let scale = h_small.max(h_large);
    if scale <= 1e-300 || h_small <= 1e-12 * scale {
        return Ok(());
    }
    let slope = (h_small / h_large).ln() / (q_small / q_large).ln();
    if slope < -0.05 {
        return Err(Error::Inadmissible(format!(
            "|Re X|·|q|^(1/2) + |Im X|·|q|^(-1/2) grows like |q|^{slope:.3} as q → 0"
        )));
    }
    Ok(())
}

/// `q → 0` limit of the variance by Richardson extrapolation over the four smallest momenta of `grid`.
pub fn variance_limit(spec: &FluctuationSpec, params: &ModelParams, grid: &MomentumGrid) -> Result<f64> {
    let qs: Vec<f64> = grid.q_norms().into_iter().take(4).collect();
    if qs.len() < 4 {
        return Err(invalid("q_count", "the limit needs at least four momenta"));
    }
    if spec.model == ModelTag::Wibg {
        check_admissible(spec, &qs)?;
    }
    let ys = qs.iter().map(|&q| variance_general(&spec.at(q), params)).collect::<Result<Vec<_>>>()?;
    richardson_to_zero(&qs, &ys)
}

/// Seminorm distance `√(lim ω(F(f₁−f₂, g₁−g₂)²))`.
pub fn equivalence_distance(
    spec1: &FluctuationSpec,
    spec2: &FluctuationSpec,
    params: &ModelParams,
    grid: &MomentumGrid,
) -> Result<f64> {
    let v = variance_limit(&spec1.difference(spec2)?, params, grid)?;
    // Richardson may overshoot an exact zero by rounding.
    Ok(v.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// `F_q(N)`: all momenta.
    Full,
    /// `F_q(N₀)`: terms touching the zero mode only.
    Condensate,
}

/// Thermal data of a momentum shell in the WIBG state: `(⟨a*a⟩, ⟨aa₋⟩)`.
fn shell(k: f64, params: &ModelParams) -> (f64, f64) {
    let eps = params.kinetic(k);
    let c2v = params.c2v(k);
    if c2v == 0.0 {
        let n = bose_occupation(eps, params.beta, params.mu_shift).unwrap_or(f64::INFINITY);
        return (n, 0.0);
    }
    let b = bogoliubov_coefficients(eps, c2v).expect("k > 0");
    let e = bogoliubov_spectrum(eps, c2v).expect("nonnegative");
    let n = bose_occupation(e, params.beta, 0.0).expect("E > 0");
    (b.cosh_sq * n + b.sinh_sq * (n + 1.0), b.cross() * (2.0 * n + 1.0))
}

/// `∫ d³k/(2π)³ [⟨a*_{k+q}a*_{−k−q}⟩⟨a_k a_{−k}⟩ + ⟨a*_{k+q}a_{k+q}⟩⟨a_k a*_k⟩]`, the excited-mode
/// part of the WIBG structure factor, in bipolar coordinates `r = |k|`, `w = |k+q|`.
pub fn excited_structure_factor(q: f64, params: &ModelParams) -> Result<f64> {
    require_q(q)?;
    let tol = Tolerance { abs: 0.0, rel: 1e-10, max_intervals: 4000 };
    let outer = |r: f64| -> f64 {
        let (nr, ar) = shell(r, params);
        let inner = |w: f64| {
            let (nw, aw) = shell(w, params);
            w * (aw * ar + nw * (nr + 1.0))
        };
        let lo = (r - q).abs();
        let mut pts = vec![lo, r + q];
        if lo < q && r > 0.0 {
            pts.insert(1, lo.max(0.5 * q).min(0.5 * (lo + r + q)));
        }
        match integrate(inner, &pts, tol) {
            Ok(est) => r * est.value,
            Err(_) => f64::NAN,
        }
    };
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = q;
    for _ in 0..200 {
        let piece = integrate(outer, &[a, 0.5 * (a + b), b], tol)?.value;
        total += piece;
        if a >= q && piece.abs() <= 1e-13 * total.abs() {
            return Ok(total / (4.0 * PI * PI * q));
        }
        a = b;
        b *= 2.0;
    }
    Err(Error::Quadrature { value: total, error: f64::NAN, evaluations: 0 })
}

/// Static structure factor `lim ⟨F_q F_{−q}⟩`. With `c = 0` this is the free gas.
pub fn structure_factor(q: f64, params: &ModelParams, kind: DensityKind) -> Result<f64> {
    require_q(q)?;
    let c = params.condensate_amplitude;
    if c == 0.0 {
        return match (kind, params.beta) {
            (DensityKind::Condensate, _) | (DensityKind::Full, Beta::Infinite) => Ok(0.0),
            (DensityKind::Full, Beta::Finite(b)) => Ok(bubble_kernel(q, b, params.mass, params.mu_shift)?.value),
        };
    }
    let condensate = 2.0 * c * c * variance_rho0_wibg(q, params)?;
    match kind {
        DensityKind::Condensate => Ok(condensate),
        DensityKind::Full => Ok(condensate + excited_structure_factor(q, params)?),
    }
}

/// Lattice version of [`excited_structure_factor`]: `(1/V)Σ` over grid modes with `k, k+q ≠ 0`.
pub fn excited_structure_factor_lattice(q: Mode, grid: &MomentumGrid, params: &ModelParams) -> f64 {
    let modes = grid.modes();
    let set: std::collections::HashSet<Mode> = modes.iter().copied().collect();
    let mut sum = 0.0;
    for k in modes {
        let kq = [k[0] + q[0], k[1] + q[1], k[2] + q[2]];
        if k == [0, 0, 0] || kq == [0, 0, 0] || !set.contains(&kq) {
            continue;
        }
        let (nk, ak) = shell(grid.norm(k), params);
        let (nkq, akq) = shell(grid.norm(kq), params);
        sum += akq * ak + nkq * (nk + 1.0);
    }
    sum / grid.volume()
}

/// Finite-volume operators as Wick-oracle observables.
pub mod finite {
    use super::*;

    fn shift(k: Mode, q: Mode, sign: i64) -> Mode {
        [k[0] + sign * q[0], k[1] + sign * q[1], k[2] + sign * q[2]]
    }

    fn neg(q: Mode) -> Mode {
        q.map(|x| -x)
    }

    /// `(1/2n)Σ_k (a*_{k+q}a_k + a*_{k−q}a_k)` over grid pairs; with `zero_mode_only` just the
    /// terms containing `a₀` or `a₀*`.
    pub fn density(grid: &MomentumGrid, q: Mode, norm: f64, zero_mode_only: bool) -> Observable {
        let c = C64::new(0.5 / norm, 0.0);
        let mut obs = Observable::new();
        let modes = grid.modes();
        let set: std::collections::HashSet<Mode> = modes.iter().copied().collect();
        for &k in &modes {
            for sign in [1, -1] {
                let p = shift(k, q, sign);
                if !set.contains(&p) {
                    continue;
                }
                if zero_mode_only && k != [0, 0, 0] && p != [0, 0, 0] {
                    continue;
                }
                obs.push(c, vec![Token::create(p), Token::annihilate(k)]);
            }
        }
        obs
    }

    /// `(i/2)(a*_q + a*_{−q} − a_q − a_{−q})`
    pub fn order(q: Mode) -> Observable {
        let mut obs = Observable::new();
        let h = 0.5 * I;
        for m in [q, neg(q)] {
            obs.push(h, vec![Token::create(m)]);
            obs.push(-h, vec![Token::annihilate(m)]);
        }
        obs
    }

    /// `F_q(N) = V^{−1/2} Σ_k a*_{k+q}a_k`, optionally restricted to terms with `k, k+q ≠ 0`.
    pub fn plane_density(grid: &MomentumGrid, q: Mode, excited_only: bool) -> Observable {
        let c = C64::new(grid.volume().powf(-0.5), 0.0);
        let modes = grid.modes();
        let set: std::collections::HashSet<Mode> = modes.iter().copied().collect();
        let mut obs = Observable::new();
        for &k in &modes {
            let p = shift(k, q, 1);
            if !set.contains(&p) || (excited_only && (k == [0, 0, 0] || p == [0, 0, 0])) {
                continue;
            }
            obs.push(c, vec![Token::create(p), Token::annihilate(k)]);
        }
        obs
    }

    /// `ω(X*X)`
    pub fn second_moment(state: &QuasiFreeState, x: &Observable) -> Result<f64> {
        Ok(state.product_expectation(&x.adjoint(), x)?.re)
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Which {
        RhoImperfect,
        AImperfect,
        Rho0Wibg,
        AWibg,
    }

    /// Finite-volume variance of one of the four basic fluctuations at `q = (0,0,n)` on `grid`.
    pub fn oracle_variance(which: Which, params: &ModelParams, grid: &MomentumGrid, n: i64) -> Result<f64> {
        let q = [0, 0, n];
        let (model, obs) = match which {
            Which::RhoImperfect => {
                let norm = (params.condensate_density * grid.volume()).sqrt();
                (ModelTag::Imperfect, density(grid, q, norm, false))
            }
            Which::AImperfect => (ModelTag::Imperfect, order(q)),
            Which::Rho0Wibg => {
                let norm = params.condensate_amplitude * grid.volume().sqrt();
                (ModelTag::Wibg, density(grid, q, norm, true))
            }
            Which::AWibg => (ModelTag::Wibg, order(q)),
        };
        let state = QuasiFreeState::new(model, params.clone(), grid.clone())?;
        second_moment(&state, &obs)
    }
}
