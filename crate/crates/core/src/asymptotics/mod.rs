//! Bose bubble quadrature, power-law exponents and phase classification.

mod fit;
mod quadrature;

use std::f64::consts::PI;

use rayon::prelude::*;

pub use fit::{
    extrapolate_to_zero, fit_power_law, fit_tail, richardson_to_zero, PowerLawFit, DEFAULT_WINDOW, MIN_R_SQUARED,
};
pub use quadrature::{integrate, Estimate, Tolerance};

use crate::error::{invalid, Error, Result};
use crate::model::{bogoliubov_spectrum, coth_half, Beta, ModelParams, ModelTag, MomentumGrid};

/// `ln(1 − e^{−x})` for `x > 0`.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `J(q) = ∫ d³k/(2π)³ n(ε_{k+q} − μ)(1 + n(ε_k − μ))` at finite `beta`.
///
/// The angular integral is done in closed form, `∫ w n(ε_w − μ) dw = (m/β) ln(1 − e^{−β(ε_w − μ)})`,
/// leaving a radial integral with a logarithmic singularity at `|k| = q` when `μ = 0`.
pub fn bubble_kernel(q: f64, beta: f64, mass: f64, mu: f64) -> Result<Estimate> {
    if !(q > 0.0) {
        return Err(invalid("q", "must be nonzero"));
    }
    if mu > 0.0 {
        return Err(invalid("mu_shift", "must be nonpositive"));
    }
    let eps = |k: f64| k * k / (2.0 * mass);
    let integrand = |r: f64| {
        let one_plus_n = -1.0 / (-beta * (eps(r) - mu)).exp_m1();
        let hi = ln_one_minus_exp(beta * (eps(r + q) - mu));
        let lo = ln_one_minus_exp(beta * (eps((r - q).abs()) - mu));
        r * one_plus_n * (hi - lo)
    };
    let prefactor = mass / (4.0 * PI * PI * beta * q);
    // Beyond `cut` every factor e^{−β(ε−μ)} is below e^{−40}.
    let reach = (2.0 * mass * 40.0 / beta).sqrt();
    let cut = q + reach;
    let est = integrate(
        integrand,
        &[0.0, 0.5 * q, q, 2.0 * q, cut],
        Tolerance { abs: 0.0, rel: 1e-10, max_intervals: 20_000 },
    )?;
    let tail = 2.0 * cut * (-beta * (eps(reach) - mu)).exp() * mass / (beta * reach) * 2.0;
    Ok(Estimate { value: prefactor * est.value, error: prefactor * (est.error + tail), evaluations: est.evaluations })
}

/// Integral term `(1/2ρ₀) J(q)` of the imperfect-gas density variance.
pub fn bose_bubble_integral(q: f64, params: &ModelParams) -> Result<Estimate> {
    if !(params.condensate_density > 0.0) {
        return Err(Error::ZeroCondensateDensity);
    }
    match params.beta {
        Beta::Infinite => Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 }),
        Beta::Finite(b) => {
            let j = bubble_kernel(q, b, params.mass, params.mu_shift)?;
            let s = 0.5 / params.condensate_density;
            Ok(Estimate { value: s * j.value, error: s * j.error, evaluations: j.evaluations })
        }
    }
}

/// Parallel sweep; output order follows `qs`.
pub fn bubble_sweep(qs: &[f64], params: &ModelParams) -> Result<Vec<Estimate>> {
    qs.par_iter().map(|&q| bose_bubble_integral(q, params)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseTag {
    Condensed,
    Critical,
    Normal { mu_shift: f64 },
}

impl PhaseTag {
    pub fn name(self) -> &'static str {
        match self {
            PhaseTag::Condensed => "condensed",
            PhaseTag::Critical => "critical",
            PhaseTag::Normal { .. } => "normal",
        }
    }

    pub fn reference_delta(self) -> f64 {
        match self {
            PhaseTag::Condensed => 1.0 / 3.0,
            PhaseTag::Critical => 1.0 / 6.0,
            PhaseTag::Normal { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeltaReport {
    pub phase: PhaseTag,
    pub delta: f64,
    pub target: f64,
    /// Fit of the variance against `L`.
    pub fit: PowerLawFit,
    /// `(L, variance)` along `|q_L| = 2π/L`.
    pub samples: Vec<(f64, f64)>,
}

/// Variance of the unrenormalized density fluctuation `F_{L,q}(N)` at `|q|` in the given phase.
pub fn density_fluctuation_variance(phase: PhaseTag, q: f64, params: &ModelParams) -> Result<f64> {
    let beta = params.beta.finite().ok_or_else(|| Error::Phase("the phase sweep needs finite beta".into()))?;
    match phase {
        PhaseTag::Condensed => {
            if !(params.condensate_density > 0.0) {
                return Err(Error::Phase("condensed phase requires rho0 > 0".into()));
            }
            let coth = coth_half(params.beta, params.kinetic(q));
            Ok(params.condensate_density * coth + bubble_kernel(q, beta, params.mass, 0.0)?.value)
        }
        PhaseTag::Critical => Ok(bubble_kernel(q, beta, params.mass, 0.0)?.value),
        PhaseTag::Normal { mu_shift } => {
            if !(mu_shift < 0.0) {
                return Err(Error::Phase(format!(
                    "normal phase needs a negative chemical-potential shift, got {mu_shift}"
                )));
            }
            Ok(bubble_kernel(q, beta, params.mass, mu_shift)?.value)
        }
    }
}

/// Fits `Var F_{L,q_L}(N) ∝ V^{2δ} = L^{6δ}` with `|q_L| = 2π/L` over eight box sizes whose
/// `q_L` span `[10⁻³, 10⁻²]` of the thermal momentum `√(2m/β)`.
pub fn delta_exponent(phase: PhaseTag, params: &ModelParams) -> Result<DeltaReport> {
    let beta = params.beta.finite().ok_or_else(|| Error::Phase("the phase sweep needs finite beta".into()))?;
    let q_thermal = (2.0 * params.mass / beta).sqrt();
    let qs: Vec<f64> = (0..8).map(|i| q_thermal * 1e-3 * 10f64.powf(i as f64 / 7.0)).collect();
    let samples: Vec<(f64, f64)> = qs
        .par_iter()
        .map(|&q| density_fluctuation_variance(phase, q, params).map(|v| (2.0 * PI / q, v)))
        .collect::<Result<_>>()?;
    let fit = fit_power_law(&samples)?;
    Ok(DeltaReport { phase, delta: fit.exponent / 6.0, target: phase.reference_delta(), fit, samples })
}

#[derive(Debug, Clone)]
pub struct LifetimeReport {
    pub model: ModelTag,
    /// Power of `|q|⁻¹` in the rescaled time unit.
    pub exponent: f64,
    /// Fit of the dynamical energy scale (`ε_q` or `E_q`) over the small-|q| end of the grid.
    pub fit: PowerLawFit,
}

pub fn lifetime_exponent(model: ModelTag, params: &ModelParams, grid: &MomentumGrid) -> Result<LifetimeReport> {
    let qs = grid.q_norms();
    let (exponent, samples): (f64, Vec<(f64, f64)>) = match model {
        ModelTag::Imperfect => (2.0, qs.iter().map(|&q| (q, params.kinetic(q))).collect()),
        ModelTag::Wibg => (
            1.0,
            qs.iter()
                .map(|&q| bogoliubov_spectrum(params.kinetic(q), params.c2v(q)).map(|e| (q, e)))
                .collect::<Result<_>>()?,
        ),
        ModelTag::Free => return Err(invalid("model", "no Goldstone time scale for the free gas")),
    };
    let fit = fit_tail(&samples, DEFAULT_WINDOW)?;
    Ok(LifetimeReport { model, exponent, fit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams {
            mass: 0.5,
            beta: Beta::Finite(1.0),
            condensate_density: 1.0,
            total_density: 1.2,
            ..Default::default()
        }
    }

    #[test]
    fn ln_one_minus_exp_branches() {
        for &x in &[0.3f64, 0.7, 5.0, 50.0] {
            let direct = (1.0 - (-x).exp()).ln();
            assert!((ln_one_minus_exp(x) - direct).abs() <= 1e-14 * direct.abs().max(1e-300) + 1e-15);
        }
        let x = 1e-12f64;
        assert!((ln_one_minus_exp(x) - (x.ln() - 0.5 * x)).abs() < 1e-14);
    }

    #[test]
    fn ground_state_is_zero() {
        let p = ModelParams { beta: Beta::Infinite, ..params() };
        assert_eq!(bose_bubble_integral(0.1, &p).unwrap().value, 0.0);
    }

    #[test]
    fn normalization_required() {
        let p = ModelParams { condensate_density: 0.0, ..params() };
        assert_eq!(bose_bubble_integral(0.1, &p), Err(Error::ZeroCondensateDensity));
    }

    #[test]
    fn leading_small_q_behaviour() {
        // J(q) → m²/(2β²q) as q → 0 at μ = 0.
        let p = params();
        let q = 1e-4;
        let j = bubble_kernel(q, 1.0, p.mass, 0.0).unwrap().value;
        let lead = p.mass * p.mass / (2.0 * q);
        assert!((j / lead - 1.0).abs() < 1e-2, "{}", j / lead);
    }

    #[test]
    fn large_q_tends_to_thermal_density() {
        // Only the n(ε_{k+q})·1 piece survives far from the origin: (1/2ρ₀)·ζ(3/2)(m/2πβ)^{3/2}.
        let p = params();
        let thermal = 2.612375348685488 * (p.mass / (2.0 * PI)).powf(1.5);
        let far = bose_bubble_integral(40.0, &p).unwrap().value;
        assert!((far / (0.5 * thermal) - 1.0).abs() < 1e-8, "{}", far / (0.5 * thermal));
    }

    #[test]
    fn monotone_as_q_decreases() {
        let p = params();
        let grid = MomentumGrid::new(2.0 * PI * 1000.0, 1.0, 12).unwrap();
        let vals = bubble_sweep(&grid.q_norms(), &p).unwrap();
        assert!(vals.windows(2).all(|w| w[0].value > w[1].value));
    }

    #[test]
    fn lifetime_tags() {
        let p = params();
        let grid = MomentumGrid::new(2.0 * PI * 1e4, 0.1, 16).unwrap();
        let imp = lifetime_exponent(ModelTag::Imperfect, &p, &grid).unwrap();
        assert_eq!(imp.exponent, 2.0);
        assert!((imp.fit.exponent - 2.0).abs() < 1e-12);
        let w = lifetime_exponent(ModelTag::Wibg, &p, &grid).unwrap();
        assert_eq!(w.exponent, 1.0);
        assert!((w.fit.exponent - 1.0).abs() < 0.02);
        assert!(lifetime_exponent(ModelTag::Free, &p, &grid).is_err());
    }

    #[test]
    fn phase_validation() {
        let p = params();
        assert!(delta_exponent(PhaseTag::Normal { mu_shift: 0.0 }, &p).is_err());
        let g = ModelParams { beta: Beta::Infinite, ..params() };
        assert!(delta_exponent(PhaseTag::Critical, &g).is_err());
        let e = ModelParams { condensate_density: 0.0, ..params() };
        assert!(delta_exponent(PhaseTag::Condensed, &e).is_err());
    }
}
