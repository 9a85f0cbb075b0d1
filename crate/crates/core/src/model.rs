//! Physical parameters, dispersion relations and Bogoliubov data.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Integer coordinates of a momentum on the lattice `(2π/L)ℤ³`.
pub type Mode = [i64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    /// Ground state.
    Infinite,
}

impl Beta {
    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Beta::Finite(b) => Some(b),
            Beta::Infinite => None,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "ground" => Ok(Beta::Infinite),
            other => other.parse::<f64>().map_err(|e| invalid("beta", e.to_string())).and_then(|b| {
                if b.is_infinite() && b > 0.0 {
                    Ok(Beta::Infinite)
                } else if b > 0.0 {
                    Ok(Beta::Finite(b))
                } else {
                    Err(invalid("beta", format!("{b} is not positive")))
                }
            }),
        }
    }
}

/// Radial two-body potential `v(|k|)`.
#[derive(Clone)]
pub enum Potential {
    Gaussian { strength: f64, range: f64 },
    Constant { strength: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Potential {
    pub fn eval(&self, k: f64) -> f64 {
        match self {
            Potential::Gaussian { strength, range } => strength * (-(k * k) / (range * range)).exp(),
            Potential::Constant { strength } => *strength,
            Potential::Custom(v) => v(k.abs()),
        }
    }
}

impl Default for Potential {
    fn default() -> Self {
        Potential::Gaussian { strength: 1.0, range: 2.0 }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Gaussian { strength, range } => {
                write!(f, "Gaussian {{ strength: {strength}, range: {range} }}")
            }
            Potential::Constant { strength } => write!(f, "Constant {{ strength: {strength} }}"),
            Potential::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelTag {
    Imperfect,
    Wibg,
    Free,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Imperfect => "imperfect",
            ModelTag::Wibg => "wibg",
            ModelTag::Free => "free",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "imperfect" => Ok(ModelTag::Imperfect),
            "wibg" | "bogoliubov" => Ok(ModelTag::Wibg),
            "free" => Ok(ModelTag::Free),
            other => Err(invalid("model", format!("unknown model tag `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelParams {
    pub mass: f64,
    pub beta: Beta,
    pub total_density: f64,
    /// Imperfect gas condensate density ρ₀.
    pub condensate_density: f64,
    /// WIBG condensate amplitude c (real).
    pub condensate_amplitude: f64,
    /// Imperfect gas mean-field coupling λ.
    pub coupling: f64,
    pub potential: Potential,
    /// Shift α ≤ 0 of the one-particle energies in occupations, used for the normal phase.
    pub mu_shift: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            mass: 0.5,
            beta: Beta::Finite(1.0),
            total_density: 1.0,
            condensate_density: 1.0,
            condensate_amplitude: 1.0,
            coupling: 1.0,
            potential: Potential::default(),
            mu_shift: 0.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(invalid("mass", format!("{} is not positive", self.mass)));
        }
        if let Beta::Finite(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(invalid("beta", format!("{b} is not positive")));
            }
        }
        if !(self.condensate_density >= 0.0) || self.condensate_density > self.total_density {
            return Err(invalid(
                "condensate_density",
                format!("need 0 <= rho0 <= rho, got rho0 = {}, rho = {}", self.condensate_density, self.total_density),
            ));
        }
        if !self.condensate_amplitude.is_finite() {
            return Err(invalid("condensate_amplitude", "not finite"));
        }
        if self.mu_shift > 0.0 {
            return Err(invalid("mu_shift", "must be nonpositive"));
        }
        let v0 = self.potential.eval(0.0);
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(invalid("potential", format!("v(0) = {v0} is not positive")));
        }
        Ok(())
    }

    /// Imperfect gas chemical potential λρ.
    pub fn chemical_potential(&self) -> f64 {
        self.coupling * self.total_density
    }

    /// WIBG chemical potential `v(0)ρ`, the mean-field value fixing the density at `ρ`.
    pub fn wibg_chemical_potential(&self) -> f64 {
        self.potential.eval(0.0) * self.total_density
    }

    pub fn v(&self, k: f64) -> f64 {
        self.potential.eval(k)
    }

    /// `c² v(|k|)`.
    pub fn c2v(&self, k: f64) -> f64 {
        self.condensate_amplitude * self.condensate_amplitude * self.potential.eval(k)
    }

    pub fn kinetic(&self, k: f64) -> f64 {
        k * k / (2.0 * self.mass)
    }
}

pub fn dispersion(k: [f64; 3], params: &ModelParams) -> Result<f64> {
    if k.iter().any(|x| !x.is_finite()) {
        return Err(invalid("k", format!("{k:?} has non-finite components")));
    }
    if !(params.mass > 0.0) {
        return Err(invalid("mass", "must be positive"));
    }
    Ok((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) / (2.0 * params.mass))
}

pub fn bose_occupation(eps: f64, beta: Beta, mu_shift: f64) -> Result<f64> {
    match beta {
        Beta::Infinite => Ok(0.0),
        Beta::Finite(b) => {
            let x = b * (eps - mu_shift);
            if x == 0.0 {
                Err(Error::OccupationDivergence { eps })
            } else if x < 0.0 {
                Err(invalid("eps", format!("{eps} lies below the chemical potential {mu_shift}")))
            } else {
                Ok(1.0 / x.exp_m1())
            }
        }
    }
}

/// `coth(βe/2)`, equal to 1 in the ground state.
pub fn coth_half(beta: Beta, e: f64) -> f64 {
    match beta {
        Beta::Infinite => 1.0,
        Beta::Finite(b) => 1.0 + 2.0 / (b * e).exp_m1(),
    }
}

pub fn bogoliubov_spectrum(eps_k: f64, c2v_k: f64) -> Result<f64> {
    if !(eps_k >= 0.0) {
        return Err(invalid("eps_k", format!("{eps_k} is negative")));
    }
    if !(c2v_k >= 0.0) {
        return Err(invalid("c2v_k", format!("{c2v_k} is negative")));
    }
    Ok((eps_k * (eps_k + 2.0 * c2v_k)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoefficients {
    pub tanh2a: f64,
    pub cosh2a: f64,
    pub sinh2a: f64,
    /// `(cosh α + sinh α)² = ε/E`
    pub plus_sq: f64,
    /// `(cosh α − sinh α)² = E/ε`
    pub minus_sq: f64,
    pub cosh_sq: f64,
    /// `c2v²/(2E(ε + c2v + E))`, free of the cancellation in `(cosh 2α − 1)/2`.
    pub sinh_sq: f64,
}

impl BogoliubovCoefficients {
    /// `cosh α · sinh α`
    pub fn cross(&self) -> f64 {
        0.5 * self.sinh2a
    }
}

pub fn bogoliubov_coefficients(eps_k: f64, c2v_k: f64) -> Result<BogoliubovCoefficients> {
    if !(eps_k > 0.0) {
        return Err(Error::SingularCoefficients);
    }
    let e = bogoliubov_spectrum(eps_k, c2v_k)?;
    let sinh_sq = c2v_k * c2v_k / (2.0 * e * (eps_k + c2v_k + e));
    Ok(BogoliubovCoefficients {
        cosh_sq: 1.0 + sinh_sq,
        sinh_sq,
        tanh2a: -c2v_k / (eps_k + c2v_k),
        cosh2a: (eps_k + c2v_k) / e,
        sinh2a: -c2v_k / e,
        plus_sq: eps_k / e,
        minus_sq: e / eps_k,
    })
}

pub fn omega_gap(params: &ModelParams) -> Result<f64> {
    if params.condensate_amplitude == 0.0 {
        return Err(Error::NoCondensate);
    }
    let v0 = params.v(0.0);
    if !(v0 > 0.0) {
        return Err(invalid("potential", "v(0) must be positive"));
    }
    Ok((4.0 * params.mass * params.c2v(0.0)).sqrt())
}

/// `E_q |q| / ε_q = √(q² + 4m c² v(q))`, free of the 0/0 at small q.
pub fn gap_ratio(q: f64, params: &ModelParams) -> f64 {
    (q * q + 4.0 * params.mass * params.c2v(q)).sqrt()
}

/// Finite box `[0, L)³` with its momentum lattice truncated at `cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub box_side: f64,
    pub cutoff: f64,
    pub q_count: usize,
}

impl MomentumGrid {
    pub fn new(box_side: f64, cutoff: f64, q_count: usize) -> Result<Self> {
        if !(box_side > 0.0 && box_side.is_finite()) {
            return Err(invalid("box_side", format!("{box_side} is not positive")));
        }
        let grid = Self { box_side, cutoff, q_count };
        if !(cutoff >= grid.unit()) {
            return Err(invalid("cutoff", format!("{cutoff} is below the lattice spacing {}", grid.unit())));
        }
        if q_count == 0 {
            return Err(invalid("q_count", "must be positive"));
        }
        Ok(grid)
    }

    /// Lattice spacing `2π/L`.
    pub fn unit(&self) -> f64 {
        2.0 * PI / self.box_side
    }

    pub fn volume(&self) -> f64 {
        self.box_side.powi(3)
    }

    pub fn momentum(&self, n: Mode) -> [f64; 3] {
        let u = self.unit();
        [u * n[0] as f64, u * n[1] as f64, u * n[2] as f64]
    }

    pub fn norm(&self, n: Mode) -> f64 {
        let [a, b, c] = n.map(|x| x as f64);
        self.unit() * (a * a + b * b + c * c).sqrt()
    }

    /// Every lattice mode with `|k| ≤ cutoff`, in lexicographic order.
    pub fn modes(&self) -> Vec<Mode> {
        let r = (self.cutoff / self.unit()).floor() as i64;
        let r2 = (self.cutoff / self.unit()).powi(2) * (1.0 + 1e-12);
        let mut out = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    if ((x * x + y * y + z * z) as f64) <= r2 {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }

    /// Nonzero z-axis modes with log-spaced multipliers, smallest first.
    pub fn q_sequence(&self) -> Vec<Mode> {
        let top = ((self.cutoff / self.unit()) * (1.0 + 1e-12)).floor() as i64;
        let count = self.q_count.min(top as usize);
        let mut out: Vec<i64> = Vec::with_capacity(count);
        for i in 0..count {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            let mut n = (top as f64).powf(t).round() as i64;
            if let Some(&last) = out.last() {
                n = n.max(last + 1);
            }
            // Leave room for the remaining points without exceeding the cutoff.
            n = n.min(top - (count - 1 - i) as i64);
            out.push(n);
        }
        out.into_iter().map(|n| [0, 0, n]).collect()
    }

    pub fn q_norms(&self) -> Vec<f64> {
        self.q_sequence().into_iter().map(|n| self.norm(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn dispersion_examples() {
        let mut p = ModelParams::default();
        assert_eq!(dispersion([0.0; 3], &p).unwrap(), 0.0);
        assert_eq!(dispersion([1.0, 0.0, 0.0], &p).unwrap(), 1.0);
        p.mass = 1.0;
        assert_eq!(dispersion([1.0, 1.0, 1.0], &p).unwrap(), 1.5);
        assert!(dispersion([f64::NAN, 0.0, 0.0], &p).is_err());
        assert_eq!(dispersion([0.3, -1.0, 2.0], &p).unwrap(), dispersion([-0.3, 1.0, -2.0], &p).unwrap());
    }

    #[test]
    fn occupation_examples() {
        assert_eq!(bose_occupation(1.0, Beta::Infinite, 0.0).unwrap(), 0.0);
        assert!(close(bose_occupation(2f64.ln(), Beta::Finite(1.0), 0.0).unwrap(), 1.0, 1e-14));
        let n = bose_occupation(1.0, Beta::Finite(1.0), -1.0).unwrap();
        assert!(close(n, 1.0 / (2f64.exp() - 1.0), 1e-14));
        assert!((n - 0.15652).abs() < 1e-5);
        assert!(matches!(bose_occupation(0.5, Beta::Finite(1.0), 0.5), Err(Error::OccupationDivergence { .. })));
    }

    #[test]
    fn coth_matches_occupation() {
        for &e in &[1e-3, 0.1, 1.0, 7.0] {
            let n = bose_occupation(e, Beta::Finite(2.0), 0.0).unwrap();
            assert!(close(0.5 * coth_half(Beta::Finite(2.0), e), n + 0.5, 1e-13));
        }
        assert!((0.5 * coth_half(Beta::Finite(2.0), 1.0) - 0.5 / 1f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(bogoliubov_spectrum(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(bogoliubov_spectrum(1.0, 1.5).unwrap(), 2.0);
        assert_eq!(bogoliubov_spectrum(0.0, 1.0).unwrap(), 0.0);
        assert!(bogoliubov_spectrum(-1.0, 1.0).is_err());
        assert!(bogoliubov_spectrum(1.0, -1.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let b = bogoliubov_coefficients(1.0, 0.0).unwrap();
        assert_eq!((b.tanh2a, b.plus_sq, b.minus_sq), (0.0, 1.0, 1.0));
        assert_eq!(bogoliubov_coefficients(1.0, 1.0).unwrap().tanh2a, -0.5);
        let b = bogoliubov_coefficients(1.0, 1.5).unwrap();
        assert_eq!((b.plus_sq, b.minus_sq), (0.5, 2.0));
        assert!(close(b.cosh2a.powi(2) - b.sinh2a.powi(2), 1.0, 1e-14));
        assert!(close(b.tanh2a, b.sinh2a / b.cosh2a, 1e-14));
        assert!(close(b.sinh_sq, 0.5 * (b.cosh2a - 1.0), 1e-14));
        assert!(close(b.cosh_sq * b.sinh_sq, b.cross().powi(2), 1e-14));
        assert!(close((b.cosh_sq.sqrt() + b.sinh2a.signum() * b.sinh_sq.sqrt()).powi(2), b.plus_sq, 1e-13));
        assert_eq!(bogoliubov_coefficients(0.0, 1.0), Err(Error::SingularCoefficients));
    }

    #[test]
    fn omega_examples() {
        let mut p = ModelParams { mass: 1.0, potential: Potential::Constant { strength: 1.0 }, ..Default::default() };
        assert_eq!(omega_gap(&p).unwrap(), 2.0);
        p.mass = 0.25;
        assert_eq!(omega_gap(&p).unwrap(), 1.0);
        p.mass = 1.0;
        p.potential = Potential::Constant { strength: 2.0 };
        assert!(close(omega_gap(&p).unwrap(), 8f64.sqrt(), 1e-15));
        p.condensate_amplitude = 0.0;
        assert_eq!(omega_gap(&p), Err(Error::NoCondensate));
    }

    #[test]
    fn gap_ratio_converges_to_omega() {
        let p = ModelParams { mass: 1.0, ..Default::default() };
        let grid = MomentumGrid::new(2.0 * PI * 1e4, 1.0, 24).unwrap();
        let omega = omega_gap(&p).unwrap();
        let ratios: Vec<f64> = grid
            .q_norms()
            .iter()
            .map(|&q| {
                let eps = p.kinetic(q);
                bogoliubov_spectrum(eps, p.c2v(q)).unwrap() * q / eps
            })
            .collect();
        let monotone_down = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        let monotone_up = ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        assert!(monotone_down || monotone_up);
        assert!(close(ratios[0], omega, 1e-3));
        assert!(close(ratios[0], gap_ratio(grid.q_norms()[0], &p), 1e-9));
    }

    #[test]
    fn grid_invariants() {
        let grid = MomentumGrid::new(8.0, 2.0, 5).unwrap();
        let qs = grid.q_sequence();
        assert!(!qs.contains(&[0, 0, 0]));
        assert!(close(grid.norm(qs[0]), 2.0 * PI / 8.0, 1e-15));
        assert!(qs.windows(2).all(|w| w[0][2] < w[1][2]));
        for m in grid.modes() {
            assert!(grid.norm(m) <= 2.0 * (1.0 + 1e-12));
        }
        let neg: Vec<Mode> = grid.modes().into_iter().map(|m| m.map(|x| -x)).collect();
        let mut a = grid.modes();
        let mut b = neg;
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_tags() {
        assert_eq!("wibg".parse::<ModelTag>().unwrap(), ModelTag::Wibg);
        assert!("x".parse::<ModelTag>().is_err());
        assert_eq!("inf".parse::<Beta>().unwrap(), Beta::Infinite);
        assert_eq!("2".parse::<Beta>().unwrap(), Beta::Finite(2.0));
        assert!("-1".parse::<Beta>().is_err());
    }
}
