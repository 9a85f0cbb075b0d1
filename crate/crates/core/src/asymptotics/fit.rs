use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 8;
pub const MIN_R_SQUARED: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
    pub warning: Option<String>,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 samples, got {}", samples.len())));
    }
    if let Some(&(x, y)) = samples.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Fit(format!("nonpositive sample ({x}, {y})")));
    }
    let n = samples.len() as f64;
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let xs = samples.iter().map(|s| s.0);
    let window = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(0.0, f64::max));
    Ok(PowerLawFit {
        exponent: slope,
        amplitude: (my - slope * mx).exp(),
        r_squared,
        window,
        points: samples.len(),
        warning: None,
    })
}

/// Fits the first `window` samples (the asymptotic end of a smallest-first sequence), shrinking
/// the window down to 4 points while `r² < 0.999`.
pub fn fit_tail(samples: &[(f64, f64)], window: usize) -> Result<PowerLawFit> {
    let mut w = window.min(samples.len());
    let first = fit_power_law(&samples[..w])?;
    if first.r_squared >= MIN_R_SQUARED {
        return Ok(first);
    }
    while w > 4 {
        w -= 1;
        let fit = fit_power_law(&samples[..w])?;
        if fit.r_squared >= MIN_R_SQUARED {
            return Ok(PowerLawFit {
                warning: Some(format!("window shrunk from {} to {w} points to reach r² ≥ {MIN_R_SQUARED}", window)),
                ..fit
            });
        }
    }
    let fit = fit_power_law(&samples[..w])?;
    Ok(PowerLawFit {
        warning: Some(format!("r² = {:.6} below {MIN_R_SQUARED} on the minimal window", fit.r_squared)),
        ..fit
    })
}

/// Value at `x = 0` of the least-squares model `a₀ + Σⱼ aⱼ x^{pⱼ}`.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64], powers: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < powers.len() + 1 {
        return Err(Error::Fit(format!("{} points cannot determine {} coefficients", xs.len(), powers.len() + 1)));
    }
    let a = DMatrix::from_fn(xs.len(), powers.len() + 1, |i, j| if j == 0 { 1.0 } else { xs[i].powf(powers[j - 1]) });
    let b = DVector::from_column_slice(ys);
    let sol = a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(sol[0])
}

/// Polynomial (Neville) extrapolation of `ys(xs)` to `x = 0`.
pub fn richardson_to_zero(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Fit("Richardson needs matching, nonempty samples".into()));
    }
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            let denom = xs[i + k] - xs[i];
            if denom == 0.0 {
                return Err(Error::Fit("repeated abscissa".into()));
            }
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / denom;
        }
    }
    Ok(p[0])
}
