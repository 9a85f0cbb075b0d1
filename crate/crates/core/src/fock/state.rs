use nalgebra::{DMatrix, SymmetricEigen};

use super::workspace::FockWorkspace;
use crate::error::{invalid, Error, Result};
use crate::linalg::{inner, vec_norm, SparseMatrix, C64};

/// Single-mode or two-mode factor of a product vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Coherent {
        mode: usize,
        amplitude: f64,
    },
    Number {
        mode: usize,
        n: usize,
    },
    /// Real amplitudes on `|n⟩` of one mode.
    Single {
        mode: usize,
        coeffs: Vec<f64>,
    },
    /// Real amplitudes on `|n, n⟩` of two modes.
    Pair {
        modes: (usize, usize),
        coeffs: Vec<f64>,
    },
}

impl Factor {
    fn covers(&self, i: usize) -> bool {
        match self {
            Factor::Coherent { mode, .. } | Factor::Number { mode, .. } | Factor::Single { mode, .. } => *mode == i,
            Factor::Pair { modes, .. } => modes.0 == i || modes.1 == i,
        }
    }

    fn amplitude(&self, occ: &[usize], coherent: &[f64]) -> f64 {
        match self {
            Factor::Coherent { mode, .. } => coherent.get(occ[*mode]).copied().unwrap_or(0.0),
            Factor::Number { mode, n } => f64::from(u8::from(occ[*mode] == *n)),
            Factor::Single { mode, coeffs } => coeffs.get(occ[*mode]).copied().unwrap_or(0.0),
            Factor::Pair { modes: (i, j), coeffs } => {
                if occ[*i] == occ[*j] {
                    coeffs.get(occ[*i]).copied().unwrap_or(0.0)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Density matrix on a workspace as a convex combination of pure vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum FiniteState {
    Pure(Vec<C64>),
    Mixed(Vec<(f64, Vec<C64>)>),
}

/// Poisson amplitudes `e^{−z²/2} zⁿ/√n!` for `n ≤ n_max`, evaluated in log space.
pub fn coherent_amplitudes(z: f64, n_max: usize) -> Vec<f64> {
    if z == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    let lz = z.abs().ln();
    let mut log_fact = 0.0;
    (0..=n_max)
        .map(|n| {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            let mag = (-0.5 * z * z + n as f64 * lz - 0.5 * log_fact).exp();
            if z < 0.0 && n % 2 == 1 {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

/// Cutoff keeping the coherent-state tail mass far below `10⁻⁸`.
pub fn coherent_cutoff(z: f64) -> usize {
    (z * z + 8.0 * z.abs()).ceil() as usize + 8
}

fn ground_vector(m: DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m);
    let (k, &e0) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty block");
    let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    if v[0] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (e0, v)
}

/// Matrix of `a·n + (b/2)(c*² + c²)` on levels `0..=n_max`.
pub fn squeeze_block(a: f64, b: f64, n_max: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n_max + 1, n_max + 1);
    for n in 0..=n_max {
        m[(n, n)] = a * n as f64;
        if n + 2 <= n_max {
            let x = 0.5 * b * (((n + 1) * (n + 2)) as f64).sqrt();
            m[(n + 2, n)] = x;
            m[(n, n + 2)] = x;
        }
    }
    m
}

/// Sector `n_q − n_{−q} = delta` of `a(n_q + n_{−q}) + b(a*_q a*_{−q} + a_q a_{−q})`, in the basis
/// `|n + delta, n⟩`, `n = 0..=n_max`.
pub fn pair_block(a: f64, b: f64, delta: usize, n_max: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n_max + 1, n_max + 1);
    for n in 0..=n_max {
        m[(n, n)] = a * (2 * n + delta) as f64;
        if n < n_max {
            let x = b * (((n + 1 + delta) * (n + 1)) as f64).sqrt();
            m[(n + 1, n)] = x;
            m[(n, n + 1)] = x;
        }
    }
    m
}

fn tail(v: &[f64], k: usize) -> f64 {
    v.iter().rev().take(k).map(|x| x * x).sum::<f64>()
}

/// Ground state of the single-mode squeeze block, enlarging the cutoff until the top levels
/// carry less than `tol` of the norm. Returns the coefficients and the ground energy.
pub fn squeezed_ground(a: f64, b: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
    if !(a > b.abs()) {
        return Err(invalid("b", "the squeeze block is unbounded below unless a > |b|"));
    }
    let mut n = 32;
    loop {
        let (e0, v) = ground_vector(squeeze_block(a, b, n));
        if tail(&v, 4) < tol {
            return Ok((v, e0));
        }
        n *= 2;
        if n > 4096 {
            return Err(Error::CapExceeded { dimension: n, cap: 4096 });
        }
    }
}

/// Ground state of the `Δ = 0` two-mode pairing sector, with the same cutoff control.
pub fn pair_ground(a: f64, b: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
    if !(a > b.abs()) {
        return Err(invalid("b", "the pair block is unbounded below unless a > |b|"));
    }
    let mut n = 32;
    loop {
        let (e0, v) = ground_vector(pair_block(a, b, 0, n));
        if tail(&v, 2) < tol {
            return Ok((v, e0));
        }
        n *= 2;
        if n > 4096 {
            return Err(Error::CapExceeded { dimension: n, cap: 4096 });
        }
    }
}

/// Lowest eigenvalue of `pair_block(a, b, delta, n_max)`.
pub fn pair_sector_ground(a: f64, b: f64, delta: usize, n_max: usize) -> f64 {
    ground_vector(pair_block(a, b, delta, n_max)).0
}

impl FiniteState {
    /// Normalized product vector; modes without a factor are in their vacuum.
    pub fn product(ws: &FockWorkspace, factors: &[Factor]) -> Result<Self> {
        let nmodes = ws.modes().len();
        for f in factors {
            for i in 0..nmodes {
                if f.covers(i) && factors.iter().filter(|g| g.covers(i)).count() > 1 {
                    return Err(invalid("factors", format!("mode {i} appears in two factors")));
                }
            }
            if let Factor::Pair { modes: (i, j), .. } = f {
                if i == j || *i >= nmodes || *j >= nmodes {
                    return Err(invalid("factors", "pair factor needs two distinct modes"));
                }
            }
        }
        let free: Vec<usize> = (0..nmodes).filter(|&i| !factors.iter().any(|f| f.covers(i))).collect();
        let coherent: Vec<Vec<f64>> = factors
            .iter()
            .map(|f| match f {
                Factor::Coherent { mode, amplitude } => coherent_amplitudes(*amplitude, ws.n_max()[*mode]),
                _ => Vec::new(),
            })
            .collect();
        let mut psi = vec![C64::new(0.0, 0.0); ws.dimension()];
        for (b, x) in psi.iter_mut().enumerate() {
            let occ = ws.occupations(b);
            if free.iter().any(|&i| occ[i] != 0) {
                continue;
            }
            let amp: f64 = factors.iter().zip(&coherent).map(|(f, c)| f.amplitude(&occ, c)).product();
            *x = C64::new(amp, 0.0);
        }
        let norm = vec_norm(&psi);
        if norm == 0.0 {
            return Err(invalid("factors", "product vector vanishes on this workspace"));
        }
        psi.iter_mut().for_each(|x| *x /= norm);
        Ok(FiniteState::Pure(psi))
    }

    /// Coherent zero mode of amplitude `z`, vacuum elsewhere.
    pub fn coherent_vacuum(ws: &FockWorkspace, z: f64) -> Result<Self> {
        Self::product(ws, &[Factor::Coherent { mode: ws.zero()?, amplitude: z }])
    }

    /// Coherent zero mode tensored with geometric (thermal) occupations `n̄` on the listed modes.
    pub fn coherent_thermal(ws: &FockWorkspace, z: f64, thermal: &[(usize, f64)]) -> Result<Self> {
        let zero = ws.zero()?;
        let mut components = Vec::new();
        let mut occ = vec![0usize; thermal.len()];
        loop {
            let mut w = 1.0;
            let mut factors = vec![Factor::Coherent { mode: zero, amplitude: z }];
            for (&(mode, nbar), &n) in thermal.iter().zip(&occ) {
                let x = nbar / (1.0 + nbar);
                w *= (1.0 - x) * x.powi(n as i32);
                factors.push(Factor::Number { mode, n });
            }
            if w > 0.0 {
                if let FiniteState::Pure(v) = Self::product(ws, &factors)? {
                    components.push((w, v));
                }
            }
            // Odometer over the thermal occupations.
            let mut k = 0;
            loop {
                if k == thermal.len() {
                    let total: f64 = components.iter().map(|c| c.0).sum();
                    components.iter_mut().for_each(|c| c.0 /= total);
                    return Ok(FiniteState::Mixed(components));
                }
                occ[k] += 1;
                if occ[k] <= ws.n_max()[thermal[k].0] {
                    break;
                }
                occ[k] = 0;
                k += 1;
            }
        }
    }

    pub fn components(&self) -> Vec<(f64, &[C64])> {
        match self {
            FiniteState::Pure(v) => vec![(1.0, v.as_slice())],
            FiniteState::Mixed(c) => c.iter().map(|(w, v)| (*w, v.as_slice())).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.components().iter().map(|(w, v)| w * vec_norm(v).powi(2)).sum()
    }

    /// `ω(X) = Σ w ⟨ψ, Xψ⟩`
    pub fn expectation(&self, x: &SparseMatrix) -> C64 {
        self.components().iter().map(|(w, v)| *w * inner(v, &x.matvec(v))).sum()
    }

    /// `‖X‖_ω = √ω(X*X)`
    pub fn omega_norm(&self, x: &SparseMatrix) -> f64 {
        self.components().iter().map(|(w, v)| w * vec_norm(&x.matvec(v)).powi(2)).sum::<f64>().sqrt()
    }

    /// Weight of basis states with some mode at its cutoff.
    pub fn top_population(&self, ws: &FockWorkspace) -> f64 {
        top_population(ws, &self.components())
    }
}

pub(crate) fn top_population(ws: &FockWorkspace, comps: &[(f64, &[C64])]) -> f64 {
    let top: Vec<bool> = ws.below(1).into_iter().map(|b| !b).collect();
    comps.iter().map(|(w, v)| w * v.iter().zip(&top).filter(|(_, &t)| t).map(|(x, _)| x.norm_sqr()).sum::<f64>()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::workspace::FockMode;

    fn two_modes(n0: usize, n1: usize) -> FockWorkspace {
        FockWorkspace::new(vec![FockMode::Plane([0, 0, 0]), FockMode::Symmetric([0, 0, 1])], vec![n0, n1], 1.0, 8.0)
            .unwrap()
    }

    #[test]
    fn coherent_state_moments() {
        let z = 3.0;
        let ws = two_modes(coherent_cutoff(z), 2);
        let s = FiniteState::coherent_vacuum(&ws, z).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-14);
        assert!((s.expectation(ws.annihilator(0)).re - z).abs() < 1e-10);
        assert!((s.expectation(&ws.number(0)).re - z * z).abs() < 1e-9);
        assert!(s.top_population(&ws) < 1e-8);
    }

    #[test]
    fn thermal_occupation() {
        let ws = two_modes(0, 40);
        let s = FiniteState::coherent_thermal(&ws, 0.0, &[(1, 0.7)]).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-14);
        assert!((s.expectation(&ws.number(1)).re - 0.7).abs() < 1e-6);
    }

    #[test]
    fn squeezed_ground_energy() {
        // a n + (b/2)(c*² + c²) has ground energy (√(a² − b²) − a)/2.
        let (a, b) = (1.5, 1.0);
        let (_, e0) = squeezed_ground(a, b, 1e-14).unwrap();
        assert!((e0 - 0.5 * ((a * a - b * b).sqrt() - a)).abs() < 1e-12);
        let (_, p0) = pair_ground(a, b, 1e-14).unwrap();
        assert!((p0 - ((a * a - b * b).sqrt() - a)).abs() < 1e-12);
        assert!(squeezed_ground(1.0, 1.0, 1e-12).is_err());
    }
}
