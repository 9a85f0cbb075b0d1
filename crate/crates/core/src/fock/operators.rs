use super::workspace::{FockMode, FockWorkspace};
use crate::error::{invalid, Error, Result};
use crate::linalg::{SparseMatrix, C64, I};
use crate::model::{Mode, ModelParams, ModelTag};
use crate::quasifree::{is_zero, Observable, Token};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn neg(m: Mode) -> Mode {
    m.map(|x| -x)
}

fn diagonal(ws: &FockWorkspace, f: impl Fn(&[usize]) -> f64) -> SparseMatrix {
    let d: Vec<C64> = (0..ws.dimension()).map(|b| re(f(&ws.occupations(b)))).collect();
    SparseMatrix::diagonal(&d)
}

fn kinetic(ws: &FockWorkspace, params: &ModelParams) -> Vec<f64> {
    (0..ws.modes().len()).map(|i| params.kinetic(ws.momentum(i))).collect()
}

/// `Σ_k ε_k a*_k a_k` on the workspace modes.
pub fn kinetic_energy(ws: &FockWorkspace, params: &ModelParams) -> SparseMatrix {
    let eps = kinetic(ws, params);
    diagonal(ws, |occ| occ.iter().zip(&eps).map(|(&n, e)| n as f64 * e).sum())
}

/// `N²`
pub fn number_squared(ws: &FockWorkspace) -> SparseMatrix {
    diagonal(ws, |occ| (occ.iter().sum::<usize>() as f64).powi(2))
}

/// Off-diagonal pairing plus `c²v` dressing of the WIBG, `½Σ_{k≠0} v(k)(c²a*_k a*_{−k} + c²a_{−k}a_k)
/// + c²Σ_{k≠0} v(k) a*_k a_k` (real `c`). A symmetric mode contributes `(c²v/2)(c₊*² + c₊²)`.
fn pairing_and_dressing(ws: &FockWorkspace, params: &ModelParams) -> Result<SparseMatrix> {
    let n = ws.dimension();
    let mut h = SparseMatrix::zeros(n, n);
    for (i, &mode) in ws.modes().iter().enumerate() {
        let c2v = params.c2v(ws.momentum(i));
        match mode {
            FockMode::Plane(k) if is_zero(k) => {}
            FockMode::Plane(k) => {
                let j = ws.plane(neg(k))?;
                let pair = ws.creator(i).matmul(ws.creator(j));
                let term = pair.add(&pair.adjoint()).scale_re(0.5 * c2v).add(&ws.number(i).scale_re(c2v));
                h = h.add(&term);
            }
            FockMode::Symmetric(_) => {
                let sq = ws.creator(i).matmul(ws.creator(i));
                let term = sq.add(&sq.adjoint()).scale_re(0.5 * c2v).add(&ws.number(i).scale_re(c2v));
                h = h.add(&term);
            }
        }
    }
    Ok(h)
}

/// Finite-volume Hamiltonian on the workspace modes.
///
/// Imperfect gas: `T − μN + (λ/2V)N²` with `μ = λρ`. WIBG: `T` plus pairing and dressing at real
/// `c`, plus `(v(0)/2V)N² − μN` with `μ = v(0)ρ`. Free gas: `T − α N` with the occupation shift `α`.
pub fn build_hamiltonian(model: ModelTag, ws: &FockWorkspace, params: &ModelParams) -> Result<SparseMatrix> {
    let eps = kinetic(ws, params);
    let v = ws.volume();
    match model {
        ModelTag::Free => {
            let mu = params.mu_shift;
            Ok(diagonal(ws, |occ| occ.iter().zip(&eps).map(|(&n, e)| n as f64 * (e - mu)).sum()))
        }
        ModelTag::Imperfect => {
            let (mu, lambda) = (params.chemical_potential(), params.coupling);
            Ok(diagonal(ws, |occ| {
                let n: usize = occ.iter().sum();
                let t: f64 = occ.iter().zip(&eps).map(|(&k, e)| k as f64 * e).sum();
                t - mu * n as f64 + 0.5 * lambda / v * (n * n) as f64
            }))
        }
        ModelTag::Wibg => {
            ws.zero()?;
            let (mu, v0) = (params.wibg_chemical_potential(), params.v(0.0));
            let diag = diagonal(ws, |occ| {
                let n: usize = occ.iter().sum();
                let t: f64 = occ.iter().zip(&eps).map(|(&k, e)| k as f64 * e).sum();
                t - mu * n as f64 + 0.5 * v0 / v * (n * n) as f64
            });
            Ok(diag.add(&pairing_and_dressing(ws, params)?))
        }
    }
}

/// WIBG interaction `U_L(c)`: pairing, dressing and `(v(0)/2V)N²`.
pub fn wibg_interaction(ws: &FockWorkspace, params: &ModelParams) -> Result<SparseMatrix> {
    let n2 = number_squared(ws).scale_re(0.5 * params.v(0.0) / ws.volume());
    Ok(pairing_and_dressing(ws, params)?.add(&n2))
}

/// `C = a_q + a_{−q}`, or `√2 c₊` when the workspace holds the symmetric mode of `±q`.
pub fn pair_operator(ws: &FockWorkspace, q: Mode) -> Result<SparseMatrix> {
    for s in [q, neg(q)] {
        if let Ok(i) = ws.index_of(FockMode::Symmetric(s)) {
            return Ok(ws.annihilator(i).scale_re(std::f64::consts::SQRT_2));
        }
    }
    let (i, j) = (ws.plane(q)?, ws.plane(neg(q))?);
    Ok(ws.annihilator(i).add(ws.annihilator(j)))
}

/// Zero-mode part of `F_q(f, g)` in the cos normalization:
/// `½[(f a₀/n + i g) C* + h.c.]` with `n = √(ρ₀V)` or `c√V`.
pub fn zero_mode_fluctuation(ws: &FockWorkspace, q: Mode, norm: f64, f: C64, g: C64) -> Result<SparseMatrix> {
    if !(norm > 0.0) {
        return Err(Error::ZeroCondensateDensity);
    }
    let c = pair_operator(ws, q)?;
    let a0 = ws.annihilator(ws.zero()?);
    let y = a0.scale(f / norm).add(&ws.identity().scale(I * g));
    let half = y.matmul(&c.adjoint());
    Ok(half.add(&half.adjoint()).scale_re(0.5))
}

/// `ρ_q` (imperfect gas, `norm = √(ρ₀V)`) or `ρ⁰_q` (WIBG, `norm = c√V`).
pub fn density_fluctuation(ws: &FockWorkspace, q: Mode, norm: f64) -> Result<SparseMatrix> {
    zero_mode_fluctuation(ws, q, norm, re(1.0), re(0.0))
}

/// `A_q = (i/2)(C* − C)`
pub fn order_fluctuation(ws: &FockWorkspace, q: Mode) -> Result<SparseMatrix> {
    let c = pair_operator(ws, q)?;
    Ok(c.adjoint().sub(&c).scale(0.5 * I))
}

/// `F_q(N) = V^{−1/2} Σ_k a*_{k+q} a_k` over the plane modes whose shift stays in the workspace.
pub fn plane_density(ws: &FockWorkspace, q: Mode) -> Observable {
    let c = re(ws.volume().powf(-0.5));
    let mut obs = Observable::new();
    for m in ws.modes() {
        if let FockMode::Plane(k) = *m {
            let p = ws.wrap([k[0] + q[0], k[1] + q[1], k[2] + q[2]]);
            if ws.plane(p).is_ok() {
                obs.push(c, vec![Token::create(p), Token::annihilate(k)]);
            }
        }
    }
    obs
}

/// `F_q(N₀) = V^{−1/2}(a*_q a₀ + a₀* a_{−q})`
pub fn condensate_density(q: Mode, volume: f64) -> Observable {
    let c = re(volume.powf(-0.5));
    let z = [0, 0, 0];
    let mut obs = Observable::new();
    obs.push(c, vec![Token::create(q), Token::annihilate(z)]);
    obs.push(c, vec![Token::create(z), Token::annihilate(neg(q))]);
    obs
}

pub fn product(x: &Observable, y: &Observable) -> Observable {
    let mut out = Observable::new();
    for (cx, wx) in &x.terms {
        for (cy, wy) in &y.terms {
            let mut w = wx.clone();
            w.extend_from_slice(wy);
            out.push(cx * cy, w);
        }
    }
    out
}

fn plane_labels(ws: &FockWorkspace) -> Vec<Mode> {
    ws.modes()
        .iter()
        .filter_map(|m| match m {
            FockMode::Plane(k) => Some(*k),
            FockMode::Symmetric(_) => None,
        })
        .collect()
}

fn potential_at(ws: &FockWorkspace, params: &ModelParams, p: Mode) -> f64 {
    let p = ws.wrap(p);
    params.v(ws.unit() * ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) as f64).sqrt())
}

/// Two-body interaction `U_L = (1/2V) Σ v(p) a*_{k+p} a*_{k'−p} a_{k'} a_k` over all plane-mode
/// quadruples of the workspace.
pub fn interaction(ws: &FockWorkspace, params: &ModelParams) -> Observable {
    let labels = plane_labels(ws);
    let scale = 0.5 / ws.volume();
    let mut obs = Observable::new();
    for &k in &labels {
        for &t in &labels {
            let p = ws.wrap([t[0] - k[0], t[1] - k[1], t[2] - k[2]]);
            let v = potential_at(ws, params, p);
            for &k2 in &labels {
                let s = ws.wrap([k2[0] - p[0], k2[1] - p[1], k2[2] - p[2]]);
                if ws.plane(s).is_ok() {
                    let word = vec![Token::create(t), Token::create(s), Token::annihilate(k2), Token::annihilate(k)];
                    obs.push(re(scale * v), word);
                }
            }
        }
    }
    obs
}

/// `φ_S(0) = (1/V) Σ_{p ∈ S} v(p)` over the plane modes of the workspace.
pub fn phi_zero(ws: &FockWorkspace, params: &ModelParams) -> f64 {
    plane_labels(ws).into_iter().map(|p| potential_at(ws, params, p)).sum::<f64>() / ws.volume()
}

/// `½Σ_{p≠0} v(p) F_p(N) F_{−p}(N) + (v(0)/2V)N² − ½φ(0)N` on a cyclic workspace, where the
/// momentum set is closed under addition and the rewrite of `U_L` is exact.
pub fn interaction_rewrite(ws: &FockWorkspace, params: &ModelParams) -> Result<SparseMatrix> {
    if ws.period().is_none() {
        return Err(invalid("workspace", "the density rewrite needs a cyclic mode set"));
    }
    let mut obs = Observable::new();
    for p in plane_labels(ws) {
        if is_zero(p) {
            continue;
        }
        let fp = plane_density(ws, p);
        let fm = plane_density(ws, neg(p));
        obs = obs.plus(product(&fp, &fm).scaled(re(0.5 * potential_at(ws, params, p))));
    }
    let v0 = params.v(0.0);
    let n = ws.total_number();
    let rest = number_squared(ws).scale_re(0.5 * v0 / ws.volume()).sub(&n.scale_re(0.5 * phi_zero(ws, params)));
    Ok(ws.observable_matrix(&obs)?.add(&rest))
}

/// `i[H, X]`
pub fn dynamics_commutator(h: &SparseMatrix, x: &SparseMatrix) -> SparseMatrix {
    h.commutator(x).scale(I)
}
