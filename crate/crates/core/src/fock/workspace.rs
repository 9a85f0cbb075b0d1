use crate::error::{invalid, Error, Result};
use crate::linalg::{SparseMatrix, C64};
use crate::model::Mode;
use crate::quasifree::{Observable, Token};

pub const DEFAULT_CAP: usize = 200_000;

/// One bosonic degree of freedom of a workspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockMode {
    /// `a_k` for one lattice momentum.
    Plane(Mode),
    /// `c₊ = (a_q + a_{−q})/√2`, the only combination of the `±q` pair entering the zero-mode
    /// fluctuations; its partner `c₋` is left out of the mode set.
    Symmetric(Mode),
}

impl FockMode {
    pub fn label(self) -> Mode {
        match self {
            FockMode::Plane(m) | FockMode::Symmetric(m) => m,
        }
    }
}

/// Truncated tensor product of single-mode Fock spaces with cached ladder operators.
///
/// Modes are labelled by integer momenta; `unit` converts a label to a physical momentum and
/// `volume` is the box volume entering the `1/V` and `1/√V` normalizations. With a `period`
/// the labels live in `Z_M` and momentum sums wrap, so that the mode set is closed under addition.
#[derive(Debug, Clone)]
pub struct FockWorkspace {
    modes: Vec<FockMode>,
    n_max: Vec<usize>,
    strides: Vec<usize>,
    dimension: usize,
    unit: f64,
    volume: f64,
    period: Option<i64>,
    annihilators: Vec<SparseMatrix>,
    creators: Vec<SparseMatrix>,
}

impl FockWorkspace {
    pub fn new(modes: Vec<FockMode>, n_max: Vec<usize>, unit: f64, volume: f64) -> Result<Self> {
        Self::build(modes, n_max, unit, volume, None, DEFAULT_CAP)
    }

    pub fn with_cap(modes: Vec<FockMode>, n_max: Vec<usize>, unit: f64, volume: f64, cap: usize) -> Result<Self> {
        Self::build(modes, n_max, unit, volume, None, cap)
    }

    /// All `M` plane modes `(0,0,j)` of `Z_M`, labelled by their symmetric representatives.
    pub fn cyclic(period: i64, n_max: usize, unit: f64, volume: f64) -> Result<Self> {
        if period < 1 {
            return Err(invalid("period", "must be positive"));
        }
        let lo = -(period - 1) / 2;
        let modes: Vec<FockMode> = (lo..lo + period).map(|j| FockMode::Plane([0, 0, j])).collect();
        let n = vec![n_max; modes.len()];
        Self::build(modes, n, unit, volume, Some(period), DEFAULT_CAP)
    }

    fn build(
        modes: Vec<FockMode>,
        n_max: Vec<usize>,
        unit: f64,
        volume: f64,
        period: Option<i64>,
        cap: usize,
    ) -> Result<Self> {
        if modes.is_empty() || modes.len() != n_max.len() {
            return Err(Error::Dimension(format!("{} modes with {} cutoffs", modes.len(), n_max.len())));
        }
        if !(unit > 0.0 && volume > 0.0) {
            return Err(invalid("volume", "unit and volume must be positive"));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(invalid("modes", format!("{m:?} listed twice")));
            }
            if matches!(m, FockMode::Symmetric(k) if *k == [0, 0, 0]) {
                return Err(Error::InvalidMode([0, 0, 0]));
            }
        }
        let mut dimension: usize = 1;
        for &n in &n_max {
            dimension = dimension
                .checked_mul(n + 1)
                .filter(|&d| d <= cap)
                .ok_or(Error::CapExceeded { dimension: dimension.saturating_mul(n + 1), cap })?;
        }
        let mut strides = vec![1usize; modes.len()];
        for i in (0..modes.len() - 1).rev() {
            strides[i] = strides[i + 1] * (n_max[i + 1] + 1);
        }
        let mut ws = Self {
            modes,
            n_max,
            strides,
            dimension,
            unit,
            volume,
            period,
            annihilators: Vec::new(),
            creators: Vec::new(),
        };
        ws.annihilators = (0..ws.modes.len()).map(|i| ws.ladder(i)).collect();
        ws.creators = ws.annihilators.iter().map(SparseMatrix::adjoint).collect();
        Ok(ws)
    }

    fn ladder(&self, i: usize) -> SparseMatrix {
        let t = (0..self.dimension)
            .filter_map(|b| {
                let n = self.occupation(b, i);
                (n > 0).then(|| (b - self.strides[i], b, C64::new((n as f64).sqrt(), 0.0)))
            })
            .collect();
        SparseMatrix::from_triplets(self.dimension, self.dimension, t)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn modes(&self) -> &[FockMode] {
        &self.modes
    }

    pub fn n_max(&self) -> &[usize] {
        &self.n_max
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn period(&self) -> Option<i64> {
        self.period
    }

    /// Physical momentum `|k|` of mode `i`.
    pub fn momentum(&self, i: usize) -> f64 {
        let m = self.modes[i].label();
        self.unit * ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64).sqrt()
    }

    /// Canonical label of a momentum, reduced into `Z_M` for cyclic workspaces.
    pub fn wrap(&self, m: Mode) -> Mode {
        match self.period {
            None => m,
            Some(p) => {
                let lo = -(p - 1) / 2;
                m.map(|x| (x - lo).rem_euclid(p) + lo)
            }
        }
    }

    pub fn index_of(&self, mode: FockMode) -> Result<usize> {
        let mode = match mode {
            FockMode::Plane(m) => FockMode::Plane(self.wrap(m)),
            s => s,
        };
        self.modes.iter().position(|&m| m == mode).ok_or(Error::MissingMode(mode.label()))
    }

    pub fn plane(&self, m: Mode) -> Result<usize> {
        self.index_of(FockMode::Plane(m))
    }

    pub fn zero(&self) -> Result<usize> {
        self.plane([0, 0, 0])
    }

    pub fn occupation(&self, basis: usize, i: usize) -> usize {
        (basis / self.strides[i]) % (self.n_max[i] + 1)
    }

    pub fn occupations(&self, basis: usize) -> Vec<usize> {
        (0..self.modes.len()).map(|i| self.occupation(basis, i)).collect()
    }

    pub fn basis_index(&self, occ: &[usize]) -> usize {
        occ.iter().zip(&self.strides).map(|(n, s)| n * s).sum()
    }

    pub fn annihilator(&self, i: usize) -> &SparseMatrix {
        &self.annihilators[i]
    }

    pub fn creator(&self, i: usize) -> &SparseMatrix {
        &self.creators[i]
    }

    pub fn number(&self, i: usize) -> SparseMatrix {
        let d = (0..self.dimension).map(|b| C64::new(self.occupation(b, i) as f64, 0.0)).collect::<Vec<_>>();
        SparseMatrix::diagonal(&d)
    }

    pub fn total_number(&self) -> SparseMatrix {
        let d = (0..self.dimension)
            .map(|b| C64::new(self.occupations(b).iter().sum::<usize>() as f64, 0.0))
            .collect::<Vec<_>>();
        SparseMatrix::diagonal(&d)
    }

    pub fn identity(&self) -> SparseMatrix {
        SparseMatrix::identity(self.dimension)
    }

    /// Basis states whose occupations all lie at least `margin` below the cutoff. On these
    /// columns a product of at most `margin` creators per mode is represented without truncation.
    pub fn below(&self, margin: usize) -> Vec<bool> {
        (0..self.dimension)
            .map(|b| (0..self.modes.len()).all(|i| self.occupation(b, i) + margin <= self.n_max[i]))
            .collect()
    }

    /// Largest entry of `m` in the columns selected by `below(margin)`.
    pub fn restricted_norm(&self, m: &SparseMatrix, margin: usize) -> f64 {
        m.restrict_columns(&self.below(margin)).max_abs()
    }

    fn token_mode(&self, t: Token) -> Result<usize> {
        self.plane(t.mode)
    }

    /// Applies an ordered word (rightmost token first) to one basis state.
    fn apply_to_basis(&self, idx: &[(usize, bool)], basis: usize) -> Option<(usize, f64)> {
        let mut b = basis;
        let mut amp = 1.0;
        for &(i, dagger) in idx.iter().rev() {
            let n = self.occupation(b, i);
            if dagger {
                if n == self.n_max[i] {
                    return None;
                }
                amp *= ((n + 1) as f64).sqrt();
                b += self.strides[i];
            } else {
                if n == 0 {
                    return None;
                }
                amp *= (n as f64).sqrt();
                b -= self.strides[i];
            }
        }
        Some((b, amp))
    }

    fn resolve(&self, word: &[Token]) -> Result<Vec<(usize, bool)>> {
        word.iter().map(|&t| Ok((self.token_mode(t)?, t.dagger))).collect()
    }

    /// Matrix of a word of plane-mode ladder operators, equal to the product of the truncated
    /// ladder matrices.
    pub fn word_matrix(&self, word: &[Token]) -> Result<SparseMatrix> {
        self.observable_matrix(&Observable { terms: vec![(C64::new(1.0, 0.0), word.to_vec())] })
    }

    pub fn observable_matrix(&self, obs: &Observable) -> Result<SparseMatrix> {
        let mut t = Vec::new();
        for (c, w) in &obs.terms {
            let idx = self.resolve(w)?;
            for b in 0..self.dimension {
                if let Some((r, amp)) = self.apply_to_basis(&idx, b) {
                    t.push((r, b, c * amp));
                }
            }
        }
        Ok(SparseMatrix::from_triplets(self.dimension, self.dimension, t))
    }

    /// `W ψ` without materializing the matrix of `W`.
    pub fn apply_word(&self, word: &[Token], psi: &[C64]) -> Result<Vec<C64>> {
        let idx = self.resolve(word)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dimension];
        for (b, &x) in psi.iter().enumerate() {
            if x != C64::new(0.0, 0.0) {
                if let Some((r, amp)) = self.apply_to_basis(&idx, b) {
                    out[r] += x * amp;
                }
            }
        }
        Ok(out)
    }

    /// Largest entry of `([a_j, a*_k] − δ_jk)` over all mode pairs, on columns below the top level.
    pub fn ccr_defect(&self) -> f64 {
        let n = self.modes.len();
        let id = self.identity();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let mut c = self.annihilators[j].commutator(&self.creators[k]);
                if j == k {
                    c = c.sub(&id);
                }
                worst = worst.max(self.restricted_norm(&c, 1));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_ladder() {
        let ws = FockWorkspace::new(vec![FockMode::Plane([0, 0, 0])], vec![1], 1.0, 1.0).unwrap();
        assert_eq!(ws.dimension(), 2);
        let a = ws.annihilator(0).to_dense();
        assert_eq!(a[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)] + a[(1, 0)] + a[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn three_mode_counting_and_ccr() {
        let modes = vec![FockMode::Plane([0, 0, 0]), FockMode::Plane([0, 0, 1]), FockMode::Plane([0, 0, -1])];
        let ws = FockWorkspace::new(modes, vec![4, 4, 4], 1.0, 8.0).unwrap();
        assert_eq!(ws.dimension(), 125);
        assert!(ws.ccr_defect() < 1e-14);
        // The top level carries the truncation defect.
        let c = ws.annihilator(1).commutator(ws.creator(1)).sub(&ws.identity());
        assert!(c.max_abs() > 1.0);
    }

    #[test]
    fn cap_is_enforced() {
        let modes = (0..6).map(|j| FockMode::Plane([0, 0, j])).collect();
        let err = FockWorkspace::with_cap(modes, vec![9; 6], 1.0, 1.0, 1000).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 1000, .. }));
    }

    #[test]
    fn word_matrix_matches_products() {
        let modes = vec![FockMode::Plane([0, 0, 0]), FockMode::Plane([0, 0, 1])];
        let ws = FockWorkspace::new(modes, vec![3, 3], 1.0, 1.0).unwrap();
        let word = [Token::create([0, 0, 1]), Token::annihilate([0, 0, 0]), Token::create([0, 0, 0])];
        let direct = ws.word_matrix(&word).unwrap();
        let product = ws.creator(1).matmul(ws.annihilator(0)).matmul(ws.creator(0));
        assert!(direct.sub(&product).max_abs() < 1e-15);
        assert!(matches!(ws.word_matrix(&[Token::create([0, 0, 5])]), Err(Error::MissingMode(_))));
    }

    #[test]
    fn cyclic_labels_wrap() {
        let ws = FockWorkspace::cyclic(3, 1, 1.0, 3.0).unwrap();
        assert_eq!(ws.modes().len(), 3);
        assert_eq!(ws.wrap([0, 0, 2]), [0, 0, -1]);
        assert_eq!(ws.plane([0, 0, -2]).unwrap(), ws.plane([0, 0, 1]).unwrap());
    }
}
