//! Wick-theorem expectation values in the finite-volume quasi-free states.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::C64;
use crate::model::{
    bogoliubov_coefficients, bogoliubov_spectrum, bose_occupation, Beta, Mode, ModelParams, ModelTag, MomentumGrid,
};

pub const WORD_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub mode: Mode,
    pub dagger: bool,
}

impl Token {
    pub fn create(mode: Mode) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: Mode) -> Self {
        Self { mode, dagger: false }
    }

    pub fn adjoint(self) -> Self {
        Self { mode: self.mode, dagger: !self.dagger }
    }
}

pub type OperatorWord = Vec<Token>;

pub fn adjoint_word(word: &[Token]) -> OperatorWord {
    word.iter().rev().map(|t| t.adjoint()).collect()
}

fn neg(m: Mode) -> Mode {
    m.map(|x| -x)
}

pub(crate) fn is_zero(m: Mode) -> bool {
    m == [0, 0, 0]
}

/// Linear combination of operator words.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Observable {
    pub terms: Vec<(C64, OperatorWord)>,
}

impl Observable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coef: C64, word: OperatorWord) {
        if coef != C64::new(0.0, 0.0) {
            self.terms.push((coef, word));
        }
    }

    pub fn adjoint(&self) -> Observable {
        Observable { terms: self.terms.iter().map(|(c, w)| (c.conj(), adjoint_word(w))).collect() }
    }

    pub fn scaled(mut self, s: C64) -> Observable {
        self.terms.iter_mut().for_each(|(c, _)| *c *= s);
        self
    }

    pub fn plus(mut self, other: Observable) -> Observable {
        self.terms.extend(other.terms);
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Nonzero `{k, −k}` classes that occur an odd number of times. A word can only have a nonzero
/// expectation when this set is empty, since every pairing stays inside one class.
fn odd_classes(word: &[Token]) -> Vec<Mode> {
    let mut counts: HashMap<Mode, usize> = HashMap::new();
    for t in word {
        if !is_zero(t.mode) {
            let m = t.mode.max(neg(t.mode));
            *counts.entry(m).or_default() += 1;
        }
    }
    let mut odd: Vec<Mode> = counts.into_iter().filter(|(_, c)| c % 2 == 1).map(|(m, _)| m).collect();
    odd.sort_unstable();
    odd
}

/// Extremal (phase zero) quasi-free state on a finite grid.
///
/// Imperfect gas: coherent zero mode of amplitude `√(ρ₀V)`, thermal occupations `n(ε_k)` elsewhere.
/// WIBG: coherent zero mode `c√V`, thermal `b`-quanta with energies `E_k`.
/// Free gas: thermal everywhere including `k = 0`, no condensate.
#[derive(Debug, Clone)]
pub struct QuasiFreeState {
    model: ModelTag,
    params: ModelParams,
    grid: MomentumGrid,
    amplitude: f64,
}

impl QuasiFreeState {
    pub fn new(model: ModelTag, params: ModelParams, grid: MomentumGrid) -> Result<Self> {
        params.validate()?;
        let v = grid.volume();
        let amplitude = match model {
            ModelTag::Imperfect => (params.condensate_density * v).sqrt(),
            ModelTag::Wibg => params.condensate_amplitude * v.sqrt(),
            ModelTag::Free => 0.0,
        };
        Ok(Self { model, params, grid, amplitude })
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    /// Zero-mode one-point amplitude `ω(a₀) = ω(a₀*)`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn one_point(&self, mode: Mode) -> C64 {
        if is_zero(mode) {
            C64::new(self.amplitude, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }

    fn check_mode(&self, mode: Mode) -> Result<()> {
        if self.grid.norm(mode) > self.grid.cutoff * (1.0 + 1e-12) {
            return Err(Error::InvalidMode(mode));
        }
        Ok(())
    }

    /// Occupation of the diagonal quanta at `mode` (`b`-quanta for the WIBG).
    pub fn occupation(&self, mode: Mode) -> Result<f64> {
        let k = self.grid.norm(mode);
        match self.model {
            ModelTag::Imperfect | ModelTag::Wibg if is_zero(mode) => Ok(0.0),
            ModelTag::Imperfect => bose_occupation(self.params.kinetic(k), self.params.beta, self.params.mu_shift),
            ModelTag::Free => {
                let eps = self.params.kinetic(k);
                if self.params.beta == Beta::Infinite {
                    Ok(0.0)
                } else {
                    bose_occupation(eps, self.params.beta, self.params.mu_shift)
                }
            }
            ModelTag::Wibg => {
                let e = bogoliubov_spectrum(self.params.kinetic(k), self.params.c2v(k))?;
                bose_occupation(e, self.params.beta, 0.0)
            }
        }
    }

    /// Symmetric two-point weight `½coth(βE/2)` of the diagonal quanta.
    pub fn kernel(&self, mode: Mode) -> Result<f64> {
        Ok(self.occupation(mode)? + 0.5)
    }

    /// `ω(a*_k a_k)` when `normal_ordered`, else `ω(a_k a*_k)`, for `k ≠ 0`.
    pub fn two_point(&self, k: Mode, normal_ordered: bool) -> Result<f64> {
        if is_zero(k) && self.model != ModelTag::Free {
            return Err(Error::InvalidMode(k));
        }
        let (first, second) = if normal_ordered {
            (Token::create(k), Token::annihilate(k))
        } else {
            (Token::annihilate(k), Token::create(k))
        };
        Ok(self.pair(first, second)?.re)
    }

    /// Bogoliubov expansion `a_k = C b_k + S b*_{−k}`, `a*_k = C b*_k + S b_{−k}`.
    fn rotate(&self, t: Token) -> Result<[(f64, Token); 2]> {
        let k = self.grid.norm(t.mode);
        let b = bogoliubov_coefficients(self.params.kinetic(k), self.params.c2v(k))?;
        let (c, s) = (b.cosh_sq.sqrt(), 0.5 * b.sinh2a / b.cosh_sq.sqrt());
        Ok([(c, t), (s, Token { mode: neg(t.mode), dagger: !t.dagger })])
    }

    fn diagonal_pair(&self, a: Token, b: Token) -> Result<f64> {
        if a.mode != b.mode || a.dagger == b.dagger {
            return Ok(0.0);
        }
        let n = self.occupation(a.mode)?;
        Ok(if a.dagger { n } else { n + 1.0 })
    }

    /// Ordered truncated two-point function `ω(t₁t₂) − ω(t₁)ω(t₂)`.
    pub fn pair(&self, a: Token, b: Token) -> Result<C64> {
        if self.model == ModelTag::Wibg && !is_zero(a.mode) && !is_zero(b.mode) {
            if a.mode != b.mode && a.mode != neg(b.mode) {
                return Ok(C64::new(0.0, 0.0));
            }
            let mut sum = 0.0;
            for (ca, ta) in self.rotate(a)? {
                for (cb, tb) in self.rotate(b)? {
                    sum += ca * cb * self.diagonal_pair(ta, tb)?;
                }
            }
            return Ok(C64::new(sum, 0.0));
        }
        Ok(C64::new(self.diagonal_pair(a, b)?, 0.0))
    }

    /// Exact expectation of an ordered word: every split into zero-mode one-point factors and
    /// ordered truncated pairings.
    pub fn wick_expectation(&self, word: &[Token]) -> Result<C64> {
        if word.len() > WORD_CAP {
            return Err(Error::WordTooLong { len: word.len(), cap: WORD_CAP });
        }
        for t in word {
            self.check_mode(t.mode)?;
        }
        if !odd_classes(word).is_empty() {
            return Ok(C64::new(0.0, 0.0));
        }
        let n = word.len();
        let mut pairs = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i + 1..n {
                pairs[i * n + j] = self.pair(word[i], word[j])?;
            }
        }
        let ones: Vec<C64> = word.iter().map(|t| self.one_point(t.mode)).collect();
        let mut memo: HashMap<u32, C64> = HashMap::new();
        Ok(pairing_sum(0, n, &pairs, &ones, &mut memo))
    }

    pub fn expectation(&self, obs: &Observable) -> Result<C64> {
        let mut sum = C64::new(0.0, 0.0);
        for (c, w) in &obs.terms {
            sum += c * self.wick_expectation(w)?;
        }
        Ok(sum)
    }

    /// `ω(XY)`, joining terms on their odd-class signature so that only potentially nonzero
    /// products are evaluated.
    pub fn product_expectation(&self, x: &Observable, y: &Observable) -> Result<C64> {
        let mut index: HashMap<Vec<Mode>, Vec<usize>> = HashMap::new();
        for (i, (_, w)) in x.terms.iter().enumerate() {
            index.entry(odd_classes(w)).or_default().push(i);
        }
        let parts: Vec<C64> = y
            .terms
            .par_iter()
            .map(|(cy, wy)| {
                let mut acc = C64::new(0.0, 0.0);
                if let Some(matches) = index.get(&odd_classes(wy)) {
                    for &i in matches {
                        let (cx, wx) = &x.terms[i];
                        let mut word = wx.clone();
                        word.extend_from_slice(wy);
                        acc += cx * cy * self.wick_expectation(&word)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok(parts.into_iter().sum())
    }

    /// `ω(exp(iΦ(f)))` with `Φ(f) = (a(f) + a*(f))/√2` and `a(f) = Σ_k f̄_k a_k`
    /// (`b`-operators for the WIBG). Equals `exp[−½(f,Kf) + i√2·z·Re f₀]`.
    pub fn characteristic_function(&self, f: &[(Mode, C64)]) -> Result<C64> {
        let mut merged: HashMap<Mode, C64> = HashMap::new();
        for &(m, v) in f {
            self.check_mode(m)?;
            *merged.entry(m).or_default() += v;
        }
        let mut modes: Vec<_> = merged.into_iter().collect();
        modes.sort_unstable_by_key(|(m, _)| *m);
        let mut quad = 0.0;
        let mut phase = 0.0;
        for (m, v) in modes {
            quad += v.norm_sqr() * self.kernel(m)?;
            if is_zero(m) {
                phase += SQRT_2 * self.amplitude * v.re;
            }
        }
        Ok(C64::from_polar((-0.5 * quad).exp(), phase))
    }
}

fn pairing_sum(mask: u32, n: usize, pairs: &[C64], ones: &[C64], memo: &mut HashMap<u32, C64>) -> C64 {
    let Some(i) = (0..n).find(|&i| mask & (1 << i) == 0) else {
        return C64::new(1.0, 0.0);
    };
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let zero = C64::new(0.0, 0.0);
    let mut total = zero;
    if ones[i] != zero {
        total += ones[i] * pairing_sum(mask | (1 << i), n, pairs, ones, memo);
    }
    for j in i + 1..n {
        if mask & (1 << j) == 0 && pairs[i * n + j] != zero {
            total += pairs[i * n + j] * pairing_sum(mask | (1 << i) | (1 << j), n, pairs, ones, memo);
        }
    }
    memo.insert(mask, total);
    total
}

pub fn validate_model_state(model: ModelTag, params: &ModelParams) -> Result<()> {
    match model {
        ModelTag::Wibg if params.condensate_amplitude == 0.0 => Err(Error::NoCondensate),
        ModelTag::Imperfect if !(params.condensate_density > 0.0) => Err(Error::ZeroCondensateDensity),
        ModelTag::Free if params.beta != Beta::Infinite && !(params.mu_shift < 0.0) => {
            Err(invalid("mu_shift", "the free gas at finite beta needs a negative chemical potential"))
        }
        _ => Ok(()),
    }
}
