//! Symbolic manipulation of ladder words: normal ordering and c-number substitution.

use crate::linalg::C64;
use crate::quasifree::{is_zero, Observable, OperatorWord, Token};

/// Normal-ordered expansion of a word via `a_j a*_k = a*_k a_j + δ_jk`.
pub fn normal_order(word: &[Token]) -> Vec<(C64, OperatorWord)> {
    let mut out = Vec::new();
    expand(C64::new(1.0, 0.0), word.to_vec(), &mut out);
    out
}

fn expand(coef: C64, word: OperatorWord, out: &mut Vec<(C64, OperatorWord)>) {
    let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| !word[i].dagger && word[i + 1].dagger) else {
        out.push((coef, word));
        return;
    };
    let mut swapped = word.clone();
    swapped.swap(i, i + 1);
    expand(coef, swapped, out);
    if word[i].mode == word[i + 1].mode {
        let mut contracted = word;
        contracted.drain(i..i + 2);
        expand(coef, contracted, out);
    }
}

/// Normal-orders the excited-mode tokens of every term and replaces each `a₀` by `amplitude`
/// and each `a₀*` by its conjugate, in the positions where they stand. Zero-mode tokens commute
/// with the excited ones, so separating the two subsequences is exact.
pub fn substitute_zero_mode(obs: &Observable, amplitude: C64) -> Observable {
    let mut out = Observable::new();
    for (c, w) in &obs.terms {
        let mut scalar = *c;
        let mut excited = Vec::with_capacity(w.len());
        for &t in w {
            if is_zero(t.mode) {
                scalar *= if t.dagger { amplitude.conj() } else { amplitude };
            } else {
                excited.push(t);
            }
        }
        for (k, word) in normal_order(&excited) {
            out.push(scalar * k, word);
        }
    }
    out
}
