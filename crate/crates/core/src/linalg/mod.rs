//! Sparse complex matrices and matrix exponentials.

mod expm;
mod sparse;

pub use expm::{expm, expm_multiply};
pub use sparse::SparseMatrix;

pub use num_complex::Complex64 as C64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u, v⟩`, antilinear in `u`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
