#![allow(clippy::excessive_precision)] // tabulated scaling thresholds

use nalgebra::DMatrix;

use super::{vec_norm, SparseMatrix, C64};

const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA_13: f64 = 5.371920351148152;

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        13 => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("no Pade table for degree {m}"),
    }
}

fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn solve_pade(u: DMatrix<C64>, v: DMatrix<C64>) -> DMatrix<C64> {
    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).expect("Pade denominator is singular")
}

/// Dense matrix exponential by scaling and squaring with diagonal Padé approximants.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let norm = one_norm(a);
    let scal = |x: f64| C64::new(x, 0.0);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let b = pade_coefficients(m);
            let a2 = a * a;
            let mut powers = vec![id.clone(), a2.clone()];
            while powers.len() <= m / 2 {
                let next = powers.last().unwrap() * &a2;
                powers.push(next);
            }
            let mut u = DMatrix::zeros(n, n);
            let mut v = DMatrix::zeros(n, n);
            for j in 0..=m / 2 {
                u += &powers[j] * scal(b[2 * j + 1]);
                v += &powers[j] * scal(b[2 * j]);
            }
            return solve_pade(a * u, v);
        }
    }

    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a * scal(0.5f64.powi(s));
    let b = pade_coefficients(13);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * scal(b[13]) + &a4 * scal(b[11]) + &a2 * scal(b[9]));
    let u = &a * (u_inner + &a6 * scal(b[7]) + &a4 * scal(b[5]) + &a2 * scal(b[3]) + &id * scal(b[1]));
    let v_inner = &a6 * (&a6 * scal(b[12]) + &a4 * scal(b[10]) + &a2 * scal(b[8]));
    let v = v_inner + &a6 * scal(b[6]) + &a4 * scal(b[4]) + &a2 * scal(b[2]) + &id * scal(b[0]);
    let mut r = solve_pade(u, v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// `exp(t·A) v` by a scaled truncated Taylor series.
///
/// The step count keeps `|t|·‖A‖₁/steps ≤ 1`; each step sums terms until they fall below
/// `1e-17` of the running result.
pub fn expm_multiply(a: &SparseMatrix, v: &[C64], t: C64) -> Vec<C64> {
    let norm = t.norm() * a.norm_one();
    let steps = norm.ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut w = v.to_vec();
    for _ in 0..steps {
        let mut term = w.clone();
        let mut acc = w.clone();
        for k in 1..=200 {
            term = a.matvec(&term);
            let f = h / k as f64;
            term.iter_mut().for_each(|x| *x *= f);
            acc.iter_mut().zip(&term).for_each(|(x, y)| *x += y);
            let tn = vec_norm(&term);
            if tn <= 1e-17 * vec_norm(&acc).max(1e-300) {
                break;
            }
            assert!(k < 200, "Taylor series failed to converge");
        }
        w = acc;
    }
    w
}
