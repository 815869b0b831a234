//! Dense state-vector reference for a few qubits. Gates are full
//! `2^n x 2^n` matrices built by Kronecker products and multiplied in.

use flagqec::{Letter, PauliOperator};
use num_complex::Complex64 as C;

pub type Matrix = Vec<Vec<C>>;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

fn letter_matrix(l: Letter) -> [[C; 2]; 2] {
    let i = C::new(0.0, 1.0);
    match l {
        Letter::I => [[ONE, ZERO], [ZERO, ONE]],
        Letter::X => [[ZERO, ONE], [ONE, ZERO]],
        Letter::Y => [[ZERO, -i], [i, ZERO]],
        Letter::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|r| (0..dim).map(|c| if r == c { ONE } else { ZERO }).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![ZERO; n]; n];
    for r in 0..n {
        for k in 0..n {
            if a[r][k] == ZERO {
                continue;
            }
            for c in 0..n {
                out[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    out
}

/// Single-qubit `u` on qubit `q` of `n`; qubit `q` is bit `q` of the index.
pub fn embed1(n: usize, q: usize, u: [[C; 2]; 2]) -> Matrix {
    let dim = 1 << n;
    let mut m = vec![vec![ZERO; dim]; dim];
    for r in 0..dim {
        for c in 0..dim {
            if (r ^ c) & !(1 << q) == 0 {
                m[r][c] = u[(r >> q) & 1][(c >> q) & 1];
            }
        }
    }
    m
}

pub fn hadamard(n: usize, q: usize) -> Matrix {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    embed1(n, q, [[h, h], [h, -h]])
}

pub fn phase_s(n: usize, q: usize) -> Matrix {
    embed1(n, q, [[ONE, ZERO], [ZERO, C::new(0.0, 1.0)]])
}

/// Controlled-`letter` with control `a` and target `b`.
pub fn controlled(n: usize, a: usize, b: usize, letter: Letter) -> Matrix {
    let dim = 1 << n;
    let u = letter_matrix(letter);
    let mut m = vec![vec![ZERO; dim]; dim];
    for c in 0..dim {
        if (c >> a) & 1 == 0 {
            m[c][c] = ONE;
            continue;
        }
        for r in 0..dim {
            if (r ^ c) & !(1 << b) == 0 {
                m[r][c] = u[(r >> b) & 1][(c >> b) & 1];
            }
        }
    }
    m
}

/// Matrix of the letters of `p` (sign ignored).
pub fn pauli_matrix(p: &PauliOperator) -> Matrix {
    let n = p.num_qubits();
    let mut m = identity(1 << n);
    for q in 0..n {
        m = matmul(&embed1(n, q, letter_matrix(p.letter(q))), &m);
    }
    m
}

pub fn apply(m: &Matrix, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn basis_zero(n: usize) -> Vec<C> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    v
}

/// `<v|P|v>`, real for hermitian `P`.
pub fn expectation(p: &PauliOperator, v: &[C]) -> f64 {
    let pv = apply(&pauli_matrix(p), v);
    v.iter().zip(&pv).map(|(a, b)| a.conj() * b).sum::<C>().re
}

/// Projects onto the `(-1)^bit` eigenspace of `p` and renormalizes.
/// Returns the prior probability of that outcome.
pub fn project(p: &PauliOperator, bit: bool, v: &mut Vec<C>) -> f64 {
    let pv = apply(&pauli_matrix(p), v);
    let s = if bit { -1.0 } else { 1.0 };
    let proj: Vec<C> = v.iter().zip(&pv).map(|(a, b)| (a + b * s) * 0.5).collect();
    let prob: f64 = proj.iter().map(|c| c.norm_sqr()).sum();
    if prob > 1e-12 {
        let norm = prob.sqrt();
        *v = proj.into_iter().map(|c| c / norm).collect();
    }
    prob
}
