//! Small dense linear-algebra helpers shared by the Fock-space code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Eigenvalues (ascending order not guaranteed) and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if is_diagonal(m) {
        return (0..m.nrows()).map(|i| m[(i, i)].re).collect();
    }
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

pub(crate) fn is_diagonal(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Largest elementwise `|M - M†|`.
pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `ln(n!)` for `n = 0..len`, by cumulative summation.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 1 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Natural logarithm of `n!`.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Matrix exponential `exp(-i T)` of a real symmetric tridiagonal matrix with
/// zero diagonal and the given off-diagonal, computed through its eigenbasis.
pub(crate) fn expm_neg_i_tridiagonal(offdiag: &[f64]) -> DMatrix<Complex64> {
    let m = offdiag.len() + 1;
    let mut t = DMatrix::<f64>::zeros(m, m);
    for (n, &v) in offdiag.iter().enumerate() {
        t[(n + 1, n)] = v;
        t[(n, n + 1)] = v;
    }
    let eig = SymmetricEigen::new(t);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let mut scaled = v.clone();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -l);
        for x in scaled.column_mut(k).iter_mut() {
            *x *= phase;
        }
    }
    scaled * v.transpose()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        // degree 12 monomial: integral over [-1,1] is 2/13
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_even_and_odd_orders() {
        for n in [2, 3, 10, 11, 200] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            assert!((s - 2.0 / 3.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn expm_is_unitary() {
        let off: Vec<f64> = (1..30).map(|n| 0.7 * (n as f64).sqrt()).collect();
        let u = expm_neg_i_tridiagonal(&off);
        let id = &u * u.adjoint();
        for i in 0..30 {
            for j in 0..30 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex64::new(target, 0.0)).norm() < 1e-12);
            }
        }
    }
}
