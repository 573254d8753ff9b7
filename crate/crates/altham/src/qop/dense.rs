//! Thin wrappers over the dense eigensolvers.

use faer::{Mat, Side};

use crate::{Error, Result, C64};

pub fn is_real(m: &Mat<C64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenNoConvergence)?;
    let s = e.S().column_vector();
    let vals = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn real_sym_eig(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenNoConvergence)?;
    let s = e.S().column_vector();
    let vals = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn herm_eigvals(m: &Mat<C64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let v = m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenNoConvergence)?;
    Ok(v)
}

pub fn max_hermitian_deviation(m: &Mat<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn max_abs_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let mut dev = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            dev = dev.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    dev
}

pub fn frobenius(a: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_eigenpairs() {
        let x = Mat::from_fn(2, 2, |i, j| C64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
        let (v, u) = herm_eig(&x).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        let r = (u[(0, 0)] / u[(1, 0)]).re;
        assert!((r + 1.0).abs() < 1e-12);
    }
}
