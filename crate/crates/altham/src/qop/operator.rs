use faer::Mat;

use super::dense::max_hermitian_deviation;
use super::local::{Apply, LocalOp, LocalSum};
use super::register::RegisterShape;
use crate::tol::tolerances;
use crate::{Error, Result, C64};

/// Dense Hermitian operator on a register.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    shape: RegisterShape,
    matrix: Mat<C64>,
}

impl HermitianOperator {
    pub fn new(shape: &RegisterShape, matrix: Mat<C64>) -> Result<Self> {
        let n = shape.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        let dev = max_hermitian_deviation(&matrix);
        if dev > tolerances().hermitian {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { shape: shape.clone(), matrix })
    }

    pub fn zeros(shape: &RegisterShape) -> Self {
        let n = shape.total_dim();
        Self { shape: shape.clone(), matrix: Mat::zeros(n, n) }
    }

    pub fn from_diagonal(shape: &RegisterShape, diag: &[f64]) -> Result<Self> {
        let n = shape.total_dim();
        if diag.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: diag.len() });
        }
        let mut m = Mat::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(Self { shape: shape.clone(), matrix: m })
    }

    pub fn from_local_sum(sum: &LocalSum) -> Result<Self> {
        Self::new(sum.shape(), sum.to_dense())
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch { expected: self.shape.total_dim(), got: other.shape.total_dim() });
        }
        Ok(Self { shape: self.shape.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.matrix.nrows();
        (0..n).all(|j| (0..n).all(|i| i == j || self.matrix[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

impl Apply for HermitianOperator {
    fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    fn apply_add(&self, x: &[C64], y: &mut [C64]) {
        let n = self.matrix.nrows();
        for (j, &xj) in x.iter().enumerate().take(n) {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(j);
            for i in 0..n {
                y[i] += col[i] * xj;
            }
        }
    }
}

/// `op ⊗ I` on the full register; support sites need not be contiguous.
pub fn embed(op: &LocalOp, shape: &RegisterShape) -> Result<HermitianOperator> {
    let dev = op.max_hermitian_deviation();
    if dev > tolerances().hermitian {
        return Err(Error::NotHermitian(dev));
    }
    HermitianOperator::from_local_sum(&LocalSum::new(shape, [(1.0, op)])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_11_on_sites_01_of_three_qubits() {
        let shape = RegisterShape::qubits(3).unwrap();
        let mut d = vec![0.0; 16];
        d[15] = 1.0;
        let p = LocalOp::from_real(vec![0, 1], vec![2, 2], &d).unwrap();
        let h = embed(&p, &shape).unwrap();
        assert!(h.is_diagonal());
        assert_eq!(h.diagonal_entries(), vec![0., 0., 0., 0., 0., 0., 1., 1.]);
    }

    #[test]
    fn identity_on_site0() {
        let shape = RegisterShape::qubits(2).unwrap();
        let h = embed(&LocalOp::identity(vec![0], vec![2]), &shape).unwrap();
        assert_eq!(h.diagonal_entries(), vec![1.0; 4]);
        assert!(h.is_diagonal());
    }

    #[test]
    fn rejects_bad_support() {
        let shape = RegisterShape::qubits(2).unwrap();
        assert!(matches!(embed(&LocalOp::identity(vec![2], vec![2]), &shape), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(
            embed(&LocalOp::identity(vec![0], vec![3]), &shape),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
