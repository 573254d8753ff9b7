use rand::Rng;
use rand_distr::StandardNormal;

use super::dense::{herm_eig, max_abs_diff};
use super::local::LocalOp;
use crate::tol::tolerances;
use crate::{Error, Result, C64};

/// Orthogonal projector on a few sites.
#[derive(Clone, Debug)]
pub struct Projector {
    op: LocalOp,
    rank: usize,
    range: Vec<Vec<C64>>,
}

impl Projector {
    pub fn new(op: LocalOp) -> Result<Self> {
        let tol = tolerances();
        let dev = op.max_hermitian_deviation();
        if dev > tol.hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let m = op.to_mat();
        let sq = &m * &m;
        let dev = max_abs_diff(&sq, &m);
        if dev > tol.projector {
            return Err(Error::NotProjector(dev));
        }
        let d = op.dim();
        let range: Vec<Vec<C64>> = if op.is_diagonal() {
            (0..d)
                .filter(|&i| op.get(i, i).re > 0.5)
                .map(|i| {
                    let mut v = vec![C64::default(); d];
                    v[i] = C64::new(1.0, 0.0);
                    v
                })
                .collect()
        } else {
            let (vals, vecs) = herm_eig(&m)?;
            (0..d).filter(|&k| vals[k] > 0.5).map(|k| (0..d).map(|i| vecs[(i, k)]).collect()).collect()
        };
        if range.is_empty() {
            return Err(Error::ZeroRank);
        }
        let tr = op.trace().re;
        if (tr - range.len() as f64).abs() > 1e-8 {
            return Err(Error::NotProjector((tr - range.len() as f64).abs()));
        }
        Ok(Self { rank: range.len(), range, op })
    }

    /// `|v⟩⟨v|` for a unit vector `v`, trusted to be normalized.
    pub(crate) fn rank_one_unchecked(support: &[usize], dims: &[usize], v: &[C64]) -> Self {
        let d = v.len();
        let data = (0..d * d).map(|k| v[k / d] * v[k % d].conj()).collect();
        let op = LocalOp::new(support.to_vec(), dims.to_vec(), data).expect("shape matches");
        Self { op, rank: 1, range: vec![v.to_vec()] }
    }

    pub fn op(&self) -> &LocalOp {
        &self.op
    }

    pub fn support(&self) -> &[usize] {
        self.op.support()
    }

    pub fn site_dims(&self) -> &[usize] {
        self.op.site_dims()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal basis of the range.
    pub fn range(&self) -> &[Vec<C64>] {
        &self.range
    }

    /// Unit vector drawn uniformly from the sphere of the range.
    pub fn haar_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<C64> {
        let d = self.op.dim();
        let mut v = vec![C64::default(); d];
        for r in &self.range {
            let g = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            for (vi, ri) in v.iter_mut().zip(r) {
                *vi += g * ri;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        v
    }
}

/// `φ = |v⟩⟨v|` with `v` Haar-random in the range of `proj`.
pub fn haar_in_range<R: Rng + ?Sized>(proj: &Projector, rng: &mut R) -> Projector {
    let v = proj.haar_vector(rng);
    Projector::rank_one_unchecked(proj.support(), proj.site_dims(), &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn rank_one_projector_is_reproduced() {
        let h = 0.5f64.sqrt();
        let v = [C64::new(h, 0.0), C64::new(0.0, h)];
        let p = Projector::rank_one_unchecked(&[0], &[2], &v);
        let p = Projector::new(p.op().clone()).unwrap();
        let phi = haar_in_range(&p, &mut stream(1, 0));
        assert!(max_abs_diff(&phi.op().to_mat(), &p.op().to_mat()) < 1e-14);
    }

    #[test]
    fn rejects_non_projectors() {
        let op = LocalOp::from_real(vec![0], vec![2], &[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(Projector::new(op), Err(Error::NotProjector(_))));
        let zero = LocalOp::from_real(vec![0], vec![2], &[0.0; 4]).unwrap();
        assert!(matches!(Projector::new(zero), Err(Error::ZeroRank)));
    }
}
