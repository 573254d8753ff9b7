use crate::tol::tolerances;
use crate::{Error, Result};

/// Shape of a qudit register. Site 0 is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        let cap = tolerances().dim_cap;
        let mut total = 1usize;
        for &d in &dims {
            if d < 2 {
                return Err(Error::InvalidArgument(format!("site dimension {d} < 2")));
            }
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cap)
                .ok_or(Error::DimensionCap { dim: total.saturating_mul(d), cap })?;
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(Self { dims, strides, total })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn qutrits(n: usize) -> Result<Self> {
        Self::new(vec![3; n])
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn site_dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    /// `n` if every site is a qubit.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dims.iter().all(|&d| d == 2).then_some(self.dims.len())
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    /// Validates a support list and returns the product of its site dimensions.
    pub fn check_support(&self, support: &[usize]) -> Result<usize> {
        let mut seen = vec![false; self.dims.len()];
        let mut dim = 1;
        for &s in support {
            if s >= self.dims.len() {
                return Err(Error::SiteOutOfRange { site: s, n_sites: self.dims.len() });
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::DuplicateSite(s));
            }
            dim *= self.dims[s];
        }
        Ok(dim)
    }
}

/// Index tables mapping a local operator on `support` into the full register.
///
/// Full index = `bases[e] + offsets[l]` for environment index `e` and local index `l`,
/// where the local index is mixed-radix over `support` in the given order.
#[derive(Clone, Debug)]
pub(crate) struct Embedding {
    pub offsets: Vec<usize>,
    pub bases: Vec<usize>,
}

impl Embedding {
    pub fn new(shape: &RegisterShape, support: &[usize]) -> Result<Self> {
        let local = shape.check_support(support)?;
        let mut offsets = vec![0usize; local];
        for (l, off) in offsets.iter_mut().enumerate() {
            let mut rem = l;
            for &s in support.iter().rev() {
                let d = shape.site_dim(s);
                *off += (rem % d) * shape.stride(s);
                rem /= d;
            }
        }
        let env: Vec<usize> = (0..shape.n_sites()).filter(|s| !support.contains(s)).collect();
        let n_env = shape.total_dim() / local;
        let mut bases = vec![0usize; n_env];
        for (e, b) in bases.iter_mut().enumerate() {
            let mut rem = e;
            for &s in env.iter().rev() {
                let d = shape.site_dim(s);
                *b += (rem % d) * shape.stride(s);
                rem /= d;
            }
        }
        Ok(Self { offsets, bases })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let s = RegisterShape::new(vec![2, 3, 2]).unwrap();
        assert_eq!(s.total_dim(), 12);
        for i in 0..12 {
            assert_eq!(s.index_of(&s.digits_of(i)), i);
        }
        assert_eq!(s.digits_of(11), vec![1, 2, 1]);
    }

    #[test]
    fn cap_and_support_errors() {
        assert!(matches!(RegisterShape::qubits(14), Err(Error::DimensionCap { .. })));
        assert!(RegisterShape::new(vec![2, 1]).is_err());
        let s = RegisterShape::qubits(3).unwrap();
        assert!(matches!(s.check_support(&[0, 3]), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(s.check_support(&[1, 1]), Err(Error::DuplicateSite(1))));
    }

    #[test]
    fn embedding_covers_every_index_once() {
        let s = RegisterShape::new(vec![2, 3, 2, 2]).unwrap();
        let e = Embedding::new(&s, &[2, 0]).unwrap();
        let mut hit = vec![0; s.total_dim()];
        for b in &e.bases {
            for o in &e.offsets {
                hit[b + o] += 1;
            }
        }
        assert!(hit.iter().all(|&h| h == 1));
        // local index 1 = (site2 = 0, site0 = 1)
        assert_eq!(e.offsets[1], s.stride(0));
    }
}
