use faer::Mat;

use super::register::{Embedding, RegisterShape};
use crate::{Error, Result, C64};

/// Dense operator on a few sites, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOp {
    support: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl LocalOp {
    pub fn new(support: Vec<usize>, dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if support.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: support.len(), got: dims.len() });
        }
        let d: usize = dims.iter().product();
        if data.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: data.len() });
        }
        Ok(Self { support, dims, data })
    }

    pub fn from_mat(support: Vec<usize>, dims: Vec<usize>, m: &Mat<C64>) -> Result<Self> {
        let d = m.nrows();
        let data = (0..d * m.ncols()).map(|k| m[(k / d, k % d)]).collect();
        Self::new(support, dims, data)
    }

    pub fn from_real(support: Vec<usize>, dims: Vec<usize>, data: &[f64]) -> Result<Self> {
        Self::new(support, dims, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn identity(support: Vec<usize>, dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            data[i * d + i] = C64::new(1.0, 0.0);
        }
        Self { support, dims, data }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn to_mat(&self) -> Mat<C64> {
        let d = self.dim();
        Mat::from_fn(d, d, |i, j| self.data[i * d + j])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { data: self.data.iter().map(|z| z * c).collect(), ..self.clone() }
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        dev
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d * d).all(|k| k / d == k % d || self.data[k] == C64::new(0.0, 0.0))
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// Same operator written on a larger support (identity on the added sites).
    pub fn extend_to(&self, support: &[usize], dims: &[usize]) -> Result<Self> {
        let pos: Vec<usize> = self
            .support
            .iter()
            .map(|s| support.iter().position(|t| t == s))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidArgument("support is not a superset".into()))?;
        let d_new: usize = dims.iter().product();
        let d_old = self.dim();
        let split = |mut a: usize| {
            let mut digits = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                digits[k] = a % dims[k];
                a /= dims[k];
            }
            digits
        };
        let mut data = vec![C64::new(0.0, 0.0); d_new * d_new];
        let digits: Vec<Vec<usize>> = (0..d_new).map(split).collect();
        let old_index = |dg: &[usize]| pos.iter().zip(&self.dims).fold(0, |acc, (&p, &d)| acc * d + dg[p]);
        let rest = |dg: &[usize]| -> Vec<usize> {
            (0..dims.len()).filter(|k| !pos.contains(k)).map(|k| dg[k]).collect()
        };
        let olds: Vec<usize> = digits.iter().map(|d| old_index(d)).collect();
        let rests: Vec<Vec<usize>> = digits.iter().map(|d| rest(d)).collect();
        for a in 0..d_new {
            for b in 0..d_new {
                if rests[a] == rests[b] {
                    data[a * d_new + b] = self.data[olds[a] * d_old + olds[b]];
                }
            }
        }
        Ok(Self { support: support.to_vec(), dims: dims.to_vec(), data })
    }

    /// `y += coef · (this ⊗ I) x` on the full register.
    pub(crate) fn apply_add(&self, emb: &Embedding, x: &[C64], y: &mut [C64], coef: C64, diagonal: bool) {
        let d = self.dim();
        let off = &emb.offsets;
        if diagonal {
            for &b in &emb.bases {
                for i in 0..d {
                    let k = b + off[i];
                    y[k] += coef * self.data[i * d + i] * x[k];
                }
            }
            return;
        }
        let mut buf = vec![C64::new(0.0, 0.0); d];
        for &b in &emb.bases {
            for (j, v) in buf.iter_mut().enumerate() {
                *v = x[b + off[j]];
            }
            for i in 0..d {
                let row = &self.data[i * d..(i + 1) * d];
                let mut acc = C64::new(0.0, 0.0);
                for (m, v) in row.iter().zip(&buf) {
                    acc += m * v;
                }
                y[b + off[i]] += coef * acc;
            }
        }
    }
}

/// Anything that can act linearly on register vectors.
pub trait Apply {
    fn dim(&self) -> usize;

    /// `y += A x`.
    fn apply_add(&self, x: &[C64], y: &mut [C64]);

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_add(x, &mut y);
        y
    }
}

#[derive(Clone, Debug)]
struct Group {
    op: LocalOp,
    emb: Embedding,
    diagonal: bool,
}

/// Sum of local operators, with terms on nested supports merged so that
/// each application touches every amplitude once per distinct support.
#[derive(Clone, Debug)]
pub struct LocalSum {
    shape: RegisterShape,
    groups: Vec<Group>,
}

impl LocalSum {
    pub fn new<'a>(shape: &RegisterShape, terms: impl IntoIterator<Item = (f64, &'a LocalOp)>) -> Result<Self> {
        let mut terms: Vec<(f64, &LocalOp)> = terms.into_iter().collect();
        for (_, op) in &terms {
            let d = shape.check_support(op.support())?;
            if d != op.dim() || op.site_dims().iter().zip(op.support()).any(|(&a, &s)| a != shape.site_dim(s)) {
                return Err(Error::DimensionMismatch { expected: d, got: op.dim() });
            }
        }
        terms.sort_by_key(|(_, op)| std::cmp::Reverse(op.support().len()));
        let mut merged: Vec<LocalOp> = Vec::new();
        for (c, op) in terms {
            let host = merged.iter_mut().find(|g| op.support().iter().all(|s| g.support().contains(s)));
            match host {
                Some(g) => {
                    let ext = if g.support() == op.support() {
                        op.scaled(c)
                    } else {
                        op.extend_to(g.support(), g.site_dims())?.scaled(c)
                    };
                    for (a, b) in g.data.iter_mut().zip(ext.data) {
                        *a += b;
                    }
                }
                None => merged.push(op.scaled(c)),
            }
        }
        let groups = merged
            .into_iter()
            .map(|op| {
                let emb = Embedding::new(shape, op.support())?;
                let diagonal = op.is_diagonal();
                Ok(Group { op, emb, diagonal })
            })
            .collect::<Result<_>>()?;
        Ok(Self { shape: shape.clone(), groups })
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.groups.iter().all(|g| g.diagonal)
    }

    /// Diagonal in the computational basis, when the sum is diagonal.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        if !self.is_diagonal() {
            return None;
        }
        let mut out = vec![0.0; self.shape.total_dim()];
        for g in &self.groups {
            let d = g.op.dim();
            for &b in &g.emb.bases {
                for i in 0..d {
                    out[b + g.emb.offsets[i]] += g.op.data[i * d + i].re;
                }
            }
        }
        Some(out)
    }

    /// Upper bound on the operator norm: sum of per-group spectral radii.
    pub fn norm_bound(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let m = g.op.to_mat();
                match super::dense::herm_eigvals(&m) {
                    Ok(ev) => ev.iter().fold(0.0f64, |a, e| a.max(e.abs())),
                    Err(_) => g.op.data.iter().map(|z| z.norm()).sum(),
                }
            })
            .sum()
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let n = self.shape.total_dim();
        let mut m = Mat::<C64>::zeros(n, n);
        for g in &self.groups {
            let d = g.op.dim();
            for &b in &g.emb.bases {
                for i in 0..d {
                    for j in 0..d {
                        let v = g.op.data[i * d + j];
                        if v != C64::new(0.0, 0.0) {
                            m[(b + g.emb.offsets[i], b + g.emb.offsets[j])] += v;
                        }
                    }
                }
            }
        }
        m
    }
}

impl Apply for LocalSum {
    fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    fn apply_add(&self, x: &[C64], y: &mut [C64]) {
        for g in &self.groups {
            g.op.apply_add(&g.emb, x, y, C64::new(1.0, 0.0), g.diagonal);
        }
    }
}

/// A single local operator bound to a register.
#[derive(Clone, Debug)]
pub struct Embedded {
    op: LocalOp,
    emb: Embedding,
    diagonal: bool,
    dim: usize,
}

impl Embedded {
    pub fn new(shape: &RegisterShape, op: &LocalOp) -> Result<Self> {
        let d = shape.check_support(op.support())?;
        if d != op.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: op.dim() });
        }
        Ok(Self { emb: Embedding::new(shape, op.support())?, diagonal: op.is_diagonal(), op: op.clone(), dim: shape.total_dim() })
    }

    pub fn op(&self) -> &LocalOp {
        &self.op
    }
}

impl Apply for Embedded {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_add(&self, x: &[C64], y: &mut [C64]) {
        self.op.apply_add(&self.emb, x, y, C64::new(1.0, 0.0), self.diagonal);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> LocalOp {
        LocalOp::from_real(vec![0], vec![2], &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn extend_places_identity_on_new_site() {
        let on1 = LocalOp::from_real(vec![1], vec![2], &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let e = on1.extend_to(&[0, 1], &[2, 2]).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| e.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
        let e2 = z().extend_to(&[1, 0], &[2, 2]).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| e2.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn merged_sum_matches_separate_terms() {
        let shape = RegisterShape::qubits(3).unwrap();
        let zz = LocalOp::from_real(vec![0, 2], vec![2, 2], &[1., 0., 0., 0., 0., -1., 0., 0., 0., 0., -1., 0., 0., 0., 0., 1.]).unwrap();
        let z0 = z();
        let merged = LocalSum::new(&shape, [(0.5, &zz), (2.0, &z0)]).unwrap();
        assert_eq!(merged.n_groups(), 1);
        let d = merged.diagonal().unwrap();
        for (i, v) in d.iter().enumerate() {
            let b = shape.digits_of(i);
            let s = |k: usize| if b[k] == 0 { 1.0 } else { -1.0 };
            assert!((v - (0.5 * s(0) * s(2) + 2.0 * s(0))).abs() < 1e-15);
        }
    }
}
