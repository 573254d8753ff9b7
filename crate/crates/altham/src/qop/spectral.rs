use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

use faer::{Mat, MatRef};

use super::dense::{herm_eig, is_real, real_sym_eig};
use super::local::Apply;
use super::operator::HermitianOperator;
use super::register::RegisterShape;
use super::state::StateVector;
use crate::tol::tolerances;
use crate::{Error, Result, C64};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug)]
enum Vectors {
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

impl Vectors {
    fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            Vectors::Real(m) => C64::new(m[(i, j)], 0.0),
            Vectors::Complex(m) => m[(i, j)],
        }
    }

    fn nrows(&self) -> usize {
        match self {
            Vectors::Real(m) => m.nrows(),
            Vectors::Complex(m) => m.nrows(),
        }
    }

    /// Sub-matrix; `rows = None` keeps every row.
    fn select(&self, rows: Option<&[usize]>, cols: &[usize]) -> Vectors {
        let all: Vec<usize>;
        let rows = match rows {
            Some(r) => r,
            None => {
                all = (0..self.nrows()).collect();
                &all
            }
        };
        match self {
            Vectors::Real(m) => Vectors::Real(Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])),
            Vectors::Complex(m) => Vectors::Complex(Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])),
        }
    }
}

#[derive(Clone, Copy)]
enum VRef<'a> {
    Real(MatRef<'a, f64>),
    Complex(MatRef<'a, C64>),
}

impl Vectors {
    fn view(&self) -> VRef<'_> {
        match self {
            Vectors::Real(m) => VRef::Real(m.as_ref()),
            Vectors::Complex(m) => VRef::Complex(m.as_ref()),
        }
    }
}

fn complexify(m: MatRef<'_, f64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

/// Calls `f(i, j, |(a† b)_ij|²)`.
fn adjoint_product_sq(a: VRef<'_>, b: VRef<'_>, mut f: impl FnMut(usize, usize, f64)) {
    let visit = |m: Mat<C64>, f: &mut dyn FnMut(usize, usize, f64)| {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                f(i, j, m[(i, j)].norm_sqr());
            }
        }
    };
    match (a, b) {
        (VRef::Real(a), VRef::Real(b)) => {
            let m = a.transpose() * b;
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    f(i, j, m[(i, j)] * m[(i, j)]);
                }
            }
        }
        (VRef::Complex(a), VRef::Complex(b)) => visit(a.adjoint() * b, &mut f),
        (VRef::Real(a), VRef::Complex(b)) => visit(complexify(a).adjoint() * b, &mut f),
        (VRef::Complex(a), VRef::Real(b)) => visit(a.adjoint() * complexify(b), &mut f),
    }
}

#[derive(Clone, Debug)]
struct Block {
    /// Computational-basis indices spanned by the block, ascending.
    indices: Vec<usize>,
    vectors: Vectors,
}

/// Spectral decomposition `H = Σ E_α |ξ_α⟩⟨ξ_α|`, energies non-decreasing.
///
/// Eigenvectors are stored per invariant block of the computational basis, so
/// operators that split (parity sectors, diagonal landscapes) stay cheap.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    id: u64,
    shape: RegisterShape,
    energies: Vec<f64>,
    slot: Vec<(u32, u32)>,
    blocks: Vec<Block>,
    global: Vec<Vec<usize>>,
    /// computational index → (block, row)
    locate: Vec<(u32, u32)>,
}

impl EigenSystem {
    fn assemble(shape: &RegisterShape, blocks: Vec<Block>, block_energies: Vec<Vec<f64>>) -> Self {
        let mut order: Vec<(f64, u32, u32)> = Vec::with_capacity(shape.total_dim());
        for (b, es) in block_energies.iter().enumerate() {
            for (c, &e) in es.iter().enumerate() {
                order.push((e, b as u32, c as u32));
            }
        }
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut global: Vec<Vec<usize>> = block_energies.iter().map(|e| vec![0; e.len()]).collect();
        for (a, &(_, b, c)) in order.iter().enumerate() {
            global[b as usize][c as usize] = a;
        }
        let mut locate = vec![(0u32, 0u32); shape.total_dim()];
        for (b, blk) in blocks.iter().enumerate() {
            for (r, &i) in blk.indices.iter().enumerate() {
                locate[i] = (b as u32, r as u32);
            }
        }
        Self {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            shape: shape.clone(),
            energies: order.iter().map(|o| o.0).collect(),
            slot: order.iter().map(|o| (o.1, o.2)).collect(),
            blocks,
            global,
            locate,
        }
    }

    /// Diagonal operator: eigenvectors are computational basis states, ties broken by index.
    pub fn computational(shape: &RegisterShape, energies: &[f64]) -> Result<Self> {
        if energies.len() != shape.total_dim() {
            return Err(Error::DimensionMismatch { expected: shape.total_dim(), got: energies.len() });
        }
        let blocks = (0..energies.len())
            .map(|i| Block { indices: vec![i], vectors: Vectors::Real(Mat::from_fn(1, 1, |_, _| 1.0)) })
            .collect();
        Ok(Self::assemble(shape, blocks, energies.iter().map(|&e| vec![e]).collect()))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Groups of indices whose energies coincide within the degeneracy tolerance.
    pub fn levels(&self) -> Vec<Range<usize>> {
        group_levels(&self.energies)
    }

    pub fn eigenvector_amplitudes(&self, alpha: usize) -> Vec<C64> {
        let (b, c) = self.slot[alpha];
        let blk = &self.blocks[b as usize];
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        for (r, &i) in blk.indices.iter().enumerate() {
            v[i] = blk.vectors.get(r, c as usize);
        }
        v
    }

    pub fn eigenvector(&self, alpha: usize) -> StateVector {
        StateVector::from_normalized_unchecked(&self.shape, self.eigenvector_amplitudes(alpha))
    }

    /// Columns are eigenvectors in energy order.
    pub fn basis_matrix(&self) -> Mat<C64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for a in 0..n {
            let (b, c) = self.slot[a];
            let blk = &self.blocks[b as usize];
            for (r, &i) in blk.indices.iter().enumerate() {
                m[(i, a)] = blk.vectors.get(r, c as usize);
            }
        }
        m
    }

    pub fn reconstruct(&self) -> Mat<C64> {
        let v = self.basis_matrix();
        let n = self.dim();
        let vd = Mat::from_fn(n, n, |i, j| v[(i, j)] * self.energies[j]);
        vd * v.adjoint()
    }

    /// `c_α = ⟨ξ_α|x⟩`.
    pub fn amplitudes(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check_len(x.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (b, blk) in self.blocks.iter().enumerate() {
            let ncols = self.global[b].len();
            for c in 0..ncols {
                let mut acc = C64::new(0.0, 0.0);
                for (r, &i) in blk.indices.iter().enumerate() {
                    acc += blk.vectors.get(r, c).conj() * x[i];
                }
                out[self.global[b][c]] = acc;
            }
        }
        Ok(out)
    }

    pub fn probabilities(&self, x: &[C64]) -> Result<Vec<f64>> {
        Ok(self.amplitudes(x)?.iter().map(|z| z.norm_sqr()).collect())
    }

    /// `Σ_i |⟨i|ξ_α⟩|² d_i` for every α.
    pub fn diagonal_expectations(&self, diag: &[f64]) -> Result<Vec<f64>> {
        self.check_len(diag.len())?;
        let mut out = vec![0.0; self.dim()];
        for (b, blk) in self.blocks.iter().enumerate() {
            for c in 0..self.global[b].len() {
                let mut acc = 0.0;
                for (r, &i) in blk.indices.iter().enumerate() {
                    acc += blk.vectors.get(r, c).norm_sqr() * diag[i];
                }
                out[self.global[b][c]] = acc;
            }
        }
        Ok(out)
    }

    /// `⟨ξ_α|A|ξ_α⟩` for the α where `mask` is true (all when `None`); NaN elsewhere.
    pub fn expectations(&self, op: &dyn Apply, mask: Option<&[bool]>) -> Result<Vec<f64>> {
        self.check_len(op.dim())?;
        let mut out = vec![f64::NAN; self.dim()];
        for (a, o) in out.iter_mut().enumerate() {
            if mask.is_some_and(|m| !m[a]) {
                continue;
            }
            let v = self.eigenvector_amplitudes(a);
            let av = op.apply(&v);
            *o = v.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum();
        }
        Ok(out)
    }

    /// Calls `f(α_old, β_new, |⟨ξ'_β|ξ_α⟩|²)` for every old column in `cols` (per old block)
    /// and every new eigenvector overlapping it.
    fn for_overlaps(&self, old: &EigenSystem, cols: &[Vec<usize>], mut f: impl FnMut(usize, usize, f64)) {
        let mut pairs: std::collections::BTreeMap<(u32, u32), Vec<usize>> = Default::default();
        for i in 0..self.dim() {
            let (bo, _) = old.locate[i];
            if cols[bo as usize].is_empty() {
                continue;
            }
            let (bn, _) = self.locate[i];
            pairs.entry((bo, bn)).or_default().push(i);
        }
        for ((bo, bn), idx) in pairs {
            let (ob, nb) = (&old.blocks[bo as usize], &self.blocks[bn as usize]);
            let rows_o: Vec<usize> = idx.iter().map(|&i| old.locate[i].1 as usize).collect();
            let rows_n: Vec<usize> = idx.iter().map(|&i| self.locate[i].1 as usize).collect();
            let full_o = rows_o.len() == ob.indices.len();
            let full_n = rows_n.len() == nb.indices.len();
            let cols_o = &cols[bo as usize];
            let all_o = cols_o.len() == ob.indices.len();
            let a_owned;
            let a = if full_n {
                nb.vectors.view()
            } else {
                a_owned = nb.vectors.select(Some(&rows_n), &(0..nb.indices.len()).collect::<Vec<_>>());
                a_owned.view()
            };
            let b_owned;
            let b = if full_o && all_o {
                ob.vectors.view()
            } else {
                b_owned = ob.vectors.select(if full_o { None } else { Some(&rows_o) }, cols_o);
                b_owned.view()
            };
            let gn = &self.global[bn as usize];
            let go = &old.global[bo as usize];
            adjoint_product_sq(a, b, |r, c, p| f(go[cols_o[c]], gn[r], p));
        }
    }

    fn cols_by_block(&self, alphas: impl Iterator<Item = usize>) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.blocks.len()];
        for a in alphas {
            let (b, c) = self.slot[a];
            cols[b as usize].push(c as usize);
        }
        for c in &mut cols {
            c.sort_unstable();
            c.dedup();
        }
        cols
    }

    /// Distribution in this basis of the mixture `Σ q_α |ξ_α⟩⟨ξ_α|` over `old`'s basis.
    pub fn transfer_from(&self, old: &EigenSystem, q: &[f64]) -> Result<Vec<f64>> {
        self.check_len(old.dim())?;
        old.check_len(q.len())?;
        let cols = old.cols_by_block((0..q.len()).filter(|&a| q[a] > 0.0));
        let mut p = vec![0.0; self.dim()];
        self.for_overlaps(old, &cols, |a, b, w| p[b] += q[a] * w);
        Ok(p)
    }

    /// For each old eigen-index in `alphas`, its measurement distribution in this basis.
    pub fn overlap_rows(&self, old: &EigenSystem, alphas: &[usize]) -> Result<Vec<Vec<f64>>> {
        self.check_len(old.dim())?;
        let mut row_of = vec![usize::MAX; old.dim()];
        for (k, &a) in alphas.iter().enumerate() {
            row_of[a] = k;
        }
        let cols = old.cols_by_block(alphas.iter().copied());
        let mut rows = vec![vec![0.0; self.dim()]; alphas.len()];
        self.for_overlaps(old, &cols, |a, b, w| rows[row_of[a]][b] = w);
        Ok(rows)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: n });
        }
        Ok(())
    }
}

pub(crate) fn group_levels(energies: &[f64]) -> Vec<Range<usize>> {
    let tol = tolerances().degeneracy;
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=energies.len() {
        if k == energies.len() || energies[k] - energies[k - 1] > tol * energies[k].abs().max(1.0) {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Connected components of the non-zero pattern, each as sorted indices.
fn components(m: &Mat<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        let col = m.col(j);
        for i in 0..j {
            if col[i] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Exact diagonalization. Invariant blocks of the sparsity pattern are solved separately.
pub fn spectral(op: &HermitianOperator) -> Result<EigenSystem> {
    let m = op.matrix();
    let comps = components(m);
    let real = is_real(m);
    let mut blocks = Vec::with_capacity(comps.len());
    let mut energies = Vec::with_capacity(comps.len());
    for idx in comps {
        let k = idx.len();
        if k == 1 {
            energies.push(vec![m[(idx[0], idx[0])].re]);
            blocks.push(Block { indices: idx, vectors: Vectors::Real(Mat::from_fn(1, 1, |_, _| 1.0)) });
            continue;
        }
        let whole = k == m.nrows();
        if real {
            let sub = Mat::from_fn(k, k, |i, j| m[(idx[i], idx[j])].re);
            let (e, v) = real_sym_eig(&sub)?;
            energies.push(e);
            blocks.push(Block { indices: idx, vectors: Vectors::Real(v) });
        } else {
            let (e, v) = if whole {
                herm_eig(m)?
            } else {
                herm_eig(&Mat::from_fn(k, k, |i, j| m[(idx[i], idx[j])]))?
            };
            energies.push(e);
            blocks.push(Block { indices: idx, vectors: Vectors::Complex(v) });
        }
    }
    Ok(EigenSystem::assemble(op.shape(), blocks, energies))
}
