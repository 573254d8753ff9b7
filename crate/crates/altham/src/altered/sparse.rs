use std::path::Path;

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::models::{csv_err, DiagonalLandscape};
use crate::qop::{EigenSystem, HermitianOperator, RegisterShape};
use crate::tol::tolerances;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternKind {
    /// `T_{αβ} = 1` iff `|α − β| ≤ t` (diagonal included).
    Band { t: usize },
    /// `T_{αβ} = 1` iff `α` and `β` differ in exactly one bit.
    Hamming,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsityPattern {
    kind: PatternKind,
    n_bits: usize,
}

impl SparsityPattern {
    pub fn band(n_bits: usize, t: usize) -> Result<Self> {
        if t < 1 {
            return Err(Error::InvalidArgument("band half-width t must be ≥ 1".into()));
        }
        Ok(Self { kind: PatternKind::Band { t }, n_bits })
    }

    pub fn hamming(n_bits: usize) -> Result<Self> {
        if n_bits < 1 {
            return Err(Error::InvalidArgument("Hamming pattern needs n_bits ≥ 1".into()));
        }
        Ok(Self { kind: PatternKind::Hamming, n_bits })
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_bits
    }

    pub fn contains(&self, alpha: usize, beta: usize) -> bool {
        match self.kind {
            PatternKind::Band { t } => alpha.abs_diff(beta) <= t,
            PatternKind::Hamming => (alpha ^ beta).count_ones() == 1,
        }
    }

    /// Number of α with `T_{αβ} = 1`.
    pub fn t_col(&self, beta: usize) -> usize {
        pattern_columns(self, beta).len()
    }
}

/// All α with `T_{αβ} = 1`, ascending. The pattern is symmetric, so this is also row β.
pub fn pattern_columns(p: &SparsityPattern, beta: usize) -> Vec<usize> {
    let n = p.dim();
    match p.kind {
        PatternKind::Band { t } => (beta.saturating_sub(t)..=(beta + t).min(n - 1)).collect(),
        PatternKind::Hamming => {
            let mut v: Vec<usize> = (0..p.n_bits).map(|b| beta ^ (1 << b)).collect();
            v.sort_unstable();
            v
        }
    }
}

/// `W = Σ T_{αβ} f_{αβ} |α⟩⟨β|` with `f_{αβ} ~ N(0, E_β/t_β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseAlteration {
    pattern: SparsityPattern,
    /// `(α, β, f)` sorted by β then α; columns with `E_β = 0` are absent.
    entries: Vec<(usize, usize, f64)>,
    t_col: Vec<usize>,
}

pub(crate) fn clean_energies(energies: &[f64]) -> Result<Vec<f64>> {
    let tol = tolerances().degeneracy;
    energies
        .iter()
        .map(|&e| {
            if e >= 0.0 {
                Ok(e)
            } else if e >= -tol * e.abs().max(1.0) {
                Ok(0.0)
            } else {
                Err(Error::NegativeEnergy(e))
            }
        })
        .collect()
}

/// Draws `f` for the energies `E_β` (eigen-indexed, non-negative).
pub fn sample_sparse_alteration<R: Rng + ?Sized>(
    energies: &[f64],
    pattern: &SparsityPattern,
    rng: &mut R,
) -> Result<SparseAlteration> {
    if energies.len() != pattern.dim() {
        return Err(Error::DimensionMismatch { expected: pattern.dim(), got: energies.len() });
    }
    let e = clean_energies(energies)?;
    let mut entries = Vec::new();
    let mut t_col = Vec::with_capacity(e.len());
    for (beta, &eb) in e.iter().enumerate() {
        let cols = pattern_columns(pattern, beta);
        t_col.push(cols.len());
        if eb == 0.0 {
            continue;
        }
        let sd = (eb / cols.len() as f64).sqrt();
        for alpha in cols {
            let g: f64 = rng.sample(StandardNormal);
            entries.push((alpha, beta, sd * g));
        }
    }
    Ok(SparseAlteration { pattern: *pattern, entries, t_col })
}

impl SparseAlteration {
    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn t_col(&self) -> &[usize] {
        &self.t_col
    }

    pub fn dim(&self) -> usize {
        self.pattern.dim()
    }

    /// `W x`.
    pub fn apply_w(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::default(); self.dim()];
        for &(a, b, f) in &self.entries {
            y[a] += x[b] * f;
        }
        y
    }

    /// `Wᵀ x`.
    pub fn apply_wt(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::default(); self.dim()];
        for &(a, b, f) in &self.entries {
            y[b] += x[a] * f;
        }
        y
    }

    /// Dense `WᵀW`.
    pub fn gram(&self) -> Mat<f64> {
        let n = self.dim();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, f) in &self.entries {
            rows[a].push((b, f));
        }
        let mut g = Mat::<f64>::zeros(n, n);
        for row in &rows {
            for &(b1, f1) in row {
                for &(b2, f2) in row {
                    g[(b1, b2)] += f1 * f2;
                }
            }
        }
        g
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["alpha", "beta", "value"]).map_err(csv_err)?;
        for (a, b, f) in &self.entries {
            w.write_record([a.to_string(), b.to_string(), f.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, pattern: &SparsityPattern) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let mut entries = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let bad = || Error::Parse { line: k + 2, msg: "expected alpha,beta,value".into() };
            let a: usize = rec.get(0).and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let b: usize = rec.get(1).and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let f: f64 = rec.get(2).and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            if b >= pattern.dim() || !pattern.contains(a, b) {
                return Err(Error::Parse { line: k + 2, msg: format!("({a}, {b}) outside the pattern") });
            }
            entries.push((a, b, f));
        }
        entries.sort_by_key(|&(a, b, _)| (b, a));
        let t_col = (0..pattern.dim()).map(|b| pattern.t_col(b)).collect();
        Ok(Self { pattern: *pattern, entries, t_col })
    }
}

/// Base of a sparse alteration: a landscape, or a general eigensystem.
#[derive(Clone, Copy, Debug)]
pub enum SparseBase<'a> {
    Diagonal(&'a DiagonalLandscape),
    Eigen(&'a EigenSystem),
}

impl SparseBase<'_> {
    pub fn energies(&self) -> &[f64] {
        match self {
            SparseBase::Diagonal(l) => l.energies(),
            SparseBase::Eigen(es) => es.energies(),
        }
    }

    pub fn shape(&self) -> RegisterShape {
        match self {
            SparseBase::Diagonal(l) => l.shape(),
            SparseBase::Eigen(es) => es.shape().clone(),
        }
    }
}

/// `H_{T,f} = H + W†W`, in the computational basis.
pub fn assemble_sparse_altered(base: SparseBase<'_>, s: &SparseAlteration) -> Result<HermitianOperator> {
    let e = base.energies();
    if e.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: e.len(), got: s.dim() });
    }
    let mut g = s.gram();
    for (i, &ei) in e.iter().enumerate() {
        g[(i, i)] += ei;
    }
    let shape = base.shape();
    let n = e.len();
    match base {
        SparseBase::Diagonal(_) => HermitianOperator::new(&shape, Mat::from_fn(n, n, |i, j| C64::new(g[(i, j)], 0.0))),
        SparseBase::Eigen(es) => {
            let v = es.basis_matrix();
            let gc = Mat::from_fn(n, n, |i, j| C64::new(g[(i, j)], 0.0));
            let m = &v * &gc * v.adjoint();
            let sym = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
            HermitianOperator::new(&shape, sym)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn columns_and_t() {
        let h = SparsityPattern::hamming(3).unwrap();
        assert_eq!(pattern_columns(&h, 0), vec![1, 2, 4]);
        let b = SparsityPattern::band(12, 2).unwrap();
        assert_eq!(pattern_columns(&b, 0), vec![0, 1, 2]);
        assert_eq!(b.t_col(100), 5);
        assert_eq!(b.t_col(4095), 3);
        assert!(SparsityPattern::band(4, 0).is_err());
    }

    #[test]
    fn zero_landscape_gives_zero_alteration() {
        let p = SparsityPattern::hamming(4).unwrap();
        let s = sample_sparse_alteration(&[0.0; 16], &p, &mut stream(0, 0)).unwrap();
        assert!(s.entries().is_empty());
        assert!(sample_sparse_alteration(&[-1.0; 16], &p, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p = SparsityPattern::band(4, 2).unwrap();
        let e: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let s = sample_sparse_alteration(&e, &p, &mut stream(1, 0)).unwrap();
        let dir = std::env::temp_dir().join(format!("altham-sparse-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("w.csv");
        s.write_csv(&f).unwrap();
        let back = SparseAlteration::read_csv(&f, &p).unwrap();
        assert_eq!(back, s);
        std::fs::remove_dir_all(dir).ok();
    }
}
