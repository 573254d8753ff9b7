use std::collections::BTreeMap;

use crate::qop::register::Embedding;
use crate::qop::{Apply, LocalOp, LocalSum, RegisterShape, StateVector};
use crate::tol::tolerances;
use crate::{Error, Result, C64};

use super::propagate::expm_i_multi;

/// Local basis terms `P_i` bound to a register. Terms sharing a support share one embedding.
#[derive(Clone, Debug)]
pub struct GeneratorBasis {
    shape: RegisterShape,
    terms: Vec<LocalOp>,
    groups: Vec<(Embedding, Vec<usize>)>,
}

impl GeneratorBasis {
    pub fn new(shape: &RegisterShape, terms: Vec<LocalOp>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty generator basis".into()));
        }
        let mut by_support: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            let d = shape.check_support(t.support())?;
            if d != t.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: t.dim() });
            }
            by_support.entry(t.support().to_vec()).or_default().push(i);
        }
        let groups = by_support
            .into_iter()
            .map(|(s, idx)| Ok((Embedding::new(shape, &s)?, idx)))
            .collect::<Result<_>>()?;
        Ok(Self { shape: shape.clone(), terms, groups })
    }

    /// All non-identity basis products on the given supports.
    pub fn on_supports(shape: &RegisterShape, supports: &[Vec<usize>]) -> Result<Self> {
        let sd: Vec<(Vec<usize>, Vec<usize>)> =
            supports.iter().map(|s| (s.clone(), s.iter().map(|&x| shape.site_dim(x)).collect())).collect();
        for (s, _) in &sd {
            shape.check_support(s)?;
        }
        Self::new(shape, crate::qop::generator_terms(&sd))
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn terms(&self) -> &[LocalOp] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `g_i = 2 Im⟨ψ|P_i H|ψ⟩`, the derivative of `⟨ψ|e^{−iθP_i} H e^{iθP_i}|ψ⟩` at θ = 0.
pub fn variational_gradient(state: &StateVector, h: &dyn Apply, basis: &GeneratorBasis) -> Result<Vec<f64>> {
    if h.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), got: h.dim() });
    }
    if basis.shape != *state.shape() {
        return Err(Error::DimensionMismatch { expected: state.dim(), got: basis.shape.total_dim() });
    }
    let psi = state.amplitudes();
    let hpsi = h.apply(psi);
    let mut g = vec![0.0; basis.terms.len()];
    for (emb, idx) in &basis.groups {
        let d = emb.offsets.len();
        // y[j*d + i] = Σ_env (Hψ)[j] conj(ψ[i])
        let mut y = vec![C64::new(0.0, 0.0); d * d];
        for &b in &emb.bases {
            for (j, oj) in emb.offsets.iter().enumerate() {
                let hv = hpsi[b + oj];
                if hv == C64::new(0.0, 0.0) {
                    continue;
                }
                for (i, oi) in emb.offsets.iter().enumerate() {
                    y[j * d + i] += hv * psi[b + oi].conj();
                }
            }
        }
        for &t in idx {
            let p = basis.terms[t].data();
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    s += p[i * d + j] * y[j * d + i];
                }
            }
            g[t] = 2.0 * s.im;
        }
    }
    Ok(g)
}

/// How θ is chosen in a variational step.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaMode {
    Fixed(f64),
    /// `θ = c·Σ|g_i|/m`, clamped into (−1, 1).
    Prescribed { c: f64 },
    /// Best of θ = 0 and each grid point, by exact energy.
    LineSearch(Vec<f64>),
}

impl ThetaMode {
    pub fn default_grid() -> Vec<f64> {
        let (lo, hi) = (1e-3f64, 0.5f64);
        (0..16).map(|k| lo * (hi / lo).powf(k as f64 / 15.0)).collect()
    }

    pub fn line_search() -> Self {
        ThetaMode::LineSearch(Self::default_grid())
    }
}

#[derive(Clone, Debug)]
pub struct VariationalStep {
    /// `μ_i ∈ {−1, +1}`, or 0 for dropped zero-gradient terms.
    pub mus: Vec<i8>,
    pub theta: f64,
    pub gradient: Vec<f64>,
    pub energy_before: f64,
    pub energy_after: f64,
    /// `Σ_i g_i²`.
    pub local_variance: f64,
}

impl VariationalStep {
    pub fn drop(&self) -> f64 {
        self.energy_before - self.energy_after
    }

    /// `(μ_i, P_i)` for the active terms.
    pub fn generator_terms<'a>(&'a self, basis: &'a GeneratorBasis) -> impl Iterator<Item = (f64, &'a LocalOp)> + 'a {
        self.mus.iter().zip(&basis.terms).filter(|(m, _)| **m != 0).map(|(m, t)| (*m as f64, t))
    }
}

const CLAMP: f64 = 1.0 - 1e-9;

/// One step of signed-gradient descent: `ψ ← e^{iθG}ψ` with `G = Σ μ_i P_i`, `μ_i = −sign(g_i)`.
pub fn variational_update(
    state: &StateVector,
    h: &dyn Apply,
    basis: &GeneratorBasis,
    mode: &ThetaMode,
) -> Result<(StateVector, VariationalStep)> {
    let g = variational_gradient(state, h, basis)?;
    let zero = tolerances().gradient_zero;
    let mus: Vec<i8> = g.iter().map(|&x| if x.abs() <= zero { 0 } else if x > 0.0 { -1 } else { 1 }).collect();
    let l1: f64 = g.iter().zip(&mus).filter(|(_, m)| **m != 0).map(|(x, _)| x.abs()).sum();
    let local_variance = g.iter().map(|x| x * x).sum();
    let energy_before = state.expectation(h)?;
    let step = |theta: f64, energy_after: f64| VariationalStep {
        mus: mus.clone(),
        theta,
        gradient: g.clone(),
        energy_before,
        energy_after,
        local_variance,
    };
    if mus.iter().all(|&m| m == 0) {
        return Ok((state.clone(), step(0.0, energy_before)));
    }
    let gen = LocalSum::new(
        &basis.shape,
        mus.iter().zip(&basis.terms).filter(|(m, _)| **m != 0).map(|(m, t)| (*m as f64, t)),
    )?;
    let radius = gen.norm_bound();
    let prop_tol = tolerances().propagator;
    let energy_of = |v: &[C64]| -> f64 {
        let hv = h.apply(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    };
    match mode {
        ThetaMode::Fixed(_) | ThetaMode::Prescribed { .. } => {
            let theta = match mode {
                ThetaMode::Fixed(t) => {
                    if t.abs() >= 1.0 || !t.is_finite() {
                        return Err(Error::InvalidArgument(format!("|θ| must be < 1, got {t}")));
                    }
                    *t
                }
                ThetaMode::Prescribed { c } => (c * l1 / basis.len() as f64).clamp(-CLAMP, CLAMP),
                ThetaMode::LineSearch(_) => unreachable!(),
            };
            let v = expm_i_multi(&gen, radius, state.amplitudes(), &[theta], prop_tol).pop().expect("one θ");
            let v = renorm(v);
            let e = energy_of(&v);
            Ok((StateVector::from_normalized_unchecked(&basis.shape, v), step(theta, e)))
        }
        ThetaMode::LineSearch(grid) => {
            if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
                return Err(Error::InvalidArgument("line-search grid must lie in (0, 1)".into()));
            }
            let outs = expm_i_multi(&gen, radius, state.amplitudes(), grid, prop_tol);
            let mut best: Option<(f64, f64, Vec<C64>)> = None;
            for (t, v) in grid.iter().zip(outs) {
                let v = renorm(v);
                let e = energy_of(&v);
                if e < energy_before && best.as_ref().is_none_or(|(be, bt, _)| e < *be || (e == *be && t < bt)) {
                    best = Some((e, *t, v));
                }
            }
            match best {
                Some((e, t, v)) => Ok((StateVector::from_normalized_unchecked(&basis.shape, v), step(t, e))),
                None => Ok((state.clone(), step(0.0, energy_before))),
            }
        }
    }
}

fn renorm(mut v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}
