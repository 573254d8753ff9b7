use rand::Rng;

use crate::altered::{clean_energies, pattern_columns, sample_sparse_alteration, SparsityPattern};
use crate::models::DiagonalLandscape;
use crate::qop::StateVector;
use crate::{Error, Result, C64};

use super::{mean_stderr, VarianceReport};

/// Closed-form moments of `H_{T,f} = H + W†W` in a pure state `a`, with `r_β = E_β/t_β`,
/// `u_α = Σ_β T_{αβ}|a_β|² r_β` and `s_α = Σ_β T_{αβ} r_β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseMoments {
    /// `Tr(ψH)`.
    pub h1: f64,
    /// `Tr(ψH²)`.
    pub h2: f64,
    /// `E_f Tr(ψH_{T,f})² = 4h1² + Σ_α u_α² + Σ_α |Σ_β T_{αβ} a_β² r_β|²`.
    pub m1sq: f64,
    /// Same moment with `Σ_β |a_β|⁴ E_β r_β` in place of `Σ_α u_α²`.
    pub m1sq_as_printed: f64,
    /// `E_f Tr(ψH²_{T,f}) = 4h2 + Σ_β |a_β|² E_β r_β + Σ_α u_α s_α`.
    pub m2: f64,
    /// `Σ_α u_α (s_α − u_α)`.
    pub intermediate_bound: f64,
    /// `4(h2 − h1²) + Σ_β |a_β|² E_β r_β + Σ_α u_α (s_α − 2u_α)`.
    pub corrected_bound: f64,
}

impl SparseMoments {
    pub fn variance(&self) -> f64 {
        self.m2 - self.m1sq
    }
}

fn check(energies: &[f64], pattern: &SparsityPattern, state: &StateVector) -> Result<Vec<f64>> {
    if energies.len() != pattern.dim() || state.dim() != pattern.dim() {
        return Err(Error::DimensionMismatch { expected: pattern.dim(), got: state.dim().min(energies.len()) });
    }
    clean_energies(energies)
}

pub fn sparse_moment_closed_forms(base: &DiagonalLandscape, pattern: &SparsityPattern, state: &StateVector) -> Result<SparseMoments> {
    let e = check(base.energies(), pattern, state)?;
    let a = state.amplitudes();
    let n = e.len();
    let mut u = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut w = vec![C64::new(0.0, 0.0); n];
    let (mut h1, mut h2, mut diag, mut quartic) = (0.0, 0.0, 0.0, 0.0);
    for beta in 0..n {
        let p = a[beta].norm_sqr();
        h1 += p * e[beta];
        h2 += p * e[beta] * e[beta];
        let cols = pattern_columns(pattern, beta);
        let r = e[beta] / cols.len() as f64;
        diag += p * e[beta] * r;
        quartic += p * p * e[beta] * r;
        let a2 = a[beta] * a[beta] * r;
        for alpha in cols {
            u[alpha] += p * r;
            s[alpha] += r;
            w[alpha] += a2;
        }
    }
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let us: f64 = u.iter().zip(&s).map(|(x, y)| x * y).sum();
    let ww: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    Ok(SparseMoments {
        h1,
        h2,
        m1sq: 4.0 * h1 * h1 + uu + ww,
        m1sq_as_printed: 4.0 * h1 * h1 + quartic + ww,
        m2: 4.0 * h2 + diag + us,
        intermediate_bound: us - uu,
        corrected_bound: 4.0 * (h2 - h1 * h1) + diag + us - 2.0 * uu,
    })
}

/// Monte Carlo moments over `n` draws of `f`, each with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseMomentsMc {
    pub m1sq: (f64, f64),
    pub m2: (f64, f64),
    pub variance: (f64, f64),
    pub n_samples: usize,
}

pub fn sparse_moments_mc<R: Rng + ?Sized>(
    base: &DiagonalLandscape,
    pattern: &SparsityPattern,
    state: &StateVector,
    n: usize,
    rng: &mut R,
) -> Result<SparseMomentsMc> {
    check(base.energies(), pattern, state)?;
    let e = base.energies();
    let a = state.amplitudes();
    let ha: Vec<C64> = a.iter().zip(e).map(|(x, y)| x * y).collect();
    let (mut s1, mut s2, mut sv) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let f = sample_sparse_alteration(e, pattern, rng)?;
        let wa = f.apply_w(a);
        let y: Vec<C64> = f.apply_wt(&wa).iter().zip(&ha).map(|(x, h)| x + h).collect();
        let m1: f64 = a.iter().zip(&y).map(|(x, z)| (x.conj() * z).re).sum();
        let m2: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        s1.push(m1 * m1);
        s2.push(m2);
        sv.push(m2 - m1 * m1);
    }
    Ok(SparseMomentsMc { m1sq: mean_stderr(&s1), m2: mean_stderr(&s2), variance: mean_stderr(&sv), n_samples: n })
}

/// Monte Carlo expected variance against `m2 − m1sq`, with the intermediate bound as `lower_bound`.
pub fn theorem2_bound_check<R: Rng + ?Sized>(
    base: &DiagonalLandscape,
    pattern: &SparsityPattern,
    state: &StateVector,
    n_samples: usize,
    rng: &mut R,
) -> Result<VarianceReport> {
    let cf = sparse_moment_closed_forms(base, pattern, state)?;
    let mc = sparse_moments_mc(base, pattern, state, n_samples, rng)?;
    Ok(VarianceReport {
        mc_estimate: mc.variance.0,
        stderr: mc.variance.1,
        closed_form: cf.variance(),
        lower_bound: cf.intermediate_bound,
        corrected_bound: cf.corrected_bound,
        n_samples,
    })
}
