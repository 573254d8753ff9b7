use rand::Rng;

use crate::models::LocalHamiltonian;
use crate::qop::register::Embedding;
use crate::qop::{partial_trace_ensemble, Apply, Ensemble, LocalSum};
use crate::{Result, C64};

use super::{mean_stderr, VarianceReport};

/// `E_φ Var_ρ(H_φ)` in closed form:
///
/// `Var_ρ(Σ(1+1/d_i)Π_i) + Σ_i [ (d_i−1)/d_i² p_i + p_i²/(d_i²(d_i+1)) − Tr((Π_iρ_iΠ_i)²)/(d_i(d_i+1)) ]`
///
/// with `p_i = Tr(Π_iρ)` and `ρ_i` the reduced state on the support of `Π_i`.
pub fn expected_variance_local_closed_form(h: &LocalHamiltonian, rho: &Ensemble) -> Result<f64> {
    let pis = h.projectors()?;
    let a = LocalSum::new(h.shape(), pis.iter().map(|p| (1.0 + 1.0 / p.rank() as f64, p.op())))?;
    let mut total = rho.variance(&a)?;
    for p in &pis {
        let d = p.rank() as f64;
        let r = partial_trace_ensemble(rho, p.support())?;
        let pm = p.op().to_mat();
        let x = &pm * &r * &pm;
        let pi: f64 = (0..x.nrows()).map(|i| x[(i, i)].re).sum();
        let mut tr_x2 = 0.0;
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                let z: C64 = x[(i, j)] * x[(j, i)];
                tr_x2 += z.re;
            }
        }
        total += (d - 1.0) / (d * d) * pi + pi * pi / (d * d * (d + 1.0)) - tr_x2 / (d * (d + 1.0));
    }
    Ok(total)
}

/// Per-sample `Var_ρ(H_φ)` for fresh alterations.
///
/// `H_φψ = Hψ + Σ_i v_i⟨v_i|ψ⟩`, with `Hψ` computed once per component and each
/// rank-one term applied by contraction over its support.
pub fn local_variance_mc<R: Rng + ?Sized>(h: &LocalHamiltonian, rho: &Ensemble, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let pis = h.projectors()?;
    let embs = pis.iter().map(|p| Embedding::new(h.shape(), p.support())).collect::<Result<Vec<_>>>()?;
    let parts: Vec<(f64, &[C64], Vec<C64>)> =
        rho.parts().iter().map(|(w, s)| (*w, s.amplitudes(), h.local_sum().apply(s.amplitudes()))).collect();
    let dim = h.shape().total_dim();
    let mut y = vec![C64::default(); dim];
    let mut overlap = Vec::new();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let vs: Vec<Vec<C64>> = pis.iter().map(|p| p.haar_vector(rng)).collect();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (w, x, hx) in &parts {
            y.copy_from_slice(hx);
            for (v, emb) in vs.iter().zip(&embs) {
                overlap.clear();
                overlap.extend(emb.bases.iter().map(|&b| {
                    v.iter().zip(&emb.offsets).map(|(vl, &o)| vl.conj() * x[b + o]).sum::<C64>()
                }));
                for (&b, &c) in emb.bases.iter().zip(&overlap) {
                    for (vl, &o) in v.iter().zip(&emb.offsets) {
                        y[b + o] += vl * c;
                    }
                }
            }
            let e: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
            m1 += w * e;
            m2 += w * y.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        out.push(m2 - m1 * m1);
    }
    Ok(out)
}

/// Monte Carlo against the closed form, the stated bound
/// `Var_ρ(Σ(1+1/d_i)Π_i) + Tr(Hρ)/max_i d_i`, and the bound
/// `Var_ρ(Σ(1+1/d_i)Π_i) + Σ_i (d_i−1)/(d_i(d_i+1)) p_i` implied by the closed form.
pub fn theorem1_bound_check<R: Rng + ?Sized>(
    h: &LocalHamiltonian,
    rho: &Ensemble,
    n_samples: usize,
    rng: &mut R,
) -> Result<VarianceReport> {
    let pis = h.projectors()?;
    let a = LocalSum::new(h.shape(), pis.iter().map(|p| (1.0 + 1.0 / p.rank() as f64, p.op())))?;
    let var_a = rho.variance(&a)?;
    let max_d = pis.iter().map(|p| p.rank()).max().unwrap_or(1) as f64;
    let energy = rho.expectation(h.local_sum())?;
    let mut corr = 0.0;
    for p in &pis {
        let d = p.rank() as f64;
        let pi = rho.expectation(&crate::qop::Embedded::new(h.shape(), p.op())?)?;
        corr += (d - 1.0) / (d * (d + 1.0)) * pi;
    }
    let samples = local_variance_mc(h, rho, n_samples, rng)?;
    let (mc, se) = mean_stderr(&samples);
    Ok(VarianceReport {
        mc_estimate: mc,
        stderr: se,
        closed_form: expected_variance_local_closed_form(h, rho)?,
        lower_bound: var_a + energy / max_d,
        corrected_bound: var_a + corr,
        n_samples,
    })
}
