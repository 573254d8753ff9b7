//! `e^{iθG}ψ` for Hermitian `G` by Chebyshev expansion, for several θ at once.

use crate::qop::Apply;
use crate::C64;

/// `J_0(z) … J_n(z)` by Miller's backward recurrence.
pub(crate) fn bessel_j(n: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = n.max(z as usize) + 40 + (z.max(1.0).sqrt() * 10.0) as usize;
    let start = start + start % 2;
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        // j holds J_k (unnormalized), jp1 holds J_{k+1}
        if k <= n {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == 0 {
            break;
        }
        let jm1 = 2.0 * k as f64 / z * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            norm *= s;
            out.iter_mut().for_each(|x| *x *= s);
        }
    }
    out.iter_mut().for_each(|x| *x /= norm);
    out
}

/// Returns `e^{iθ_j G} x` for every θ_j. `radius` bounds the spectral radius of `G`.
pub fn expm_i_multi(g: &dyn Apply, radius: f64, x: &[C64], thetas: &[f64], tol: f64) -> Vec<Vec<C64>> {
    let n = x.len();
    let r = radius.max(1e-300);
    let zmax = thetas.iter().fold(0.0f64, |a, t| a.max(t.abs())) * r;
    if zmax == 0.0 {
        return thetas.iter().map(|_| x.to_vec()).collect();
    }
    let nmax = (zmax + 10.0 * zmax.cbrt() + 40.0) as usize;
    let coeffs: Vec<Vec<f64>> = thetas.iter().map(|t| bessel_j(nmax, t.abs() * r)).collect();
    // i^k for sign-aware θ: e^{iθRx} with θ < 0 conjugates the phase
    let phase = |k: usize, neg: bool| -> C64 {
        let base = match k % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        if neg {
            base.conj()
        } else {
            base
        }
    };
    let mut out: Vec<Vec<C64>> = thetas.iter().zip(&coeffs).map(|(_, c)| x.iter().map(|v| v * c[0]).collect()).collect();
    let scaled = |v: &[C64]| -> Vec<C64> { g.apply(v).into_iter().map(|z| z / r).collect() };
    let mut prev = x.to_vec();
    let mut cur = scaled(x);
    let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for k in 1..=nmax {
        let mut done = k as f64 > zmax;
        for (j, t) in thetas.iter().enumerate() {
            let c = 2.0 * coeffs[j][k];
            if c.abs() * xnorm > tol {
                done = false;
            }
            if c == 0.0 {
                continue;
            }
            let w = phase(k, *t < 0.0) * c;
            for (o, v) in out[j].iter_mut().zip(&cur) {
                *o += w * v;
            }
        }
        if done || k == nmax {
            break;
        }
        let gx = scaled(&cur);
        let next: Vec<C64> = (0..n).map(|i| gx[i] * 2.0 - prev[i]).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    out
}
