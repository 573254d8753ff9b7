use std::collections::BTreeSet;

use super::local::LocalOp;
use crate::C64;

/// Hermitian, trace-orthogonal basis of one site: identity first, then
/// Pauli matrices (d = 2) or generalized Gell-Mann matrices, each scaled to operator norm 1.
pub fn site_basis(d: usize) -> Vec<Vec<C64>> {
    let z = C64::default();
    let mut out = Vec::with_capacity(d * d);
    let mut id = vec![z; d * d];
    for i in 0..d {
        id[i * d + i] = C64::new(1.0, 0.0);
    }
    out.push(id);
    if d == 2 {
        let (o, i) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        out.push(vec![z, o, o, z]);
        out.push(vec![z, -i, i, z]);
        out.push(vec![o, z, z, -o]);
        return out;
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut s = vec![z; d * d];
            s[j * d + k] = C64::new(1.0, 0.0);
            s[k * d + j] = C64::new(1.0, 0.0);
            out.push(s);
            let mut a = vec![z; d * d];
            a[j * d + k] = C64::new(0.0, -1.0);
            a[k * d + j] = C64::new(0.0, 1.0);
            out.push(a);
        }
    }
    for l in 1..d {
        let mut m = vec![z; d * d];
        for j in 0..l {
            m[j * d + j] = C64::new(1.0 / l as f64, 0.0);
        }
        m[l * d + l] = C64::new(-1.0, 0.0);
        out.push(m);
    }
    out
}

/// Tensor products of site bases on `support`; element 0 is the identity.
pub fn operator_basis(support: &[usize], dims: &[usize]) -> Vec<LocalOp> {
    let bases: Vec<Vec<Vec<C64>>> = dims.iter().map(|&d| site_basis(d)).collect();
    let counts: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut k| {
            let mut pick = vec![0; dims.len()];
            for s in (0..dims.len()).rev() {
                pick[s] = k % counts[s];
                k /= counts[s];
            }
            tensor(support, dims, &bases, &pick)
        })
        .collect()
}

fn tensor(support: &[usize], dims: &[usize], bases: &[Vec<Vec<C64>>], pick: &[usize]) -> LocalOp {
    let mut data = vec![C64::new(1.0, 0.0)];
    let mut side = 1;
    for (s, &d) in dims.iter().enumerate() {
        let b = &bases[s][pick[s]];
        let nside = side * d;
        let mut next = vec![C64::default(); nside * nside];
        for i in 0..side {
            for j in 0..side {
                let a = data[i * side + j];
                if a == C64::default() {
                    continue;
                }
                for p in 0..d {
                    for q in 0..d {
                        next[(i * d + p) * nside + (j * d + q)] = a * b[p * d + q];
                    }
                }
            }
        }
        data = next;
        side = nside;
    }
    LocalOp::new(support.to_vec(), dims.to_vec(), data).expect("consistent dims")
}

/// Non-identity basis products on each support, deduplicated: a product with identity
/// factors is kept once, written on its reduced support.
pub fn generator_terms(supports: &[(Vec<usize>, Vec<usize>)]) -> Vec<LocalOp> {
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut out = Vec::new();
    for (support, dims) in supports {
        let bases: Vec<Vec<Vec<C64>>> = dims.iter().map(|&d| site_basis(d)).collect();
        let counts: Vec<usize> = bases.iter().map(|b| b.len()).collect();
        let total: usize = counts.iter().product();
        for mut k in 1..total {
            let mut pick = vec![0; dims.len()];
            for s in (0..dims.len()).rev() {
                pick[s] = k % counts[s];
                k /= counts[s];
            }
            let mut key: Vec<(usize, usize)> =
                support.iter().zip(&pick).filter(|(_, &p)| p != 0).map(|(&s, &p)| (s, p)).collect();
            key.sort_unstable();
            if !seen.insert(key.clone()) {
                continue;
            }
            let sub: Vec<usize> = key.iter().map(|(s, _)| *s).collect();
            let sub_dims: Vec<usize> = sub.iter().map(|s| dims[support.iter().position(|t| t == s).unwrap()]).collect();
            let sub_bases: Vec<Vec<Vec<C64>>> = sub_dims.iter().map(|&d| site_basis(d)).collect();
            let sub_pick: Vec<usize> = key.iter().map(|(_, p)| *p).collect();
            out.push(tensor(&sub, &sub_dims, &sub_bases, &sub_pick));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::dense::herm_eigvals;

    fn tr_prod(a: &LocalOp, b: &LocalOp) -> C64 {
        let d = a.dim();
        let mut s = C64::default();
        for i in 0..d {
            for j in 0..d {
                s += a.get(i, j) * b.get(j, i);
            }
        }
        s
    }

    #[test]
    fn qubit_basis_is_ixyz() {
        let b = operator_basis(&[0], &[2]);
        assert_eq!(b.len(), 4);
        assert_eq!(b[3].get(1, 1).re, -1.0);
        assert_eq!(b[2].get(1, 0), C64::new(0.0, 1.0));
    }

    #[test]
    fn two_qubit_basis_is_trace_orthogonal() {
        let b = operator_basis(&[0, 1], &[2, 2]);
        assert_eq!(b.len(), 16);
        for i in 0..16 {
            for j in 0..16 {
                let t = tr_prod(&b[i], &b[j]);
                if i == j {
                    assert!((t.re - 4.0).abs() < 1e-14);
                } else {
                    assert!(t.norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn qutrit_elements_have_unit_norm() {
        for op in operator_basis(&[0], &[3]) {
            let ev = herm_eigvals(&op.to_mat()).unwrap();
            let n = ev.iter().fold(0.0f64, |a, e| a.max(e.abs()));
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_terms_deduplicate_single_site_factors() {
        let sup = vec![(vec![0, 1], vec![2, 2]), (vec![1, 2], vec![2, 2])];
        let t = generator_terms(&sup);
        // 9 two-site products per bond + 3 singles per site
        assert_eq!(t.len(), 9 * 2 + 3 * 3);
    }
}
