use faer::Mat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use altham::altered::{altered_local_sum, sample_local_alteration, sample_sparse_alteration, SparsityPattern};
use altham::lowering::{energy_measurement_distribution, min_of_k, variational_update, GeneratorBasis, ThetaMode};
use altham::models::{aklt_hamiltonian, maxcut_hamiltonian, qmc_hamiltonian, random_regular_graph, well_landscape, QmcForm};
use altham::qop::dense::{frobenius, herm_eigvals, max_abs_diff};
use altham::qop::{spectral, ClassicalMixture, EigenSystem, Embedded, HermitianOperator, RegisterShape, StateVector};
use altham::stats::{quartile_of_distribution, spectral_profile};
use altham::C64;

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    let mut m = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = if i == j { 0.0 } else { rng.sample(StandardNormal) };
            m[(i, j)] = C64::new(a, b);
            m[(j, i)] = C64::new(a, -b);
        }
    }
    m
}

fn eigensystem(n_qubits: usize, seed: u64) -> EigenSystem {
    let shape = RegisterShape::qubits(n_qubits).unwrap();
    let m = random_hermitian(1 << n_qubits, &mut ChaCha8Rng::seed_from_u64(seed));
    spectral(&HermitianOperator::new(&shape, m).unwrap()).unwrap()
}

fn check_decomposition(m: &Mat<C64>, es: &EigenSystem) {
    let n = m.nrows();
    let v = es.basis_matrix();
    let gram = v.adjoint() * &v;
    let id = Mat::<C64>::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::default() });
    assert!(frobenius(&(&gram - &id)) < 1e-8 * (n as f64).sqrt());
    assert!(frobenius(&(es.reconstruct() - m)) <= 1e-8 * frobenius(m));
    assert!(es.energies().windows(2).all(|w| w[0] <= w[1]));
}

/// Smallest energy whose strictly-higher mass is ≤ 3/4, by scanning every candidate.
fn quartile_oracle(e: &[f64], p: &[f64]) -> f64 {
    let mut cands: Vec<f64> = e.to_vec();
    cands.dedup();
    for &c in &cands {
        let above: f64 = e.iter().zip(p).filter(|(x, _)| **x > c).map(|(_, w)| w).sum();
        if above <= 0.75 + 1e-12 {
            return c;
        }
    }
    *e.last().unwrap()
}

/// Law of the lowest index among all `k`-tuples.
fn min_of_k_oracle(p: &[f64], k: usize) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0; n];
    for code in 0..n.pow(k as u32) {
        let (mut c, mut w, mut lo) = (code, 1.0, usize::MAX);
        for _ in 0..k {
            let i = c % n;
            c /= n;
            w *= p[i];
            lo = lo.min(i);
        }
        out[lo] += w;
    }
    out
}

fn distribution() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..7).prop_filter_map("nonzero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-3).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn levels(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u8..4, len).prop_map(|v| {
        let mut e: Vec<f64> = v.into_iter().map(|x| x as f64 * 0.5).collect();
        e.sort_by(f64::total_cmp);
        e
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectral_decomposition_reconstructs(n in 1usize..40, seed in any::<u64>()) {
        let shape = RegisterShape::new(vec![n.max(2)]).unwrap();
        let m = random_hermitian(n.max(2), &mut ChaCha8Rng::seed_from_u64(seed));
        let es = spectral(&HermitianOperator::new(&shape, m.clone()).unwrap()).unwrap();
        check_decomposition(&m, &es);
    }

    #[test]
    fn quartile_matches_scan((e, p) in distribution().prop_flat_map(|p| (levels(p.len()), Just(p)))) {
        let q = quartile_of_distribution(&e, &p).unwrap();
        prop_assert_eq!(q, quartile_oracle(&e, &p));
        prop_assert!(e.contains(&q));
        let above: f64 = e.iter().zip(&p).filter(|(x, _)| **x > q).map(|(_, w)| w).sum();
        prop_assert!(above <= 0.75 + 1e-12);
        for &lower in e.iter().filter(|&&x| x < q) {
            let at_or_above: f64 = e.iter().zip(&p).filter(|(x, _)| **x > lower).map(|(_, w)| w).sum();
            prop_assert!(at_or_above > 0.75);
        }
    }

    #[test]
    fn min_of_k_matches_enumeration(p in distribution(), k in 1usize..4) {
        let got = min_of_k(&p, k);
        let want = min_of_k_oracle(&p, k);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn measurement_distribution_preserves_mass(seed in any::<u64>(), k in 1usize..6) {
        let old = eigensystem(3, seed);
        let new = eigensystem(3, seed ^ 0x9e37);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        let mix = ClassicalMixture::new(&old, w.iter().map(|x| x / s).collect()).unwrap();
        let out = energy_measurement_distribution(&mix, &old, &new, k).unwrap();
        prop_assert!((out.weights().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(out.weights().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn regular_graphs_and_maxcut_ground_energy(n in 4usize..11, d in 1usize..4, seed in any::<u64>()) {
        prop_assume!(d < n && (n * d) % 2 == 0);
        let g = random_regular_graph(n, d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(g.degrees().iter().all(|&x| x == d));
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in g.edges() {
            prop_assert!(u != v);
            prop_assert!(seen.insert((u.min(v), u.max(v))));
        }
        let best_cut = (0..1usize << n)
            .map(|s| g.edges().iter().filter(|&&(u, v)| (s >> u & 1) != (s >> v & 1)).count())
            .max()
            .unwrap();
        let h = maxcut_hamiltonian(&g).unwrap();
        let ground = h.diagonal().unwrap().into_iter().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(ground, (g.edges().len() - best_cut) as f64);
    }

    #[test]
    fn sparse_alteration_respects_pattern(n in 3usize..8, t in 1usize..5, seed in any::<u64>(), hamming in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << n;
        let e: Vec<f64> = (0..dim).map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random::<f64>() * 3.0 }).collect();
        let pat = if hamming { SparsityPattern::hamming(n).unwrap() } else { SparsityPattern::band(n, t).unwrap() };
        for b in 0..dim {
            let tb = pat.t_col(b);
            if hamming {
                prop_assert_eq!(tb, n);
            } else {
                prop_assert!(tb >= (t + 1).min(dim) && tb <= 2 * t + 1);
            }
        }
        let s = sample_sparse_alteration(&e, &pat, &mut rng).unwrap();
        for &(a, b, _) in s.entries() {
            prop_assert!(pat.contains(a, b));
            prop_assert!(e[b] > 0.0);
        }
    }

    #[test]
    fn line_search_update_never_raises_energy(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_regular_graph(4, 3, &mut rng).unwrap();
        let h = qmc_hamiltonian(&g, QmcForm::Projector).unwrap();
        let supports: Vec<Vec<usize>> = h.supports().into_iter().map(|s| s.0).collect();
        let basis = GeneratorBasis::on_supports(h.shape(), &supports).unwrap();
        let mut psi = StateVector::haar(h.shape(), &mut rng);
        for _ in 0..5 {
            let (next, st) = variational_update(&psi, &h, &basis, &ThetaMode::line_search()).unwrap();
            prop_assert!(st.energy_after <= st.energy_before + 1e-9);
            prop_assert!(st.theta.abs() < 1.0);
            psi = next;
        }
    }

    #[test]
    fn profile_against_itself_is_identity(seed in any::<u64>(), stride in 1usize..5) {
        let es = eigensystem(3, seed);
        for r in spectral_profile(&es, &es, stride).unwrap() {
            prop_assert!((r.mean - r.base_energy).abs() < 1e-9);
            prop_assert_eq!(r.quartile, r.base_energy);
        }
    }
}

#[test]
fn spectral_decomposition_at_512() {
    let shape = RegisterShape::qubits(9).unwrap();
    let m = random_hermitian(512, &mut ChaCha8Rng::seed_from_u64(5));
    let es = spectral(&HermitianOperator::new(&shape, m.clone()).unwrap()).unwrap();
    check_decomposition(&m, &es);
}

fn min_eig(m: &Mat<C64>) -> f64 {
    herm_eigvals(m).unwrap().into_iter().fold(f64::INFINITY, f64::min)
}

#[test]
fn local_family_is_sandwiched() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = random_regular_graph(6, 3, &mut rng).unwrap();
    for h in [maxcut_hamiltonian(&g).unwrap(), qmc_hamiltonian(&g, QmcForm::Projector).unwrap()] {
        let base = h.assemble().unwrap().into_matrix();
        for _ in 0..5 {
            let a = sample_local_alteration(&h, &mut rng).unwrap();
            for (pi, phi) in h.projectors().unwrap().iter().zip(a.phis()) {
                let (pm, fm) = (pi.op().to_mat(), phi.op().to_mat());
                assert!(max_abs_diff(&(&pm * &fm), &fm) < 1e-10);
                assert!(max_abs_diff(&(&fm * &pm), &fm) < 1e-10);
            }
            let alt = HermitianOperator::from_local_sum(&altered_local_sum(&h, &a).unwrap()).unwrap().into_matrix();
            assert!(min_eig(&(&alt - &base)) >= -1e-8);
            let twice = Mat::from_fn(base.nrows(), base.ncols(), |i, j| base[(i, j)] * 2.0);
            assert!(min_eig(&(&twice - &alt)) >= -1e-8);
        }
    }
}

#[test]
fn aklt_ground_states_are_annihilated_by_every_term() {
    let h = aklt_hamiltonian(6, false).unwrap();
    let es = spectral(&h.assemble().unwrap()).unwrap();
    let ground: Vec<usize> = (0..es.dim()).filter(|&a| es.energies()[a] < 1e-9).collect();
    assert_eq!(ground.len(), 4);
    assert!(es.energies()[0].abs() < 1e-10);
    for &a in &ground {
        let v = es.eigenvector_amplitudes(a);
        for p in h.projectors().unwrap() {
            let r = altham::qop::Apply::apply(&Embedded::new(h.shape(), p.op()).unwrap(), &v);
            assert!(r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= 1e-8);
        }
    }
}

#[test]
fn well_landscape_is_a_function_of_the_seed() {
    let a = well_landscape(10, 6, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let b = well_landscape(10, 6, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let c = well_landscape(10, 6, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(a.energies(), b.energies());
    assert_eq!(a.anchors(), b.anchors());
    assert_ne!(a.energies(), c.energies());
}
