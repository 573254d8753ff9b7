use super::*;
use crate::models::{aklt_hamiltonian, grover_hamiltonian, maxcut_hamiltonian, qmc_hamiltonian, Graph, QmcForm};
use crate::qop::{RegisterShape, StateVector};
use crate::C64;

#[test]
fn aklt_ground_state_stays_put() {
    let h = aklt_hamiltonian(4, false).unwrap();
    let es = BaseModel::Local(&h).eigensystem().unwrap();
    assert!(es.energies()[0].abs() < 1e-10);
    let psi = es.eigenvector(0);
    for mode in [AltMinMode::ExactDistribution, AltMinMode::Trajectory] {
        let cfg = AltMinConfig::new(2, 1, Family::Local, mode, 3);
        let tr = altmin_measurement(BaseModel::Local(&h), &psi, &cfg).unwrap();
        assert_eq!(tr.rows.len(), 3);
        for r in &tr.rows {
            assert!(r.energy_base.abs() < 1e-9, "{r:?}");
        }
    }
}

#[test]
fn grover_never_reaches_marked() {
    let n = 6;
    let marked = 13;
    let land = grover_hamiltonian(n, marked).unwrap();
    let shape = RegisterShape::qubits(n).unwrap();
    let d = shape.total_dim();
    let amps: Vec<C64> = (0..d).map(|i| C64::new(if i == marked { 0.0 } else { 1.0 }, 0.0)).collect();
    let psi = StateVector::normalized(&shape, amps).unwrap();
    for mode in [AltMinMode::ExactDistribution, AltMinMode::SinglePath] {
        let mut cfg = AltMinConfig::new(5, 3, Family::SparseHamming, mode, 9);
        cfg.watch = Some(marked);
        let tr = altmin_measurement(BaseModel::Landscape(&land), &psi, &cfg).unwrap();
        for r in &tr.rows {
            assert!(r.watch.unwrap() < 1e-12);
            assert!(r.energy_base > 1.0 - 1e-9);
        }
    }
}

#[test]
fn trace_bookkeeping() {
    let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 2).unwrap();
    let h = maxcut_hamiltonian(&g).unwrap();
    let psi = StateVector::uniform_product(h.shape());
    let mut cfg = AltMinConfig::new(3, 2, Family::Local, AltMinMode::Trajectory, 1);
    cfg.diagnostics = true;
    let tr = altmin_measurement(BaseModel::Local(&h), &psi, &cfg).unwrap();
    assert_eq!(tr.physical_copy_count, 15);
    assert_eq!(tr.rows.len(), 4);
    assert!(tr.rows.iter().take(3).all(|r| r.measurement_count == 2 && r.energy_current.is_some()));
    assert!(tr.rows[3].energy_current.is_none());
    assert_eq!(tr.rows[0].energy_base, tr.rows[0].energy_current.unwrap());
    let d = appendix_b_diagnostics(&tr).unwrap();
    assert!(d.mean_k >= -1e-12);
    assert_eq!(tr.diagnostics.as_ref().unwrap()[0].a, 0.0);

    cfg.diagnostics = false;
    let tr = altmin_measurement(BaseModel::Local(&h), &psi, &cfg).unwrap();
    assert!(matches!(appendix_b_diagnostics(&tr), Err(crate::Error::MissingDiagnostics)));
}

#[test]
fn same_seed_same_hamiltonians() {
    let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)], 2).unwrap();
    let h = maxcut_hamiltonian(&g).unwrap();
    let psi = StateVector::uniform_product(h.shape());
    let a = altmin_measurement(BaseModel::Local(&h), &psi, &AltMinConfig::new(3, 2, Family::Local, AltMinMode::Trajectory, 5)).unwrap();
    let b = altmin_measurement(BaseModel::Local(&h), &psi, &AltMinConfig::new(3, 2, Family::Local, AltMinMode::Trajectory, 5)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn population_cap_enforced() {
    let g = Graph::new(2, vec![(0, 1)], 1).unwrap();
    let h = maxcut_hamiltonian(&g).unwrap();
    let psi = StateVector::uniform_product(h.shape());
    let mut cfg = AltMinConfig::new(10, 3, Family::Local, AltMinMode::Trajectory, 0);
    cfg.population_cap = 1000;
    assert!(matches!(altmin_measurement(BaseModel::Local(&h), &psi, &cfg), Err(crate::Error::DimensionCap { .. })));
}

#[test]
fn standard_schedule_flat_on_eigenstate() {
    let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 2).unwrap();
    let h = qmc_hamiltonian(&g, QmcForm::Projector).unwrap();
    let es = BaseModel::Local(&h).eigensystem().unwrap();
    let psi = es.eigenvector(7);
    let tr = altmin_variational(&h, &psi, &VariationalConfig::new(10, ScheduleKind::Standard, 1)).unwrap();
    let e0 = tr.rows[0].energy_base;
    assert!(tr.rows.iter().all(|r| (r.energy_base - e0).abs() < 1e-9));
    let tr = altmin_variational(&h, &psi, &VariationalConfig::new(30, ScheduleKind::Altered, 1)).unwrap();
    assert!(tr.final_energy() < e0 - 1e-3);
}

#[test]
fn hybrid_switches_after_stall() {
    let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)], 2).unwrap();
    let h = qmc_hamiltonian(&g, QmcForm::Projector).unwrap();
    let es = BaseModel::Local(&h).eigensystem().unwrap();
    let psi = es.eigenvector(9);
    let tr = altmin_variational(&h, &psi, &VariationalConfig::new(20, ScheduleKind::Hybrid, 2)).unwrap();
    // stuck at an eigenstate: the first switch comes after the stall window
    assert!(tr.rows[..6].iter().all(|r| r.hamiltonian_id == 0));
    assert!(tr.rows.last().unwrap().hamiltonian_id >= 1);
}
