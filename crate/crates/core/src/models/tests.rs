use std::collections::BTreeMap;

use rand::Rng;

use super::*;
use crate::disorder::SeedSpec;
use crate::topology::{complete_graph, lattice_graph, Graph};

fn all_ising(n: usize) -> impl Iterator<Item = SpinConfiguration> {
    (0..1usize << n).map(move |m| SpinConfiguration::from_states((0..n).map(|i| ((m >> i) & 1) as u8).collect()))
}

#[test]
fn ea_bond_signs() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let sys = make_ea(&g, 1.0, 0.0, ChaosTerm::Bonds).unwrap();
    assert_eq!(sys.bond_eval(0, &SpinConfiguration::ising(&[1, 1])), 1.0);
    assert_eq!(sys.bond_eval(0, &SpinConfiguration::ising(&[1, -1])), -1.0);
    assert!(make_ea(&g, 0.0, 0.0, ChaosTerm::Bonds).is_err());
    assert!(make_ea(&g, -1.0, 0.0, ChaosTerm::Bonds).is_err());
}

#[test]
fn ea_lattice_factors_are_unit() {
    let sys = make_ea(&lattice_graph(&[3, 3], false).unwrap(), 1.0, 0.0, ChaosTerm::Bonds).unwrap();
    assert_eq!(sys.index_count(), 12);
    for c in all_ising(9) {
        for e in 0..12 {
            assert_eq!(sys.bond_eval(e, &c).abs(), 1.0);
        }
    }
}

#[test]
fn ea_hamiltonian_matches_naive_double_sum() {
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
    let sys = make_ea(&g, 0.8, 0.3, ChaosTerm::Bonds).unwrap();
    let r = sys.sample_realization(SeedSpec::new(3, 1));
    for c in all_ising(4) {
        let s: Vec<f64> = (0..4).map(|i| c.spin(i)).collect();
        let mut y = 0.0;
        for (k, &(i, j)) in g.edges().iter().enumerate() {
            y += r.chaos[k] * s[i] * s[j];
        }
        assert!((sys.hamiltonian(&c, &r.chaos) - y).abs() < 1e-12);
        let field: f64 = (0..4).map(|i| r.residual[0][i] * s[i]).sum();
        assert!((sys.log_weight(&c, &r) - (0.8 * y + 0.3 * field)).abs() < 1e-12);
    }
}

#[test]
fn ea_field_chaos_swaps_roles() {
    let g = lattice_graph(&[2, 2], false).unwrap();
    let sys = make_ea(&g, 0.5, 1.5, ChaosTerm::Field).unwrap();
    assert_eq!(sys.index_count(), 4);
    assert_eq!(sys.gamma(), 1.5);
    assert!(sys.has_site_chaos());
    assert_eq!(sys.residual()[0].strength, 0.5);
    assert!(make_ea(&g, 0.5, 0.0, ChaosTerm::Field).is_err());
}

#[test]
fn mixed_pspin_shapes() {
    let sys = make_mixed_pspin(2, &BTreeMap::from([(1, 1.0)]), 1).unwrap();
    assert_eq!(sys.index_count(), 2);
    assert_eq!(sys.gamma(), 1.0);
    let c = SpinConfiguration::ising(&[1, -1]);
    assert_eq!(sys.hamiltonian(&c, &[0.4, 0.9]), 0.4 - 0.9);

    let sys = make_mixed_pspin(3, &BTreeMap::from([(2, 1.0)]), 2).unwrap();
    assert_eq!(sys.index_count(), 9);
    assert!((sys.gamma() - 1.0 / 3f64.sqrt()).abs() < 1e-15);

    assert!(make_mixed_pspin(3, &BTreeMap::from([(2, 1.0)]), 3).is_err());
    assert!(make_mixed_pspin(3, &BTreeMap::from([(2, 0.0)]), 2).is_err());
}

#[test]
fn mixed_pspin_residual_terms_are_other_p() {
    let sys = make_mixed_pspin(4, &BTreeMap::from([(1, 0.5), (2, 1.0), (3, 0.8)]), 2).unwrap();
    assert_eq!(sys.residual().len(), 2);
    assert_eq!(sys.residual()[0].factors.cardinality(), 4);
    assert_eq!(sys.residual()[1].factors.cardinality(), 64);
    assert!((sys.residual()[1].strength - 0.8 / 4.0).abs() < 1e-15);
}

#[test]
fn vector_sk_reduces_to_ising() {
    let sys = make_vector_sk(3, vec![vec![-1.0], vec![1.0]], None, 1.0).unwrap();
    let SpinSpace::Vector(v) = sys.spins() else { panic!() };
    assert_eq!(v.scale(), 1.0);
    for m in 0..8u8 {
        let c = SpinConfiguration::from_states((0..3).map(|i| (m >> i) & 1).collect());
        for e in 0..9 {
            assert_eq!(sys.bond_eval(e, &c).abs(), 1.0);
        }
    }
    assert_eq!(sys.index_count(), 9);
}

#[test]
fn vector_sk_orthogonal_points() {
    let sys = make_vector_sk(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], None, 1.0).unwrap();
    // factor e = (0, 1)
    let c = SpinConfiguration::from_states(vec![0, 1]);
    assert_eq!(sys.bond_eval(1, &c), 0.0);
    assert_eq!(sys.bond_eval(0, &c), 1.0);
}

#[test]
fn vector_sk_rescales_and_validates() {
    let pts = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![1.0, 1.0]];
    let sys = make_vector_sk(3, pts, None, 1.0).unwrap();
    let SpinSpace::Vector(v) = sys.spins() else { panic!() };
    assert!((v.scale() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    assert!((v.dot(3, 3) - 1.0).abs() < 1e-15);
    assert!(make_vector_sk(3, vec![], None, 1.0).is_err());
    assert!(make_vector_sk(3, vec![vec![1.0], vec![-1.0]], Some(vec![0.3, 0.3]), 1.0).is_err());
}

#[test]
fn diluted_empty_and_single_clause() {
    let sys = make_diluted(10, 1e-9, 2, 1.0, SeedSpec::new(1, 0)).unwrap();
    assert_eq!(sys.index_count(), 0);
    assert_eq!(sys.hamiltonian(&SpinConfiguration::ising(&[1; 10]), &[]), 0.0);

    let fam = IndexFamily::DilutedClauses { n: 5, p: 1, clauses: vec![vec![3]] };
    let sys = FactorSystem::new(Family::Diluted, SpinSpace::Ising, fam, 1.0, vec![]).unwrap();
    for c in all_ising(5) {
        assert_eq!(sys.bond_eval(0, &c), c.spin(3));
    }
}

#[test]
fn diluted_hamiltonian_matches_clause_sum() {
    let sys = make_diluted(6, 1.0, 3, 1.0, SeedSpec::new(8, 2)).unwrap();
    let IndexFamily::DilutedClauses { clauses, .. } = sys.chaos() else { panic!() };
    let r = sys.sample_realization(SeedSpec::new(8, 2));
    for c in all_ising(6) {
        let naive: f64 = clauses
            .iter()
            .zip(&r.chaos)
            .map(|(cl, g)| g * cl.iter().map(|&i| c.spin(i)).product::<f64>())
            .sum();
        assert!((sys.hamiltonian(&c, &r.chaos) - naive).abs() < 1e-12);
    }
}

#[test]
fn randomized_factor_audit() {
    let mut rng = SeedSpec::new(404, 0).rng();
    let systems = vec![
        make_ea(&lattice_graph(&[3, 3], false).unwrap(), 1.0, 0.5, ChaosTerm::Bonds).unwrap(),
        make_rfim(&lattice_graph(&[2, 3], false).unwrap(), 0.6, 1.0, 1.0).unwrap(),
        make_mixed_pspin(4, &BTreeMap::from([(3, 1.0)]), 3).unwrap(),
        make_vector_sk(3, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![1.0, 1.0]], None, 1.0).unwrap(),
        make_diluted(6, 1.0, 2, 1.0, SeedSpec::new(2, 2)).unwrap(),
        make_ea(&complete_graph(5).unwrap(), 1.0, 0.0, ChaosTerm::Bonds).unwrap(),
    ];
    for sys in systems {
        let q = sys.spins().state_count();
        for _ in 0..1000 {
            if sys.index_count() == 0 {
                break;
            }
            let e = rng.random_range(0..sys.index_count());
            let c = SpinConfiguration::from_states((0..sys.site_count()).map(|_| rng.random_range(0..q) as u8).collect());
            assert!(sys.bond_eval(e, &c).abs() <= 1.0);
        }
    }
}

#[test]
fn couple_rejects_mismatch() {
    let a = make_ea(&lattice_graph(&[2, 2], false).unwrap(), 1.0, 0.0, ChaosTerm::Bonds).unwrap();
    let b = make_ea(&lattice_graph(&[2, 3], false).unwrap(), 1.0, 0.0, ChaosTerm::Bonds).unwrap();
    assert!(matches!(couple(a.clone(), b, 0.5, SeedSpec::new(0, 0)), Err(Error::MismatchedFamilies(_))));
    let c = make_ea(&lattice_graph(&[2, 2], false).unwrap(), 1.0, 0.5, ChaosTerm::Bonds).unwrap();
    assert!(couple(a.clone(), c, 0.5, SeedSpec::new(0, 0)).is_err());
    assert!(couple(a.clone(), a, 1.5, SeedSpec::new(0, 0)).is_err());
}

#[test]
fn coupled_at_t_one_gives_identical_weights() {
    let g = lattice_graph(&[2, 2], false).unwrap();
    let a = make_ea(&g, 0.9, 0.4, ChaosTerm::Bonds).unwrap();
    let pair = couple(a.clone(), a, 1.0, SeedSpec::new(10, 0)).unwrap();
    let (r1, r2) = pair.realizations();
    for c in all_ising(4) {
        let w1 = pair.system1().log_weight(&c, &r1);
        let w2 = pair.system2().log_weight(&c, &r2);
        assert!((w1 - w2).abs() < 1e-12);
    }
}

#[test]
fn coupled_hamiltonian_covariance() {
    // E[Y_A(σ) Y_B(ρ)] = t Σ_e f_e(σ) f_e(ρ), Monte Carlo over 1e5 disorder draws
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let a = make_ea(&g, 1.0, 0.0, ChaosTerm::Bonds).unwrap();
    let sigma = SpinConfiguration::ising(&[1, -1, -1, 1]);
    let rho = SpinConfiguration::ising(&[1, 1, -1, 1]);
    for t in [0.0, 0.6] {
        let base = couple(a.clone(), a.clone(), t, SeedSpec::new(55, 0)).unwrap();
        let draws = 100_000;
        let samples: Vec<f64> = (0..draws)
            .map(|r| {
                let p = base.redraw(r).unwrap();
                let (r1, r2) = p.realizations();
                a.hamiltonian(&sigma, &r1.chaos) * a.hamiltonian(&rho, &r2.chaos)
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        let overlap: f64 = (0..4).map(|e| a.bond_eval(e, &sigma) * a.bond_eval(e, &rho)).sum();
        let want = t * overlap;
        assert!((mean - want).abs() < 3.0 * se, "t={t}: {mean} vs {want} (se {se})");
    }
}

#[test]
fn redraw_is_deterministic_and_distinct() {
    let a = make_ea(&lattice_graph(&[2, 2], false).unwrap(), 1.0, 0.2, ChaosTerm::Bonds).unwrap();
    let pair = couple(a.clone(), a, 0.5, SeedSpec::new(1, 0)).unwrap();
    let x = pair.redraw(4).unwrap();
    let y = pair.redraw(4).unwrap();
    let z = pair.redraw(5).unwrap();
    assert_eq!(x.realizations(), y.realizations());
    assert_ne!(x.realizations(), z.realizations());
}
