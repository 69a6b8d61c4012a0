//! SYK instances, the commutation graph and the free-fermion state, checked
//! against Jordan–Wigner diagonalization.

use gramops::fermion::{
    commutation_only_energy, exhaustive_sign_minimum, free_ground_energy, j0_from_model, monomial,
    monomial_commutation_graph, random_sign_q_matrix, syk_exact_extremes, syk_expectation_wick, syk_hamiltonian,
    syk_random, Normalization, SykInstance,
};
use gramops::pauli::pauli_commutes;
use gramops::spectral::{extreme_eigenvalue, EigOptions, Which};
use gramops::Capacity;
use num_complex::Complex64;

fn tuples(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a);
            rec(a + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, q, &mut Vec::new(), &mut out);
    out
}

#[test]
fn commutation_graph_matches_pauli_strings() {
    let cap = Capacity::default();
    for (n, q) in [(4, 2), (6, 3), (8, 4)] {
        let g = monomial_commutation_graph(n, q, &cap).unwrap();
        let ts = tuples(n, q);
        assert_eq!(g.num_vertices(), ts.len());
        for (a, ta) in ts.iter().enumerate() {
            for (b, tb) in ts.iter().enumerate().skip(a + 1) {
                let commute = pauli_commutes(&monomial(n, ta).unwrap(), &monomial(n, tb).unwrap()).unwrap();
                assert_eq!(g.has_edge(a, b), !commute, "n={n} q={q} {ta:?} {tb:?}");
            }
        }
    }
}

#[test]
fn random_sign_model_wick_energy_is_a_state_energy() {
    let cap = Capacity::default();
    let opts = EigOptions::default();
    for seed in 0..4 {
        let model = random_sign_q_matrix(6, seed).unwrap();
        let free = model.as_syk();
        let (ground, _) = syk_exact_extremes(&free, &opts, &cap).unwrap();
        assert!((ground - free_ground_energy(&model)).abs() < 1e-9);

        let h = syk_hamiltonian(&free).unwrap();
        let state = extreme_eigenvalue::<Complex64, _>(&h, Which::Smallest, &opts).unwrap();
        let inst = syk_random(6, 4, seed, Normalization::Sphere, &cap).unwrap();
        let exact = syk_hamiltonian(&inst).unwrap().expectation(&state.vector).re;
        assert!((syk_expectation_wick(&inst, &model).unwrap() - exact).abs() < 1e-9);

        let matched = commutation_only_energy(&inst, &model, &cap).unwrap();
        assert!(exhaustive_sign_minimum(&inst, &cap).unwrap() <= matched + 1e-9);
        let j0 = j0_from_model(&model, &cap).unwrap();
        assert!(syk_expectation_wick(&j0, &model).unwrap() < 0.0);
    }
}

#[test]
fn instance_json_survives_round_trip_and_keeps_spectrum() {
    let cap = Capacity::default();
    let inst = syk_random(8, 4, 3, Normalization::Expectation, &cap).unwrap();
    let back = SykInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(back, inst);
    let opts = EigOptions::default();
    assert_eq!(
        syk_exact_extremes(&inst, &opts, &cap).unwrap(),
        syk_exact_extremes(&back, &opts, &cap).unwrap()
    );
}
