mod common;

use causet_core::action::{bd_action_4d, bd_action_d, bd_truncated, bd_truncated_d, SmearedActionParams};
use causet_core::causet::{enumerate_causal_sets, qubit_count, random_causal_set, CausalMatrix};
use causet_core::exactbd::PseudoBooleanPoly;
use causet_core::pauli::{
    build_h_bd, build_h_tc, diagonal_value, GammaConfig, HamiltonianParts, Normalization, PenaltyScale,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix() -> impl Strategy<Value = CausalMatrix> {
    (1usize..=7).prop_flat_map(|n| {
        let q = qubit_count(n);
        let mask = if q == 0 { 0 } else { (1u64 << q) - 1 };
        any::<u64>().prop_map(move |b| CausalMatrix::from_bits(n, b & mask).unwrap())
    })
}

proptest! {
    #[test]
    fn closure_is_idempotent_monotone_and_valid(m in matrix()) {
        let c = m.transitive_closure();
        prop_assert_eq!(c.count_violations(), 0);
        prop_assert_eq!(c.bits() & m.bits(), m.bits());
        prop_assert_eq!(c.transitive_closure(), c);
    }

    #[test]
    fn violation_count_matches_triple_scan(m in matrix()) {
        prop_assert_eq!(m.count_violations(), common::violations(m.n(), m.bits()));
    }

    #[test]
    fn abundances_sum_to_relations(m in matrix()) {
        let s = m.transitive_closure();
        prop_assert_eq!(s.abundances().total(), u64::from(s.relation_count()));
    }

    #[test]
    fn closure_matches_reachability(m in matrix()) {
        let n = m.n();
        let c = m.transitive_closure();
        // Floyd–Warshall over the raw relation graph
        let mut r = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                r[i][j] = m.related(i, j);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                prop_assert_eq!(c.related(i, j), r[i][j]);
            }
        }
    }

    #[test]
    fn random_sets_are_valid_and_seeded(n in 1usize..=9, seed in any::<u64>()) {
        let a = random_causal_set(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = random_causal_set(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a.count_violations(), 0);
    }

    #[test]
    fn general_d_reproduces_four_dimensional_truncation(m in matrix(), eps in 0.01f64..0.5) {
        let s = m.transitive_closure();
        let p = SmearedActionParams::four_dimensional(eps).unwrap();
        prop_assert!((bd_action_d(&s, &p) - bd_truncated(&s, eps)).abs() < 1e-12);
        prop_assert!((bd_truncated_d(&m, &p) - bd_truncated(&m, eps)).abs() < 1e-12);
    }

    #[test]
    fn combine_is_linear_on_diagonals(r_tc in 0.0f64..=1.0, r_bd in 0.0f64..=1.0, bits in any::<u64>()) {
        let n = 4;
        let m = CausalMatrix::from_bits(n, bits & 0x3f).unwrap();
        let parts = HamiltonianParts::build(n, 0.1, PenaltyScale::default()).unwrap();
        let g = GammaConfig::new(r_tc, r_bd).unwrap();
        let norm = Normalization::default_for(n, 0.1);
        let h = parts.combine(&g, &norm).unwrap();
        let diag_only = causet_core::pauli::PauliHamiltonian::new(
            h.qubits(),
            h.diagonal_terms().cloned().collect(),
        ).unwrap();
        let expect = g.gamma_tc() * norm.alpha_tc * diagonal_value(&parts.h_tc, &m).unwrap()
            + g.gamma_bd() * norm.alpha_bd * diagonal_value(&parts.h_bd, &m).unwrap();
        prop_assert!((diagonal_value(&diag_only, &m).unwrap() - expect).abs() < 1e-10);
        prop_assert!((g.gamma_tc() + g.gamma_bd() + g.gamma_mix() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poly_evaluation_is_linear_in_coefficients(
        terms in prop::collection::vec((prop::collection::btree_set(0usize..8, 0..=3), -5.0f64..5.0), 0..20),
        scale in -3.0f64..3.0,
        assignment in prop::collection::vec(any::<bool>(), 8),
    ) {
        let mut p = PseudoBooleanPoly::zero();
        let mut q = PseudoBooleanPoly::zero();
        for (vars, c) in &terms {
            let vars: Vec<usize> = vars.iter().copied().collect();
            p.add_term(*c, &vars);
            q.add_term(scale * c, &vars);
        }
        let mut sum = p.clone();
        sum.add(&q);
        let (a, b, s) = (
            p.evaluate(&assignment).unwrap(),
            q.evaluate(&assignment).unwrap(),
            sum.evaluate(&assignment).unwrap(),
        );
        prop_assert!((b - scale * a).abs() < 1e-9);
        prop_assert!((s - a - b).abs() < 1e-9);
    }
}

#[test]
fn diagonal_oracles_up_to_five_elements() {
    let p = PenaltyScale::new(1.7).unwrap();
    for n in 3..=5 {
        let h = build_h_tc(n, p).unwrap();
        for bits in 0..1u64 << qubit_count(n) {
            let m = CausalMatrix::from_bits(n, bits).unwrap();
            let got = diagonal_value(&h, &m).unwrap();
            assert!((got - 1.7 * f64::from(common::violations(n, bits))).abs() < 1e-12);
        }
    }
}

#[test]
fn diagonal_vector_matches_pointwise_evaluation() {
    let h = build_h_bd(5, 0.1).unwrap();
    let v = h.diagonal_vector();
    for bits in (0..1u64 << 10).step_by(13) {
        let m = CausalMatrix::from_bits(5, bits).unwrap();
        assert!((v[bits as usize] - diagonal_value(&h, &m).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn action_depends_only_on_abundances() {
    let sets = enumerate_causal_sets(5).unwrap();
    for a in &sets {
        for b in sets.iter().filter(|b| b.abundances() == a.abundances()) {
            assert_eq!(bd_action_4d(a, 0.1), bd_action_4d(b, 0.1));
        }
    }
}

#[test]
fn dense_hamiltonians_are_real_symmetric() {
    for n in 3..=4 {
        let parts = HamiltonianParts::build(n, 0.1, PenaltyScale::default()).unwrap();
        let h = parts
            .combine(&GammaConfig::new(0.8, 0.03).unwrap(), &Normalization::default_for(n, 0.1))
            .unwrap();
        let d = h.to_dense().unwrap();
        assert_eq!(d, d.transpose());
    }
}
