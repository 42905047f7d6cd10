use braggswap::bragg::BraggParams;
use braggswap::protocol::{click_distribution, joint_state_for, JointState};
use braggswap::quantum::{
    concurrence, evolve, evolve_rk4, partial_trace, tensor_product, DensityMatrix, Operator, StateVector,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(dim: usize, entries: &[f64]) -> Operator {
    let m = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(entries[i * dim + j], entries[j * dim + i]));
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Operator::new(h).unwrap()
}

fn state(dim: usize, entries: &[f64]) -> StateVector {
    let labels = (0..dim).map(|i| i.to_string()).collect();
    let amps = (0..dim).map(|i| Complex64::new(entries[2 * i], entries[2 * i + 1] + 1e-3)).collect();
    StateVector::new(labels, amps).unwrap().normalized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_preserves_norm(h in prop::collection::vec(-2.0..2.0f64, 16),
                                s in prop::collection::vec(-1.0..1.0f64, 8),
                                t in -20.0..20.0f64) {
        let out = evolve(&hermitian(4, &h), &state(4, &s), t).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn expm_and_rk4_agree(h in prop::collection::vec(-2.0..2.0f64, 9),
                          s in prop::collection::vec(-1.0..1.0f64, 6),
                          t in 0.0..3.0f64) {
        let h = hermitian(3, &h);
        let psi = state(3, &s);
        let step = 0.01 / h.max_abs().max(1e-12);
        let a = evolve(&h, &psi, t).unwrap();
        let b = evolve_rk4(&h, &psi, t, step).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-6);
    }

    #[test]
    fn evolution_composes(h in prop::collection::vec(-2.0..2.0f64, 16),
                          s in prop::collection::vec(-1.0..1.0f64, 8),
                          t1 in -5.0..5.0f64, t2 in -5.0..5.0f64) {
        let h = hermitian(4, &h);
        let psi = state(4, &s);
        let two = evolve(&h, &evolve(&h, &psi, t1).unwrap(), t2).unwrap();
        let one = evolve(&h, &psi, t1 + t2).unwrap();
        prop_assert!(two.max_abs_diff(&one).unwrap() <= 1e-8);
    }

    #[test]
    fn trace_recovers_factors(a in prop::collection::vec(-1.0..1.0f64, 4),
                              b in prop::collection::vec(-1.0..1.0f64, 6)) {
        let ra = DensityMatrix::from_pure(&state(2, &a)).unwrap();
        let rb = DensityMatrix::from_pure(&state(3, &b)).unwrap();
        let joint = ra.kron(&rb).unwrap();
        prop_assert!(partial_trace(&joint, &[2, 3], &[0]).unwrap().max_abs_diff(&ra) <= 1e-12);
        prop_assert!(partial_trace(&joint, &[2, 3], &[1]).unwrap().max_abs_diff(&rb) <= 1e-12);
    }

    #[test]
    fn product_states_unentangled(a in prop::collection::vec(-1.0..1.0f64, 4),
                                  b in prop::collection::vec(-1.0..1.0f64, 4)) {
        let psi = tensor_product(&state(2, &a), &state(2, &b)).unwrap();
        let c = concurrence(&DensityMatrix::from_pure(&psi).unwrap()).unwrap();
        prop_assert!(c <= 1e-6);
    }

    #[test]
    fn clicks_complete_at_any_time(scale in 0.0..2.5f64, l0 in prop::sample::select(vec![2u32, 4])) {
        let s: JointState = joint_state_for(&BraggParams::with_order(l0), scale).unwrap();
        let dist = click_distribution(&s).unwrap();
        prop_assert!((dist.total_probability() - 1.0).abs() <= 1e-12);
        prop_assert!(dist.success_probability() <= 0.5 + 1e-12);
    }
}

#[test]
fn heralds_are_pure_at_nominal_time() {
    for l0 in [2, 4] {
        let dist = click_distribution(&joint_state_for(&BraggParams::with_order(l0), 1.0).unwrap()).unwrap();
        for r in dist.results.iter().filter(|r| r.probability > 1e-12) {
            assert!((r.purity().unwrap() - 1.0).abs() <= 1e-10, "{}", r.pattern);
        }
    }
}

#[test]
fn two_atom_sector_only() {
    let s = joint_state_for(&BraggParams::default(), 1.3).unwrap();
    for occ in s.fock().states() {
        assert_eq!(occ.iter().map(|&k| k as u32).sum::<u32>(), 2);
    }
    assert!((s.state.norm_sqr() - 1.0).abs() < 1e-12);
}
