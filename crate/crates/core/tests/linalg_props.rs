mod common;

use proptest::prelude::*;
use qmask_core::eig::{eigenvalues, hermitian_eig, hs_norm, schatten_1_norm};
use qmask_core::matrix::{tensor_product, ComplexMatrix, C64};
use qmask_core::state::{
    majorizes, partial_trace, random_ket, random_state_indexed, schmidt_coefficients, BipartiteShape, DensityMatrix,
    StateKind, Subsystem,
};
use qmask_core::tol;

fn kind() -> impl Strategy<Value = StateKind> {
    prop_oneof![
        Just(StateKind::PureComplex),
        Just(StateKind::PureReal),
        Just(StateKind::MixedComplex),
        Just(StateKind::MixedReal),
    ]
}

fn probability(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

/// `T p` for a convex mixture of transpositions: always majorized by `p`.
fn blur(p: &[f64], pairs: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, j, t) in pairs {
        let (i, j) = (i % q.len(), j % q.len());
        let (a, b) = (q[i], q[j]);
        q[i] = (1.0 - t) * a + t * b;
        q[j] = t * a + (1.0 - t) * b;
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partial_trace_keeps_trace(da in 1usize..5, db in 1usize..5, k in kind(), seed in any::<u64>()) {
        let shape = BipartiteShape::new(da, db).unwrap();
        let rho = random_state_indexed(da * db, k, seed, 0);
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&rho, shape, keep).unwrap();
            prop_assert!((r.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product(da in 1usize..5, db in 1usize..5, seed in any::<u64>()) {
        let a = random_state_indexed(da, StateKind::MixedComplex, seed, 0);
        let b = random_state_indexed(db, StateKind::MixedComplex, seed, 1);
        let ab = DensityMatrix::new(tensor_product(a.matrix(), b.matrix()).unwrap()).unwrap();
        let shape = BipartiteShape::new(da, db).unwrap();
        let ra = partial_trace(&ab, shape, Subsystem::A).unwrap();
        let rb = partial_trace(&ab, shape, Subsystem::B).unwrap();
        prop_assert!((ra.matrix() - a.matrix()).max_abs() < 1e-12);
        prop_assert!((rb.matrix() - b.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn schmidt_squares_are_marginal_spectrum(da in 1usize..6, db in 1usize..6, real in any::<bool>(), seed in any::<u64>()) {
        let shape = BipartiteShape::new(da, db).unwrap();
        let psi = random_ket(da * db, real, seed, 0);
        let mut s2: Vec<f64> = schmidt_coefficients(&psi, shape).unwrap().iter().map(|s| s * s).collect();
        s2.sort_by(f64::total_cmp);
        let rho_a = partial_trace(&psi.density(), shape, Subsystem::A).unwrap();
        let spec = eigenvalues(rho_a.matrix()).unwrap();
        // the marginal has da eigenvalues, the Schmidt list min(da, db)
        let pad = spec.len() - s2.len();
        for (i, v) in spec.iter().enumerate() {
            let expected = if i < pad { 0.0 } else { s2[i - pad] };
            prop_assert!((v - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn schatten_dominates_hs(rows in 1usize..7, cols in 1usize..7, entries in prop::collection::vec(-5.0f64..5.0, 72)) {
        let data: Vec<C64> = (0..rows * cols).map(|k| C64::new(entries[2 * k], entries[2 * k + 1])).collect();
        let m = ComplexMatrix::from_vec(rows, cols, data).unwrap();
        let s1 = schatten_1_norm(&m).unwrap();
        let s2 = hs_norm(&m);
        prop_assert!(s2 >= 0.0);
        prop_assert!(s1 >= s2 * (1.0 - 1e-12));
    }

    #[test]
    fn majorization_is_reflexive_and_transitive(
        p in (2usize..7).prop_flat_map(probability),
        first in prop::collection::vec((0usize..7, 0usize..7, 0.0f64..1.0), 0..6),
        second in prop::collection::vec((0usize..7, 0usize..7, 0.0f64..1.0), 0..6),
        other in (2usize..7).prop_flat_map(probability),
    ) {
        let q = blur(&p, &first);
        let r = blur(&q, &second);
        prop_assert!(majorizes(&p, &p, tol::MAJOR).unwrap());
        prop_assert!(majorizes(&p, &q, tol::MAJOR).unwrap());
        prop_assert!(majorizes(&q, &r, tol::MAJOR).unwrap());
        prop_assert!(majorizes(&p, &r, tol::MAJOR).unwrap());
        // generic triples: the implication alone
        if majorizes(&p, &other, tol::MAJOR).unwrap() && majorizes(&other, &r, tol::MAJOR).unwrap() {
            prop_assert!(majorizes(&p, &r, 2.0 * tol::MAJOR).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn eig_reconstructs(n in 1usize..=64, seed in any::<u64>()) {
        let h = common::random_hermitian(n, seed);
        let e = hermitian_eig(&h).unwrap();
        let err = (&e.reconstruct() - &h).hs_norm();
        prop_assert!(err <= tol::EIG * h.hs_norm(), "n = {n}, error {err:e}");
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
