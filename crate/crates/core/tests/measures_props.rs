mod common;

use proptest::prelude::*;
use qmask_core::hr::kappa_tilde;
use qmask_core::masking::{canonical_real_masker, magic_basis_masker};
use qmask_core::measures::{
    concurrence_pure, masking_entanglement_table, purity_sum_sandwich, robustness_of_imaginarity,
};
use qmask_core::state::{random_ket, random_state_indexed, schmidt_coefficients, BipartiteShape, StateKind};

fn any_kind() -> impl Strategy<Value = StateKind> {
    prop_oneof![
        Just(StateKind::PureComplex),
        Just(StateKind::PureReal),
        Just(StateKind::MixedComplex),
        Just(StateKind::MixedReal),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn concurrence_from_schmidt(da in 1usize..6, db in 1usize..6, seed in any::<u64>()) {
        let shape = BipartiteShape::new(da, db).unwrap();
        let psi = random_ket(da * db, false, seed, 0);
        let c = concurrence_pure(&psi, shape).unwrap();
        let s4: f64 = schmidt_coefficients(&psi, shape).unwrap().iter().map(|s| s.powi(4)).sum();
        prop_assert!((c * c - 2.0 * (1.0 - s4)).abs() <= 1e-10);
    }

    #[test]
    fn imaginarity_is_orthogonally_invariant(d in 2usize..7, k in any_kind(), seed in any::<u64>()) {
        let rho = random_state_indexed(d, k, seed, 0);
        let o = common::random_orthogonal(d, seed ^ 0x5eed);
        let rotated = rho.conjugate_by(&o).unwrap();
        prop_assert!((robustness_of_imaginarity(&rho) - robustness_of_imaginarity(&rotated)).abs() <= 1e-10);
    }

    #[test]
    fn sandwich_holds(d in 3usize..6, k in prop_oneof![Just(StateKind::PureComplex), Just(StateKind::MixedComplex)], seed in any::<u64>()) {
        let m = if d == 4 { magic_basis_masker() } else { canonical_real_masker(d, kappa_tilde(d).unwrap(), false).unwrap() };
        let rho = random_state_indexed(d, k, seed, 0);
        let (sum, lo, hi) = purity_sum_sandwich(&m, &rho).unwrap();
        prop_assert!(lo <= sum + 1e-12 && sum <= hi + 1e-12, "{lo} {sum} {hi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn imaginarity_in_unit_interval(d in 1usize..7, k in any_kind(), seed in any::<u64>()) {
        let x = robustness_of_imaginarity(&random_state_indexed(d, k, seed, 0));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x), "{x}");
    }
}

#[test]
fn entanglement_table_is_monotone() {
    let rows = masking_entanglement_table(40).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].e_c >= w[0].e_c && w[1].e_c_real >= w[0].e_c_real);
    }
    for r in &rows {
        let extra = r.e_c_real - r.e_c;
        // E_C^R - E_C: 1 when d mod 8 is 2..=6, except d = 2 where kappa~ = 2
        let expected = if r.d == 2 { 0 } else if matches!(r.d % 8, 2..=6) { 1 } else { 0 };
        assert_eq!(extra, expected, "d = {}", r.d);
    }
}
