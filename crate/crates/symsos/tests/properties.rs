mod common;

use proptest::prelude::*;

fn check(result: common::Check) -> Result<(), TestCaseError> {
    match result {
        Ok(true) => Ok(()),
        Ok(false) => Err(TestCaseError::reject("input skipped")),
        Err(msg) => Err(TestCaseError::fail(msg)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduced_programs_agree_with_the_plain_one(coeffs in prop::collection::vec(-3i64..=3, 35)) {
        for g in 0..common::GROUPS.len() {
            check(common::reduced_programs_agree(g, &coeffs))?;
        }
    }

    #[test]
    fn reynolds_average_is_an_idempotent_projection(
        g in 0usize..5,
        d in 1u32..=2,
        entries in prop::collection::vec(-5i64..=5, 1..40),
    ) {
        check(common::reynolds_is_idempotent(g, d, &entries))?;
    }

    #[test]
    fn adapted_basis_is_orthogonal_and_block_diagonalizes(
        g in 0usize..5,
        d in 1u32..=3,
        entries in prop::collection::vec(-5i64..=5, 1..40),
    ) {
        check(common::adapted_basis_block_diagonalizes(g, d, &entries))?;
    }

    #[test]
    fn pi_matrices_are_psd_at_every_point(
        g in 0usize..5,
        point in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        check(common::pi_is_psd_at(g, &point))?;
    }

    #[test]
    fn cyclic_four_syzygy_vanishes(x in -20i64..20, y in -20i64..20, den in 1i64..9) {
        check(common::cyclic_four_syzygy_vanishes(x, y, den))?;
    }

    #[test]
    fn invariants_rewrite_and_expand_back(
        g in 0usize..5,
        d in 0u32..=6,
        coeffs in prop::collection::vec(-4i64..=4, 1..30),
    ) {
        check(common::rewrite_round_trips(g, d, &coeffs))?;
    }

    #[test]
    fn solver_recovers_planted_optimum(
        n in 2usize..6,
        rank in 1usize..3,
        v in prop::collection::vec(-3i64..=3, 12),
        a in prop::collection::vec(-3i64..=3, 80),
        y in prop::collection::vec(-3i64..=3, 4),
        m in 2usize..5,
    ) {
        check(common::solver_recovers_planted_optimum(n, rank, &v, &a, &y, m))?;
    }
}

/// Small negative bounds on large coefficients, which needs absolute accuracy in λ.
#[test]
fn reduced_programs_agree_on_a_nearly_tight_quartic() {
    let mut coeffs = vec![0, -1, 0, 1, 0, -1, -1, 2, -1, -2, -3, 2, 3, 2];
    coeffs.resize(35, 0);
    for g in 0..common::GROUPS.len() {
        assert_eq!(common::reduced_programs_agree(g, &coeffs), Ok(true));
    }
}
