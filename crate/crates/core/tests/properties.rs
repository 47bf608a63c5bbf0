//! Kernel invariants over randomly generated well-typed terms.

mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use telic::kernel::Signature;

fn sig() -> &'static Signature {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(common::signature)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_terms_are_well_typed(seed in any::<u64>()) {
        common::prop_well_typed(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        common::prop_normalize_idempotent(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn shift_then_subst_cancels(seed in any::<u64>()) {
        common::prop_shift_subst_cancel(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn alpha_eq_is_an_equivalence(seed in any::<u64>()) {
        common::prop_alpha_eq_equivalence(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn convertible_is_an_equivalence(seed in any::<u64>()) {
        common::prop_convertible_equivalence(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn reduction_preserves_types(seed in any::<u64>()) {
        common::prop_subject_reduction(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn eta_for_functions_and_pairs(seed in any::<u64>()) {
        common::prop_eta(sig(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        common::prop_print_parse_roundtrip(sig(), seed).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn oplus_index_is_the_sum() {
    common::oplus_exhaustive(sig(), 20).unwrap();
}
