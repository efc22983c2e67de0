use proptest::prelude::*;

use safety_synth::ltl::{negate_nnf, Formula, LassoTrace, Letter};

fn literal(atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        proptest::sample::select(atoms).prop_map(Formula::atom),
        proptest::sample::select(atoms).prop_map(Formula::neg_atom),
    ]
}

/// Arbitrary formulas of operator depth at most 4.
pub fn any_formula(atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    literal(atoms).prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::finally),
            inner.clone().prop_map(Formula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::release(a, b)),
        ]
    })
}

/// Until-free formulas in negation normal form.
pub fn safety_formula(atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    literal(atoms).prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::release(a, b)),
        ]
    })
}

/// Release-free formulas in negation normal form.
pub fn co_safety_formula(atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    safety_formula(atoms).prop_map(|f| negate_nnf(&f).unwrap())
}

pub fn word(bits: usize, min: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec((0..1u64 << bits).prop_map(Letter), min..=max)
}

pub fn lasso(bits: usize) -> impl Strategy<Value = LassoTrace> {
    (word(bits, 0, 3), word(bits, 1, 3)).prop_map(|(s, c)| LassoTrace::new(s, c).unwrap())
}
