use super::{is_nnf, Formula, LtlError};

/// Bounds every eventuality by `length` steps.
///
/// Each `a U b` is unfolded `length - 1` times into `b | (a & X (a U b))`
/// and the innermost remaining `a U b` is replaced by `b`. `F b` unfolds the
/// same way with `a = true`, written `b | X (F b)`. Release subformulas are
/// left as they are. Inner Untils are bounded before the outer ones.
pub fn expand_until(f: &Formula, length: usize) -> Result<Formula, LtlError> {
    if length < 1 {
        return Err(LtlError::ZeroExpansion);
    }
    if !is_nnf(f) {
        return Err(LtlError::NotNnf(f.to_string()));
    }
    Ok(expand(f, length))
}

fn expand(f: &Formula, length: usize) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) | NegAtom(_) => f.clone(),
        Not(g) => Formula::not(expand(g, length)),
        Next(g) => Formula::next(expand(g, length)),
        Globally(g) => Formula::globally(expand(g, length)),
        And(l, r) => Formula::and(expand(l, length), expand(r, length)),
        Or(l, r) => Formula::or(expand(l, length), expand(r, length)),
        Implies(l, r) => Formula::implies(expand(l, length), expand(r, length)),
        Release(l, r) => Formula::release(expand(l, length), expand(r, length)),
        Until(l, r) => unroll(Some(&expand(l, length)), &expand(r, length), length),
        Finally(g) => unroll(None, &expand(g, length), length),
    }
}

fn unroll(hold: Option<&Formula>, goal: &Formula, length: usize) -> Formula {
    if length == 1 {
        return goal.clone();
    }
    let later = Formula::next(unroll(hold, goal, length - 1));
    let step = match hold {
        Some(h) => Formula::and(h.clone(), later),
        None => later,
    };
    Formula::or(goal.clone(), step)
}
