use super::{Formula, LtlError};

/// Syntactic fragment of an NNF formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// Until-free but uses Release.
    Safety,
    /// Release-free but uses Until.
    CoSafety,
    /// Neither Until nor Release occurs.
    Both,
    Neither,
}

impl Fragment {
    /// Until-free, i.e. in the Safety LTL fragment.
    pub fn is_safety(self) -> bool {
        matches!(self, Fragment::Safety | Fragment::Both)
    }

    /// Release-free, i.e. in the Co-Safety LTL fragment.
    pub fn is_co_safety(self) -> bool {
        matches!(self, Fragment::CoSafety | Fragment::Both)
    }
}

/// True when negation only occurs as `NegAtom` and no `Implies` remains.
pub fn is_nnf(f: &Formula) -> bool {
    use Formula::*;
    match f {
        True | False | Atom(_) | NegAtom(_) => true,
        Not(_) | Implies(..) => false,
        Next(g) | Finally(g) | Globally(g) => is_nnf(g),
        And(l, r) | Or(l, r) | Until(l, r) | Release(l, r) => is_nnf(l) && is_nnf(r),
    }
}

/// Pushes negations down to the atoms and eliminates `->`.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negated: bool) -> Formula {
    use Formula::*;
    match (f, negated) {
        (True, false) | (False, true) => True,
        (False, false) | (True, true) => False,
        (Atom(p), false) | (NegAtom(p), true) => Atom(p.clone()),
        (Atom(p), true) | (NegAtom(p), false) => NegAtom(p.clone()),
        (Not(g), _) => nnf(g, !negated),
        (And(l, r), false) | (Or(l, r), true) => Formula::and(nnf(l, negated), nnf(r, negated)),
        (Or(l, r), false) | (And(l, r), true) => Formula::or(nnf(l, negated), nnf(r, negated)),
        (Implies(l, r), false) => Formula::or(nnf(l, true), nnf(r, false)),
        (Implies(l, r), true) => Formula::and(nnf(l, false), nnf(r, true)),
        (Next(g), _) => Formula::next(nnf(g, negated)),
        (Until(l, r), false) | (Release(l, r), true) => {
            Formula::until(nnf(l, negated), nnf(r, negated))
        }
        (Release(l, r), false) | (Until(l, r), true) => {
            Formula::release(nnf(l, negated), nnf(r, negated))
        }
        (Finally(g), false) | (Globally(g), true) => Formula::finally(nnf(g, negated)),
        (Globally(g), false) | (Finally(g), true) => Formula::globally(nnf(g, negated)),
    }
}

/// Dual of an NNF formula, again in NNF. Structural involution.
pub fn negate_nnf(f: &Formula) -> Result<Formula, LtlError> {
    if !is_nnf(f) {
        return Err(LtlError::NotNnf(f.to_string()));
    }
    Ok(nnf(f, true))
}

/// Fragment membership; `F`/`G` count as `U`/`R`.
pub fn classify(f: &Formula) -> Result<Fragment, LtlError> {
    if !is_nnf(f) {
        return Err(LtlError::NotNnf(f.to_string()));
    }
    Ok(match (f.find_until().is_some(), f.find_release().is_some()) {
        (false, false) => Fragment::Both,
        (false, true) => Fragment::Safety,
        (true, false) => Fragment::CoSafety,
        (true, true) => Fragment::Neither,
    })
}
