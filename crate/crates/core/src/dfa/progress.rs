//! Formula progression for co-safety formulas under finite-prefix semantics.
//!
//! A residual formula is the obligation on the nonempty remainder of a
//! trace. Progressing by one letter first unfolds `a U b` into
//! `b | (a & X (a U b))` and `F b` into `b | X F b`, fixes the current-step
//! literals, and finally strips one `X` from what is left. A letter completes
//! a good prefix exactly when the literal-free remainder simplifies to `true`
//! before stripping; `X true` is *not* yet good, since it needs one more
//! position to exist.

use std::collections::BTreeSet;

use crate::ltl::{classify, Alphabet, Formula, Letter, LtlError};

use super::tree::DecisionTree;

fn flatten_into(f: Formula, conj: bool, out: &mut Vec<Formula>) {
    match f {
        Formula::And(l, r) if conj => {
            flatten_into(*l, conj, out);
            flatten_into(*r, conj, out);
        }
        Formula::Or(l, r) if !conj => {
            flatten_into(*l, conj, out);
            flatten_into(*r, conj, out);
        }
        other => out.push(other),
    }
}

fn junction(parts: Vec<Formula>, conj: bool) -> Formula {
    let (unit, zero) = if conj {
        (Formula::True, Formula::False)
    } else {
        (Formula::False, Formula::True)
    };
    let mut flat = Vec::with_capacity(parts.len());
    for p in parts {
        flatten_into(p, conj, &mut flat);
    }
    let mut items: BTreeSet<Formula> = BTreeSet::new();
    for p in flat {
        if p == zero {
            return zero;
        }
        if p != unit {
            items.insert(p);
        }
    }
    for p in &items {
        if let Formula::Atom(name) = p {
            if items.contains(&Formula::NegAtom(name.clone())) {
                return zero;
            }
        }
    }
    let mut iter = items.into_iter().rev();
    let Some(mut acc) = iter.next() else {
        return unit;
    };
    for p in iter {
        acc = if conj {
            Formula::and(p, acc)
        } else {
            Formula::or(p, acc)
        };
    }
    acc
}

/// Conjunction with flattening, sorting, deduplication and constant folding.
pub fn conjoin(parts: Vec<Formula>) -> Formula {
    junction(parts, true)
}

/// Disjunction with flattening, sorting, deduplication and constant folding.
pub fn disjoin(parts: Vec<Formula>) -> Formula {
    junction(parts, false)
}

/// Canonical simplification of a co-safety NNF formula. Every rewrite
/// preserves the set of good prefixes.
pub fn simplify(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) | NegAtom(_) => f.clone(),
        And(..) | Or(..) => disjoin(dnf(f).into_iter().map(|c| conjoin(c.into_iter().collect())).collect()),
        Next(g) => match simplify(g) {
            False => False,
            g => Formula::next(g),
        },
        Until(a, b) => {
            let b = simplify(b);
            if matches!(b, True | False) {
                return b;
            }
            match simplify(a) {
                False => b,
                True => mk_finally(b),
                a => Formula::until(a, b),
            }
        }
        Finally(g) => mk_finally(simplify(g)),
        // not reachable for co-safety input, kept total for callers
        Not(_) | Implies(..) | Release(..) | Globally(_) => f.clone(),
    }
}

type Clause = BTreeSet<Formula>;

/// Disjunctive normal form over the non-boolean subformulas, with subsumed
/// clauses dropped. Without absorption, residuals such as
/// `F a | (F b & (F a | (F b & r)))` keep growing.
fn dnf(f: &Formula) -> BTreeSet<Clause> {
    match f {
        Formula::Or(l, r) => absorb(dnf(l).into_iter().chain(dnf(r)).collect()),
        Formula::And(l, r) => {
            let (l, r) = (dnf(l), dnf(r));
            let mut out = BTreeSet::new();
            for a in &l {
                for b in &r {
                    out.insert(a.union(b).cloned().collect());
                }
            }
            absorb(out)
        }
        leaf => match simplify(leaf) {
            Formula::True => BTreeSet::from([Clause::new()]),
            Formula::False => BTreeSet::new(),
            g @ (Formula::And(..) | Formula::Or(..)) => dnf(&g),
            g => BTreeSet::from([Clause::from([g])]),
        },
    }
}

fn absorb(clauses: BTreeSet<Clause>) -> BTreeSet<Clause> {
    let contradictory = |c: &Clause| {
        c.iter().any(|p| matches!(p, Formula::Atom(n) if c.contains(&Formula::NegAtom(n.clone()))))
    };
    let live: Vec<Clause> = clauses.into_iter().filter(|c| !contradictory(c)).collect();
    live.iter()
        .filter(|c| !live.iter().any(|d| d.len() < c.len() && d.is_subset(c)))
        .cloned()
        .collect()
}

fn mk_finally(g: Formula) -> Formula {
    match g {
        Formula::True | Formula::False | Formula::Finally(_) => g,
        g => Formula::finally(g),
    }
}

/// Rewrites every current-step temporal obligation into literals and `X`.
fn unfold(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) | NegAtom(_) | Next(_) => f.clone(),
        And(l, r) => conjoin(vec![unfold(l), unfold(r)]),
        Or(l, r) => disjoin(vec![unfold(l), unfold(r)]),
        Until(a, b) => disjoin(vec![
            unfold(b),
            conjoin(vec![unfold(a), Formula::next(f.clone())]),
        ]),
        Finally(b) => disjoin(vec![unfold(b), Formula::next(f.clone())]),
        Not(_) | Implies(..) | Release(..) | Globally(_) => {
            unreachable!("progression input is co-safety NNF")
        }
    }
}

fn current_atoms(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(p) | Formula::NegAtom(p) => {
            out.insert(p.clone());
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            current_atoms(l, out);
            current_atoms(r, out);
        }
        _ => {}
    }
}

/// Fixes one current-step atom in an unfolded formula.
fn assign(f: &Formula, atom: &str, value: bool) -> Formula {
    match f {
        Formula::Atom(p) if p == atom => {
            if value {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::NegAtom(p) if p == atom => {
            if value {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::And(l, r) => conjoin(vec![assign(l, atom, value), assign(r, atom, value)]),
        Formula::Or(l, r) => disjoin(vec![assign(l, atom, value), assign(r, atom, value)]),
        _ => f.clone(),
    }
}

/// Drops one `X` from every obligation of a literal-free unfolded formula.
fn strip_next(f: &Formula) -> Formula {
    match f {
        Formula::Next(g) => (**g).clone(),
        Formula::And(l, r) => conjoin(vec![strip_next(l), strip_next(r)]),
        Formula::Or(l, r) => disjoin(vec![strip_next(l), strip_next(r)]),
        _ => f.clone(),
    }
}

/// Where one letter takes a residual obligation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    /// The prefix read so far is good.
    Accept,
    /// The prefix is not yet good; the remainder must be a good prefix of this.
    Residual(Formula),
}

fn settle(remainder: &Formula) -> Step {
    if *remainder == Formula::True {
        Step::Accept
    } else {
        Step::Residual(simplify(&strip_next(remainder)))
    }
}

fn check_co_safety(psi: &Formula) -> Result<(), LtlError> {
    if classify(psi)?.is_co_safety() {
        Ok(())
    } else {
        Err(LtlError::NotCoSafety(psi.to_string()))
    }
}

/// Progression of `psi` by a single letter, as a decision.
pub fn step(psi: &Formula, alphabet: &Alphabet, letter: Letter) -> Result<Step, LtlError> {
    check_co_safety(psi)?;
    let mut f = unfold(psi);
    let mut atoms = BTreeSet::new();
    current_atoms(&f, &mut atoms);
    for atom in atoms {
        let i = alphabet
            .index_of(&atom)
            .ok_or_else(|| LtlError::UnknownAtom(atom.clone()))?;
        f = assign(&f, &atom, letter.holds(i));
    }
    Ok(settle(&f))
}

/// Residual obligation after reading `letter`: for every nonempty `rho`,
/// `letter · rho` is a good prefix of `psi` iff `rho` is one of the result.
/// Returns `true` when `letter` alone already completes a good prefix.
pub fn progress(psi: &Formula, alphabet: &Alphabet, letter: Letter) -> Result<Formula, LtlError> {
    Ok(match step(psi, alphabet, letter)? {
        Step::Accept => Formula::True,
        Step::Residual(r) => r,
    })
}

/// All one-letter steps of `psi`, grouped into a decision tree that only
/// splits on atoms the obligation currently depends on.
pub(crate) fn step_tree(psi: &Formula, alphabet: &Alphabet) -> Result<DecisionTree<Step>, LtlError> {
    let f = unfold(psi);
    split(&f, alphabet)
}

fn split(f: &Formula, alphabet: &Alphabet) -> Result<DecisionTree<Step>, LtlError> {
    let mut atoms = BTreeSet::new();
    current_atoms(f, &mut atoms);
    let mut best: Option<(usize, String)> = None;
    for atom in atoms {
        let i = alphabet
            .index_of(&atom)
            .ok_or_else(|| LtlError::UnknownAtom(atom.clone()))?;
        if best.as_ref().is_none_or(|(j, _)| i < *j) {
            best = Some((i, atom));
        }
    }
    match best {
        None => Ok(DecisionTree::Leaf(settle(f))),
        Some((var, atom)) => {
            let low = split(&assign(f, &atom, false), alphabet)?;
            let high = split(&assign(f, &atom, true), alphabet)?;
            Ok(DecisionTree::branch(var, low, high))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_ltl, to_nnf, GoodPrefixOracle};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"].map(String::from)).unwrap()
    }

    fn p(s: &str) -> Formula {
        to_nnf(&parse_ltl(s).unwrap())
    }

    #[test]
    fn residuals_of_nested_until_stay_finite() {
        // (F !b) U (F a) reading a=0, b=1 repeatedly
        let psi = p("(F !b) U (F a)");
        let letter = Letter(0b10);
        let mut seen = BTreeSet::new();
        let mut cur = psi;
        for _ in 0..10 {
            seen.insert(cur.clone());
            cur = progress(&cur, &ab(), letter).unwrap();
        }
        assert!(seen.len() <= 3, "{seen:?}");
    }

    #[test]
    fn absorption() {
        assert_eq!(simplify(&p("F a | (F b & F a)")), p("F a"));
        assert_eq!(simplify(&p("(a & !a) | F b")), p("F b"));
    }

    #[test]
    fn atom_satisfied_now() {
        let a = ab();
        let letter = a.letter(&["b"]).unwrap();
        assert_eq!(progress(&p("b"), &a, letter).unwrap(), Formula::True);
        assert_eq!(step(&p("b"), &a, letter).unwrap(), Step::Accept);
        assert_eq!(
            step(&p("b"), &a, Letter(0)).unwrap(),
            Step::Residual(Formula::False)
        );
    }

    #[test]
    fn next_drops_one_step() {
        let a = ab();
        for letter in a.letters() {
            assert_eq!(progress(&p("X (a U b)"), &a, letter).unwrap(), p("a U b"));
        }
        // X true needs a further position before it is good
        assert_eq!(
            step(&p("X true"), &a, Letter(0)).unwrap(),
            Step::Residual(Formula::True)
        );
    }

    #[test]
    fn until_waits_while_holding() {
        let a = ab();
        let la = a.letter(&["a"]).unwrap();
        assert_eq!(progress(&p("a U b"), &a, la).unwrap(), p("a U b"));
    }

    #[test]
    fn until_residual_matches_good_prefix_oracle() {
        // {a}·rho good for a U b  iff  rho good for a U b, for |rho| <= 5
        let a = ab();
        let psi = p("a U b");
        let la = a.letter(&["a"]).unwrap();
        let residual = progress(&psi, &a, la).unwrap();
        let whole = GoodPrefixOracle::new(&psi, &a).unwrap();
        let rest = GoodPrefixOracle::new(&residual, &a).unwrap();
        for len in 1..=5u32 {
            for code in 0..4u64.pow(len) {
                let rho: Vec<Letter> = (0..len).map(|i| Letter(code >> (2 * i) & 3)).collect();
                let mut full = vec![la];
                full.extend(&rho);
                assert_eq!(whole.eval_letters(&full), rest.eval_letters(&rho));
            }
        }
    }

    #[test]
    fn simplification_is_canonical() {
        assert_eq!(simplify(&p("b & a & b")), simplify(&p("a & b")));
        assert_eq!(simplify(&p("a & !a")), Formula::False);
        assert_eq!(simplify(&p("a | !a | X b")), Formula::True);
        assert_eq!(simplify(&p("true U (b | false)")), p("F b"));
        assert_eq!(simplify(&p("X false | a")), p("a"));
        assert_eq!(simplify(&p("X true")), p("X true"));
        assert_eq!(simplify(&p("false U X b")), p("X b"));
    }

    #[test]
    fn step_tree_splits_only_on_current_atoms() {
        let a = Alphabet::new(["a", "b", "c"].map(String::from)).unwrap();
        let tree = step_tree(&p("F (b & X c)"), &a).unwrap();
        // only `b` is read in the first step
        match &tree {
            DecisionTree::Branch { var, low, high } => {
                assert_eq!(*var, 1);
                assert!(matches!(**low, DecisionTree::Leaf(_)));
                assert!(matches!(**high, DecisionTree::Leaf(_)));
            }
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn rejects_release() {
        assert!(matches!(
            step(&p("G a"), &ab(), Letter(0)),
            Err(LtlError::NotCoSafety(_))
        ));
    }
}
