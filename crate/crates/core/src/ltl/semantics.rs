//! Reference semantics: infinite lasso traces and finite good prefixes.
//!
//! Formulas are compiled against an [`Alphabet`] into a post-order node
//! array; both evaluators then label every trace position bottom-up.

use std::collections::HashMap;
use std::fmt;

use super::{classify, Formula, LtlError};

/// Ordered set of proposition names; position `i` is bit `i` of a [`Letter`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new(names: impl IntoIterator<Item = String>) -> Result<Self, LtlError> {
        let names: Vec<String> = names.into_iter().collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(LtlError::UnknownAtom(n.clone()));
            }
        }
        assert!(names.len() <= 64, "alphabets are limited to 64 propositions");
        Ok(Alphabet { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Number of distinct letters, `2^|P|`.
    pub fn letter_count(&self) -> u64 {
        1u64 << self.names.len()
    }

    /// Builds the letter in which exactly `atoms` hold.
    pub fn letter<S: AsRef<str>>(&self, atoms: &[S]) -> Result<Letter, LtlError> {
        let mut bits = 0u64;
        for a in atoms {
            let i = self
                .index_of(a.as_ref())
                .ok_or_else(|| LtlError::UnknownAtom(a.as_ref().to_string()))?;
            bits |= 1 << i;
        }
        Ok(Letter(bits))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letter_count()).map(Letter)
    }

    /// Names of the atoms true in `letter`.
    pub fn atoms_of(&self, letter: Letter) -> Vec<&str> {
        self.names
            .iter()
            .enumerate()
            .filter(|(i, _)| letter.holds(*i))
            .map(|(_, n)| n.as_str())
            .collect()
    }
}

/// A propositional interpretation, as a bit set over an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Letter(pub u64);

impl Letter {
    pub fn holds(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.0)
    }
}

/// Nonempty finite trace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace(Vec<Letter>);

impl Trace {
    pub fn new(letters: Vec<Letter>) -> Result<Self, LtlError> {
        if letters.is_empty() {
            return Err(LtlError::EmptyTrace);
        }
        Ok(Trace(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The infinite trace `stem · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoTrace {
    stem: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoTrace {
    pub fn new(stem: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, LtlError> {
        if cycle.is_empty() {
            return Err(LtlError::EmptyLoop);
        }
        Ok(LassoTrace { stem, cycle })
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    fn letter(&self, pos: usize) -> Letter {
        if pos < self.stem.len() {
            self.stem[pos]
        } else {
            self.cycle[pos - self.stem.len()]
        }
    }

    fn positions(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    fn successor(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.stem.len()
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    True,
    False,
    Atom(usize),
    NegAtom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
    Finally(usize),
    Globally(usize),
}

fn compile(f: &Formula, alphabet: &Alphabet, out: &mut Vec<Node>) -> Result<usize, LtlError> {
    let atom = |p: &String| {
        alphabet
            .index_of(p)
            .ok_or_else(|| LtlError::UnknownAtom(p.clone()))
    };
    let node = match f {
        Formula::True => Node::True,
        Formula::False => Node::False,
        Formula::Atom(p) => Node::Atom(atom(p)?),
        Formula::NegAtom(p) => Node::NegAtom(atom(p)?),
        Formula::Not(g) => Node::Not(compile(g, alphabet, out)?),
        Formula::Next(g) => Node::Next(compile(g, alphabet, out)?),
        Formula::Finally(g) => Node::Finally(compile(g, alphabet, out)?),
        Formula::Globally(g) => Node::Globally(compile(g, alphabet, out)?),
        Formula::And(l, r) => Node::And(compile(l, alphabet, out)?, compile(r, alphabet, out)?),
        Formula::Or(l, r) => Node::Or(compile(l, alphabet, out)?, compile(r, alphabet, out)?),
        Formula::Implies(l, r) => {
            Node::Implies(compile(l, alphabet, out)?, compile(r, alphabet, out)?)
        }
        Formula::Until(l, r) => Node::Until(compile(l, alphabet, out)?, compile(r, alphabet, out)?),
        Formula::Release(l, r) => {
            Node::Release(compile(l, alphabet, out)?, compile(r, alphabet, out)?)
        }
    };
    out.push(node);
    Ok(out.len() - 1)
}

/// Truth of `f` at position 0 of the infinite trace `stem · loop^ω`.
///
/// Positions of the finite lasso graph are labelled bottom-up; Until is the
/// least and Release the greatest fixpoint of its one-step unfolding along
/// the successor relation, where the last position loops back to the start
/// of the cycle.
pub fn eval_lasso(f: &Formula, alphabet: &Alphabet, trace: &LassoTrace) -> Result<bool, LtlError> {
    let mut nodes = Vec::new();
    compile(f, alphabet, &mut nodes)?;
    let n = trace.positions();
    let mut val: Vec<Vec<bool>> = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let row: Vec<bool> = match *node {
            Node::True => vec![true; n],
            Node::False => vec![false; n],
            Node::Atom(a) => (0..n).map(|i| trace.letter(i).holds(a)).collect(),
            Node::NegAtom(a) => (0..n).map(|i| !trace.letter(i).holds(a)).collect(),
            Node::Not(c) => val[c].iter().map(|b| !b).collect(),
            Node::And(l, r) => (0..n).map(|i| val[l][i] && val[r][i]).collect(),
            Node::Or(l, r) => (0..n).map(|i| val[l][i] || val[r][i]).collect(),
            Node::Implies(l, r) => (0..n).map(|i| !val[l][i] || val[r][i]).collect(),
            Node::Next(c) => (0..n).map(|i| val[c][trace.successor(i)]).collect(),
            Node::Until(l, r) => fixpoint(trace, false, |i, next| val[r][i] || (val[l][i] && next)),
            Node::Finally(c) => fixpoint(trace, false, |i, next| val[c][i] || next),
            Node::Release(l, r) => {
                fixpoint(trace, true, |i, next| val[r][i] && (val[l][i] || next))
            }
            Node::Globally(c) => fixpoint(trace, true, |i, next| val[c][i] && next),
        };
        val.push(row);
    }
    Ok(val.last().expect("compiled formula has a root")[0])
}

fn fixpoint(trace: &LassoTrace, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = trace.positions();
    let mut cur = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = step(i, cur[trace.successor(i)]);
            if v != cur[i] {
                cur[i] = v;
                changed = true;
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// Decides good prefixes of a co-safety formula by evaluating its first-order
/// translation over the positions `0..=last` of a finite trace.
///
/// `X g` holds at `x` iff `x` has a successor `y` (so `x < last`) with `g` at
/// `y`; `a U b` holds at `x` iff some `y` in `x..=last` satisfies `b` and all
/// `z` in `x..y` satisfy `a`. `F b` is `true U b`.
#[derive(Debug, Clone)]
pub struct GoodPrefixOracle {
    nodes: Vec<Node>,
}

impl GoodPrefixOracle {
    pub fn new(psi: &Formula, alphabet: &Alphabet) -> Result<Self, LtlError> {
        if !classify(psi)?.is_co_safety() {
            return Err(LtlError::NotCoSafety(psi.to_string()));
        }
        let mut nodes = Vec::new();
        compile(psi, alphabet, &mut nodes)?;
        Ok(GoodPrefixOracle { nodes })
    }

    pub fn is_good_prefix(&self, trace: &Trace) -> bool {
        self.eval_letters(trace.letters())
    }

    /// Same as [`is_good_prefix`](Self::is_good_prefix) on a raw nonempty
    /// letter slice.
    pub fn eval_letters(&self, letters: &[Letter]) -> bool {
        let n = letters.len();
        assert!(n > 0, "good-prefix evaluation needs a nonempty trace");
        let last = n - 1;
        let mut val = vec![false; self.nodes.len() * n];
        for (k, node) in self.nodes.iter().enumerate() {
            let (done, rest) = val.split_at_mut(k * n);
            let row = &mut rest[..n];
            let at = |c: usize, i: usize| done[c * n + i];
            for x in 0..n {
                row[x] = match *node {
                    Node::True => true,
                    Node::False => false,
                    Node::Atom(a) => letters[x].holds(a),
                    Node::NegAtom(a) => !letters[x].holds(a),
                    Node::And(l, r) => at(l, x) && at(r, x),
                    Node::Or(l, r) => at(l, x) || at(r, x),
                    Node::Next(c) => x < last && at(c, x + 1),
                    Node::Until(l, r) => (x..=last).any(|y| at(r, y) && (x..y).all(|z| at(l, z))),
                    Node::Finally(c) => (x..=last).any(|y| at(c, y)),
                    Node::Not(_)
                    | Node::Implies(..)
                    | Node::Release(..)
                    | Node::Globally(_) => unreachable!("rejected by the co-safety check"),
                };
            }
        }
        val[(self.nodes.len() - 1) * n]
    }
}

/// One-shot form of [`GoodPrefixOracle`].
pub fn eval_finite_good_prefix(
    psi: &Formula,
    alphabet: &Alphabet,
    trace: &Trace,
) -> Result<bool, LtlError> {
    Ok(GoodPrefixOracle::new(psi, alphabet)?.is_good_prefix(trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{negate_nnf, parse_ltl, to_nnf};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b", "p", "q"].map(String::from)).unwrap()
    }

    fn l(atoms: &[&str]) -> Letter {
        ab().letter(atoms).unwrap()
    }

    fn lasso(stem: &[&[&str]], cycle: &[&[&str]]) -> LassoTrace {
        LassoTrace::new(
            stem.iter().map(|s| l(s)).collect(),
            cycle.iter().map(|s| l(s)).collect(),
        )
        .unwrap()
    }

    fn lasso_eval(f: &str, t: &LassoTrace) -> bool {
        eval_lasso(&parse_ltl(f).unwrap(), &ab(), t).unwrap()
    }

    fn good(f: &str, t: &[&[&str]]) -> bool {
        let trace = Trace::new(t.iter().map(|s| l(s)).collect()).unwrap();
        eval_finite_good_prefix(&parse_ltl(f).unwrap(), &ab(), &trace).unwrap()
    }

    #[test]
    fn lasso_examples() {
        assert!(lasso_eval("G p", &lasso(&[], &[&["p"]])));
        assert!(!lasso_eval("F p", &lasso(&[&[]], &[&[]])));
        assert!(lasso_eval("p U q", &lasso(&[&["p"], &["p"]], &[&["q"]])));
        assert!(!lasso_eval("p U q", &lasso(&[&["p"], &[]], &[&["q"]])));
        assert!(lasso_eval("G F p", &lasso(&[], &[&[], &["p"]])));
        assert!(!lasso_eval("F G p", &lasso(&[], &[&[], &["p"]])));
        assert!(lasso_eval("X X p", &lasso(&[&[]], &[&[], &["p"]])));
        assert!(!lasso_eval("X X X p", &lasso(&[&[]], &[&[], &["p"]])));
        assert!(lasso_eval("X X X X p", &lasso(&[&[]], &[&[], &["p"]])));
        assert!(lasso_eval("a R b", &lasso(&[&["b"]], &[&["b"]])));
        assert!(lasso_eval("a R b", &lasso(&[&["b"], &["a", "b"]], &[&[]])));
        assert!(!lasso_eval("a R b", &lasso(&[&["b"], &["a"]], &[&["b"]])));
    }

    #[test]
    fn good_prefix_examples() {
        assert!(good("a U b", &[&["a"], &["b"]]));
        assert!(!good("X b", &[&[]]));
        assert!(good("X b", &[&[], &["b"]]));
        assert!(!good("b", &[&["a"]]));
        assert!(good("F b", &[&[], &[], &["b"]]));
        assert!(!good("a U b", &[&[], &["b"]]));
        assert!(!good("X true", &[&[]]));
        assert!(good("true", &[&[]]));
    }

    #[test]
    fn oracle_rejects_non_co_safety() {
        let f = parse_ltl("G a").unwrap();
        assert!(matches!(
            GoodPrefixOracle::new(&f, &ab()),
            Err(LtlError::NotCoSafety(_))
        ));
        let f = parse_ltl("F z").unwrap();
        assert_eq!(
            GoodPrefixOracle::new(&f, &ab()).unwrap_err(),
            LtlError::UnknownAtom("z".into())
        );
    }

    #[test]
    fn traces_are_nonempty() {
        assert_eq!(Trace::new(vec![]), Err(LtlError::EmptyTrace));
        assert_eq!(LassoTrace::new(vec![], vec![]), Err(LtlError::EmptyLoop));
    }

    #[test]
    fn bad_prefix_of_globally() {
        let phi = to_nnf(&parse_ltl("G (a -> X b)").unwrap());
        let psi = negate_nnf(&phi).unwrap();
        let oracle = GoodPrefixOracle::new(&psi, &ab()).unwrap();
        assert!(oracle.eval_letters(&[l(&["a"]), l(&[])]));
        assert!(!oracle.eval_letters(&[l(&["a"])]));
        assert!(!oracle.eval_letters(&[l(&["a"]), l(&["b"])]));
    }
}
