//! Linear temporal logic: syntax, normal forms, fragment checks and
//! reference semantics over finite and ultimately periodic traces.

mod expand;
mod nnf;
mod parser;
mod partition;
mod semantics;

use std::collections::BTreeSet;
use std::fmt;

pub use expand::expand_until;
pub use nnf::{classify, is_nnf, negate_nnf, to_nnf, Fragment};
pub use parser::{parse_ltl, ParseError, ParseErrorKind};
pub use partition::{Partition, PartitionError};
pub use semantics::{
    eval_finite_good_prefix, eval_lasso, Alphabet, GoodPrefixOracle, LassoTrace, Letter, Trace,
};

use thiserror::Error;

/// Errors raised by the fragment-sensitive LTL operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtlError {
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
    #[error("formula is not in the co-safety fragment: {0}")]
    NotCoSafety(String),
    #[error("formula is not in the safety fragment; offending subformula: {0}")]
    NotSafety(String),
    #[error("atom `{0}` is not part of the alphabet")]
    UnknownAtom(String),
    #[error("expansion length must be at least 1")]
    ZeroExpansion,
    #[error("a trace needs at least one letter")]
    EmptyTrace,
    #[error("a lasso needs a nonempty loop")]
    EmptyLoop,
}

/// LTL abstract syntax tree.
///
/// `Finally` and `Globally` are kept as nodes for readability; they stand for
/// `true U f` and `false R f` respectively.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Self {
        Formula::NegAtom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn release(l: Formula, r: Formula) -> Self {
        Formula::Release(Box::new(l), Box::new(r))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    /// Names of all propositions occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) | Formula::NegAtom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => {
                f.collect_atoms(out)
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Nesting depth of operators; literals and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => 0,
            Formula::Not(f) | Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => {
                1 + f.depth()
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Rewrites `F f` as `true U f` and `G f` as `false R f`, recursively.
    pub fn expand_abbreviations(&self) -> Formula {
        use Formula::*;
        match self {
            True | False | Atom(_) | NegAtom(_) => self.clone(),
            Not(f) => Formula::not(f.expand_abbreviations()),
            Next(f) => Formula::next(f.expand_abbreviations()),
            Finally(f) => Formula::until(True, f.expand_abbreviations()),
            Globally(f) => Formula::release(False, f.expand_abbreviations()),
            And(l, r) => Formula::and(l.expand_abbreviations(), r.expand_abbreviations()),
            Or(l, r) => Formula::or(l.expand_abbreviations(), r.expand_abbreviations()),
            Implies(l, r) => Formula::implies(l.expand_abbreviations(), r.expand_abbreviations()),
            Until(l, r) => Formula::until(l.expand_abbreviations(), r.expand_abbreviations()),
            Release(l, r) => Formula::release(l.expand_abbreviations(), r.expand_abbreviations()),
        }
    }

    /// First subformula (pre-order) whose head operator is `U` or `F`.
    pub fn find_until(&self) -> Option<&Formula> {
        self.find(&|f| matches!(f, Formula::Until(..) | Formula::Finally(_)))
    }

    /// First subformula (pre-order) whose head operator is `R` or `G`.
    pub fn find_release(&self) -> Option<&Formula> {
        self.find(&|f| matches!(f, Formula::Release(..) | Formula::Globally(_)))
    }

    fn find(&self, pred: &dyn Fn(&Formula) -> bool) -> Option<&Formula> {
        if pred(self) {
            return Some(self);
        }
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => None,
            Formula::Not(f) | Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => {
                f.find(pred)
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r)
            | Formula::Release(l, r) => l.find(pred).or_else(|| r.find(pred)),
        }
    }

    fn is_simple(&self) -> bool {
        matches!(
            self,
            Formula::True
                | Formula::False
                | Formula::Atom(_)
                | Formula::NegAtom(_)
                | Formula::Not(_)
                | Formula::Next(_)
                | Formula::Finally(_)
                | Formula::Globally(_)
        )
    }
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_simple() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// Prints in the concrete grammar accepted by [`parse_ltl`]; the output
/// parses back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(p) => write!(f, "{p}"),
            NegAtom(p) => write!(f, "!{p}"),
            Not(g) => write!(f, "!{}", Operand(g)),
            Next(g) => write!(f, "X {}", Operand(g)),
            Finally(g) => write!(f, "F {}", Operand(g)),
            Globally(g) => write!(f, "G {}", Operand(g)),
            And(l, r) => write!(f, "{} & {}", Operand(l), Operand(r)),
            Or(l, r) => write!(f, "{} | {}", Operand(l), Operand(r)),
            Implies(l, r) => write!(f, "{} -> {}", Operand(l), Operand(r)),
            Until(l, r) => write!(f, "{} U {}", Operand(l), Operand(r)),
            Release(l, r) => write!(f, "{} R {}", Operand(l), Operand(r)),
        }
    }
}
