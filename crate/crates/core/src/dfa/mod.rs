//! Bad-prefix automata: construction by progression, minimization, the
//! safety-automaton dual, and the bit-level symbolic encoding.

mod build;
mod dsa;
mod minimize;
mod progress;
mod symbolic;
mod tree;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ltl::{Alphabet, Letter, LtlError, PartitionError};

pub use build::{build_bad_prefix_dfa, DEFAULT_STATE_CAP};
pub use dsa::{dualize_to_dsa, SafetyAutomaton};
pub use minimize::minimize_dfa;
pub use progress::{conjoin, disjoin, progress, simplify, step, Step};
pub use symbolic::{encode_symbolic, SymbolicDfa};
pub use tree::{Cube, DecisionTree};

pub type StateId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("automaton construction exceeded the cap of {0} states")]
    StateCap(usize),
    #[error("malformed automaton text at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Total deterministic automaton over `2^P`. State 0 is initial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitDfa {
    alphabet: Alphabet,
    accepting: Vec<bool>,
    transitions: Vec<DecisionTree<StateId>>,
}

impl ExplicitDfa {
    /// Panics if a transition points outside the state range or the lengths
    /// disagree; the initial state is always 0.
    pub fn new(
        alphabet: Alphabet,
        accepting: Vec<bool>,
        transitions: Vec<DecisionTree<StateId>>,
    ) -> Self {
        assert_eq!(accepting.len(), transitions.len());
        assert!(!accepting.is_empty(), "an automaton has an initial state");
        for t in &transitions {
            assert!(t.leaves().iter().all(|&&d| d < accepting.len()));
        }
        ExplicitDfa {
            alphabet,
            accepting,
            transitions,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.num_states()).filter(|&s| self.accepting[s]).collect()
    }

    pub fn transitions(&self, s: StateId) -> &DecisionTree<StateId> {
        &self.transitions[s]
    }

    pub fn next(&self, s: StateId, letter: Letter) -> StateId {
        *self.transitions[s].eval(letter)
    }

    pub fn run(&self, word: &[Letter]) -> StateId {
        word.iter().fold(self.initial(), |s, &a| self.next(s, a))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.accepting[self.run(word)]
    }

    pub fn num_edges(&self) -> usize {
        self.transitions.iter().map(|t| t.paths().len()).sum()
    }

    /// Bits needed to encode a state index, at least one.
    pub fn state_bits(&self) -> usize {
        let n = self.num_states();
        (usize::BITS - (n - 1).leading_zeros()).max(1) as usize
    }

    /// States reachable from the initial state, in breadth-first order.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for &&d in &self.transitions[s].leaves() {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        order
    }
}

/// Text form:
///
/// ```text
/// alphabet x y
/// states 2
/// initial 0
/// accepting 1
/// 0 y 0
/// 0 !y 1
/// 1 true 1
/// ```
///
/// Edge lines are `src <guard> dst` with a conjunction of literals as guard.
impl fmt::Display for ExplicitDfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {}", self.alphabet.names().join(" "))?;
        writeln!(f, "states {}", self.num_states())?;
        writeln!(f, "initial 0")?;
        let acc: Vec<String> = self.accepting_states().iter().map(|s| s.to_string()).collect();
        if acc.is_empty() {
            writeln!(f, "accepting")?;
        } else {
            writeln!(f, "accepting {}", acc.join(" "))?;
        }
        for (s, t) in self.transitions.iter().enumerate() {
            for (cube, d) in t.paths() {
                writeln!(f, "{s} {} {d}", cube.display(&self.alphabet))?;
            }
        }
        Ok(())
    }
}

impl FromStr for ExplicitDfa {
    type Err = DfaError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: &str| DfaError::Format {
            line,
            message: message.to_string(),
        };
        let mut alphabet = None;
        let mut states = None;
        let mut accepting_list: Vec<usize> = Vec::new();
        let mut edges: Vec<(usize, usize, String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            match head {
                "alphabet" => {
                    alphabet = Some(
                        Alphabet::new(words.map(str::to_string))
                            .map_err(|_| err(n, "duplicate proposition"))?,
                    )
                }
                "states" => {
                    let count: usize = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err(n, "expected a state count"))?;
                    states = Some(count);
                }
                "initial" => {
                    if words.next() != Some("0") {
                        return Err(err(n, "the initial state must be 0"));
                    }
                }
                "accepting" => {
                    for w in words {
                        accepting_list
                            .push(w.parse().map_err(|_| err(n, "expected a state index"))?);
                    }
                }
                _ => {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() < 3 {
                        return Err(err(n, "expected `src guard dst`"));
                    }
                    let src = parts[0].parse().map_err(|_| err(n, "bad source state"))?;
                    let dst = parts[parts.len() - 1]
                        .parse()
                        .map_err(|_| err(n, "bad target state"))?;
                    edges.push((n, src, parts[1..parts.len() - 1].join(" "), dst));
                }
            }
        }
        let alphabet = alphabet.ok_or_else(|| err(0, "missing `alphabet` line"))?;
        let states = states.ok_or_else(|| err(0, "missing `states` line"))?;
        if states == 0 {
            return Err(err(0, "an automaton needs at least one state"));
        }
        let mut accepting = vec![false; states];
        for s in accepting_list {
            *accepting
                .get_mut(s)
                .ok_or_else(|| err(0, "accepting state out of range"))? = true;
        }
        let mut cubes: Vec<Vec<(Cube, StateId)>> = vec![Vec::new(); states];
        for (n, src, guard, dst) in edges {
            if src >= states || dst >= states {
                return Err(err(n, "state out of range"));
            }
            let cube = Cube::parse(&guard, &alphabet).ok_or_else(|| err(n, "bad guard"))?;
            cubes[src].push((cube, dst));
        }
        let transitions = cubes
            .iter()
            .enumerate()
            .map(|(s, c)| {
                DecisionTree::from_cubes(c, alphabet.len()).ok_or_else(|| DfaError::Format {
                    line: 0,
                    message: format!("transitions of state {s} are not total and deterministic"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExplicitDfa::new(alphabet, accepting, transitions))
    }
}
