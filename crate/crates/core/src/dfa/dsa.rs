use crate::ltl::{Alphabet, Letter};

use super::tree::DecisionTree;
use super::{ExplicitDfa, StateId};

/// Deterministic safety automaton with a partial transition function. A
/// trace is accepted iff the run never gets stuck. With no initial state the
/// automaton accepts nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyAutomaton {
    alphabet: Alphabet,
    initial: Option<StateId>,
    transitions: Vec<DecisionTree<Option<StateId>>>,
}

impl SafetyAutomaton {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self, s: StateId) -> &DecisionTree<Option<StateId>> {
        &self.transitions[s]
    }

    /// `None` when the transition is undefined.
    pub fn step(&self, s: StateId, letter: Letter) -> Option<StateId> {
        *self.transitions[s].eval(letter)
    }

    /// Final state of the run on `word`, or `None` if it gets stuck.
    pub fn run(&self, word: &[Letter]) -> Option<StateId> {
        word.iter()
            .try_fold(self.initial?, |s, &a| self.step(s, a))
    }
}

/// Removes the accepting states of a bad-prefix DFA; transitions into them
/// become undefined. An accepting initial state yields the empty automaton.
pub fn dualize_to_dsa(dfa: &ExplicitDfa) -> SafetyAutomaton {
    if dfa.is_accepting(dfa.initial()) {
        return SafetyAutomaton {
            alphabet: dfa.alphabet().clone(),
            initial: None,
            transitions: Vec::new(),
        };
    }
    let mut renumber = vec![None; dfa.num_states()];
    let mut kept = 0;
    for (s, slot) in renumber.iter_mut().enumerate() {
        if !dfa.is_accepting(s) {
            *slot = Some(kept);
            kept += 1;
        }
    }
    let transitions = (0..dfa.num_states())
        .filter(|&s| !dfa.is_accepting(s))
        .map(|s| dfa.transitions(s).map(&mut |&d| renumber[d]))
        .collect();
    SafetyAutomaton {
        alphabet: dfa.alphabet().clone(),
        initial: renumber[dfa.initial()],
        transitions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::{build_bad_prefix_dfa, minimize_dfa, DEFAULT_STATE_CAP};
    use crate::ltl::{parse_ltl, to_nnf, Partition};

    fn dfa(f: &str) -> ExplicitDfa {
        let phi = to_nnf(&parse_ltl(f).unwrap());
        let part = Partition::new(["x"], ["y"]).unwrap();
        minimize_dfa(&build_bad_prefix_dfa(&phi, &part, DEFAULT_STATE_CAP).unwrap())
    }

    #[test]
    fn globally_output() {
        let a = dualize_to_dsa(&dfa("G y"));
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.initial(), Some(0));
        for letter in a.alphabet().letters() {
            let expected = letter.holds(1).then_some(0);
            assert_eq!(a.step(0, letter), expected);
        }
    }

    #[test]
    fn falsum_is_empty() {
        let a = dualize_to_dsa(&dfa("false"));
        assert!(a.is_empty());
        assert_eq!(a.run(&[]), None);
    }

    #[test]
    fn runs_exist_exactly_without_bad_prefixes() {
        for f in ["G (x -> X y)", "G (y | X !y)", "x R y", "X X y"] {
            let d = dfa(f);
            let a = dualize_to_dsa(&d);
            let mut words: Vec<Vec<Letter>> = vec![vec![]];
            for _ in 0..5 {
                let mut next = Vec::new();
                for w in &words {
                    for letter in d.alphabet().letters() {
                        let mut v = w.clone();
                        v.push(letter);
                        let no_bad_prefix = (1..=v.len()).all(|k| !d.accepts(&v[..k]));
                        assert_eq!(a.run(&v).is_some(), no_bad_prefix, "{f} on {v:?}");
                        next.push(v);
                    }
                }
                words = next;
            }
        }
    }
}
