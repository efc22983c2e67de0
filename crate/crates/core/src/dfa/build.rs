use std::collections::{HashMap, VecDeque};

use log::debug;

use crate::ltl::{classify, negate_nnf, Formula, LtlError, Partition};

use super::progress::{simplify, step_tree, Step};
use super::tree::DecisionTree;
use super::{DfaError, ExplicitDfa, StateId};

pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// DFA accepting exactly the finite traces that are bad prefixes of the
/// Safety formula `phi`, i.e. the good prefixes of its negation.
///
/// States are residual obligations of the negation, explored breadth-first;
/// the good-prefix states collapse into one accepting sink. When every first
/// letter already completes a bad prefix, the initial state itself is that
/// sink (the empty word counts as bad). The result is not minimized.
pub fn build_bad_prefix_dfa(
    phi: &Formula,
    partition: &Partition,
    state_cap: usize,
) -> Result<ExplicitDfa, DfaError> {
    if !classify(phi)?.is_safety() {
        let culprit = phi.find_until().unwrap_or(phi);
        return Err(LtlError::NotSafety(culprit.to_string()).into());
    }
    partition.check_covers(phi)?;
    let alphabet = partition.alphabet();
    let psi = simplify(&negate_nnf(phi)?);

    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Target {
        Accept,
        State(StateId),
    }

    let mut ids: HashMap<Formula, StateId> = HashMap::new();
    let mut formulas: Vec<Formula> = Vec::new();
    let mut trees: Vec<DecisionTree<Target>> = Vec::new();
    let mut queue = VecDeque::new();

    ids.insert(psi.clone(), 0);
    formulas.push(psi);
    queue.push_back(0);

    while let Some(s) = queue.pop_front() {
        let tree = step_tree(&formulas[s], &alphabet)?;
        let mut fresh = Vec::new();
        let mut target = |step: &Step| match step {
            Step::Accept => Target::Accept,
            Step::Residual(r) => {
                let id = *ids.entry(r.clone()).or_insert_with(|| {
                    formulas.push(r.clone());
                    fresh.push(formulas.len() - 1);
                    formulas.len() - 1
                });
                Target::State(id)
            }
        };
        let mapped = tree.map(&mut target);
        if formulas.len() > state_cap {
            return Err(DfaError::StateCap(state_cap));
        }
        queue.extend(fresh);
        debug_assert_eq!(trees.len(), s);
        trees.push(mapped);
    }

    let alphabet_out = alphabet.clone();
    if trees[0] == DecisionTree::Leaf(Target::Accept) {
        debug!("every first letter is a bad prefix; initial state accepts");
        return Ok(ExplicitDfa::new(
            alphabet_out,
            vec![true],
            vec![DecisionTree::Leaf(0)],
        ));
    }

    let sink = formulas.len();
    if sink + 1 > state_cap {
        return Err(DfaError::StateCap(state_cap));
    }
    let mut transitions: Vec<DecisionTree<StateId>> = trees
        .iter()
        .map(|t| {
            t.map(&mut |target| match target {
                Target::Accept => sink,
                Target::State(s) => *s,
            })
        })
        .collect();
    transitions.push(DecisionTree::Leaf(sink));
    let mut accepting = vec![false; sink];
    accepting.push(true);
    debug!(
        "bad-prefix automaton: {} progression states plus accepting sink",
        sink
    );
    Ok(ExplicitDfa::new(alphabet_out, accepting, transitions))
}
