use std::collections::HashMap;

use super::tree::DecisionTree;
use super::{ExplicitDfa, StateId};

/// Moore partition refinement over the reachable part.
///
/// Blocks start as accepting / non-accepting and are split by the canonical
/// decision tree of block-valued successors until stable. Blocks are numbered
/// by breadth-first discovery from the initial state.
pub fn minimize_dfa(dfa: &ExplicitDfa) -> ExplicitDfa {
    let order = dfa.reachable();
    let mut block: HashMap<StateId, usize> = HashMap::with_capacity(order.len());
    let mut count = 0;
    {
        let mut ids: HashMap<bool, usize> = HashMap::new();
        for &s in &order {
            let next = ids.len();
            let id = *ids.entry(dfa.is_accepting(s)).or_insert(next);
            block.insert(s, id);
        }
        count = count.max(ids.len());
    }
    loop {
        let mut ids: HashMap<(usize, DecisionTree<usize>), usize> = HashMap::new();
        let mut refined: HashMap<StateId, usize> = HashMap::with_capacity(order.len());
        for &s in &order {
            let signature = (block[&s], dfa.transitions(s).map(&mut |d| block[d]));
            let next = ids.len();
            let id = *ids.entry(signature).or_insert(next);
            refined.insert(s, id);
        }
        let stable = ids.len() == count;
        count = ids.len();
        block = refined;
        if stable {
            break;
        }
    }

    // renumber blocks in breadth-first order of the quotient
    let mut representative: Vec<Option<StateId>> = vec![None; count];
    for &s in &order {
        representative[block[&s]].get_or_insert(s);
    }
    let mut number: Vec<Option<usize>> = vec![None; count];
    let mut queue = std::collections::VecDeque::from([block[&dfa.initial()]]);
    let mut sequence = Vec::with_capacity(count);
    number[block[&dfa.initial()]] = Some(0);
    while let Some(b) = queue.pop_front() {
        sequence.push(b);
        let rep = representative[b].expect("every block has a member");
        for (_, &d) in dfa.transitions(rep).paths() {
            let db = block[&d];
            if number[db].is_none() {
                number[db] = Some(sequence.len() + queue.len());
                queue.push_back(db);
            }
        }
    }
    let mut accepting = Vec::with_capacity(count);
    let mut transitions = Vec::with_capacity(count);
    for &b in &sequence {
        let rep = representative[b].expect("every block has a member");
        accepting.push(dfa.is_accepting(rep));
        transitions.push(
            dfa.transitions(rep)
                .map(&mut |d| number[block[d]].expect("reachable block")),
        );
    }
    ExplicitDfa::new(dfa.alphabet().clone(), accepting, transitions)
}
