use crate::bdd::{Manager, NodeRef, VarId};
use crate::ltl::{Letter, Partition};

use super::tree::DecisionTree;
use super::{ExplicitDfa, StateId};

/// Bit-level encoding of a DFA over a decision-diagram manager.
///
/// Variable order is state bits, then inputs, then outputs, each group in
/// declaration order. State `s` is encoded by the binary digits of `s`, bit
/// `i` on state variable `i`; the initial state 0 is the all-false vector.
/// Encodings that name no state count as accepting.
#[derive(Debug)]
pub struct SymbolicDfa {
    manager: Manager,
    state_vars: Vec<VarId>,
    input_vars: Vec<VarId>,
    output_vars: Vec<VarId>,
    eta: Vec<NodeRef>,
    accepting: NodeRef,
    num_states: usize,
}

impl SymbolicDfa {
    pub fn manager(&self) -> &Manager {
        &self.manager
    }

    pub fn manager_mut(&mut self) -> &mut Manager {
        &mut self.manager
    }

    pub fn state_vars(&self) -> &[VarId] {
        &self.state_vars
    }

    pub fn input_vars(&self) -> &[VarId] {
        &self.input_vars
    }

    pub fn output_vars(&self) -> &[VarId] {
        &self.output_vars
    }

    /// Next-state function of each state bit.
    pub fn eta(&self) -> &[NodeRef] {
        &self.eta
    }

    /// Characteristic function of the accepting (bad) encodings.
    pub fn accepting(&self) -> NodeRef {
        self.accepting
    }

    /// States of the encoded explicit automaton.
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial_bits(&self) -> Vec<bool> {
        vec![false; self.state_vars.len()]
    }

    /// Value of `f` at state encoding `z` (bit `i` is state variable `i`) and
    /// a letter over inputs then outputs.
    pub fn eval_at(&self, f: NodeRef, z: u64, letter: Letter) -> bool {
        let nz = self.state_vars.len();
        self.manager.eval_with(f, |v| {
            if v < nz {
                z >> v & 1 == 1
            } else {
                letter.holds(v - nz)
            }
        })
    }

    /// Successor encoding computed from the bit functions.
    pub fn step(&self, z: u64, letter: Letter) -> u64 {
        self.eta
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &e)| acc | u64::from(self.eval_at(e, z, letter)) << i)
    }

    pub fn is_accepting_code(&self, z: u64) -> bool {
        self.eval_at(self.accepting, z, Letter(0))
    }

    /// The conjunction of state literals spelling out `z`.
    pub fn state_cube(&mut self, z: u64) -> NodeRef {
        state_cube(&mut self.manager, &self.state_vars, z)
    }
}

fn state_cube(m: &mut Manager, state_vars: &[VarId], z: u64) -> NodeRef {
    let mut acc = m.one();
    for (i, &v) in state_vars.iter().enumerate() {
        let l = m.literal(v, z >> i & 1 == 1);
        acc = m.and(acc, l);
    }
    acc
}

fn tree_bit(
    m: &mut Manager,
    tree: &DecisionTree<StateId>,
    letter_vars: &[VarId],
    bit: usize,
) -> NodeRef {
    match tree {
        DecisionTree::Leaf(d) => m.constant(d >> bit & 1 == 1),
        DecisionTree::Branch { var, low, high } => {
            let lo = tree_bit(m, low, letter_vars, bit);
            let hi = tree_bit(m, high, letter_vars, bit);
            let x = m.var(letter_vars[*var]);
            m.ite(x, hi, lo)
        }
    }
}

/// Binary encoding of `dfa` with one next-state function per state bit.
/// Panics if the automaton's alphabet is not the partition's.
pub fn encode_symbolic(dfa: &ExplicitDfa, partition: &Partition) -> SymbolicDfa {
    assert_eq!(
        dfa.alphabet(),
        &partition.alphabet(),
        "automaton alphabet must list the inputs, then the outputs"
    );
    let mut m = Manager::new();
    let bits = dfa.state_bits();
    let state_vars: Vec<VarId> = (0..bits).map(|i| m.new_var(format!("z{i}"))).collect();
    let input_vars: Vec<VarId> = partition.inputs().iter().map(|n| m.new_var(n.clone())).collect();
    let output_vars: Vec<VarId> = partition.outputs().iter().map(|n| m.new_var(n.clone())).collect();
    let letter_vars: Vec<VarId> = input_vars.iter().chain(&output_vars).copied().collect();

    let cubes: Vec<NodeRef> = (0..dfa.num_states())
        .map(|s| state_cube(&mut m, &state_vars, s as u64))
        .collect();
    let mut eta = vec![m.zero(); bits];
    for (s, &cube) in cubes.iter().enumerate() {
        for (bit, e) in eta.iter_mut().enumerate() {
            let t = tree_bit(&mut m, dfa.transitions(s), &letter_vars, bit);
            let term = m.and(cube, t);
            *e = m.or(*e, term);
        }
    }
    let safe = m.or_all(
        cubes
            .iter()
            .enumerate()
            .filter(|&(s, _)| !dfa.is_accepting(s))
            .map(|(_, &c)| c),
    );
    let accepting = m.not(safe);
    SymbolicDfa {
        manager: m,
        state_vars,
        input_vars,
        output_vars,
        eta,
        accepting,
        num_states: dfa.num_states(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::{build_bad_prefix_dfa, minimize_dfa, DEFAULT_STATE_CAP};
    use crate::ltl::{parse_ltl, to_nnf};

    fn encode(f: &str, ins: &[&str], outs: &[&str]) -> (ExplicitDfa, SymbolicDfa) {
        let phi = to_nnf(&parse_ltl(f).unwrap());
        let part = Partition::new(ins.iter().copied(), outs.iter().copied()).unwrap();
        let d = minimize_dfa(&build_bad_prefix_dfa(&phi, &part, DEFAULT_STATE_CAP).unwrap());
        let s = encode_symbolic(&d, &part);
        (d, s)
    }

    #[test]
    fn globally_output() {
        let (_, mut s) = encode("G y", &["x"], &["y"]);
        assert_eq!(s.state_vars().len(), 1);
        assert_eq!(s.initial_bits(), vec![false]);
        let m = s.manager_mut();
        let z0 = m.var(0);
        let y = m.var(2);
        let ny = m.not(y);
        let expected = m.or(z0, ny);
        assert_eq!(s.eta()[0], expected);
        assert_eq!(s.accepting(), z0);
    }

    #[test]
    fn bit_functions_agree_with_transitions() {
        for f in ["G y", "G (x -> X y)", "G (x -> X X y) & G (y -> X !y)", "false"] {
            let (d, s) = encode(f, &["x"], &["y"]);
            for st in 0..d.num_states() {
                assert_eq!(s.is_accepting_code(st as u64), d.is_accepting(st));
                for letter in d.alphabet().letters() {
                    assert_eq!(s.step(st as u64, letter), d.next(st, letter) as u64);
                }
            }
            // ghost encodings are bad
            for code in d.num_states() as u64..1 << s.state_vars().len() {
                assert!(s.is_accepting_code(code));
            }
        }
    }
}
