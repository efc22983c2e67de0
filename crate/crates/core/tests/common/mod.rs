//! Shared instance corpus and brute-force oracles for the integration and
//! acceptance tests.

#![allow(dead_code)]

pub mod strategies;

use std::collections::{BTreeSet, HashMap, VecDeque};

use safety_synth::dfa::SafetyAutomaton;
use safety_synth::ltl::{parse_ltl, to_nnf, Formula, GoodPrefixOracle, Letter, Partition};

#[derive(Debug, Clone)]
pub struct Instance {
    pub text: String,
    pub formula: Formula,
    pub partition: Partition,
}

impl Instance {
    pub fn new(text: &str, inputs: &[&str], outputs: &[&str]) -> Self {
        let formula = to_nnf(&parse_ltl(text).unwrap_or_else(|e| panic!("{text}: {e}")));
        let partition = Partition::new(inputs.iter().copied(), outputs.iter().copied()).unwrap();
        Instance {
            text: text.to_string(),
            formula,
            partition,
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.partition.inputs().len() + self.partition.outputs().len()
    }
}

/// Exhaustive family over one input `x` and one output `y`, plus a smaller
/// family over input `x` and outputs `y`, `z`.
///
/// The first is every `T(a op b)` with `T` either nothing or `G`, `op` one
/// of `&`, `|`, `R`, `a` a literal and `b` a literal, `X` literal or `G`
/// literal. Operator depth is at most 3.
pub fn corpus() -> Vec<Instance> {
    let lits = ["x", "!x", "y", "!y"];
    let mut rights: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
    rights.extend(lits.iter().map(|l| format!("X {l}")));
    rights.extend(lits.iter().map(|l| format!("G {l}")));
    let mut texts = Vec::new();
    for wrap in [false, true] {
        for op in ["&", "|", "R"] {
            for a in lits {
                for b in &rights {
                    let inner = format!("{a} {op} ({b})");
                    texts.push(if wrap { format!("G ({inner})") } else { inner });
                }
            }
        }
    }
    let mut out: Vec<Instance> = texts.iter().map(|t| Instance::new(t, &["x"], &["y"])).collect();

    let three = [
        "G (x -> X (y & z))",
        "G (x -> X (y | z))",
        "G (x -> (y R z))",
        "G (!y | !z)",
        "G ((y | z) & (y -> X !y))",
        "G (x -> X y) & G (!y | z)",
        "G (y R (x | z))",
        "G (x -> X X z) & G (z -> X !z)",
        "G (y | X z) & G (z -> !y)",
        "X (x R (y & !z))",
        "G ((x -> y) & (y -> X z) & (z -> X !z))",
        "G (x -> (y & X z))",
        "G (x -> X !y) & G (!x -> X y) & G (z | y)",
        "G (y -> X z) & G (z -> X y) & G (x -> !y)",
        "G (x R y) | G z",
        "G ((x & X x) -> X X (y & z))",
        "(x & y) R (y | z)",
        "G (X y | X z)",
        "G (z & X !z)",
        "G (x -> X (z R y))",
        "G (!x -> z) & G (z -> X !y) & G (x -> y)",
        "X X (x -> G (y & z))",
        "G (y | z) & G (!y | !z) & G (y -> X y)",
        "G (x -> X X (y | z)) & G (y -> X !z)",
    ];
    out.extend(three.iter().map(|t| Instance::new(t, &["x"], &["y", "z"])));
    out
}

/// Hand-written families, including two-input / two-output members.
pub fn families() -> Vec<Instance> {
    let xy = |t: &str| Instance::new(t, &["x"], &["y"]);
    let wide = |t: &str| Instance::new(t, &["x1", "x2"], &["y1", "y2"]);
    let mut out = vec![
        xy("G y"),
        xy("G x"),
        xy("G (x -> X y)"),
        xy("G (y & X !y)"),
    ];
    // nested X / R
    for n in 1..=4 {
        let next = "X ".repeat(n);
        out.push(xy(&format!("G (x -> {next}y)")));
        out.push(xy(&format!("G (x -> {next}y) & G (y -> X !y)")));
    }
    out.extend([
        xy("x R (y R X y)"),
        xy("G (x R X (y | X !y))"),
        xy("G ((x & X x) -> X X y)"),
        xy("X X (y R (x | X y))"),
        wide("G ((x1 -> X y1) & (x2 -> X y2))"),
        wide("G ((x1 -> X y1) & (x2 -> X y2)) & G (!y1 | !y2)"),
        wide("G ((x1 & x2) -> (y1 R y2))"),
        wide("G ((x1 -> y1) & (x2 -> y2) & (!y1 | !y2))"),
        wide("G (y1 | y2) & G (y1 -> X !y1) & G (y2 -> X !y2)"),
    ]);
    out
}

/// Families whose two-variables-per-step width grows with `n`:
/// `G ((x0 -> y0) & … & (x{n-1} -> y{n-1}))`.
pub fn scaling_instance(n: usize) -> Instance {
    let parts: Vec<String> = (0..n).map(|i| format!("(x{i} -> y{i})")).collect();
    let inputs: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let outputs: Vec<String> = (0..n).map(|i| format!("y{i}")).collect();
    let ins: Vec<&str> = inputs.iter().map(String::as_str).collect();
    let outs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    Instance::new(&format!("G ({})", parts.join(" & ")), &ins, &outs)
}

/// Calls `visit` on every nonempty word of length at most `max_len` over
/// `2^bits` letters, depth-first. Returning `false` skips the extensions.
pub fn for_each_word(bits: usize, max_len: usize, visit: &mut impl FnMut(&[Letter]) -> bool) {
    fn go(word: &mut Vec<Letter>, bits: usize, max_len: usize, visit: &mut impl FnMut(&[Letter]) -> bool) {
        if word.len() == max_len {
            return;
        }
        for a in 0..1u64 << bits {
            word.push(Letter(a));
            if visit(word) {
                go(word, bits, max_len, visit);
            }
            word.pop();
        }
    }
    go(&mut Vec::new(), bits, max_len, visit);
}

/// Membership in the good-prefix language of `oracle`, with the empty word
/// counted as good iff every one-letter word is.
pub fn member(oracle: &GoodPrefixOracle, bits: usize, word: &[Letter]) -> bool {
    if word.is_empty() {
        (0..1u64 << bits).all(|a| oracle.eval_letters(&[Letter(a)]))
    } else {
        oracle.eval_letters(word)
    }
}

/// Number of Myhill–Nerode classes of the good-prefix language, separating
/// words by their good suffixes of length at most `suffix_len`.
///
/// Good prefixes are closed under extension, so a residual is identified by
/// its minimal good suffixes. Access words are explored breadth-first and
/// only words reaching a new class are extended.
pub fn nerode_classes(oracle: &GoodPrefixOracle, bits: usize, suffix_len: usize) -> usize {
    let signature = |w: &[Letter]| -> (bool, BTreeSet<Vec<Letter>>) {
        let here = member(oracle, bits, w);
        let mut minimal = BTreeSet::new();
        if !here {
            let mut buf = w.to_vec();
            for_each_word(bits, suffix_len, &mut |s| {
                buf.truncate(w.len());
                buf.extend_from_slice(s);
                if member(oracle, bits, &buf) {
                    minimal.insert(s.to_vec());
                    false
                } else {
                    true
                }
            });
        }
        (here, minimal)
    };
    let mut classes = HashMap::new();
    let mut queue = VecDeque::from([Vec::new()]);
    while let Some(w) = queue.pop_front() {
        let sig = signature(&w);
        if classes.contains_key(&sig) {
            continue;
        }
        classes.insert(sig, w.clone());
        for a in 0..1u64 << bits {
            let mut v = w.clone();
            v.push(Letter(a));
            queue.push_back(v);
        }
    }
    classes.len()
}

/// Losing states of the safety game on `dsa`, environment first, by
/// iterating the controllable predecessor of the undefined moves.
pub fn losing_states(dsa: &SafetyAutomaton, inputs: usize, outputs: usize) -> Vec<bool> {
    let mut losing = vec![false; dsa.num_states()];
    loop {
        let mut changed = false;
        for s in 0..dsa.num_states() {
            if losing[s] {
                continue;
            }
            let lost = (0..1u64 << inputs).any(|x| {
                (0..1u64 << outputs).all(|y| match dsa.step(s, Letter(x | y << inputs)) {
                    None => true,
                    Some(d) => losing[d],
                })
            });
            if lost {
                losing[s] = true;
                changed = true;
            }
        }
        if !changed {
            return losing;
        }
    }
}
