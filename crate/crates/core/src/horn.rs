//! The explicit method: the safety game on a safety automaton as a Horn
//! formula with flipped polarity, solved by unit propagation.
//!
//! Variables mark *losing* positions. `p_s` is a state, `p_(s,X)` a state
//! after the environment chose `X`, and `p_(s,X,Y)` a complete move. The
//! clauses are
//!
//! ```text
//! p_(s,X)           -> p_s         one per (s, X)
//! /\_Y p_(s,X,Y)    -> p_(s,X)     one per (s, X)
//! p_(δ(s,X∪Y))      -> p_(s,X,Y)   defined transitions
//!                      p_(s,X,Y)   undefined transitions
//! p_(s0)            -> false
//! ```
//!
//! The least model is the set of losing positions, and the formula is
//! satisfiable iff the initial state is winning.

use std::fmt::Write as _;

use thiserror::Error;

use crate::dfa::SafetyAutomaton;
use crate::ltl::{Letter, Partition};
use crate::transducer::{Transducer, TransducerError};

pub const DEFAULT_VAR_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HornError {
    #[error("the safety automaton is empty; every play is lost immediately")]
    EmptyAutomaton,
    #[error("{vars} input and output variables exceed the enumeration cap of {cap}")]
    Cap { vars: usize, cap: usize },
    #[error("automaton alphabet must list the inputs, then the outputs")]
    AlphabetMismatch,
    #[error(transparent)]
    Transducer(#[from] TransducerError),
}

pub type HornVar = u32;

/// A clause `body -> head`, or `body -> false` when `head` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub body: Vec<HornVar>,
    pub head: Option<HornVar>,
}

impl Clause {
    pub fn len(&self) -> usize {
        self.body.len() + usize::from(self.head.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which position a variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    State(usize),
    Input(usize, u64),
    Move(usize, u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    states: usize,
    input_bits: usize,
    output_bits: usize,
}

impl Layout {
    fn inputs(&self) -> u64 {
        1 << self.input_bits
    }

    fn outputs(&self) -> u64 {
        1 << self.output_bits
    }

    fn num_vars(&self) -> usize {
        let s = self.states as u64;
        (s + s * self.inputs() + s * self.inputs() * self.outputs()) as usize
    }

    fn var(&self, p: Position) -> HornVar {
        let s = self.states as u64;
        let (i, o) = (self.inputs(), self.outputs());
        let v = match p {
            Position::State(q) => q as u64,
            Position::Input(q, x) => s + q as u64 * i + x,
            Position::Move(q, x, y) => s + s * i + (q as u64 * i + x) * o + y,
        };
        v as HornVar
    }

    fn position(&self, v: HornVar) -> Position {
        let v = v as u64;
        let s = self.states as u64;
        let (i, o) = (self.inputs(), self.outputs());
        if v < s {
            Position::State(v as usize)
        } else if v < s + s * i {
            let r = v - s;
            Position::Input((r / i) as usize, r % i)
        } else {
            let r = v - s - s * i;
            let (qx, y) = (r / o, r % o);
            Position::Move((qx / i) as usize, qx % i, y)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornInstance {
    layout: Layout,
    initial: usize,
    clauses: Vec<Clause>,
}

impl HornInstance {
    pub fn num_vars(&self) -> usize {
        self.layout.num_vars()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Literal occurrences over all clauses.
    pub fn num_literals(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn var(&self, p: Position) -> HornVar {
        self.layout.var(p)
    }

    pub fn position(&self, v: HornVar) -> Position {
        self.layout.position(v)
    }

    /// DIMACS CNF with variables numbered from 1.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars(), self.clauses.len());
        for c in &self.clauses {
            for &b in &c.body {
                let _ = write!(out, "-{} ", b + 1);
            }
            if let Some(h) = c.head {
                let _ = write!(out, "{} ", h + 1);
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Flipped-polarity Horn encoding of the game on `dsa`, environment first.
/// `var_cap` bounds the number of input plus output variables enumerated.
pub fn build_horn(
    dsa: &SafetyAutomaton,
    partition: &Partition,
    var_cap: usize,
) -> Result<HornInstance, HornError> {
    if dsa.alphabet() != &partition.alphabet() {
        return Err(HornError::AlphabetMismatch);
    }
    let initial = dsa.initial().ok_or(HornError::EmptyAutomaton)?;
    let vars = partition.inputs().len() + partition.outputs().len();
    if vars > var_cap {
        return Err(HornError::Cap { vars, cap: var_cap });
    }
    let layout = Layout {
        states: dsa.num_states(),
        input_bits: partition.inputs().len(),
        output_bits: partition.outputs().len(),
    };
    let mut clauses = Vec::new();
    for s in 0..layout.states {
        for x in 0..layout.inputs() {
            let px = layout.var(Position::Input(s, x));
            clauses.push(Clause {
                body: vec![px],
                head: Some(layout.var(Position::State(s))),
            });
            clauses.push(Clause {
                body: (0..layout.outputs())
                    .map(|y| layout.var(Position::Move(s, x, y)))
                    .collect(),
                head: Some(px),
            });
            for y in 0..layout.outputs() {
                let head = Some(layout.var(Position::Move(s, x, y)));
                let letter = Letter(x | y << layout.input_bits);
                let body = match dsa.step(s, letter) {
                    Some(d) => vec![layout.var(Position::State(d))],
                    None => vec![],
                };
                clauses.push(Clause { body, head });
            }
        }
    }
    clauses.push(Clause {
        body: vec![layout.var(Position::State(initial))],
        head: None,
    });
    Ok(HornInstance {
        layout,
        initial,
        clauses,
    })
}

/// The propagation closure of the definite clauses: the losing positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeastModel {
    layout: Layout,
    truth: Vec<bool>,
}

impl LeastModel {
    pub fn contains(&self, v: HornVar) -> bool {
        self.truth[v as usize]
    }

    pub fn contains_position(&self, p: Position) -> bool {
        self.contains(self.layout.var(p))
    }

    pub fn is_losing(&self, s: usize) -> bool {
        self.contains_position(Position::State(s))
    }

    pub fn true_vars(&self) -> Vec<HornVar> {
        (0..self.truth.len() as HornVar)
            .filter(|&v| self.truth[v as usize])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornSolution {
    pub satisfiable: bool,
    pub model: LeastModel,
    /// Clause firings plus body-literal visits.
    pub steps: usize,
}

/// Counting-based unit propagation. Every clause fires at most once and
/// every body occurrence is decremented at most once.
pub fn solve_horn(h: &HornInstance) -> HornSolution {
    let n = h.num_vars();
    let mut occurs: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut missing: Vec<usize> = Vec::with_capacity(h.clauses.len());
    let mut ready = Vec::new();
    for (i, c) in h.clauses.iter().enumerate() {
        for &b in &c.body {
            occurs[b as usize].push(i as u32);
        }
        missing.push(c.body.len());
        if c.body.is_empty() {
            ready.push(i as u32);
        }
    }
    let mut truth = vec![false; n];
    let mut steps = 0;
    let mut satisfiable = true;
    while let Some(i) = ready.pop() {
        steps += 1;
        match h.clauses[i as usize].head {
            None => satisfiable = false,
            Some(v) if !truth[v as usize] => {
                truth[v as usize] = true;
                for &j in &occurs[v as usize] {
                    steps += 1;
                    missing[j as usize] -= 1;
                    if missing[j as usize] == 0 {
                        ready.push(j);
                    }
                }
            }
            Some(_) => {}
        }
    }
    HornSolution {
        satisfiable,
        model: LeastModel {
            layout: h.layout,
            truth,
        },
        steps,
    }
}

/// Strategy from the least model: in each reachable winning state and for
/// each input, the first output (in counting order) whose move is not losing.
pub fn horn_strategy(
    solution: &HornSolution,
    dsa: &SafetyAutomaton,
    partition: &Partition,
) -> Result<Transducer, HornError> {
    if !solution.satisfiable {
        return Err(TransducerError::Unrealizable.into());
    }
    let model = &solution.model;
    let layout = model.layout;
    let initial = dsa.initial().ok_or(HornError::EmptyAutomaton)?;
    let mut index = vec![None; layout.states];
    let mut order = vec![initial];
    index[initial] = Some(0);
    let mut table = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let s = order[k];
        k += 1;
        let mut row = Vec::with_capacity(layout.inputs() as usize);
        for x in 0..layout.inputs() {
            let y = (0..layout.outputs())
                .find(|&y| !model.contains_position(Position::Move(s, x, y)))
                .ok_or(TransducerError::LeavesRegion { state: s, input: x })?;
            let d = dsa
                .step(s, Letter(x | y << layout.input_bits))
                .filter(|&d| !model.is_losing(d))
                .ok_or(TransducerError::LeavesRegion { state: s, input: x })?;
            let q = *index[d].get_or_insert_with(|| {
                order.push(d);
                order.len() - 1
            });
            row.push((y, q));
        }
        table.push(row);
    }
    Ok(Transducer::new(
        partition.inputs().to_vec(),
        partition.outputs().to_vec(),
        0,
        table,
    ))
}
