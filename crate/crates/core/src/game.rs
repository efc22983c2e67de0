//! The symbolic method: greatest-fixpoint computation of the winning region
//! over a bit-encoded automaton.

use std::fmt;
use std::str::FromStr;

use log::debug;

use crate::bdd::NodeRef;
use crate::dfa::SymbolicDfa;

/// Who chooses first in each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FirstMover {
    #[default]
    Environment,
    Controller,
}

impl FromStr for FirstMover {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "env" => Ok(FirstMover::Environment),
            "ctrl" => Ok(FirstMover::Controller),
            other => Err(format!("unknown first mover `{other}` (expected env or ctrl)")),
        }
    }
}

impl fmt::Display for FirstMover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FirstMover::Environment => "env",
            FirstMover::Controller => "ctrl",
        })
    }
}

/// States from which the controller can force the successor into `w`:
/// `∀X ∃Y w(η)` when the environment moves first, `∃Y ∀X w(η)` otherwise.
///
/// Panics if `w` depends on input or output variables.
pub fn preimage(sdfa: &mut SymbolicDfa, w: NodeRef, first: FirstMover) -> NodeRef {
    let nz = sdfa.state_vars().len();
    assert!(
        sdfa.manager().support(w).iter().all(|&v| v < nz),
        "a region may only mention state variables"
    );
    let state_vars = sdfa.state_vars().to_vec();
    let inputs = sdfa.input_vars().to_vec();
    let outputs = sdfa.output_vars().to_vec();
    let eta = sdfa.eta().to_vec();
    let m = sdfa.manager_mut();
    let next = m
        .compose_vector(w, &state_vars, &eta)
        .expect("one function per state bit");
    match first {
        FirstMover::Environment => {
            let e = m.exists(next, &outputs);
            m.forall(e, &inputs)
        }
        FirstMover::Controller => {
            let a = m.forall(next, &inputs);
            m.exists(a, &outputs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningRegion {
    /// Final region, or the first region that lost the initial state when
    /// stopped early.
    pub region: NodeRef,
    /// `w_0, w_1, …` as computed.
    pub history: Vec<NodeRef>,
    /// Pre-image computations performed.
    pub iterations: usize,
    pub realizable: bool,
    pub first_mover: FirstMover,
    /// Whether the loop reached a fixpoint (as opposed to stopping early).
    pub converged: bool,
}

/// Iterates `w_{i+1} = w_i ∧ pre(w_i)` from `w_0 = ¬f`. The loop stops at a
/// fixpoint, when the region becomes empty, or, with `early_termination`, as
/// soon as the initial state drops out.
pub fn winning_region(sdfa: &mut SymbolicDfa, first: FirstMover, early_termination: bool) -> WinningRegion {
    let nz = sdfa.state_vars().len();
    let initial_ok = |s: &SymbolicDfa, w: NodeRef| s.manager().eval_with(w, |_| false);
    let f = sdfa.accepting();
    let mut w = sdfa.manager_mut().not(f);
    let mut history = vec![w];
    let mut iterations = 0;
    let mut converged = false;
    loop {
        if early_termination && !initial_ok(sdfa, w) {
            break;
        }
        if sdfa.manager().is_false(w) {
            converged = true;
            break;
        }
        let pre = preimage(sdfa, w, first);
        let next = sdfa.manager_mut().and(w, pre);
        iterations += 1;
        debug!(
            "iteration {iterations}: {} nodes, {} states",
            sdfa.manager().node_count(next),
            sdfa.manager().sat_count(next, nz)
        );
        history.push(next);
        if next == w {
            converged = true;
            break;
        }
        w = next;
    }
    WinningRegion {
        region: w,
        realizable: initial_ok(sdfa, w),
        history,
        iterations,
        first_mover: first,
        converged,
    }
}
