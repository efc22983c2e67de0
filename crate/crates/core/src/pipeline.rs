//! End-to-end solving: formula to minimized automaton, then either game
//! solver, then a strategy.

use std::fmt;

use log::info;
use thiserror::Error;

use crate::dfa::{
    build_bad_prefix_dfa, dualize_to_dsa, encode_symbolic, minimize_dfa, DfaError, ExplicitDfa,
    DEFAULT_STATE_CAP,
};
use crate::game::{winning_region, FirstMover};
use crate::horn::{build_horn, horn_strategy, solve_horn, HornError, DEFAULT_VAR_CAP};
use crate::ltl::{Formula, Partition};
use crate::synth::synthesize_outputs;
use crate::transducer::{build_transducer, Transducer, TransducerError, DEFAULT_TABLE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Realizable,
    Unrealizable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Realizable => "REALIZABLE",
            Verdict::Unrealizable => "UNREALIZABLE",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Horn(#[from] HornError),
    #[error(transparent)]
    Transducer(#[from] TransducerError),
    #[error("the Horn encoding is defined for the environment-first game only")]
    HornNeedsEnvironmentFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub first_mover: FirstMover,
    pub early_termination: bool,
    /// Explicit automaton states.
    pub state_cap: usize,
    /// Input plus output variables the Horn encoding may enumerate.
    pub horn_var_cap: usize,
    /// Strategy table entries (states times input assignments).
    pub table_cap: usize,
    /// Whether to extract a strategy when realizable.
    pub strategy: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            first_mover: FirstMover::Environment,
            early_termination: true,
            state_cap: DEFAULT_STATE_CAP,
            horn_var_cap: DEFAULT_VAR_CAP,
            table_cap: DEFAULT_TABLE_CAP,
            strategy: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub strategy: Option<Transducer>,
    /// Pre-image computations (symbolic) or propagation steps (Horn).
    pub work: usize,
}

/// Minimized bad-prefix automaton of a safety formula.
pub fn prepare(phi: &Formula, partition: &Partition, state_cap: usize) -> Result<ExplicitDfa, DfaError> {
    let dfa = build_bad_prefix_dfa(phi, partition, state_cap)?;
    let min = minimize_dfa(&dfa);
    info!(
        "bad-prefix automaton: {} states, {} after minimization",
        dfa.num_states(),
        min.num_states()
    );
    Ok(min)
}

/// Winning-region fixpoint followed by boolean synthesis of the outputs.
pub fn solve_symbolic(
    dfa: &ExplicitDfa,
    partition: &Partition,
    options: &SolveOptions,
) -> Result<Outcome, SolveError> {
    let mut sdfa = encode_symbolic(dfa, partition);
    let region = winning_region(&mut sdfa, options.first_mover, options.early_termination);
    info!(
        "symbolic fixpoint: {} iterations, {}",
        region.iterations,
        if region.realizable { "initial state winning" } else { "initial state losing" }
    );
    if !region.realizable {
        return Ok(Outcome {
            verdict: Verdict::Unrealizable,
            strategy: None,
            work: region.iterations,
        });
    }
    let strategy = if options.strategy {
        let state_vars = sdfa.state_vars().to_vec();
        let inputs = sdfa.input_vars().to_vec();
        let outputs = sdfa.output_vars().to_vec();
        let eta = sdfa.eta().to_vec();
        let m = sdfa.manager_mut();
        let mut xi = m
            .compose_vector(region.region, &state_vars, &eta)
            .expect("one function per state bit");
        if options.first_mover == FirstMover::Controller {
            xi = m.forall(xi, &inputs);
        }
        let gamma = synthesize_outputs(m, xi, &outputs);
        Some(build_transducer(&sdfa, &region, &gamma, options.table_cap)?)
    } else {
        None
    };
    Ok(Outcome {
        verdict: Verdict::Realizable,
        strategy,
        work: region.iterations,
    })
}

/// Horn encoding of the explicit game, solved by unit propagation.
pub fn solve_horn_game(
    dfa: &ExplicitDfa,
    partition: &Partition,
    options: &SolveOptions,
) -> Result<Outcome, SolveError> {
    if options.first_mover != FirstMover::Environment {
        return Err(SolveError::HornNeedsEnvironmentFirst);
    }
    let dsa = dualize_to_dsa(dfa);
    if dsa.is_empty() {
        return Ok(Outcome {
            verdict: Verdict::Unrealizable,
            strategy: None,
            work: 0,
        });
    }
    let h = build_horn(&dsa, partition, options.horn_var_cap)?;
    let solution = solve_horn(&h);
    info!(
        "Horn instance: {} variables, {} clauses, {} literals, {} propagation steps",
        h.num_vars(),
        h.num_clauses(),
        h.num_literals(),
        solution.steps
    );
    if !solution.satisfiable {
        return Ok(Outcome {
            verdict: Verdict::Unrealizable,
            strategy: None,
            work: solution.steps,
        });
    }
    let strategy = if options.strategy {
        Some(horn_strategy(&solution, &dsa, partition)?)
    } else {
        None
    };
    Ok(Outcome {
        verdict: Verdict::Realizable,
        strategy,
        work: solution.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_ltl, to_nnf};
    use crate::transducer::{validate_strategy, ValidationConfig};

    fn both(f: &str, part: &Partition) -> (Outcome, Outcome) {
        let phi = to_nnf(&parse_ltl(f).unwrap());
        let d = prepare(&phi, part, DEFAULT_STATE_CAP).unwrap();
        let o = SolveOptions::default();
        (
            solve_symbolic(&d, part, &o).unwrap(),
            solve_horn_game(&d, part, &o).unwrap(),
        )
    }

    #[test]
    fn hand_families() {
        let part = Partition::new(["x"], ["y"]).unwrap();
        for (f, verdict) in [
            ("G y", Verdict::Realizable),
            ("G x", Verdict::Unrealizable),
            ("G (x -> X y)", Verdict::Realizable),
            ("G (y & X !y)", Verdict::Unrealizable),
            ("false", Verdict::Unrealizable),
            ("true", Verdict::Realizable),
        ] {
            let (s, h) = both(f, &part);
            assert_eq!(s.verdict, verdict, "{f}");
            assert_eq!(h.verdict, verdict, "{f}");
            let phi = to_nnf(&parse_ltl(f).unwrap());
            for t in [s.strategy, h.strategy].into_iter().flatten() {
                let report = validate_strategy(&t, &phi, &part, &ValidationConfig::default()).unwrap();
                assert!(report.passed(), "{f}: {report}");
            }
        }
    }

    #[test]
    fn symbolic_strategy_for_globally_output() {
        let part = Partition::new(["x"], ["y"]).unwrap();
        let (s, _) = both("G y", &part);
        let t = s.strategy.unwrap();
        assert_eq!(t.num_states(), 1);
        assert_eq!(t.run_step(0, 0), Ok((1, 0)));
        assert_eq!(t.run_step(0, 1), Ok((1, 0)));
    }

    #[test]
    fn controller_first_strategy() {
        let part = Partition::new(["x"], ["y"]).unwrap();
        let phi = to_nnf(&parse_ltl("G (x -> X y)").unwrap());
        let d = prepare(&phi, &part, DEFAULT_STATE_CAP).unwrap();
        let o = SolveOptions {
            first_mover: FirstMover::Controller,
            ..SolveOptions::default()
        };
        let out = solve_symbolic(&d, &part, &o).unwrap();
        assert_eq!(out.verdict, Verdict::Realizable);
        let t = out.strategy.unwrap();
        for q in 0..t.num_states() {
            assert_eq!(t.run_step(q, 0).unwrap().0, t.run_step(q, 1).unwrap().0);
        }
        assert_eq!(solve_horn_game(&d, &part, &o), Err(SolveError::HornNeedsEnvironmentFirst));
    }
}
