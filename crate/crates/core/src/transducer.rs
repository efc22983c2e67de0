//! Explicit strategy machines: stepping, play-out validation and
//! serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdd::NodeRef;
use crate::dfa::{
    build_bad_prefix_dfa, Cube, DecisionTree, DfaError, ExplicitDfa, SymbolicDfa, DEFAULT_STATE_CAP,
};
use crate::game::WinningRegion;
use crate::ltl::{Alphabet, Formula, Letter, Partition};

pub const DEFAULT_TABLE_CAP: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransducerError {
    #[error("state {0} is not a state of the transducer")]
    UnknownState(usize),
    #[error("input assignment {0:#b} is out of range")]
    UnknownInput(u64),
    #[error("no strategy exists: the formula is unrealizable")]
    Unrealizable,
    #[error("strategy enumeration exceeded the cap of {0} table entries")]
    Cap(usize),
    #[error("strategy leaves the winning region from state {state} on input {input:#b}")]
    LeavesRegion { state: usize, input: u64 },
    #[error("unknown export format `{0}` (expected dot or json)")]
    UnknownFormat(String),
    #[error("malformed transducer JSON: {0}")]
    Json(String),
}

/// Deterministic Mealy machine over input and output assignments.
///
/// Inputs and outputs are bit vectors: bit `i` of an input assignment is the
/// `i`-th input name, likewise for outputs. States are dense indices; `ids`
/// carries the external names used in serialized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    inputs: Vec<String>,
    outputs: Vec<String>,
    ids: Vec<u64>,
    initial: usize,
    /// `table[q][x] = (output, successor)`
    table: Vec<Vec<(u64, usize)>>,
}

impl Transducer {
    /// Panics if a row does not have one entry per input assignment or a
    /// successor is out of range.
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        initial: usize,
        table: Vec<Vec<(u64, usize)>>,
    ) -> Self {
        let ids = (0..table.len() as u64).collect();
        Self::with_ids(inputs, outputs, ids, initial, table)
    }

    fn with_ids(
        inputs: Vec<String>,
        outputs: Vec<String>,
        ids: Vec<u64>,
        initial: usize,
        table: Vec<Vec<(u64, usize)>>,
    ) -> Self {
        assert!(initial < table.len());
        assert!(inputs.len() < 32 && outputs.len() <= 64);
        for row in &table {
            assert_eq!(row.len(), 1 << inputs.len());
            assert!(row.iter().all(|&(_, q)| q < table.len()));
        }
        Transducer {
            inputs,
            outputs,
            ids,
            initial,
            table,
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.table.len()
    }

    pub fn input_count(&self) -> u64 {
        1 << self.inputs.len()
    }

    /// Output and successor for input assignment `x` in state `q`.
    pub fn run_step(&self, q: usize, x: u64) -> Result<(u64, usize), TransducerError> {
        let row = self.table.get(q).ok_or(TransducerError::UnknownState(q))?;
        row.get(x as usize)
            .copied()
            .ok_or(TransducerError::UnknownInput(x))
    }

    /// Outputs produced along an input sequence from the initial state.
    pub fn run(&self, inputs: &[u64]) -> Result<Vec<u64>, TransducerError> {
        let mut q = self.initial;
        let mut out = Vec::with_capacity(inputs.len());
        for &x in inputs {
            let (y, next) = self.run_step(q, x)?;
            out.push(y);
            q = next;
        }
        Ok(out)
    }

    /// Replaces one output entry, keeping the successor.
    pub fn override_output(&mut self, q: usize, x: u64, y: u64) {
        self.table[q][x as usize].0 = y;
    }

    /// The letter over inputs then outputs formed by `x` and `y`.
    pub fn letter(&self, x: u64, y: u64) -> Letter {
        Letter(x | y << self.inputs.len())
    }

    pub fn to_json(&self) -> String {
        let bits = |names: &[String], v: u64| -> BTreeMap<String, bool> {
            names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), v >> i & 1 == 1))
                .collect()
        };
        let mut transitions = Vec::new();
        for (q, row) in self.table.iter().enumerate() {
            for (x, &(y, next)) in row.iter().enumerate() {
                transitions.push(JsonTransition {
                    from: self.ids[q],
                    input: bits(&self.inputs, x as u64),
                    output: bits(&self.outputs, y),
                    to: self.ids[next],
                });
            }
        }
        let doc = JsonTransducer {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: self.ids[self.initial],
            states: self.ids.clone(),
            transitions,
        };
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }

    /// Reads the JSON form. Input objects may omit variables; an omitted
    /// variable stands for both values.
    pub fn from_json(text: &str) -> Result<Self, TransducerError> {
        let bad = |m: String| TransducerError::Json(m);
        let doc: JsonTransducer = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if doc.inputs.len() >= 32 || doc.outputs.len() > 64 {
            return Err(bad("too many variables".into()));
        }
        let index: BTreeMap<u64, usize> =
            doc.states.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        if index.len() != doc.states.len() {
            return Err(bad("duplicate state id".into()));
        }
        let lookup = |id: u64| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| bad(format!("unknown state {id}")))
        };
        let position = |names: &[String], name: &str| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| bad(format!("unknown variable `{name}`")))
        };
        let n_inputs = 1usize << doc.inputs.len();
        let mut table: Vec<Vec<Option<(u64, usize)>>> = vec![vec![None; n_inputs]; doc.states.len()];
        for t in &doc.transitions {
            let from = lookup(t.from)?;
            let to = lookup(t.to)?;
            let mut cube = Cube::TRUE;
            for (name, &v) in &t.input {
                cube = cube.with(position(&doc.inputs, name)?, v);
            }
            let mut y = 0u64;
            for (name, &v) in &t.output {
                if v {
                    y |= 1 << position(&doc.outputs, name)?;
                }
            }
            if t.output.len() != doc.outputs.len() {
                return Err(bad("every output must be assigned".into()));
            }
            for x in 0..n_inputs as u64 {
                if cube.contains(Letter(x)) {
                    let slot = &mut table[from][x as usize];
                    if slot.is_some_and(|old| old != (y, to)) {
                        return Err(bad(format!("conflicting transitions from state {}", t.from)));
                    }
                    *slot = Some((y, to));
                }
            }
        }
        let table = table
            .into_iter()
            .zip(&doc.states)
            .map(|(row, id)| {
                row.into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad(format!("state {id} lacks a transition for some input")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let initial = lookup(doc.initial)?;
        Ok(Self::with_ids(doc.inputs, doc.outputs, doc.states, initial, table))
    }

    /// Graphviz rendering with inputs grouped into cubes per target and output.
    pub fn to_dot(&self) -> String {
        let in_alpha = Alphabet::new(self.inputs.iter().cloned()).expect("distinct names");
        let out_alpha = Alphabet::new(self.outputs.iter().cloned()).expect("distinct names");
        let all_outputs = if self.outputs.len() == 64 { !0 } else { (1u64 << self.outputs.len()) - 1 };
        let mut out = String::from("digraph strategy {\n  rankdir=LR;\n");
        let _ = writeln!(out, "  init [shape=point];");
        let _ = writeln!(out, "  init -> s{};", self.ids[self.initial]);
        for (q, row) in self.table.iter().enumerate() {
            let _ = writeln!(out, "  s{0} [label=\"{0}\"];", self.ids[q]);
            let full = (1u64 << self.inputs.len()) - 1;
            let cubes: Vec<(Cube, (u64, usize))> = row
                .iter()
                .enumerate()
                .map(|(x, &e)| (Cube { care: full, value: x as u64 }, e))
                .collect();
            let tree = DecisionTree::from_cubes(&cubes, self.inputs.len()).expect("total table");
            for (cube, &(y, next)) in tree.paths() {
                let y_cube = Cube { care: all_outputs, value: y };
                let _ = writeln!(
                    out,
                    "  s{} -> s{} [label=\"{} / {}\"];",
                    self.ids[q],
                    self.ids[next],
                    cube.display(&in_alpha),
                    y_cube.display(&out_alpha)
                );
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Dot => self.to_dot(),
            ExportFormat::Json => self.to_json(),
        }
    }
}

/// Explicit machine over the winning encodings reachable from the initial
/// one. `gamma` holds one function per output over state and input
/// variables; successors follow the automaton's bit functions. `cap` bounds
/// states times input assignments.
pub fn build_transducer(
    sdfa: &SymbolicDfa,
    region: &WinningRegion,
    gamma: &[NodeRef],
    cap: usize,
) -> Result<Transducer, TransducerError> {
    if !region.realizable {
        return Err(TransducerError::Unrealizable);
    }
    assert_eq!(gamma.len(), sdfa.output_vars().len());
    let ni = sdfa.input_vars().len();
    if ni >= 32 {
        return Err(TransducerError::Cap(cap));
    }
    let inputs = 1u64 << ni;
    let in_region = |z: u64| sdfa.eval_at(region.region, z, Letter(0));
    let mut codes = vec![0u64];
    let mut index = std::collections::HashMap::from([(0u64, 0usize)]);
    let mut table = Vec::new();
    let mut k = 0;
    while k < codes.len() {
        if codes.len() as u64 * inputs > cap as u64 {
            return Err(TransducerError::Cap(cap));
        }
        let z = codes[k];
        let mut row = Vec::with_capacity(inputs as usize);
        for x in 0..inputs {
            let y = gamma
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &g)| acc | u64::from(sdfa.eval_at(g, z, Letter(x))) << i);
            let next = sdfa.step(z, Letter(x | y << ni));
            if !in_region(next) {
                return Err(TransducerError::LeavesRegion {
                    state: k,
                    input: x,
                });
            }
            let q = *index.entry(next).or_insert_with(|| {
                codes.push(next);
                codes.len() - 1
            });
            row.push((y, q));
        }
        table.push(row);
        k += 1;
    }
    let names = |vars: &[usize]| -> Vec<String> {
        vars.iter()
            .map(|&v| sdfa.manager().var_name(v).to_string())
            .collect()
    };
    Ok(Transducer::new(
        names(sdfa.input_vars()),
        names(sdfa.output_vars()),
        0,
        table,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = TransducerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(TransducerError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTransducer {
    inputs: Vec<String>,
    outputs: Vec<String>,
    initial: u64,
    states: Vec<u64>,
    transitions: Vec<JsonTransition>,
}

#[derive(Serialize, Deserialize)]
struct JsonTransition {
    from: u64,
    input: BTreeMap<String, bool>,
    output: BTreeMap<String, bool>,
    to: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationConfig {
    pub random_plays: usize,
    pub adversarial_plays: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            random_plays: 1000,
            adversarial_plays: 100,
            horizon: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub play: usize,
    pub adversarial: bool,
    /// Input assignments up to and including the violating step.
    pub inputs: Vec<u64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub violations: usize,
    pub first_violation: Option<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        write!(
            f,
            "{} random + {} adversarial plays, horizon {}, seed {}: {} violations",
            c.random_plays, c.adversarial_plays, c.horizon, c.seed, self.violations
        )?;
        if let Some(v) = &self.first_violation {
            write!(f, " (first: play {}, {} after inputs {:?})", v.play, v.reason, v.inputs)?;
        }
        Ok(())
    }
}

/// Plays the strategy against random and one-step-lookahead adversarial
/// environments while running the bad-prefix automaton of `phi` alongside.
pub fn validate_strategy(
    t: &Transducer,
    phi: &Formula,
    partition: &Partition,
    config: &ValidationConfig,
) -> Result<ValidationReport, DfaError> {
    let dfa = build_bad_prefix_dfa(phi, partition, DEFAULT_STATE_CAP)?;
    Ok(validate_with_dfa(t, &dfa, config))
}

/// As [`validate_strategy`] with a prebuilt bad-prefix automaton whose
/// alphabet lists the transducer's inputs, then its outputs.
pub fn validate_with_dfa(t: &Transducer, dfa: &ExplicitDfa, config: &ValidationConfig) -> ValidationReport {
    let names: Vec<&String> = t.inputs.iter().chain(&t.outputs).collect();
    assert!(
        names.iter().copied().eq(dfa.alphabet().names()),
        "automaton alphabet must be the transducer's inputs then outputs"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = ValidationReport {
        config: *config,
        violations: 0,
        first_violation: None,
    };
    let outputs = 1u64 << t.outputs.len().min(63);
    let total = config.random_plays + config.adversarial_plays;
    for play in 0..total {
        let adversarial = play >= config.random_plays;
        let mut q = t.initial;
        let mut d = dfa.initial();
        let mut history = Vec::new();
        let mut failure = dfa
            .is_accepting(d)
            .then(|| "the empty play is already a bad prefix".to_string());
        for _ in 0..config.horizon {
            if failure.is_some() {
                break;
            }
            let x = if adversarial {
                // the input leaving the fewest safe outputs, ties broken at random
                let mut best = Vec::new();
                let mut fewest = u64::MAX;
                for x in 0..t.input_count() {
                    let safe = (0..outputs)
                        .filter(|&y| !dfa.is_accepting(dfa.next(d, t.letter(x, y))))
                        .count() as u64;
                    if safe < fewest {
                        fewest = safe;
                        best.clear();
                    }
                    if safe == fewest {
                        best.push(x);
                    }
                }
                best[rng.gen_range(0..best.len())]
            } else {
                rng.gen_range(0..t.input_count())
            };
            history.push(x);
            match t.run_step(q, x) {
                Err(e) => failure = Some(e.to_string()),
                Ok((y, next)) => {
                    q = next;
                    d = dfa.next(d, t.letter(x, y));
                    if dfa.is_accepting(d) {
                        failure = Some("the play reached a bad prefix".to_string());
                    }
                }
            }
        }
        if let Some(reason) = failure {
            report.violations += 1;
            report.first_violation.get_or_insert(Violation {
                play,
                adversarial,
                inputs: history,
                reason,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_ltl, to_nnf};

    /// Always outputs y, one state.
    fn always_y() -> Transducer {
        Transducer::new(
            vec!["x".into()],
            vec!["y".into()],
            0,
            vec![vec![(1, 0), (1, 0)]],
        )
    }

    #[test]
    fn stepping() {
        let t = always_y();
        assert_eq!(t.run_step(0, 1), Ok((1, 0)));
        assert_eq!(t.run_step(3, 0), Err(TransducerError::UnknownState(3)));
        assert_eq!(t.run(&[0, 1, 1]), Ok(vec![1, 1, 1]));
    }

    #[test]
    fn json_round_trip_and_dont_cares() {
        let t = always_y();
        let text = t.to_json();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["states"].as_array().unwrap().len(), 1);
        assert_eq!(doc["transitions"].as_array().unwrap().len(), 2);
        assert_eq!(Transducer::from_json(&text).unwrap(), t);

        let compact = r#"{"inputs":["x"],"outputs":["y"],"initial":4,"states":[4],
            "transitions":[{"from":4,"input":{},"output":{"y":true},"to":4}]}"#;
        let u = Transducer::from_json(compact).unwrap();
        for x in 0..2 {
            assert_eq!(u.run_step(0, x), t.run_step(0, x));
        }
        let gap = r#"{"inputs":["x"],"outputs":["y"],"initial":0,"states":[0],
            "transitions":[{"from":0,"input":{"x":true},"output":{"y":true},"to":0}]}"#;
        assert!(Transducer::from_json(gap).is_err());
    }

    #[test]
    fn dot_groups_inputs() {
        let dot = always_y().to_dot();
        assert!(dot.contains("s0 -> s0 [label=\"true / y\"]"), "{dot}");
        let controller_only = Transducer::new(vec![], vec!["y".into()], 0, vec![vec![(0, 0)]]);
        assert_eq!(controller_only.to_dot().matches("->").count(), 2);
        assert_eq!(
            "svg".parse::<ExportFormat>(),
            Err(TransducerError::UnknownFormat("svg".into()))
        );
    }

    #[test]
    fn validation_detects_corruption() {
        let phi = to_nnf(&parse_ltl("G y").unwrap());
        let part = Partition::new(["x"], ["y"]).unwrap();
        let config = ValidationConfig {
            seed: 3,
            ..ValidationConfig::default()
        };
        let good = validate_strategy(&always_y(), &phi, &part, &config).unwrap();
        assert!(good.passed(), "{good}");
        let mut bad = always_y();
        bad.override_output(0, 1, 0);
        let report = validate_strategy(&bad, &phi, &part, &config).unwrap();
        assert!(report.violations >= 1);
        assert!(report.to_string().contains("horizon 50, seed 3"));
    }
}
