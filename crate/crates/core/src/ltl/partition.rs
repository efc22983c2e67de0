use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{Alphabet, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("line {0}: expected `.inputs` or `.outputs`")]
    BadLine(usize),
    #[error("line {0}: `{1}` declared twice")]
    DuplicateSection(usize, String),
    #[error("`{0}` is not a valid proposition name")]
    BadName(String),
    #[error("`{0}` is both an input and an output")]
    Overlap(String),
    #[error("`{0}` is declared more than once")]
    DuplicateName(String),
    #[error("atom `{0}` of the formula is neither an input nor an output")]
    Uncovered(String),
    #[error("too many propositions ({0}); at most 64 are supported")]
    TooManyAtoms(usize),
}

/// Split of the propositions into environment inputs and controller outputs.
/// Declaration order is kept; it fixes the letter bit layout (inputs first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    inputs: Vec<String>,
    outputs: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "true" | "false" | "X" | "U" | "R" | "G" | "F")
}

impl Partition {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Result<Self, PartitionError>
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in inputs.iter() {
            if !valid_name(name) {
                return Err(PartitionError::BadName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(PartitionError::DuplicateName(name.clone()));
            }
        }
        let input_set = seen.clone();
        for name in outputs.iter() {
            if !valid_name(name) {
                return Err(PartitionError::BadName(name.clone()));
            }
            if input_set.contains(name.as_str()) {
                return Err(PartitionError::Overlap(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(PartitionError::DuplicateName(name.clone()));
            }
        }
        if seen.len() > 64 {
            return Err(PartitionError::TooManyAtoms(seen.len()));
        }
        Ok(Partition { inputs, outputs })
    }

    /// Parses the two-line `.inputs a b` / `.outputs c d` format. Either line
    /// may come first; a missing line declares no propositions of that kind.
    pub fn parse(text: &str) -> Result<Self, PartitionError> {
        let mut inputs: Option<Vec<String>> = None;
        let mut outputs: Option<Vec<String>> = None;
        for (n, line) in text.lines().enumerate() {
            let mut words = line.split_whitespace();
            let Some(head) = words.next() else { continue };
            let slot = match head {
                ".inputs" => &mut inputs,
                ".outputs" => &mut outputs,
                _ => return Err(PartitionError::BadLine(n + 1)),
            };
            if slot.is_some() {
                return Err(PartitionError::DuplicateSection(n + 1, head.to_string()));
            }
            *slot = Some(words.map(str::to_string).collect());
        }
        Partition::new(inputs.unwrap_or_default(), outputs.unwrap_or_default())
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// Inputs followed by outputs.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.inputs.iter().chain(self.outputs.iter()).cloned())
            .expect("partition names are distinct")
    }

    /// Checks that every atom of `f` is declared.
    pub fn check_covers(&self, f: &Formula) -> Result<(), PartitionError> {
        for atom in f.atoms() {
            if !self.inputs.contains(&atom) && !self.outputs.contains(&atom) {
                return Err(PartitionError::Uncovered(atom));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, ".inputs {}", self.inputs.join(" "))?;
        writeln!(f, ".outputs {}", self.outputs.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    #[test]
    fn parses_either_order() {
        let a = Partition::parse(".inputs a b\n.outputs c\n").unwrap();
        let b = Partition::parse("\n.outputs c\n  .inputs a   b\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.inputs(), ["a", "b"]);
        assert_eq!(a.outputs(), ["c"]);
        assert_eq!(Partition::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn controller_only_partition() {
        let p = Partition::parse(".outputs y\n").unwrap();
        assert!(p.inputs().is_empty());
        let p = Partition::parse(".inputs\n.outputs y\n").unwrap();
        assert!(p.inputs().is_empty());
    }

    #[test]
    fn rejects_malformed_files() {
        assert_eq!(
            Partition::parse(".inputs a\n.outputs a\n"),
            Err(PartitionError::Overlap("a".into()))
        );
        assert_eq!(Partition::parse("inputs a\n"), Err(PartitionError::BadLine(1)));
        assert!(matches!(
            Partition::parse(".inputs a\n.inputs b\n"),
            Err(PartitionError::DuplicateSection(2, _))
        ));
        assert_eq!(
            Partition::parse(".inputs 1a\n"),
            Err(PartitionError::BadName("1a".into()))
        );
        assert_eq!(
            Partition::parse(".inputs a a\n"),
            Err(PartitionError::DuplicateName("a".into()))
        );
    }

    #[test]
    fn coverage() {
        let p = Partition::new(["x"], ["y"]).unwrap();
        assert!(p.check_covers(&parse_ltl("G (x -> X y)").unwrap()).is_ok());
        assert!(p.check_covers(&parse_ltl("G y").unwrap()).is_ok());
        assert_eq!(
            p.check_covers(&parse_ltl("G z").unwrap()),
            Err(PartitionError::Uncovered("z".into()))
        );
    }
}
