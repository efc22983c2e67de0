//! Letter-indexed decision trees used as per-state transition functions.

use std::fmt;

use crate::ltl::{Alphabet, Letter};

/// Conjunction of literals: atoms in `care` are fixed to their bit in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Cube {
    pub care: u64,
    pub value: u64,
}

impl Cube {
    pub const TRUE: Cube = Cube { care: 0, value: 0 };

    pub fn contains(self, letter: Letter) -> bool {
        (letter.0 ^ self.value) & self.care == 0
    }

    pub fn with(self, var: usize, value: bool) -> Cube {
        Cube {
            care: self.care | 1 << var,
            value: if value {
                self.value | 1 << var
            } else {
                self.value & !(1 << var)
            },
        }
    }

    pub fn display<'a>(&self, alphabet: &'a Alphabet) -> CubeDisplay<'a> {
        CubeDisplay {
            cube: *self,
            alphabet,
        }
    }

    /// Parses `true` or a `&`-separated list of literals `a` / `!a`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Option<Cube> {
        let text = text.trim();
        if text == "true" {
            return Some(Cube::TRUE);
        }
        let mut cube = Cube::TRUE;
        for lit in text.split('&') {
            let lit = lit.trim();
            let (name, positive) = match lit.strip_prefix('!') {
                Some(rest) => (rest.trim(), false),
                None => (lit, true),
            };
            let var = alphabet.index_of(name)?;
            if cube.care >> var & 1 == 1 {
                return None;
            }
            cube = cube.with(var, positive);
        }
        Some(cube)
    }
}

pub struct CubeDisplay<'a> {
    cube: Cube,
    alphabet: &'a Alphabet,
}

impl fmt::Display for CubeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cube.care == 0 {
            return f.write_str("true");
        }
        let mut first = true;
        for (i, name) in self.alphabet.names().iter().enumerate() {
            if self.cube.care >> i & 1 == 0 {
                continue;
            }
            if !first {
                f.write_str(" & ")?;
            }
            first = false;
            if self.cube.value >> i & 1 == 0 {
                f.write_str("!")?;
            }
            f.write_str(name)?;
        }
        Ok(())
    }
}

/// Reduced, ordered decision tree over letter bits.
///
/// Variables strictly increase along every path and no branch has equal
/// children, so two trees are equal iff they denote the same function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecisionTree<T> {
    Leaf(T),
    Branch {
        var: usize,
        low: Box<DecisionTree<T>>,
        high: Box<DecisionTree<T>>,
    },
}

impl<T: Clone + Eq> DecisionTree<T> {
    /// Reducing constructor; `var` must be below every variable in the children.
    pub fn branch(var: usize, low: Self, high: Self) -> Self {
        if low == high {
            low
        } else {
            DecisionTree::Branch {
                var,
                low: Box::new(low),
                high: Box::new(high),
            }
        }
    }

    pub fn eval(&self, letter: Letter) -> &T {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(t) => return t,
                DecisionTree::Branch { var, low, high } => {
                    node = if letter.holds(*var) { high } else { low };
                }
            }
        }
    }

    /// Relabels the leaves and re-reduces.
    pub fn map<U: Clone + Eq>(&self, f: &mut impl FnMut(&T) -> U) -> DecisionTree<U> {
        match self {
            DecisionTree::Leaf(t) => DecisionTree::Leaf(f(t)),
            DecisionTree::Branch { var, low, high } => {
                let low = low.map(f);
                let high = high.map(f);
                DecisionTree::branch(*var, low, high)
            }
        }
    }

    /// Disjoint cubes covering all letters, with their leaf values.
    pub fn paths(&self) -> Vec<(Cube, &T)> {
        let mut out = Vec::new();
        self.collect_paths(Cube::TRUE, &mut out);
        out
    }

    fn collect_paths<'a>(&'a self, cube: Cube, out: &mut Vec<(Cube, &'a T)>) {
        match self {
            DecisionTree::Leaf(t) => out.push((cube, t)),
            DecisionTree::Branch { var, low, high } => {
                low.collect_paths(cube.with(*var, false), out);
                high.collect_paths(cube.with(*var, true), out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<&T> {
        self.paths().into_iter().map(|(_, t)| t).collect()
    }

    /// Builds a tree from disjoint cubes that together cover every letter
    /// over `vars` variables. Returns `None` on gaps or overlaps.
    pub fn from_cubes(cubes: &[(Cube, T)], vars: usize) -> Option<Self> {
        let all: Vec<(Cube, &T)> = cubes.iter().map(|(c, t)| (*c, t)).collect();
        Self::build(all, 0, vars)
    }

    fn build(cubes: Vec<(Cube, &T)>, var: usize, vars: usize) -> Option<Self> {
        let remaining = if var >= 64 { 0 } else { !0u64 << var };
        if let Some(pos) = cubes.iter().position(|(c, _)| c.care & remaining == 0) {
            if cubes.len() != 1 {
                return None;
            }
            return Some(DecisionTree::Leaf(cubes[pos].1.clone()));
        }
        if cubes.is_empty() || var >= vars {
            return None;
        }
        let side = |value: bool| -> Vec<(Cube, &T)> {
            cubes
                .iter()
                .filter(|(c, _)| c.care >> var & 1 == 0 || (c.value >> var & 1 == 1) == value)
                .cloned()
                .collect()
        };
        let low = Self::build(side(false), var + 1, vars)?;
        let high = Self::build(side(true), var + 1, vars)?;
        Some(Self::branch(var, low, high))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> Alphabet {
        Alphabet::new(["x", "y", "z"].map(String::from)).unwrap()
    }

    #[test]
    fn branch_reduces_equal_children() {
        let t = DecisionTree::branch(0, DecisionTree::Leaf(1), DecisionTree::Leaf(1));
        assert_eq!(t, DecisionTree::Leaf(1));
    }

    #[test]
    fn map_merges_leaves() {
        let t = DecisionTree::branch(
            0,
            DecisionTree::Leaf(1),
            DecisionTree::branch(1, DecisionTree::Leaf(2), DecisionTree::Leaf(3)),
        );
        let merged = t.map(&mut |v| *v > 0);
        assert_eq!(merged, DecisionTree::Leaf(true));
        assert_eq!(*t.eval(Letter(0b011)), 3);
        assert_eq!(*t.eval(Letter(0b001)), 2);
        assert_eq!(*t.eval(Letter(0b110)), 1);
    }

    #[test]
    fn cubes_round_trip_through_paths() {
        let a = alphabet();
        let t = DecisionTree::branch(
            0,
            DecisionTree::Leaf(0),
            DecisionTree::branch(2, DecisionTree::Leaf(1), DecisionTree::Leaf(2)),
        );
        let paths: Vec<(Cube, usize)> = t.paths().into_iter().map(|(c, v)| (c, *v)).collect();
        let text: Vec<String> = paths
            .iter()
            .map(|(c, _)| c.display(&a).to_string())
            .collect();
        assert_eq!(text, ["!x", "x & !z", "x & z"]);
        for (c, _) in &paths {
            assert_eq!(Cube::parse(&c.display(&a).to_string(), &a), Some(*c));
        }
        assert_eq!(DecisionTree::from_cubes(&paths, 3), Some(t));
    }

    #[test]
    fn from_cubes_rejects_gaps_and_overlaps() {
        let a = alphabet();
        let x = Cube::parse("x", &a).unwrap();
        let nx = Cube::parse("!x", &a).unwrap();
        let y = Cube::parse("y", &a).unwrap();
        assert_eq!(DecisionTree::from_cubes(&[(x, 0)], 3), None);
        assert_eq!(DecisionTree::from_cubes(&[(x, 0), (nx, 1), (y, 1)], 3), None);
        assert_eq!(
            DecisionTree::from_cubes(&[(x, 0), (nx, 0)], 3),
            Some(DecisionTree::Leaf(0))
        );
        assert_eq!(Cube::parse("x & !x", &a), None);
        assert_eq!(Cube::parse("w", &a), None);
    }
}
