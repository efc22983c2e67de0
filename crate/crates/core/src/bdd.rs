//! Reduced ordered binary decision diagrams with a fixed variable order.
//!
//! Variable `i` sits at level `i`; lower indices are closer to the root.
//! Nodes are hash-consed in a unique table, so two references are equal iff
//! they denote the same function. A [`NodeRef`] remembers which manager made
//! it, and passing it to another manager panics.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

pub type VarId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("assignment leaves variable {0} of the support unset")]
    IncompleteAssignment(VarId),
    #[error("substitution lists {vars} variables but {funcs} functions")]
    SubstitutionMismatch { vars: usize, funcs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    manager: u32,
    index: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    low: u32,
    high: u32,
}

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL: u32 = u32::MAX;
const CACHE_LIMIT: usize = 1 << 22;

static NEXT_MANAGER: AtomicU32 = AtomicU32::new(0);

pub struct Manager {
    id: u32,
    names: Vec<String>,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    ite_cache: HashMap<(u32, u32, u32), u32>,
}

impl Default for Manager {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for Manager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Manager")
            .field("vars", &self.names)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl Manager {
    pub fn new() -> Self {
        let terminal = |v| Node {
            var: TERMINAL,
            low: v,
            high: v,
        };
        Manager {
            id: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            names: Vec::new(),
            nodes: vec![terminal(FALSE), terminal(TRUE)],
            unique: HashMap::new(),
            ite_cache: HashMap::new(),
        }
    }

    /// Appends a variable below all existing ones.
    pub fn new_var(&mut self, name: impl Into<String>) -> VarId {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    /// Number of nodes ever created, terminals included.
    pub fn total_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn wrap(&self, index: u32) -> NodeRef {
        NodeRef {
            manager: self.id,
            index,
        }
    }

    fn raw(&self, f: NodeRef) -> u32 {
        assert_eq!(
            f.manager, self.id,
            "diagram node used with a manager that did not create it"
        );
        f.index
    }

    pub fn constant(&self, value: bool) -> NodeRef {
        self.wrap(if value { TRUE } else { FALSE })
    }

    pub fn one(&self) -> NodeRef {
        self.constant(true)
    }

    pub fn zero(&self) -> NodeRef {
        self.constant(false)
    }

    pub fn is_true(&self, f: NodeRef) -> bool {
        self.raw(f) == TRUE
    }

    pub fn is_false(&self, f: NodeRef) -> bool {
        self.raw(f) == FALSE
    }

    pub fn is_constant(&self, f: NodeRef) -> bool {
        self.raw(f) <= TRUE
    }

    /// The projection function of `v`. Panics if `v` was never declared.
    pub fn var(&mut self, v: VarId) -> NodeRef {
        assert!(v < self.num_vars(), "undeclared variable {v}");
        let i = self.mk(v as u32, FALSE, TRUE);
        self.wrap(i)
    }

    pub fn literal(&mut self, v: VarId, positive: bool) -> NodeRef {
        assert!(v < self.num_vars(), "undeclared variable {v}");
        let i = if positive {
            self.mk(v as u32, FALSE, TRUE)
        } else {
            self.mk(v as u32, TRUE, FALSE)
        };
        self.wrap(i)
    }

    /// Top variable of a non-constant node.
    pub fn top_var(&self, f: NodeRef) -> Option<VarId> {
        let n = self.nodes[self.raw(f) as usize];
        (n.var != TERMINAL).then_some(n.var as usize)
    }

    /// `(low, high)` children of a non-constant node.
    pub fn children(&self, f: NodeRef) -> Option<(NodeRef, NodeRef)> {
        let n = self.nodes[self.raw(f) as usize];
        (n.var != TERMINAL).then(|| (self.wrap(n.low), self.wrap(n.high)))
    }

    fn mk(&mut self, var: u32, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        let node = Node { var, low, high };
        if let Some(&i) = self.unique.get(&node) {
            return i;
        }
        let i = u32::try_from(self.nodes.len()).expect("node table overflow");
        self.nodes.push(node);
        self.unique.insert(node, i);
        i
    }

    fn level(&self, i: u32) -> u32 {
        self.nodes[i as usize].var
    }

    fn cofactors(&self, i: u32, var: u32) -> (u32, u32) {
        let n = self.nodes[i as usize];
        if n.var == var {
            (n.low, n.high)
        } else {
            (i, i)
        }
    }

    fn ite_raw(&mut self, f: u32, g: u32, h: u32) -> u32 {
        if f == TRUE {
            return g;
        }
        if f == FALSE {
            return h;
        }
        if g == h {
            return g;
        }
        if g == TRUE && h == FALSE {
            return f;
        }
        if let Some(&r) = self.ite_cache.get(&(f, g, h)) {
            return r;
        }
        let top = self.level(f).min(self.level(g)).min(self.level(h));
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let (h0, h1) = self.cofactors(h, top);
        let low = self.ite_raw(f0, g0, h0);
        let high = self.ite_raw(f1, g1, h1);
        let r = self.mk(top, low, high);
        if self.ite_cache.len() >= CACHE_LIMIT {
            self.ite_cache.clear();
        }
        self.ite_cache.insert((f, g, h), r);
        r
    }

    pub fn ite(&mut self, f: NodeRef, g: NodeRef, h: NodeRef) -> NodeRef {
        let (f, g, h) = (self.raw(f), self.raw(g), self.raw(h));
        let r = self.ite_raw(f, g, h);
        self.wrap(r)
    }

    pub fn not(&mut self, f: NodeRef) -> NodeRef {
        let (t, e) = (self.zero(), self.one());
        self.ite(f, t, e)
    }

    pub fn and(&mut self, f: NodeRef, g: NodeRef) -> NodeRef {
        let e = self.zero();
        self.ite(f, g, e)
    }

    pub fn or(&mut self, f: NodeRef, g: NodeRef) -> NodeRef {
        let t = self.one();
        self.ite(f, t, g)
    }

    pub fn xor(&mut self, f: NodeRef, g: NodeRef) -> NodeRef {
        let ng = self.not(g);
        self.ite(f, ng, g)
    }

    pub fn iff(&mut self, f: NodeRef, g: NodeRef) -> NodeRef {
        let ng = self.not(g);
        self.ite(f, g, ng)
    }

    pub fn implies(&mut self, f: NodeRef, g: NodeRef) -> NodeRef {
        let t = self.one();
        self.ite(f, g, t)
    }

    /// Whether `f` implies `g` everywhere.
    pub fn leq(&mut self, f: NodeRef, g: NodeRef) -> bool {
        let h = self.implies(f, g);
        self.is_true(h)
    }

    pub fn and_all(&mut self, fs: impl IntoIterator<Item = NodeRef>) -> NodeRef {
        let mut acc = self.one();
        for f in fs {
            acc = self.and(acc, f);
        }
        acc
    }

    pub fn or_all(&mut self, fs: impl IntoIterator<Item = NodeRef>) -> NodeRef {
        let mut acc = self.zero();
        for f in fs {
            acc = self.or(acc, f);
        }
        acc
    }

    /// `f` with `v` fixed to `value`.
    pub fn cofactor(&mut self, f: NodeRef, v: VarId, value: bool) -> NodeRef {
        let f = self.raw(f);
        let mut memo = HashMap::new();
        let r = self.cofactor_raw(f, v as u32, value, &mut memo);
        self.wrap(r)
    }

    fn cofactor_raw(&mut self, f: u32, v: u32, value: bool, memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.nodes[f as usize];
        if n.var == TERMINAL || n.var > v {
            return f;
        }
        if n.var == v {
            return if value { n.high } else { n.low };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let low = self.cofactor_raw(n.low, v, value, memo);
        let high = self.cofactor_raw(n.high, v, value, memo);
        let r = self.mk(n.var, low, high);
        memo.insert(f, r);
        r
    }

    fn quantify(&mut self, f: NodeRef, vars: &[VarId], existential: bool) -> NodeRef {
        let f = self.raw(f);
        let mut mask = vec![false; self.num_vars()];
        for &v in vars {
            assert!(v < self.num_vars(), "undeclared variable {v}");
            mask[v] = true;
        }
        let deepest = vars.iter().copied().max().map_or(0, |v| v as u32 + 1);
        let mut memo = HashMap::new();
        let r = self.quantify_raw(f, &mask, deepest, existential, &mut memo);
        self.wrap(r)
    }

    fn quantify_raw(
        &mut self,
        f: u32,
        mask: &[bool],
        deepest: u32,
        existential: bool,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        let n = self.nodes[f as usize];
        if n.var == TERMINAL || n.var >= deepest {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let low = self.quantify_raw(n.low, mask, deepest, existential, memo);
        let high = self.quantify_raw(n.high, mask, deepest, existential, memo);
        let r = if mask[n.var as usize] {
            if existential {
                self.ite_raw(low, TRUE, high)
            } else {
                self.ite_raw(low, high, FALSE)
            }
        } else {
            self.mk(n.var, low, high)
        };
        memo.insert(f, r);
        r
    }

    pub fn exists(&mut self, f: NodeRef, vars: &[VarId]) -> NodeRef {
        self.quantify(f, vars, true)
    }

    pub fn forall(&mut self, f: NodeRef, vars: &[VarId]) -> NodeRef {
        self.quantify(f, vars, false)
    }

    /// Simultaneous substitution of `funcs[i]` for `vars[i]`. Variables not
    /// listed are left in place.
    pub fn compose_vector(
        &mut self,
        f: NodeRef,
        vars: &[VarId],
        funcs: &[NodeRef],
    ) -> Result<NodeRef, BddError> {
        if vars.len() != funcs.len() {
            return Err(BddError::SubstitutionMismatch {
                vars: vars.len(),
                funcs: funcs.len(),
            });
        }
        let f = self.raw(f);
        let mut subst: Vec<Option<u32>> = vec![None; self.num_vars()];
        for (&v, &g) in vars.iter().zip(funcs) {
            assert!(v < self.num_vars(), "undeclared variable {v}");
            subst[v] = Some(self.raw(g));
        }
        let mut memo = HashMap::new();
        let r = self.compose_raw(f, &subst, &mut memo);
        Ok(self.wrap(r))
    }

    fn compose_raw(&mut self, f: u32, subst: &[Option<u32>], memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.nodes[f as usize];
        if n.var == TERMINAL {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let low = self.compose_raw(n.low, subst, memo);
        let high = self.compose_raw(n.high, subst, memo);
        let guard = match subst[n.var as usize] {
            Some(g) => g,
            None => self.mk(n.var, FALSE, TRUE),
        };
        let r = self.ite_raw(guard, high, low);
        memo.insert(f, r);
        r
    }

    /// Variables `f` depends on, in order.
    pub fn support(&self, f: NodeRef) -> Vec<VarId> {
        let mut seen = vec![false; self.num_vars()];
        for i in self.reachable(self.raw(f)) {
            let var = self.nodes[i as usize].var;
            if var != TERMINAL {
                seen[var as usize] = true;
            }
        }
        (0..self.num_vars()).filter(|&v| seen[v]).collect()
    }

    fn reachable(&self, root: u32) -> Vec<u32> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![root];
        let mut order = Vec::new();
        while let Some(i) = stack.pop() {
            if !seen.insert(i) {
                continue;
            }
            order.push(i);
            let n = self.nodes[i as usize];
            if n.var != TERMINAL {
                stack.push(n.high);
                stack.push(n.low);
            }
        }
        order
    }

    /// Distinct nodes reachable from `f`, terminals included.
    pub fn node_count(&self, f: NodeRef) -> usize {
        self.reachable(self.raw(f)).len()
    }

    /// Value of `f` under `assignment[v]` for each variable `v`. Every
    /// variable in the support must be set.
    pub fn eval(&self, f: NodeRef, assignment: &[Option<bool>]) -> Result<bool, BddError> {
        for v in self.support(f) {
            if assignment.get(v).copied().flatten().is_none() {
                return Err(BddError::IncompleteAssignment(v));
            }
        }
        Ok(self.eval_with(f, |v| assignment[v].unwrap_or(false)))
    }

    /// Value of `f` where variable `v` takes `value(v)`.
    pub fn eval_with(&self, f: NodeRef, value: impl Fn(VarId) -> bool) -> bool {
        let mut i = self.raw(f);
        loop {
            let n = self.nodes[i as usize];
            if n.var == TERMINAL {
                return i == TRUE;
            }
            i = if value(n.var as usize) { n.high } else { n.low };
        }
    }

    /// Number of satisfying assignments over variables `0..num_vars`; the
    /// support of `f` must lie in that range.
    pub fn sat_count(&self, f: NodeRef, num_vars: usize) -> u128 {
        assert!(num_vars < 128);
        let f = self.raw(f);
        let mut memo: HashMap<u32, u128> = HashMap::new();
        // count(i) = satisfying assignments of the variables from level(i) down
        fn count(m: &Manager, i: u32, n: u32, memo: &mut HashMap<u32, u128>) -> u128 {
            let node = m.nodes[i as usize];
            if node.var == TERMINAL {
                return u128::from(i == TRUE);
            }
            assert!(node.var < n, "support exceeds the counted variables");
            if let Some(&c) = memo.get(&i) {
                return c;
            }
            let level = |j: u32| {
                let v = m.nodes[j as usize].var;
                if v == TERMINAL {
                    n
                } else {
                    v
                }
            };
            let lo = count(m, node.low, n, memo) << (level(node.low) - node.var - 1);
            let hi = count(m, node.high, n, memo) << (level(node.high) - node.var - 1);
            memo.insert(i, lo + hi);
            lo + hi
        }
        let n = num_vars as u32;
        let top = match self.nodes[f as usize].var {
            TERMINAL => n,
            v => v,
        };
        count(self, f, n, &mut memo) << top
    }

    /// Graphviz rendering; dashed edges are the low branches.
    pub fn to_dot(&self, f: NodeRef) -> String {
        let mut out = String::from("digraph bdd {\n");
        let mut nodes = self.reachable(self.raw(f));
        nodes.sort_unstable();
        for i in nodes {
            let n = self.nodes[i as usize];
            if n.var == TERMINAL {
                let _ = writeln!(out, "  n{i} [shape=box,label=\"{}\"];", i == TRUE);
            } else {
                let _ = writeln!(out, "  n{i} [label=\"{}\"];", self.names[n.var as usize]);
                let _ = writeln!(out, "  n{i} -> n{} [style=dashed];", n.low);
                let _ = writeln!(out, "  n{i} -> n{};", n.high);
            }
        }
        out.push_str("}\n");
        out
    }
}
