//! Boolean synthesis: output functions witnessing a relation between
//! inputs and outputs.

use crate::bdd::{Manager, NodeRef, VarId};

/// One function per output of `outputs`, in the same order, over the
/// remaining variables of `xi` only.
///
/// For every assignment `I` of the other variables: if some outputs satisfy
/// `xi` at `I`, the returned functions do; otherwise they are all false.
/// Outputs are extracted last one first, each from the constraint with the
/// later outputs quantified away, preferring `false` whenever it is
/// allowed; earlier outputs are then substituted back.
pub fn synthesize_outputs(m: &mut Manager, xi: NodeRef, outputs: &[VarId]) -> Vec<NodeRef> {
    let n = outputs.len();
    // constraint[k] = ∃ outputs[k+1..]. xi, still depending on outputs[..=k]
    let mut constraint = vec![xi; n];
    for k in (0..n.saturating_sub(1)).rev() {
        constraint[k] = m.exists(constraint[k + 1], &[outputs[k + 1]]);
    }
    let mut gamma: Vec<NodeRef> = Vec::with_capacity(n);
    for k in 0..n {
        let y = outputs[k];
        let when_false = m.cofactor(constraint[k], y, false);
        let when_true = m.cofactor(constraint[k], y, true);
        let must = m.not(when_false);
        let raw = m.and(must, when_true);
        // earlier outputs are already functions of the inputs alone
        let g = m
            .compose_vector(raw, &outputs[..k], &gamma)
            .expect("one function per earlier output");
        gamma.push(g);
    }
    gamma
}
