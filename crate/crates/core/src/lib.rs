//! Synthesis for the Safety LTL fragment.

pub mod bdd;
pub mod dfa;
pub mod game;
pub mod horn;
pub mod ltl;
pub mod pipeline;
pub mod synth;
pub mod transducer;
