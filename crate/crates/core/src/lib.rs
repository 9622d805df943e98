//! Stabilizer-code construction and fault-tolerance verification toolkit.
//!
//! The crate builds two families of concatenated codes — hybrid code
//! concatenation (HCC) and extended non-uniform code concatenation (ENUCC)
//! over the five-qubit, Steane and 15-qubit Reed-Muller base codes —
//! synthesizes their fault-tolerant gate gadgets, and mechanically checks
//! distance and effective-distance claims at desk scale.
//!
//! Layer map:
//! - [`pauli`] / [`gf2`]: exact symplectic algebra and GF(2) elimination.
//! - [`code`]: stabilizer codes, base-code library, static analyses.
//! - [`circuit`]: gate/circuit IR, Clifford conjugation, fault branching.
//! - [`sv`]: dense state-vector oracle for non-Clifford gadget equivalence.
//! - [`gadget`]: transversal lifts, parity-fold C^kZ(θ) gadgets,
//!   permutation Hadamard, round-robin cross-code CNOT.
//! - [`concat`]: HCC/ENUCC code builders and gadget lifting.
//! - [`ft`]: fault models, decoder, correctability and effective distance.
//! - [`report`]: JSON report plumbing shared with the CLI.

pub mod circuit;
pub mod code;
pub mod concat;
pub mod error;
pub mod ft;
pub mod gadget;
pub mod gf2;
pub mod pauli;
pub mod report;
pub mod sv;

pub use error::FtccError;

/// Toolkit version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default seed for sampled verification runs ("FTCC" in ASCII).
pub const DEFAULT_SEED: u64 = 0x4654_4343;
