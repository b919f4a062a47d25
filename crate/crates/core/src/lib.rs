//! Simulation and security analysis of orthogonal-state-based quantum key
//! distribution and secure direct communication protocols: GV and its
//! multi-particle generalizations PP^GV, CL^GV and DLL^GV, alongside the
//! conjugate-coding originals PP, CL and DLL.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] – dense linear algebra for registers of at most
//!   [`qstate::MAX_QUBITS`] qubits.
//! * [`info`] – entropies, Holevo bound, duality quantities and
//!   entanglement measures.
//! * [`attacks`] – eavesdropper interactions and scripted attack scenarios.
//! * [`protocols`] – executable protocol state machines producing
//!   [`protocols::ProtocolTranscript`]s.
//! * [`analysis`] – (θ, λ) security grids, tolerable error search and the
//!   duality / monogamy verification suites.
//! * [`scenario`] – JSON scenario configs and the file-producing runner used
//!   by the `orthoqkd` binary.

pub mod analysis;
pub mod attacks;
pub mod error;
pub mod info;
pub mod protocols;
pub mod qstate;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
