//! Exact state-vector simulation of strong and weak sequential measurements
//! on pre- and post-selected qubits.
//!
//! The crate is layered bottom-up:
//!
//! - [`qcore`]: dense kets and operators on small big-endian qubit registers,
//!   gate embedding, projective branching and counter-based sampling.
//! - [`tsvf`]: two-state vectors, the ABL rule over Kraus sets, weak values,
//!   and the closed-form quantities of the Z-then-X path setup.
//! - [`erasure`]: the system/ancilla/meter circuit that measures one path
//!   operator at any strength, with both erasure branches kept.
//! - [`scenarios`]: the deterministic-path experiment, sweeps, weak-limit
//!   convergence studies and the two-meter correlation check.
//! - [`cli`]: the `seqweak` command-line front end and its CSV/JSON output.
//!
//! Runnable walkthroughs live in `examples/`; start with
//! `cargo run --example deterministic_path`.

pub mod cli;
pub mod erasure;
mod error;
pub mod qcore;
pub mod scenarios;
pub mod table;
pub mod tsvf;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
