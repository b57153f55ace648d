//! Linear-inversion quantum state tomography for two qubits and beyond.
//!
//! - [`protocols`] builds measurement sets and their rotation matrices `A`.
//! - [`conditioning`] computes `kappa(A)`, the comparison table and the
//!   distance to the nearest singular matrix.
//! - [`simulate`] draws noisy observations and reconstructs states.
//! - [`optics`] checks the wave-plate, beam-splitter and CNOT algebra of
//!   the two optical setups.
//!
//! ```
//! use qst::conditioning::condition_number;
//! use qst::protocols::protocol_1_optimal;
//!
//! let kappa = condition_number(&protocol_1_optimal().rotation_matrix).unwrap();
//! assert_eq!(kappa.value(), Some(1.0));
//! ```
//!
//! The guide in `book/` walks through each module with runnable examples.

pub mod conditioning;
pub mod error;
pub mod format;
pub mod gates;
pub mod numerics;
pub mod optics;
pub mod protocols;
pub mod simulate;
pub mod states;

pub use error::{QstError, Result};

/// The mdbook chapters, compiled so that their snippets run as doctests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/protocols.md")]
    pub struct Protocols;
    #[doc = include_str!("../../../book/src/conditioning.md")]
    pub struct Conditioning;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/optics.md")]
    pub struct Optics;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
