//! Covariant quantum state reduction in 1+1 Minkowski space.
//!
//! A measurement observed at a spacetime event reduces the quantum state on
//! the surface of that event's backward light cone and everywhere outside
//! it: the Hellwig-Kraus rule. This crate makes that rule executable at
//! desk scale and verifies what follows from it:
//!
//! * [`spacetime`]: events, intervals, causal relations, and Lorentz
//!   boosts, exact enough to serve as the court of appeal for every
//!   covariance claim.
//! * [`hilbert`]: unnormalized complex state vectors over labeled qubits,
//!   the spin singlet, projections, CNOT interactions, probabilities, and a
//!   purity-based separability oracle.
//! * [`collapse`]: which observations reach a query event, the named
//!   reduction regions of the two-observer geometry, and the effective ket.
//! * [`nondemolition`]: the detector-pair protocol that certifies the
//!   singlet without demolishing it, and the classification of observation
//!   epoch pairs into nondemolitional and demolitional.
//! * [`nosignal`]: exact and Monte Carlo checks that outcome dependence
//!   never becomes a superluminal signal.
//!
//! The `qcone` CLI (a separate crate in this workspace) drives the same
//! engines from JSON scenario files. The book under `book/` walks through
//! the concepts chapter by chapter; its code snippets compile and run as
//! part of this crate's doctests.

#![forbid(unsafe_code)]

pub mod collapse;
pub mod hilbert;
pub mod nondemolition;
pub mod nosignal;
pub mod spacetime;

// Keep the book's code samples honest: every ```rust block in the guide is
// compiled and run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spacetime.md")]
    mod spacetime {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/collapse.md")]
    mod collapse {}
    #[doc = include_str!("../../../book/src/nondemolition.md")]
    mod nondemolition {}
    #[doc = include_str!("../../../book/src/nosignal.md")]
    mod nosignal {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
