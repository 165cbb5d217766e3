//! Moment-based detection of non-absolute separability.
//!
//! This crate decides, from a handful of trace functionals, whether a
//! bipartite density matrix can be turned into an entangled (or NPT) state by
//! some global unitary, and whether a quantum channel fails to be absolutely
//! separating. It also builds the channel-discrimination construction in which
//! every non-absolutely-separable probe beats all absolutely separable ones.
//!
//! The crate is `no_std` + `alloc`. File formats, the CLI and thread pools
//! live in the companion `absep` crate.
//!
//! # Layout
//!
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian eigensolver,
//!   determinants, QR, polar projection and Hermitian exponentials.
//! - [`states`]: validated density matrices and the standard example states.
//! - [`maps`]: positive maps (transpose, reduction, custom) applied one-sidedly.
//! - [`unitaries`]: explicit global unitaries, Haar sampling, parameterization
//!   and the Nelder-Mead search for violating unitaries.
//! - [`detection`]: moment vectors, Hankel matrices and the state criteria.
//! - [`channels`]: Kraus channels, depolarizing families, annihilation sweeps.
//! - [`discrimination`]: trace-preserving/annihilating maps and channel pairs.
//!
//! # Example
//!
//! ```
//! use absep_core::detection::{hankel, moments, thm1_test};
//! use absep_core::maps::PositiveMapSpec;
//! use absep_core::states::{example_state, ExampleState};
//! use absep_core::unitaries::{example_unitary, ExampleUnitary};
//!
//! let rho = example_state(ExampleState::Rho1).unwrap();
//! let u = example_unitary(ExampleUnitary::U1).unwrap();
//! let map = PositiveMapSpec::transpose(2);
//! let s = map.normalized_output(&rho, &u).unwrap();
//! let m = moments(&s, 5);
//! assert!(!thm1_test(&m).unwrap().violated);
//! assert!(hankel(2, &m).unwrap().determinant() < 0.0);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channels;
pub mod detection;
pub mod discrimination;
mod error;
pub mod linalg;
pub mod maps;
mod rng;
pub mod states;
pub mod tolerances;
pub mod unitaries;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Spectrum};
pub use tolerances::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
