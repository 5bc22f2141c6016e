//! Simulation toolkit for homomorphic-encrypted linear-optical quantum walks.
//!
//! Alice hides an occupation pattern in the polarization of one photon per
//! input mode (walkers in `|H⟩`, dummies in `|V⟩`), rotates every photon by a
//! secret SU(2) key and lets Bob run a polarization-independent path unitary.
//! The crate covers the full pipeline:
//!
//! * [`numerics`]: permanents, Hermitian eigendecomposition, polar projection.
//! * [`polarization`]: Jones vectors, SU(2) keys, encryption and measurement.
//! * [`walk`]: multi-photon output distributions and the end-to-end protocol.
//! * [`security`]: encrypted density matrices, Holevo quantities, trace
//!   distances and the random-basis attack.
//! * [`reconstruct`]: synthetic characterization data and unitary recovery.
//! * [`device`]: device files and the two built-in four-mode chips.

pub mod device;
pub mod error;
pub mod exec;
pub mod numerics;
pub mod polarization;
pub mod reconstruct;
pub mod rng;
pub mod security;
pub mod walk;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::ComplexMatrix;
