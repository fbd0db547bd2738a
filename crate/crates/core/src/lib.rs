//! Difference-operator quantum mechanics on a truncated lattice.
//!
//! The lattice carries forward, backward, symmetric and antisymmetric
//! weighted differences; from them the crate builds the oscillator
//! Hamiltonian, a Klein-Gordon operator on three or four axes, Poincaré
//! generators with their finite transforms, and phase-plane geometry.
//!
//! Each capability has a runnable example:
//!
//! ```text
//! cargo run --release --example lattice_operators
//! cargo run --release --example oscillator_spectrum
//! cargo run --release --example continuum_eigenfunctions
//! cargo run --release --example phase_cell_orbits
//! cargo run --release --example klein_gordon_evolution
//! cargo run --release --example kg_4d_spectrum
//! cargo run --release --example poincare_invariance
//! cargo run --release --example boost_invariance
//! ```

pub mod cli;
pub mod dense;
pub mod error;
pub mod expm;
pub mod geometry;
pub mod hermite;
pub mod klein_gordon;
pub mod lattice;
pub mod oscillator;
pub mod poincare;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
