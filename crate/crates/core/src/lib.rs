//! Numerical laboratory for Möbius-invariant function spaces on the unit
//! circle and the unit disk.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: arcs, Carleson sectors, disk automorphisms, approach regions.
//! * [`functions`]: boundary functions, analytic functions, harmonic extensions.
//! * [`quadrature`]: singular double integrals on arcs and weighted disk integrals.
//! * [`search`]: discretisations of suprema over arcs and over points of the disk.
//! * [`seminorms`]: every seminorm and norm built on the above.
//! * [`carleson`]: Carleson-measure tests for point measures and gradient densities.
//! * [`constructions`]: explicit sequences and series used as examples.
//! * [`multipliers`]: regime classification, multiplier checks, spectra, and
//!   an inequality harness.
//! * [`suite`]: the acceptance experiments, shared by the CLI and the test suite.

pub mod carleson;
pub mod constructions;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod multipliers;
pub mod quadrature;
pub mod search;
pub mod seminorms;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex::Complex64;
